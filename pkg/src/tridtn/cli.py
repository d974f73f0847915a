"""Command-line front end.

Subcommands:

* ``solve``    -- compute the unknown boundary traces for the configured
                  problem and write them as CSV plus a run manifest,
* ``verify``   -- global-relation residual audit of user-supplied full
                  (Dirichlet + Neumann) trace sets,
* ``interior`` -- evaluate the interior field on a triangular point grid,
* ``sweep``    -- rerun the solver over a truncation ladder and tabulate
                  the successive differences,
* ``oracle``   -- compare the solver output against the finite-difference
                  reference solution.

Configuration is a single JSON document (schema in the README); every run
writes a manifest that reproduces it byte-for-byte.  Exit codes: 0 on
success, 2 for configuration errors, 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, TriDtnError
from .expressions import expression_trace
from .fdgrid import fd_solve
from .geometry import TriangleGeometry
from .interior import TraceSet, fokas_eval, greens_eval
from .poincare import mixed_nr_trace, symmetric_dirichlet_integral
from .problems import BCKind, ProblemSpec, SideCondition
from .relations import GlobalRelation
from .series import (
    general_dirichlet_dtn,
    neumann_to_dirichlet,
    symmetric_dirichlet_dtn,
)
from .traces import BoundaryTrace

_SOLVERS = ("series", "integral", "greens", "fokas", "fd-oracle")


# -- configuration ----------------------------------------------------------
def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    for key in ("lam", "side_length", "bc"):
        if key not in cfg:
            raise ConfigError(f"config is missing required key {key!r}")
    if not isinstance(cfg["bc"], list) or len(cfg["bc"]) != 3:
        raise ConfigError("config key 'bc' must list exactly three sides")
    return cfg


def _data_trace(entry: dict, side: int, side_length: float) -> BoundaryTrace:
    data = entry.get("data", "0")
    if isinstance(data, str):
        return expression_trace(data, side, side_length)
    if isinstance(data, dict) and "samples" in data:
        from scipy.interpolate import CubicSpline

        try:
            table = np.loadtxt(data["samples"], delimiter=",", skiprows=1, ndmin=2)
        except OSError as exc:
            raise ConfigError(f"cannot read samples {data['samples']}: {exc}") from exc
        spline = CubicSpline(table[:, 0], table[:, 1])
        return BoundaryTrace(side=side, value=spline, derivative=spline.derivative())
    raise ConfigError(f"side {side}: 'data' must be an expression or a samples file")


def build_problem(cfg: dict) -> ProblemSpec:
    lam = float(cfg["lam"])
    geom = TriangleGeometry(float(cfg["side_length"]))
    sides = []
    for side, entry in enumerate(cfg["bc"], start=1):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ConfigError(f"side {side}: each bc entry needs a 'kind'")
        try:
            kind = BCKind(entry["kind"])
        except ValueError as exc:
            raise ConfigError(f"side {side}: unknown bc kind {entry['kind']!r}") from exc
        trace = _data_trace(entry, side, geom.side_length)
        kwargs = {}
        if "gamma" in entry:
            kwargs["gamma"] = float(entry["gamma"])
        if "beta" in entry:
            kwargs["beta"] = float(entry["beta"])
        try:
            sides.append(SideCondition(kind, trace, **kwargs))
        except TriDtnError as exc:
            raise ConfigError(f"side {side}: {exc}") from exc
    try:
        spec = ProblemSpec(lam=lam, geometry=geom, sides=tuple(sides))
    except TriDtnError as exc:
        raise ConfigError(str(exc)) from exc
    report = spec.admissibility()
    if not report.admissible:
        raise ConfigError(
            "problem fails the admissibility conditions: "
            + "; ".join(report.violations)
        )
    return spec


def _is_symmetric(cfg: dict) -> bool:
    datas = [entry.get("data", "0") for entry in cfg["bc"]]
    return all(isinstance(d, str) for d in datas) and len(set(datas)) == 1


# -- solver dispatch --------------------------------------------------------
def _solve_traces(spec: ProblemSpec, cfg: dict, solver: str, n: int, order):
    """Returns (dict side -> computed BoundaryTrace, manifest details)."""
    kinds = [side.kind for side in spec.sides]
    details = {"solver": solver, "truncation": n}
    if all(k == BCKind.DIRICHLET for k in kinds):
        data = tuple(side.data for side in spec.sides)
        if solver == "integral":
            if not _is_symmetric(cfg):
                raise ConfigError("the integral solver needs symmetric Dirichlet data")
            trace = symmetric_dirichlet_integral(
                data[0], spec.lam, spec.side_length, n_max=n
            )
            return {1: trace, 2: trace, 3: trace}, details
        if _is_symmetric(cfg):
            trace = symmetric_dirichlet_dtn(
                data[0], spec.lam, spec.side_length, n_max=n, order=order
            )
            return {1: trace, 2: trace, 3: trace}, details
        out = general_dirichlet_dtn(
            data, spec.lam, spec.side_length, m_max=n, order=order
        )
        return dict(zip((1, 2, 3), out)), details
    if all(k == BCKind.NEUMANN for k in kinds):
        data = tuple(side.data for side in spec.sides)
        out = neumann_to_dirichlet(
            data, spec.lam, spec.side_length, m_max=n, order=order
        )
        return dict(zip((1, 2, 3), out)), details
    if kinds == [BCKind.ROBIN, BCKind.NEUMANN, BCKind.NEUMANN]:
        count = max(n, 8)
        details["truncation"] = count
        trace = mixed_nr_trace(spec, count=count)
        return {2: trace}, details
    raise ConfigError(
        "unsupported side-condition combination: "
        + ", ".join(k.value for k in kinds)
    )


# -- output helpers ---------------------------------------------------------
def _sample_grid(side_length: float, n_samples: int):
    return np.linspace(-side_length / 2.0, side_length / 2.0, n_samples + 1)


def write_trace_csv(path: Path, s_grid, columns: dict):
    with open(path, "w", newline="\n") as stream:
        stream.write("s," + ",".join(f"side{j}" for j in sorted(columns)) + "\n")
        cols = [np.asarray([float(columns[j](s)) for s in s_grid]) for j in sorted(columns)]
        for row, s in enumerate(s_grid):
            vals = ",".join(f"{c[row]:.17e}" for c in cols)
            stream.write(f"{s:.17e},{vals}\n")


def write_manifest(path: Path, manifest: dict):
    with open(path, "w", newline="\n") as stream:
        json.dump(manifest, stream, sort_keys=True, indent=2)
        stream.write("\n")


def _audit_points(rng, side_length: float, count: int):
    radii = rng.uniform(0.5, 3.0, size=count) * (2.0 / side_length)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=count)
    return radii * np.exp(1j * angles)


def _full_trace_audit(spec, computed, cfg, seed: int):
    """Global-relation residual of known data plus computed traces."""
    kinds = [side.kind for side in spec.sides]
    if all(k == BCKind.DIRICHLET for k in kinds):
        dirichlet = [spec.side(j).data for j in (1, 2, 3)]
        neumann = [computed[j] for j in (1, 2, 3)]
    elif all(k == BCKind.NEUMANN for k in kinds):
        dirichlet = [computed[j] for j in (1, 2, 3)]
        neumann = [spec.side(j).data for j in (1, 2, 3)]
    else:
        return None  # mixed runs produce a single side; no full trace set
    rng = np.random.default_rng(seed)
    ks = _audit_points(rng, spec.side_length, 20)
    rel = GlobalRelation(dirichlet, neumann, spec.lam, spec.side_length)
    return float(rel.residual_audit(ks))


# -- subcommands ------------------------------------------------------------
def _cmd_solve(cfg, args, out_dir: Path) -> int:
    spec = build_problem(cfg)
    solver = args.solver or cfg.get("solver", "series")
    if solver not in ("series", "integral"):
        raise ConfigError(f"solver {solver!r} is not a trace solver (use 'interior')")
    n = int(args.truncation or cfg.get("truncation", 64))
    order = args.quadrature or cfg.get("quadrature")
    computed, details = _solve_traces(spec, cfg, solver, n, order)
    n_samples = int(cfg.get("samples", 256))
    s_grid = _sample_grid(spec.side_length, n_samples)
    write_trace_csv(out_dir / "traces.csv", s_grid, computed)
    audit = _full_trace_audit(spec, computed, cfg, args.seed)
    manifest = {
        "command": "solve",
        "config": cfg,
        "details": details,
        "residual_audit": audit,
        "samples": n_samples,
        "seed": args.seed,
        "version": __version__,
    }
    write_manifest(out_dir / "manifest.json", manifest)
    return 0


def _cmd_verify(cfg, args, out_dir: Path) -> int:
    if "complement" not in cfg or len(cfg["complement"]) != 3:
        raise ConfigError("verify needs a 'complement' list with the other trace kind")
    geom = TriangleGeometry(float(cfg["side_length"]))
    lam = float(cfg["lam"])
    first = [
        _data_trace(entry, j, geom.side_length)
        for j, entry in enumerate(cfg["bc"], start=1)
    ]
    second = [
        _data_trace(entry, j, geom.side_length)
        for j, entry in enumerate(cfg["complement"], start=1)
    ]
    kinds = {entry.get("kind") for entry in cfg["bc"]}
    if kinds == {"dirichlet"}:
        dirichlet, neumann = first, second
    elif kinds == {"neumann"}:
        dirichlet, neumann = second, first
    else:
        raise ConfigError("verify expects 'bc' to be all dirichlet or all neumann")
    rng = np.random.default_rng(args.seed)
    ks = _audit_points(rng, geom.side_length, int(cfg.get("audit_points", 50)))
    rel = GlobalRelation(dirichlet, neumann, lam, geom.side_length)
    rows = []
    for k in ks:
        resid, scale = rel.residual(complex(k))
        rows.append((complex(k), resid / scale))
    worst = max(r for _, r in rows)
    with open(out_dir / "audit.csv", "w", newline="\n") as stream:
        stream.write("re_k,im_k,relative_residual\n")
        for k, r in rows:
            stream.write(f"{k.real:.17e},{k.imag:.17e},{r:.17e}\n")
    manifest = {
        "command": "verify",
        "config": cfg,
        "seed": args.seed,
        "version": __version__,
        "worst_relative_residual": worst,
    }
    write_manifest(out_dir / "manifest.json", manifest)
    return 0


def _cmd_interior(cfg, args, out_dir: Path) -> int:
    spec = build_problem(cfg)
    solver = args.solver or cfg.get("solver", "greens")
    if solver not in ("greens", "fokas"):
        raise ConfigError("interior evaluation needs solver 'greens' or 'fokas'")
    n = int(args.truncation or cfg.get("truncation", 64))
    computed, details = _solve_traces(cfg=cfg, spec=spec, solver="series", n=n, order=None)
    kinds = [side.kind for side in spec.sides]
    if all(k == BCKind.DIRICHLET for k in kinds):
        traces = TraceSet(
            geometry=spec.geometry,
            dirichlet=tuple(spec.side(j).data for j in (1, 2, 3)),
            neumann=tuple(computed[j] for j in (1, 2, 3)),
        )
    elif all(k == BCKind.NEUMANN for k in kinds):
        traces = TraceSet(
            geometry=spec.geometry,
            dirichlet=tuple(computed[j] for j in (1, 2, 3)),
            neumann=tuple(spec.side(j).data for j in (1, 2, 3)),
        )
    else:
        raise ConfigError("interior evaluation needs a Dirichlet or Neumann problem")
    margin_frac = float(cfg.get("interior", {}).get("margin", 0.1))
    divisions = int(cfg.get("interior", {}).get("divisions", 8))
    margin = margin_frac * spec.side_length
    geom = spec.geometry
    evaluator = greens_eval if solver == "greens" else fokas_eval
    rows = []
    from .fdgrid import TriangularGrid

    lattice = TriangularGrid(spec.side_length, divisions)
    for (i, j) in lattice.nodes():
        z = lattice.point(i, j)
        if geom.boundary_margin(z) >= margin:
            rows.append((z, evaluator(traces, spec.lam, z)))
    with open(out_dir / "interior.csv", "w", newline="\n") as stream:
        stream.write("x,y,value\n")
        for z, v in rows:
            stream.write(f"{z.real:.17e},{z.imag:.17e},{v:.17e}\n")
    manifest = {
        "command": "interior",
        "config": cfg,
        "details": details,
        "margin": margin,
        "points": len(rows),
        "seed": args.seed,
        "solver": solver,
        "version": __version__,
    }
    write_manifest(out_dir / "manifest.json", manifest)
    return 0


def _cmd_sweep(cfg, args, out_dir: Path) -> int:
    spec = build_problem(cfg)
    solver = args.solver or cfg.get("solver", "series")
    ladder = cfg.get("sweep", [16, 32, 64])
    if not isinstance(ladder, list) or len(ladder) < 2:
        raise ConfigError("config key 'sweep' must list at least two truncations")
    ladder = sorted(int(n) for n in ladder)
    n_samples = int(cfg.get("samples", 256))
    s_grid = _sample_grid(spec.side_length, n_samples)
    runs = {}
    for n in ladder:
        computed, _ = _solve_traces(spec, cfg, solver, n, None)
        runs[n] = {
            j: np.asarray([float(tr(s)) for s in s_grid]) for j, tr in computed.items()
        }
    finest = runs[ladder[-1]]
    with open(out_dir / "sweep.csv", "w", newline="\n") as stream:
        stream.write("truncation,max_diff_to_finest\n")
        for n in ladder[:-1]:
            delta = max(
                float(np.max(np.abs(runs[n][j] - finest[j]))) for j in finest
            )
            stream.write(f"{n},{delta:.17e}\n")
    manifest = {
        "command": "sweep",
        "config": cfg,
        "ladder": ladder,
        "seed": args.seed,
        "version": __version__,
    }
    write_manifest(out_dir / "manifest.json", manifest)
    return 0


def _cmd_oracle(cfg, args, out_dir: Path) -> int:
    spec = build_problem(cfg)
    solver = args.solver or cfg.get("solver", "series")
    n = int(args.truncation or cfg.get("truncation", 64))
    computed, details = _solve_traces(spec, cfg, solver, n, None)
    h = float(cfg.get("oracle", {}).get("h", spec.side_length / 64))
    grid_solution = fd_solve(spec, h)
    margin = float(cfg.get("oracle", {}).get("corner_margin", 0.02)) * spec.side_length
    with open(out_dir / "oracle.csv", "w", newline="\n") as stream:
        stream.write("side,max_abs_difference\n")
        worst = 0.0
        for j in sorted(computed):
            s, fd_vals = grid_solution.traces[j]
            keep = (s > -spec.side_length / 2 + margin) & (
                s < spec.side_length / 2 - margin
            )
            ours = np.asarray([float(computed[j](x)) for x in s[keep]])
            delta = float(np.max(np.abs(ours - fd_vals[keep])))
            worst = max(worst, delta)
            stream.write(f"{j},{delta:.17e}\n")
    manifest = {
        "command": "oracle",
        "config": cfg,
        "details": details,
        "gauge_fixed": grid_solution.gauge_fixed,
        "grid_spacing": h,
        "seed": args.seed,
        "version": __version__,
        "worst_difference": worst,
    }
    write_manifest(out_dir / "manifest.json", manifest)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "interior": _cmd_interior,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tridtn",
        description="Dirichlet-to-Neumann maps and interior fields on an "
        "equilateral triangle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--solver", choices=_SOLVERS, default=None)
        p.add_argument("--truncation", type=int, default=None)
        p.add_argument("--quadrature", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, args, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TriDtnError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
