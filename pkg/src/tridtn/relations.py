"""The global relation: rho functions, residual audits and the 6x9
relation system with its numeric elimination.

For a side triple with spectral functions X_j (PSI for Dirichlet unknowns,
Y for Poincare-type unknowns) the base relation evaluated at k reads

    sum_j E(-i a_j k) [ c_j(a_j k) X_j(a_j k) + g_j(a_j k) ] = 0,

with rotation factors (a_1, a_2, a_3) = (1, alpha_bar, alpha), coefficients
c_j = i/2 (Dirichlet unknowns PSI_j) or c_j = H_j (Poincare unknowns Y_j),
and known parts g_j = PHI_j resp. F_j + C_j.  The Schwarz-conjugate relation
(valid for real data) replaces E(-i .) by E(+i .), H by Hbar, C by Cbar and
rotates with (1, alpha, alpha_bar).  Evaluating both families at k, alpha k,
alpha_bar k yields six equations in the nine unknowns X_j at the three
rotated arguments; eliminating the six unknowns at alpha k and alpha_bar k
expresses X_2(alpha_bar k) through the three X_j(k), which is the numeric
counterpart of the closed-form elimination identity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SolvabilityError
from .geometry import ALPHA, ALPHA_BAR, exp_E
from .problems import BCKind, ProblemSpec
from .spectral import Kind, SideSampler, corner_term

_GR_ROT = (1.0 + 0.0j, ALPHA_BAR, ALPHA)
_SGR_ROT = (1.0 + 0.0j, ALPHA, ALPHA_BAR)


# -- rho functions and the residual audit ----------------------------------
class GlobalRelation:
    """rho evaluators for a full (Dirichlet + Neumann) trace set."""

    def __init__(self, dirichlet, neumann, lam, side_length):
        self.lam = lam
        self.side_length = side_length
        self._psi = [
            SideSampler(t, Kind.PSI, lam, side_length) for t in neumann
        ]
        self._phi = [
            SideSampler(t, Kind.PHI, lam, side_length) for t in dirichlet
        ]

    def rho(self, side: int, k: complex) -> complex:
        """rho_j(k) = E(-ik) [ (i/2) PSI_j(k) + PHI_j(k) ]."""
        if k == 0:
            raise DomainError("rho undefined at k = 0")
        j = side - 1
        return exp_E(-1j * k, self.lam, self.side_length) * (
            0.5j * self._psi[j].eval(k) + self._phi[j].eval(k)
        )

    def rho_tilde(self, side: int, k: complex) -> complex:
        """rho rotated to the common argument: rho_j(a_j k)."""
        return self.rho(side, _GR_ROT[side - 1] * k)

    def residual(self, k: complex):
        """(|sum_j rho_tilde_j(k)|, scale) with scale = max_j |rho_tilde_j|."""
        vals = [self.rho_tilde(j, k) for j in (1, 2, 3)]
        scale = max(max(abs(v) for v in vals), 1e-300)
        return abs(sum(vals)), scale

    def residual_audit(self, ks):
        """Max relative residual over a sample of spectral points."""
        worst = 0.0
        for k in np.asarray(ks, dtype=complex).ravel():
            r, scale = self.residual(k)
            worst = max(worst, r / scale)
        return worst


# -- the 6x9 relation system ----------------------------------------------
@dataclass(frozen=True)
class RelationSystem:
    """Rows: base relation at (k, alpha k, alpha_bar k), then their Schwarz
    conjugates.  Columns: X_j(w) for j = 1..3 and w in (k, alpha k,
    alpha_bar k), in that order."""

    matrix: np.ndarray
    rhs: np.ndarray
    unknown_labels: tuple
    row_labels: tuple


_ARG_NAMES = {0: "k", 1: "alpha*k", 2: "abar*k"}
_ARG_FACTORS = (1.0 + 0.0j, ALPHA, ALPHA_BAR)


def _column(side_j: int, arg_slot: int) -> int:
    return 3 * arg_slot + (side_j - 1)


class _ProblemSamplers:
    """Cached data transforms of one problem's side data."""

    def __init__(self, problem: ProblemSpec):
        self.problem = problem
        lam, l = problem.lam, problem.side_length
        if problem.is_dirichlet:
            self.kind = "dirichlet"
            self.data = [
                SideSampler(problem.side(j).data, Kind.PHI, lam, l) for j in (1, 2, 3)
            ]
        else:
            self.kind = "poincare"
            self.data = [
                SideSampler(
                    problem.side(j).data,
                    Kind.F_ROBIN,
                    lam,
                    l,
                    beta=problem.side(j).beta,
                )
                for j in (1, 2, 3)
            ]
            self.symbols = [problem.side(j).symbol(lam) for j in (1, 2, 3)]


def relation_system(
    problem: ProblemSpec, k: complex, corner_values=None
) -> RelationSystem:
    """Assemble the 6x9 global-relation system at spectral point k.

    ``corner_values``: optional per-side (q(-l/2), q(l/2)) triples for the
    corner terms of Poincare-type rows.  When omitted, the corner terms are
    dropped, which is exact when the corner-cancellation condition holds and
    an error otherwise.
    """
    if k == 0:
        raise DomainError("relation system undefined at k = 0")
    samplers = _ProblemSamplers(problem)
    lam, l = problem.lam, problem.side_length
    report = problem.admissibility()
    if samplers.kind == "poincare" and corner_values is None:
        if not report.corner_cancelling:
            raise SolvabilityError(
                "corner terms do not cancel; corner_values are required"
            )

    matrix = np.zeros((6, 9), dtype=complex)
    rhs = np.zeros(6, dtype=complex)
    row_labels = []
    for conj_row, rot in ((False, _GR_ROT), (True, _SGR_ROT)):
        for base_slot in range(3):
            row = 3 * conj_row + base_slot
            w = _ARG_FACTORS[base_slot] * k
            row_labels.append(
                ("conj " if conj_row else "") + f"relation at {_ARG_NAMES[base_slot]}"
            )
            for j in (1, 2, 3):
                arg = rot[j - 1] * w
                arg_slot = _slot_of(arg, k)
                sign = 1j if conj_row else -1j
                pref = exp_E(sign * arg, lam, l)
                if samplers.kind == "dirichlet":
                    coeff = -0.5j if conj_row else 0.5j
                    matrix[row, _column(j, arg_slot)] += pref * coeff
                    rhs[row] -= pref * samplers.data[j - 1].eval(arg)
                else:
                    sym = samplers.symbols[j - 1]
                    hval = sym.hbar(arg) if conj_row else sym.h(arg)
                    matrix[row, _column(j, arg_slot)] += pref * hval
                    known = samplers.data[j - 1].eval(arg)
                    if corner_values is not None:
                        side = problem.side(j)
                        known += corner_term(
                            _CornerOnly(corner_values[j - 1]),
                            arg,
                            lam,
                            l,
                            side.beta,
                            conjugated=conj_row,
                        )
                    rhs[row] -= pref * known
    labels = tuple(
        f"{'PSI' if samplers.kind == 'dirichlet' else 'Y'}{j}({_ARG_NAMES[slot]})"
        for slot in range(3)
        for j in (1, 2, 3)
    )
    return RelationSystem(
        matrix=matrix, rhs=rhs, unknown_labels=labels, row_labels=tuple(row_labels)
    )


class _CornerOnly:
    """Minimal trace adapter that only knows its endpoint values."""

    def __init__(self, endpoints):
        self._lo, self._hi = endpoints

    def value(self, s):
        return self._lo if s < 0 else self._hi


def _slot_of(arg: complex, k: complex) -> int:
    ratio = arg / k
    for slot, fac in enumerate(_ARG_FACTORS):
        if abs(ratio - fac) < 1e-9:
            return slot
    raise AssertionError("rotated argument left the three-point orbit")


# -- numeric elimination ---------------------------------------------------
@dataclass(frozen=True)
class Elimination:
    """X_2(abar k) = sum_j coeff[j] X_j(k) + inhom, from the 6x6 solve."""

    coeffs: np.ndarray
    inhom: complex
    condition: float


def eliminate_second_side(
    problem: ProblemSpec, k: complex, corner_values=None
) -> Elimination:
    """Solve the six relations for the unknowns at alpha k / alpha_bar k and
    return the row expressing X_2(alpha_bar k) through the X_j(k)."""
    system = relation_system(problem, k, corner_values=corner_values)
    mat, rhs = system.matrix, system.rhs
    scale = np.max(np.abs(mat), axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    mat = mat / scale[:, None]
    rhs = rhs / scale
    a = mat[:, 3:9]
    b = mat[:, 0:3]
    target = _column(2, 2) - 3  # X_2(abar k) within the eliminated block
    sol_inhom = np.linalg.solve(a, rhs)
    sol_coupling = np.linalg.solve(a, b)
    cond = float(np.linalg.cond(a))
    return Elimination(
        coeffs=-sol_coupling[target, :],
        inhom=complex(sol_inhom[target]),
        condition=cond,
    )
