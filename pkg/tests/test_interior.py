import math

import numpy as np
import pytest

from tridtn.errors import AccuracyError, DomainError, ParameterError
from tridtn.geometry import TriangleGeometry, mu
from tridtn.interior import (
    InteriorPoint,
    RayContour,
    TraceSet,
    eigensolution,
    eigensolution_mode_root,
    fokas_eval,
    greens_eval,
    kernel_K,
    symmetric_interior,
)
from tridtn.oracle import all_traces, symmetric_corner_compatible

from conftest import manufactured_families


def interior_points(geom, rng, count, margin=0.1):
    out = []
    while len(out) < count:
        z = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
        if geom.boundary_margin(z) >= margin * geom.side_length:
            out.append(z)
    return out


def test_interior_point_locate(geom):
    p = InteriorPoint.locate(0.05 + 0.02j, geom)
    assert p.margin > 0
    with pytest.raises(DomainError):
        InteriorPoint.locate(1.0 + 1.0j, geom)


def test_kernel_k_branches():
    assert abs(kernel_K(1.0, 0.0) - 0.0) < 1e-15
    assert kernel_K(0.5, 2.0) > 0
    with pytest.raises(DomainError):
        kernel_K(0.0, 1.0)
    with pytest.raises(DomainError):
        kernel_K(1.0, -1.0)


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_greens_eval_manufactured(lam, geom, rng):
    sol = manufactured_families(lam)[0]
    traces = TraceSet.from_solution(sol, geom)
    for z in interior_points(geom, rng, 6):
        got = greens_eval(traces, lam, z)
        assert abs(got - sol.q(z)) < 1e-9 * max(1.0, abs(sol.q(z)))


def test_greens_constant_identity(geom):
    # lam = 0, q = 1: the double-layer term must integrate to -2 pi exactly
    from tridtn.traces import BoundaryTrace

    traces = TraceSet(
        geometry=geom,
        dirichlet=tuple(BoundaryTrace.constant(j, 1.0) for j in (1, 2, 3)),
        neumann=tuple(BoundaryTrace.zero(j) for j in (1, 2, 3)),
    )
    assert abs(greens_eval(traces, 0.0, 0.03 - 0.04j) - 1.0) < 1e-12


def test_greens_margin_guard(geom):
    sol = manufactured_families(1.0)[0]
    traces = TraceSet.from_solution(sol, geom)
    z = geom.side_point(1, 0.0) - 1e-5 * geom.side_normal(1)
    with pytest.raises(AccuracyError):
        greens_eval(traces, 1.0, z)


def test_fokas_eval_manufactured(geom, rng):
    lam = 1.0
    for sol in manufactured_families(lam)[:2]:
        traces = TraceSet.from_solution(sol, geom)
        for z in interior_points(geom, rng, 4):
            got = fokas_eval(traces, lam, z)
            assert abs(got - sol.q(z)) < 1e-6 * max(1.0, abs(sol.q(z)))


def test_fokas_rejects_lambda_zero(geom):
    sol = manufactured_families(0.0)[0]
    traces = TraceSet.from_solution(sol, geom)
    with pytest.raises(ParameterError):
        fokas_eval(traces, 0.0, 0.0 + 0.0j)


def test_symmetric_interior_manufactured(geom, rng):
    lam = 1.0
    sol = symmetric_corner_compatible(lam, 1.0)
    d, _ = all_traces(sol, geom)
    for z in interior_points(geom, rng, 4):
        got = symmetric_interior(d[0], lam, z, geometry=geom, n_max=48)
        assert abs(got - sol.q(z)) < 1e-5 * max(1.0, abs(sol.q(z)))


def test_ray_contour_covers_truncation():
    contour = RayContour(side_length=1.0, truncation=30.0)
    r, w = contour.radii()
    assert r[0] > 0 and r[-1] <= 30.0
    assert abs(np.sum(w) - (30.0 - r[0] + w[0] * 0)) < 1.0  # weights sum ~ length
    k, kw = contour.nodes(2)
    assert abs(np.angle(k[0]) - math.pi / 6.0) < 1e-12


def test_eigensolution_matches_mode_root(geom, rng):
    lam = 1.0
    for n in (-2, 1, 3):
        for sign in (1, -1):
            s_n = eigensolution_mode_root(n, lam, sign, 1.0)
            assert abs(mu(s_n, lam) - 2j * math.pi * n) < 1e-10
            for z in interior_points(geom, rng, 3):
                direct = eigensolution(n, lam, sign, z, 1.0)
                via_root = np.exp(1j * s_n * z + lam * np.conj(z) / (1j * s_n))
                assert abs(direct - via_root) < 1e-10 * max(1.0, abs(direct))


def test_eigensolution_solves_pde():
    lam, n, h = 1.0, 2, 1e-4
    f = lambda z: eigensolution(n, lam, 1, z, 1.0)
    z0 = 0.05 + 0.02j
    lap = (
        f(z0 + h) + f(z0 - h) + f(z0 + 1j * h) + f(z0 - 1j * h) - 4.0 * f(z0)
    ) / h**2
    assert abs(lap - 4.0 * lam * f(z0)) < 1e-4 * max(1.0, abs(f(z0)))
