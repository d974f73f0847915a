import math

import numpy as np
import pytest

from tridtn.errors import DomainError
from tridtn.geometry import TriangleGeometry
from tridtn.oracle import all_traces, poincare_trace
from tridtn.problems import ProblemSpec, SideCondition, BCKind, dirichlet_problem
from tridtn.relations import GlobalRelation, eliminate_second_side, relation_system

from conftest import manufactured_families, spectral_points


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_global_relation_residual(lam, geom, rng):
    ks = spectral_points(rng, 25)
    for sol in manufactured_families(lam):
        d, n = all_traces(sol, geom)
        rel = GlobalRelation(d, n, lam, 1.0)
        assert rel.residual_audit(ks) < 1e-10


def test_rho_tilde_is_rotated_rho(geom):
    sol = manufactured_families(1.0)[0]
    d, n = all_traces(sol, geom)
    rel = GlobalRelation(d, n, 1.0, 1.0)
    k = 1.1 - 0.6j
    from tridtn.geometry import ALPHA, ALPHA_BAR

    assert abs(rel.rho_tilde(1, k) - rel.rho(1, k)) == 0.0
    assert abs(rel.rho_tilde(2, k) - rel.rho(2, ALPHA_BAR * k)) == 0.0
    assert abs(rel.rho_tilde(3, k) - rel.rho(3, ALPHA * k)) == 0.0


def test_rho_rejects_origin(geom):
    sol = manufactured_families(1.0)[0]
    d, n = all_traces(sol, geom)
    rel = GlobalRelation(d, n, 1.0, 1.0)
    with pytest.raises(DomainError):
        rel.rho(1, 0.0)


def test_relation_system_consistency_dirichlet(geom, rng):
    """The 6x9 system must annihilate the exact spectral unknowns."""
    from tridtn.spectral import Kind, SideSampler
    from tridtn.geometry import ALPHA, ALPHA_BAR

    lam = 1.0
    sol = manufactured_families(lam)[1]
    d, n = all_traces(sol, geom)
    problem = dirichlet_problem(lam, geom, d)
    psi = [SideSampler(t, Kind.PSI, lam, 1.0) for t in n]
    for _ in range(5):
        k = complex(spectral_points(rng, 1)[0])
        system = relation_system(problem, k)
        x = np.array(
            [psi[j].eval(fac * k) for fac in (1.0, ALPHA, ALPHA_BAR) for j in range(3)]
        )
        resid = system.matrix @ x - system.rhs
        scale = np.max(np.abs(system.matrix)) * np.max(np.abs(x))
        assert np.max(np.abs(resid)) < 1e-10 * max(1.0, scale)


def test_elimination_reproduces_psi2(geom, rng):
    """Numeric elimination recovers PSI_2(abar k) from the PSI_j(k)."""
    from tridtn.spectral import Kind, SideSampler
    from tridtn.geometry import ALPHA_BAR

    lam = 1.0
    sol = manufactured_families(lam)[0]
    d, n = all_traces(sol, geom)
    problem = dirichlet_problem(lam, geom, d)
    psi = [SideSampler(t, Kind.PSI, lam, 1.0) for t in n]
    for _ in range(5):
        k = complex(spectral_points(rng, 1, r_lo=0.5, r_hi=1.5)[0])
        elim = eliminate_second_side(problem, k)
        want = psi[1].eval(ALPHA_BAR * k)
        got = sum(c * psi[j].eval(k) for j, c in enumerate(elim.coeffs)) + elim.inhom
        assert abs(got - want) < 1e-8 * max(1.0, abs(want))


def test_poincare_rows_need_corner_values(geom):
    """Non-cancelling corner terms must be rejected without corner data."""
    lam = 1.0
    sol = manufactured_families(lam)[0]
    # betas differing by an odd multiple of pi/3 are admissible but the
    # corner terms no longer cancel
    b1, b2, b3 = 0.4, 0.4 + math.pi / 3.0, 0.4
    g = 0.0
    sides = tuple(
        SideCondition(
            BCKind.POINCARE,
            poincare_trace(sol, geom, j, beta, g),
            beta=beta,
            gamma=g,
        )
        for j, beta in zip((1, 2, 3), (b1, b2, b3))
    )
    problem = ProblemSpec(lam=lam, geometry=geom, sides=sides)
    report = problem.admissibility()
    assert report.admissible and not report.corner_cancelling
    from tridtn.errors import SolvabilityError

    with pytest.raises(SolvabilityError):
        relation_system(problem, 1.0 + 0.5j)
