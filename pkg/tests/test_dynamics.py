"""Flows, closed orbits, return maps, and family scans."""

import numpy as np
import pytest

from contactlab import dynamics
from contactlab.core import ContactChart, FormExpr
from contactlab.dynamics import (
    MorseBottCandidate,
    Nondegenerate,
    ReebOrbit,
    ReturnMap,
    classify_orbit,
    find_closed_orbit,
    flow,
    orbit_family_scan,
    return_map,
)
from contactlab.errors import LeftChartDomain, NoConvergence
from contactlab.models import (
    darboux_chart,
    perturbed_tube_chart,
    torus_chart,
    weighted_tube_chart,
    weighted_tube_flow,
)


def test_flow_standard_chart_is_z_translation():
    ch = darboux_chart(1)
    tr = flow(ch, [0.0, 0.0, 0.0], 1.3)
    assert np.allclose(tr.end, [0.0, 0.0, 1.3], atol=1e-10)
    assert tr.max_reeb_residual < 1e-10


def test_flow_torus_translation():
    ch = torus_chart()
    tr = flow(ch, [0.0, 0.0, 0.0], 0.8)
    assert np.allclose(tr.end, [0.8, 0.0, 0.0], atol=1e-12)
    # p != 0 stays put except t1
    tr2 = flow(ch, [0.1, 0.5, 0.3], 0.4)
    assert np.allclose(tr2.end, [0.5, 0.5, 0.3], atol=1e-12)


def test_flow_matches_closed_form_rotation():
    w2 = 1.41421356
    ch = weighted_tube_chart(1.0, w2)
    x0 = np.array([0.1, 0.25, -0.15])
    tr = flow(ch, x0, 1.0)
    assert np.max(np.abs(tr.end - weighted_tube_flow(w2, x0, 1.0))) < 1e-9


def test_flow_preserves_unit_speed():
    ch = weighted_tube_chart(1.0, 0.7)
    tr = flow(ch, [0.0, 0.3, 0.1], 2.0, steps=100)
    for x in tr.states[::10]:
        lam = ch.lambda_at(x)
        X = dynamics.reeb_solve(ch, x).vector
        assert abs(lam @ X - 1) < 1e-10


def test_flow_leaves_domain():
    ch = ContactChart(
        n=1,
        lam=darboux_chart(1).lam,
        domain=lambda x: abs(x[2]) < 0.5,
    )
    with pytest.raises(LeftChartDomain):
        flow(ch, [0.0, 0.0, 0.0], 1.0)


def test_torus_orbit_found_anywhere():
    ch = torus_chart()
    orb = find_closed_orbit(ch, [0.3, 0.6, 0.0], 1.2)
    assert abs(orb.period - 1.0) < 1e-9
    assert orb.closure_residual < 1e-8
    # also away from p = 0: the whole chart is foliated by period-1 orbits
    orb2 = find_closed_orbit(ch, [0.0, 0.0, 0.25], 0.9)
    assert abs(orb2.period - 1.0) < 1e-9


def test_torus_orbit_with_impossible_winding():
    # demanding closure winding once around t2 cannot be met: the flow is a
    # pure t1-translation, so the t2 residual never moves
    ch = torus_chart()
    with pytest.raises(NoConvergence) as err:
        find_closed_orbit(ch, [0.0, 0.0, 0.3], 1.0, winding=(1, 1, 0))
    assert err.value.residual > 0.5


def test_weighted_short_orbit_period():
    # frequency pair (1, 2): the short orbit closes at 2 pi / 2
    ch = weighted_tube_chart(2.0, 1.0)
    orb = find_closed_orbit(ch, [0.0, 0.1, 0.05], 3.0)
    assert abs(orb.period - np.pi) < 1e-8
    assert np.max(np.abs(orb.base_point[1:])) < 1e-8


def test_orbit_action_equals_period():
    ch = weighted_tube_chart(1.0, 0.9)
    orb = ReebOrbit.from_point(ch, np.zeros(3), 2 * np.pi)
    assert abs(orb.action() - orb.period) < 1e-8
    cht = torus_chart()
    orbt = ReebOrbit.from_point(cht, [0.2, 0.4, 0.7], 1.0)
    assert abs(orbt.action() - 1.0) < 1e-8


def test_return_map_torus_identity():
    ch = torus_chart()
    orb = ReebOrbit.from_point(ch, np.zeros(3), 1.0)
    rm = return_map(ch, orb)
    assert np.max(np.abs(rm.matrix - np.eye(2))) < 1e-8
    assert rm.symplectic_error < 1e-6
    cls = classify_orbit(rm)
    assert isinstance(cls, MorseBottCandidate)
    assert cls.multiplicity == 2


@pytest.mark.parametrize("ratio", [2.0, 1.41421356])
def test_return_map_rotation_eigenvalues(ratio):
    ch = weighted_tube_chart(1.0, ratio)
    orb = ReebOrbit.from_point(ch, np.zeros(3), 2 * np.pi)
    rm = return_map(ch, orb)
    angle = 2 * np.pi * ratio
    expected = np.sort_complex(np.array([np.exp(1j * angle), np.exp(-1j * angle)]))
    got = np.sort_complex(rm.eigenvalues)
    assert np.max(np.abs(got - expected)) < 1e-6
    assert abs(np.linalg.det(rm.matrix) - 1.0) < 1e-8


def test_return_map_symplectic():
    ch = weighted_tube_chart(1.0, 0.31)
    orb = ReebOrbit.from_point(ch, np.zeros(3), 2 * np.pi)
    rm = return_map(ch, orb)
    assert rm.symplectic_error < 1e-6


def test_classify_orbit_contract():
    Om = np.array([[0.0, 1.0], [-1.0, 0.0]])
    rot = np.array([[np.cos(np.pi / 3), -np.sin(np.pi / 3)], [np.sin(np.pi / 3), np.cos(np.pi / 3)]])
    rm = ReturnMap(rot, np.linalg.eigvals(rot), 0, Om, 0.0)
    assert isinstance(classify_orbit(rm), Nondegenerate)
    rm_id = ReturnMap(np.eye(2), np.ones(2, dtype=complex), 2, Om, 0.0)
    cls = classify_orbit(rm_id)
    assert isinstance(cls, MorseBottCandidate) and cls.multiplicity == 2
    # an eigenvalue within half a tolerance of 1 counts as unit
    tol = 1e-6
    m = np.diag([1.0 + 0.5 * tol, 0.37])
    rm_close = ReturnMap(m, np.linalg.eigvals(m), 1, Om, 0.0)
    cls2 = classify_orbit(rm_close, tol=tol)
    assert isinstance(cls2, MorseBottCandidate) and cls2.multiplicity == 1


def test_family_scan_torus_constant_period():
    ch = torus_chart()
    seed = ReebOrbit.from_point(ch, np.zeros(3), 1.0)
    scan = orbit_family_scan(ch, seed, [np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])], n_samples=4, step=0.1)
    assert scan.n_failed == 0
    assert scan.period_spread < 1e-8


def test_family_scan_round_sphere_tube():
    # equal frequencies: every nearby point sits on a period-2pi orbit
    ch = weighted_tube_chart(1.0, 1.0)
    seed = ReebOrbit.from_point(ch, np.zeros(3), 2 * np.pi)
    scan = orbit_family_scan(ch, seed, [np.array([0.0, 1.0, 0.0])], n_samples=4, step=0.05)
    assert scan.n_failed == 0
    assert scan.period_spread < 1e-8


def test_family_scan_detects_broken_family():
    # a radius-dependent rotation speed destroys every off-center orbit
    ch = perturbed_tube_chart(1.0, 1.0, 0.8)
    seed = ReebOrbit.from_point(ch, np.zeros(3), 2 * np.pi)
    scan = orbit_family_scan(ch, seed, [np.array([0.0, 1.0, 0.0])], n_samples=3, step=0.1)
    assert scan.n_failed == 3
    for row in scan.samples:
        assert not row.converged
        assert row.residual > 1e-6


def test_fixed_step_rk4_reproducible():
    ch = weighted_tube_chart(1.0, 0.9)
    a = flow(ch, [0.0, 0.2, 0.1], 1.0, steps=400, method="rk4")
    b = flow(ch, [0.0, 0.2, 0.1], 1.0, steps=400, method="rk4")
    assert np.array_equal(a.states, b.states)
    c = flow(ch, [0.0, 0.2, 0.1], 1.0, steps=400)
    assert np.max(np.abs(a.end - c.end)) < 1e-8


def test_off_center_orbit_action():
    # resonant tube: orbits exist through every point; action still equals
    # the period even when the loop winds through the rotating fiber
    ch = weighted_tube_chart(1.0, 1.0)
    orb = find_closed_orbit(ch, [0.1, 0.25, -0.1], 6.2, fix_point=True)
    assert abs(orb.period - 2 * np.pi) < 1e-8
    assert abs(orb.action() - orb.period) < 1e-8
