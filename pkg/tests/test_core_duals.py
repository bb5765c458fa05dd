"""Dual isomorphism, projections, and Darboux-chart identities."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactlab import core
from contactlab.errors import SingularChart
from contactlab.models import darboux_chart, darboux_flat_dual_formula, exp_factor_chart


def rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))


def test_reeb_field_standard_chart():
    ch = darboux_chart(1)
    for x in ([0.0, 0.0, 0.0], [0.4, -1.2, 3.0]):
        X = core.reeb_field(ch, x)
        assert np.allclose(X, [0, 0, 1], atol=1e-12)


def test_reeb_field_scaled_chart():
    c = 2.5
    ch = darboux_chart(1, scale=c)
    X = core.reeb_field(ch, [0.3, 0.7, -0.2])
    assert np.allclose(X, [0, 0, 1 / c], atol=1e-12)


def test_reeb_field_exp_factor_chart():
    # oracle: the defining equations themselves, checked by substitution
    ch = exp_factor_chart(1)
    x = np.array([0.2, -0.5, 0.3])
    X = core.reeb_field(ch, x)
    expected = np.exp(-x[2]) * np.array([0.0, 0.5, 1.0])  # e^-z (dz - p dp)
    assert np.allclose(X, expected, atol=1e-9)
    L = ch.lambda_at(x)
    D = ch.dlambda_at(x)
    assert abs(L @ X - 1) < 1e-10
    assert np.max(np.abs(D.T @ X)) < 1e-10


def test_reeb_residual_reported():
    ch = darboux_chart(2)
    sol = core.reeb_solve(ch, np.zeros(5))
    assert sol.residual < 1e-10
    assert np.isfinite(sol.cond)


def test_project_xi_examples():
    ch = darboux_chart(1)
    x = np.array([0.1, 2.0, 0.0])  # p = 2
    X = core.reeb_field(ch, x)
    # kernel of the projection
    assert np.allclose(core.project_xi(ch, X, x), 0, atol=1e-12)
    # xi is fixed
    Z = np.array([1.0, 0.3, 2.0])  # lam(Z) = 1*(-p) + 2 = 0 at p = 2
    assert abs(ch.lambda_at(x) @ Z) < 1e-14
    assert np.allclose(core.project_xi(ch, Z, x), Z, atol=1e-12)
    # worked example: d/dz + d/dq at p = 2 -> d/dq + 2 d/dz
    Z2 = np.array([1.0, 0.0, 1.0])
    assert np.allclose(core.project_xi(ch, Z2, x), [1.0, 0.0, 2.0], atol=1e-12)


def test_project_xi_idempotent():
    ch = darboux_chart(2)
    g = rng(3)
    for _ in range(20):
        x = g.uniform(-1, 1, 5)
        Z = g.uniform(-1, 1, 5)
        once = core.project_xi(ch, Z, x)
        twice = core.project_xi(ch, once, x)
        assert np.max(np.abs(twice - once)) < 1e-12


def test_flat_dual_darboux_values():
    ch = darboux_chart(1)
    x = np.array([0.7, 1.3, -0.4])
    # flat(lam) = Reeb field
    assert np.allclose(core.flat_dual(ch, ch.lambda_at(x), x), [0, 0, 1], atol=1e-11)
    # alpha = dq1 -> -d/dp1
    assert np.allclose(core.flat_dual(ch, [1.0, 0, 0], x), [0, -1, 0], atol=1e-11)
    # alpha = dp1 -> p1 d/dz + d/dq1
    assert np.allclose(core.flat_dual(ch, [0, 1.0, 0], x), [1.0, 0, x[1]], atol=1e-11)


def test_sharp_dual_follows_defining_equation():
    # The defining equation gives sharp(-d/dp1) = +dq1; the printed inverse
    # formula has the opposite sign and is not used as an oracle.
    ch = darboux_chart(1)
    x = np.array([-0.2, 0.9, 0.5])
    assert np.allclose(core.sharp_dual(ch, [0, -1.0, 0], x), [1.0, 0, 0], atol=1e-12)
    # sharp(Reeb) = lam
    X = core.reeb_field(ch, x)
    assert np.allclose(core.sharp_dual(ch, X, x), ch.lambda_at(x), atol=1e-11)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_round_trips(n):
    ch = darboux_chart(n)
    g = rng(10 + n)
    worst = 0.0
    for _ in range(100):
        x = g.uniform(-1, 1, ch.dim)
        a = g.uniform(-1, 1, ch.dim)
        v = core.flat_dual(ch, a, x)
        worst = max(worst, float(np.max(np.abs(core.sharp_dual(ch, v, x) - a))))
        X = g.uniform(-1, 1, ch.dim)
        al = core.sharp_dual(ch, X, x)
        worst = max(worst, float(np.max(np.abs(core.flat_dual(ch, al, x) - X))))
    assert worst < 1e-9


def test_lambda_of_flat_equals_alpha_of_reeb():
    ch = darboux_chart(2)
    g = rng(4)
    for _ in range(50):
        x = g.uniform(-1, 1, 5)
        a = g.uniform(-1, 1, 5)
        lhs = ch.lambda_at(x) @ core.flat_dual(ch, a, x)
        rhs = a @ core.reeb_field(ch, x)
        assert abs(lhs - rhs) < 1e-10


@pytest.mark.parametrize("n", [1, 2])
def test_flat_dual_component_formula(n):
    ch = darboux_chart(n)
    g = rng(20 + n)
    for _ in range(50):
        x = g.uniform(-2, 2, ch.dim)
        coeffs = g.uniform(-1, 1, ch.dim)
        got = core.flat_dual(ch, coeffs, x)
        ref = darboux_flat_dual_formula(n, coeffs[-1], coeffs[:n], coeffs[n : 2 * n], x)
        assert np.max(np.abs(got - ref)) < 1e-10


def test_hamiltonian_dual_formula():
    # flat(dh) components from the printed special case, h = q1*p1 + z^2
    ch = darboux_chart(1)
    x = np.array([0.5, -1.1, 0.8])
    q, p, z = x

    def h(y):
        return y[0] * y[1] + y[2] ** 2

    dh = core.fd_gradient(h, x)
    got = core.flat_dual(ch, dh, x)
    hz, hq, hp = 2 * z, p, q
    expected = np.array([hp, -hq - p * hz, hz + p * hp])
    assert np.max(np.abs(got - expected)) < 1e-9


def test_singular_chart_raises():
    from contactlab.core import ContactChart, FormExpr

    degenerate = ContactChart(n=1, lam=FormExpr.constant([0.0, 0.0, 1.0]))
    with pytest.raises(SingularChart):
        core.reeb_field(degenerate, np.zeros(3))


def test_contact_volume_sign_consistent():
    ch = darboux_chart(2)
    g = rng(6)
    pts = [g.uniform(-2, 2, 5) for _ in range(20)]
    diag = core.chart_diagnostics(ch, pts)
    assert diag.sign_consistent
    assert diag.min_abs_volume > 0.5
    assert diag.max_reeb_residual < 1e-10


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_duals_inverse_property(n, seed):
    ch = darboux_chart(n)
    g = rng(seed)
    x = g.uniform(-1, 1, ch.dim)
    a = g.uniform(-1, 1, ch.dim)
    v = core.flat_dual(ch, a, x)
    assert np.max(np.abs(core.sharp_dual(ch, v, x) - a)) < 1e-9
