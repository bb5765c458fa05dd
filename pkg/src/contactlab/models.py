"""Ready-made model charts used throughout the tests and scenarios.

Coordinate conventions:
  * Darboux chart on R^(2n+1): coordinates (q_1..q_n, p_1..p_n, z) with
    lam0 = dz - sum_i p_i dq_i.
  * Torus model on T^2 x R: coordinates (t1, t2, p) with lam = dt1 + p dt2;
    the Reeb flow is rigid translation in t1 and every point lies on a
    closed orbit of period 1.
  * Weighted tube: a solid-torus chart (theta, x, y) around a closed Reeb
    orbit whose transverse plane rotates linearly, the local model of a
    weighted-sphere orbit.
"""

import numpy as np

from .core import ContactChart, FormExpr


def darboux_chart(n: int = 1, scale: float = 1.0) -> ContactChart:
    """Standard chart with lam = scale * (dz - sum p_i dq_i)."""
    dim = 2 * n + 1
    comps = []
    grads = []
    for i in range(n):  # dq_i coefficient: -scale * p_i
        comps.append((lambda k: (lambda x: -scale * x[n + k]))(i))
        g = np.zeros(dim)
        g[n + i] = -scale
        grads.append((lambda v: (lambda x: v))(g.copy()))
    zero = np.zeros(dim)
    for i in range(n):  # dp_i coefficient: 0
        comps.append(lambda x: 0.0)
        grads.append((lambda v: (lambda x: v))(zero))
    comps.append(lambda x: scale)  # dz coefficient
    grads.append((lambda v: (lambda x: v))(zero))
    name = f"darboux(n={n})" if scale == 1.0 else f"{scale:g}*darboux(n={n})"
    return ContactChart(n=n, lam=FormExpr(comps, grads), name=name)


def darboux_flat_dual_formula(n: int, alpha0: float, a, b, x) -> np.ndarray:
    """Printed component formula for the dual field of a constant one-form.

    For alpha = alpha0 dz + sum a_i dq_i + sum b_j dp_j on the standard chart:
    z-component alpha0 + sum p_k b_k, q_i-component b_i, p_j-component
    -a_j - p_j alpha0.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = x[n : 2 * n]
    v = np.zeros(2 * n + 1)
    v[-1] = alpha0 + float(p @ b)
    v[:n] = b
    v[n : 2 * n] = -a - p * alpha0
    return v


def exp_factor_chart(n: int = 1) -> ContactChart:
    """Chart carrying e^z * lam0 with analytic derivatives."""
    dim = 2 * n + 1
    comps = []
    grads = []
    for i in range(n):
        comps.append((lambda k: (lambda x: -np.exp(x[-1]) * x[n + k]))(i))

        def gq(x, k=i):
            g = np.zeros(dim)
            g[n + k] = -np.exp(x[-1])
            g[-1] = -np.exp(x[-1]) * x[n + k]
            return g

        grads.append(gq)
    for i in range(n):
        comps.append(lambda x: 0.0)
        grads.append(lambda x: np.zeros(dim))
    comps.append(lambda x: np.exp(x[-1]))

    def gz(x):
        g = np.zeros(dim)
        g[-1] = np.exp(x[-1])
        return g

    grads.append(gz)
    return ContactChart(n=n, lam=FormExpr(comps, grads), name=f"exp_z*darboux(n={n})")


def torus_chart() -> ContactChart:
    """lam = dt1 + p dt2 on (t1, t2, p); t1 and t2 are unit-period angles."""
    comps = [lambda x: 1.0, lambda x: x[2], lambda x: 0.0]
    grads = [
        lambda x: np.zeros(3),
        lambda x: np.array([0.0, 0.0, 1.0]),
        lambda x: np.zeros(3),
    ]
    return ContactChart(
        n=1, lam=FormExpr(comps, grads), name="torus", periods=(1.0, 1.0, None)
    )


def weighted_tube_chart(w_theta: float, w_fiber: float) -> ContactChart:
    """Solid-torus model of a closed Reeb orbit with linear transverse rotation.

    Coordinates (theta, x, y), theta an angle of period 2*pi/w_theta, with
    lam = (1 + w_fiber*(x^2+y^2)/2) dtheta + (x dy - y dx)/2.

    The central circle {x = y = 0} is a closed Reeb orbit of period
    2*pi/w_theta and the transverse plane rotates with angular speed
    w_fiber, so the linearized return map is a rotation by
    2*pi*w_fiber/w_theta.  This is the local model of a weighted-sphere
    orbit with frequency ratio w_fiber/w_theta.
    """
    c = float(w_fiber)

    comps = [
        lambda x: 1.0 + 0.5 * c * (x[1] ** 2 + x[2] ** 2),
        lambda x: -0.5 * x[2],
        lambda x: 0.5 * x[1],
    ]
    grads = [
        lambda x: np.array([0.0, c * x[1], c * x[2]]),
        lambda x: np.array([0.0, 0.0, -0.5]),
        lambda x: np.array([0.0, 0.5, 0.0]),
    ]
    return ContactChart(
        n=1,
        lam=FormExpr(comps, grads),
        name=f"tube(w={w_theta:g},{w_fiber:g})",
        periods=(2 * np.pi / w_theta, None, None),
    )


def weighted_tube_flow(w_fiber: float, x0, t) -> np.ndarray:
    """Closed-form Reeb flow of weighted_tube_chart: theta advances at unit
    speed, the fiber rotates by -w_fiber * t."""
    x0 = np.asarray(x0, dtype=float)
    c = float(w_fiber)
    ct, st = np.cos(c * t), np.sin(c * t)
    return np.array(
        [x0[0] + t, ct * x0[1] + st * x0[2], -st * x0[1] + ct * x0[2]]
    )


def perturbed_tube_chart(w_theta: float, w_fiber: float, quartic: float) -> ContactChart:
    """Weighted tube with a radius-dependent rotation speed.

    Adds quartic/4 * r^4 to the dtheta coefficient, which makes off-center
    rotation non-resonant and destroys the closed-orbit family away from the
    central circle.
    """
    c = float(w_fiber)
    q = float(quartic)

    def r2(x):
        return x[1] ** 2 + x[2] ** 2

    comps = [
        lambda x: 1.0 + 0.5 * c * r2(x) + 0.25 * q * r2(x) ** 2,
        lambda x: -0.5 * x[2],
        lambda x: 0.5 * x[1],
    ]
    grads = [
        lambda x: np.array(
            [0.0, (c + q * r2(x)) * x[1], (c + q * r2(x)) * x[2]]
        ),
        lambda x: np.array([0.0, 0.0, -0.5]),
        lambda x: np.array([0.0, 0.5, 0.0]),
    ]
    return ContactChart(
        n=1,
        lam=FormExpr(comps, grads),
        name=f"tube(w={w_theta:g},{w_fiber:g})+r4",
        periods=(2 * np.pi / w_theta, None, None),
    )


def standard_darboux_J(chart: ContactChart):
    """Coordinate complex structure on xi for the standard Darboux chart.

    Sends E_i = d/dq_i + p_i d/dz to d/dp_i and d/dp_i to -E_i, and kills
    the Reeb direction.
    """
    n = chart.n

    def J(x):
        x = np.asarray(x, dtype=float)
        p = x[n : 2 * n]
        M = np.zeros((chart.dim, chart.dim))
        for i in range(n):
            # J(E_i) = d/dp_i  with E_i = d/dq_i + p_i d/dz
            M[n + i, i] = 1.0
            M[-1, i] = 0.0
            # J(d/dp_i) = -E_i
            M[i, n + i] = -1.0
            M[-1, n + i] = -p[i]
        return M

    return J
