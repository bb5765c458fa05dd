"""Model-neighborhood construction over a Morse-Bott contact set-up.

Given a base manifold Q carrying a pre-contact form theta (d theta of
constant rank), a normalized circle direction, and a splitting of the kernel
of d theta, this module assembles the canonical contact form on the total
space of the cotangent-of-foliation bundle plus a symplectic bundle, checks
its structural identities (zero-section pullback, Reeb lift, the splitting
of the contact distribution, radial scaling), and constructs / tests complex
structures adapted to the base.

Everything here works in flat trivializations: the splitting frames are
constant in the base coordinates and the bundle connection is the trivial
one, which satisfies the required invariance axioms in these model charts.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import null_space

from .core import ContactChart, FieldExpr, FormExpr, contact_volume, reeb_solve
from .errors import BadBlocks, NotContact


@dataclass(frozen=True)
class MorseBottSetup:
    """Pre-contact base data (Q, theta, X_theta, splitting).

    dim Q = 1 + m + 2g; ``n_basis`` spans the integrable complement H inside
    ker d theta, ``g_basis`` a symplectic complement of ker d theta in TQ.
    Frames are constant vectors in the base coordinates (flat models).
    """

    theta: FormExpr
    x_theta: FieldExpr
    n_basis: tuple  # m constant vectors, each of length dim_q
    g_basis: tuple  # 2g constant vectors
    periods: Optional[tuple] = None
    name: str = "setup"

    @property
    def dim_q(self) -> int:
        return len(self.theta)

    @property
    def m(self) -> int:
        return len(self.n_basis)

    @property
    def g(self) -> int:
        return len(self.g_basis) // 2

    def dtheta_at(self, q) -> np.ndarray:
        G = self.theta.grad_matrix(np.asarray(q, dtype=float))
        return G - G.T

    def splitting_matrix(self, q=None) -> np.ndarray:
        """Columns [X_theta | N | G] in base coordinates."""
        q0 = np.zeros(self.dim_q) if q is None else np.asarray(q, dtype=float)
        cols = [np.asarray(self.x_theta.at(q0), dtype=float)]
        cols += [np.asarray(v, dtype=float) for v in self.n_basis]
        cols += [np.asarray(v, dtype=float) for v in self.g_basis]
        return np.column_stack(cols)


@dataclass
class SetupDiagnostics:
    max_theta_defect: float  # |theta(X_theta) - 1|
    dtheta_rank_ok: bool
    max_kernel_residual: float  # |dtheta . v| for v in {X_theta} + H


def validate_setup(setup: MorseBottSetup, points) -> SetupDiagnostics:
    """Check theta(X_theta) = 1, rank d theta = 2g, and ker d theta = RX + H."""
    worst_theta = 0.0
    worst_kernel = 0.0
    rank_ok = True
    for q in points:
        q = np.asarray(q, dtype=float)
        th = setup.theta.at(q)
        X = setup.x_theta.at(q)
        worst_theta = max(worst_theta, abs(float(th @ X) - 1.0))
        D = setup.dtheta_at(q)
        s = np.linalg.svd(D, compute_uv=False)
        big = np.sum(s > 1e-6)
        small_ok = np.all(s[int(big):] < 1e-10) if big < len(s) else True
        if big != 2 * setup.g or not small_ok:
            rank_ok = False
        for v in (X, *setup.n_basis):
            worst_kernel = max(worst_kernel, float(np.max(np.abs(D @ np.asarray(v, float)))))
    return SetupDiagnostics(worst_theta, bool(rank_ok), worst_kernel)


def circle_setup() -> MorseBottSetup:
    """Q = S^1 with theta = d t: m = 0, g = 0 (prequantization-type base)."""
    return MorseBottSetup(
        theta=FormExpr.constant([1.0]),
        x_theta=FieldExpr.constant([1.0]),
        n_basis=(),
        g_basis=(),
        periods=(1.0,),
        name="circle",
    )


def torus_setup() -> MorseBottSetup:
    """Q = T^2 with theta = d t1, H spanned by d/d t2: m = 1, g = 0."""
    return MorseBottSetup(
        theta=FormExpr.constant([1.0, 0.0]),
        x_theta=FieldExpr.constant([1.0, 0.0]),
        n_basis=(np.array([0.0, 1.0]),),
        g_basis=(),
        periods=(1.0, 1.0),
        name="torus",
    )


def mixed_setup() -> MorseBottSetup:
    """Q = T^2 x R^2 with theta = dt1 + (a db - b da)/2: m = 1, g = 1.

    ker d theta is spanned by d/dt1 and d/dt2, d theta restricts to the
    standard symplectic form on the (a, b) plane.
    """
    dim = 4

    def grad_const(v):
        return lambda x: np.asarray(v, dtype=float)

    comps = [
        lambda x: 1.0,
        lambda x: 0.0,
        lambda x: -0.5 * x[3],
        lambda x: 0.5 * x[2],
    ]
    grads = [
        grad_const(np.zeros(dim)),
        grad_const(np.zeros(dim)),
        grad_const([0.0, 0.0, 0.0, -0.5]),
        grad_const([0.0, 0.0, 0.5, 0.0]),
    ]
    return MorseBottSetup(
        theta=FormExpr(comps, grads),
        x_theta=FieldExpr.constant([1.0, 0.0, 0.0, 0.0]),
        n_basis=(np.array([0.0, 1.0, 0.0, 0.0]),),
        g_basis=(np.eye(dim)[:, 2], np.eye(dim)[:, 3]),
        periods=(1.0, 1.0, None, None),
        name="mixed",
    )


def prequantization_setup(g: int = 1) -> MorseBottSetup:
    """Q = S^1 x R^(2g) with theta = dt + standard symplectic potential.

    d theta is the standard symplectic form on the 2g transverse directions,
    so m = 0 and G spans those directions.
    """
    dim = 1 + 2 * g

    def comp(i):
        if i == 0:
            return lambda x: 1.0, lambda x: np.zeros(dim)
        # pairs (a_j, b_j) at slots (2j+1, 2j+2): theta += (a db - b da)/2
        j = (i - 1) // 2
        if (i - 1) % 2 == 0:
            def c(x, j=j):
                return -0.5 * x[2 + 2 * j]
            def gr(x, j=j):
                v = np.zeros(dim)
                v[2 + 2 * j] = -0.5
                return v
        else:
            def c(x, j=j):
                return 0.5 * x[1 + 2 * j]
            def gr(x, j=j):
                v = np.zeros(dim)
                v[1 + 2 * j] = 0.5
                return v
        return c, gr

    comps, grads = zip(*[comp(i) for i in range(dim)])
    basis = tuple(np.eye(dim)[:, 1 + i] for i in range(2 * g))
    return MorseBottSetup(
        theta=FormExpr(list(comps), list(grads)),
        x_theta=FieldExpr.constant([1.0] + [0.0] * 2 * g),
        n_basis=(),
        g_basis=basis,
        periods=(1.0,) + (None,) * (2 * g),
        name=f"prequant(g={g})",
    )


@dataclass(frozen=True)
class ThickeningChart:
    """Contact chart on base x (cotangent fiber mu) x (symplectic fiber e)."""

    setup: MorseBottSetup
    k: int
    Omega: np.ndarray  # 2k x 2k fiberwise symplectic matrix
    chart: ContactChart
    n_coframe: np.ndarray  # m x dim_q rows extracting N-coefficients
    verified_radius: float

    @property
    def dim_q(self):
        return self.setup.dim_q

    @property
    def m(self):
        return self.setup.m

    @property
    def dim(self):
        return self.chart.dim

    def split_point(self, x):
        x = np.asarray(x, dtype=float)
        dq, m = self.dim_q, self.m
        return x[:dq], x[dq : dq + m], x[dq + m :]

    def zero_section_point(self, q) -> np.ndarray:
        x = np.zeros(self.dim)
        x[: self.dim_q] = np.asarray(q, dtype=float)
        return x

    def omega_tilde(self, x) -> np.ndarray:
        """Matrix of the extended fiberwise two-form at x (E-fiber block)."""
        D = np.zeros((self.dim, self.dim))
        s = self.dim_q + self.m
        D[s:, s:] = self.Omega
        return D

    def radial_vector(self, x) -> np.ndarray:
        v = np.zeros(self.dim)
        _, _, e = self.split_point(x)
        v[self.dim_q + self.m :] = e
        return v


def _assemble_lambda_F(setup: MorseBottSetup, Omega: np.ndarray, k: int):
    dq, m = setup.dim_q, setup.m
    dim = dq + m + 2 * k
    B = setup.splitting_matrix()
    N_co = np.linalg.inv(B)[1 : 1 + m, :] if dq else np.zeros((m, dq))

    comps = []
    grads = []
    for i in range(dq):
        def c(x, i=i):
            base = setup.theta.components[i](x[:dq])
            return base + float(x[dq : dq + m] @ N_co[:, i])

        def gr(x, i=i):
            v = np.zeros(dim)
            if setup.theta.grads is not None:
                v[:dq] = setup.theta.grads[i](x[:dq])
            else:
                from .core import fd_gradient

                v[:dq] = fd_gradient(setup.theta.components[i], x[:dq])
            v[dq : dq + m] = N_co[:, i]
            return v

        comps.append(c)
        grads.append(gr)
    for a in range(m):
        comps.append(lambda x: 0.0)
        grads.append((lambda dim: (lambda x: np.zeros(dim)))(dim))
    for j in range(2 * k):
        def c(x, j=j):
            e = x[dq + m :]
            return 0.5 * float(e @ Omega[:, j])

        def gr(x, j=j):
            v = np.zeros(dim)
            v[dq + m :] = 0.5 * Omega[:, j]
            return v

        comps.append(c)
        grads.append(gr)
    return FormExpr(comps, grads), N_co


def _fiber_grid(r: float, fdim: int, pts_per_dim: int, cap: int = 4096) -> np.ndarray:
    if fdim == 0:
        return np.zeros((1, 0))
    per = pts_per_dim
    while per**fdim > cap and per > 3:
        per -= 1
    axes = [np.linspace(-r, r, per) for _ in range(fdim)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, fdim)
    inside = np.linalg.norm(mesh, axis=1) <= r + 1e-15
    return mesh[inside]


def contact_tube_radius(
    chart: ContactChart,
    dim_q: int,
    radius: float,
    fiber_pts: int = 16,
    base_pts: int = 8,
) -> float:
    """Verify the contact condition on the fiber tube of the given radius.

    The contact volume must keep the zero-section sign and at least half the
    zero-section magnitude at every sampled point.  Returns the radius when
    it verifies; otherwise bisects for the largest verified radius and
    raises NotContact carrying it.
    """
    fdim = chart.dim - dim_q
    base_axes = []
    for i in range(dim_q):
        P = chart.periods[i] if chart.periods is not None else None
        hi = P if P is not None else 1.0
        base_axes.append(np.linspace(0.0, hi, base_pts, endpoint=False))
    base_grid = (
        np.stack(np.meshgrid(*base_axes, indexing="ij"), axis=-1).reshape(-1, dim_q)
        if dim_q
        else np.zeros((1, 0))
    )

    def verified(r: float) -> bool:
        fgrid = _fiber_grid(r, fdim, fiber_pts)
        for q in base_grid:
            x0 = np.concatenate([q, np.zeros(fdim)])
            v0 = contact_volume(chart, x0)
            if abs(v0) < 1e-12:
                return False
            for f in fgrid:
                v = contact_volume(chart, np.concatenate([q, f]))
                if np.sign(v) != np.sign(v0) or abs(v) < 0.5 * abs(v0):
                    return False
        return True

    if verified(radius):
        return float(radius)
    lo, hi = 0.0, radius
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        if verified(mid):
            lo = mid
        else:
            hi = mid
    raise NotContact(
        lo,
        f"contact volume lower bound fails at radius {radius:g}; verified up to {lo:g}",
    )


def build_thickening(
    setup: MorseBottSetup,
    Omega,
    k: Optional[int] = None,
    radius: float = 0.5,
    fiber_pts: int = 16,
    base_pts: int = 8,
) -> ThickeningChart:
    """Assemble the canonical contact form on the thickened bundle and verify
    it is contact on the fiber tube of the requested radius.

    The form is base pullback of theta, plus the fiber-pairing one-form built
    from the N-coframe, plus half the radial contraction of the extended
    fiberwise symplectic form.  Raises NotContact(radius) when the contact
    volume drops below half its zero-section value somewhere on the sample
    grid; the largest verified radius is found by bisection and stored.
    """
    Omega = np.asarray(Omega, dtype=float).reshape(
        Omega.shape if np.ndim(Omega) == 2 else (0, 0)
    )
    k = k if k is not None else Omega.shape[0] // 2
    if Omega.shape != (2 * k, 2 * k):
        raise BadBlocks("Omega", "fiber symplectic matrix must be 2k x 2k")
    if k:
        if np.max(np.abs(Omega + Omega.T)) > 1e-12:
            raise BadBlocks("Omega", "fiber symplectic matrix must be antisymmetric")
        if abs(np.linalg.det(Omega)) < 1e-12:
            raise BadBlocks("Omega", "fiber symplectic matrix is degenerate")
    lam, N_co = _assemble_lambda_F(setup, Omega, k)
    dq, m = setup.dim_q, setup.m
    n = (dq + m + 2 * k - 1) // 2  # total dim = dq + m + 2k = 2n + 1
    periods = None
    if setup.periods is not None:
        periods = tuple(setup.periods) + (None,) * (m + 2 * k)
    chart = ContactChart(
        n=n, lam=lam, name=f"thicken({setup.name})", periods=periods
    )
    verified = contact_tube_radius(chart, dq, radius, fiber_pts=fiber_pts, base_pts=base_pts)
    return ThickeningChart(setup, k, Omega, chart, N_co, float(verified))


def reeb_of_thickening(tc: ThickeningChart, q) -> np.ndarray:
    """Reeb field of the thickening at a zero-section point (direct solve)."""
    x = tc.zero_section_point(q)
    return reeb_solve(tc.chart, x).vector


def lifted_x_theta(tc: ThickeningChart, q) -> np.ndarray:
    """Horizontal lift of the base circle field (flat connection: zero fiber part)."""
    v = np.zeros(tc.dim)
    v[: tc.dim_q] = tc.setup.x_theta.at(np.asarray(q, dtype=float))
    return v


def split_contact_distribution(tc: ThickeningChart, x):
    """Bases (V, W) with ker lambda_F = V + W.

    V lifts ker theta with the fiber-pairing correction along the Reeb lift;
    W takes the vertical directions with the radial-contraction correction.
    Both corrections are exactly the lambda_F values, so lambda_F annihilates
    every column.
    """
    x = np.asarray(x, dtype=float)
    q, mu, e = tc.split_point(x)
    dq, m, k = tc.dim_q, tc.m, tc.k
    X_F = lifted_x_theta(tc, q)
    th = tc.setup.theta.at(q)
    # deterministic basis of ker theta on the base
    kerb = null_space(th[None, :])
    V = []
    for i in range(kerb.shape[1]):
        eta = kerb[:, i]
        lift = np.zeros(tc.dim)
        lift[:dq] = eta
        corr = float(mu @ (tc.n_coframe @ eta))
        V.append(lift - corr * X_F)
    W = []
    lamx = tc.chart.lambda_at(x)
    for j in range(m + 2 * k):
        v = np.zeros(tc.dim)
        v[dq + j] = 1.0
        W.append(v - float(lamx @ v) * X_F)
    V = np.column_stack(V) if V else np.zeros((tc.dim, 0))
    W = np.column_stack(W) if W else np.zeros((tc.dim, 0))
    return V, W


@dataclass
class RadialReport:
    max_scaling_error: float  # R_c^* Omega~ vs c^2 Omega~
    max_cartan_error: float  # d(R . Omega~) vs 2 Omega~


def radial_identities(tc: ThickeningChart, c: float, points, h: float = 1e-4) -> RadialReport:
    """Check the fiber-scaling and Cartan identities of the radial field.

    The pullback is evaluated by scaling the E-fiber of the point and of the
    tangent arguments; the exterior derivative side goes through 4th-order
    finite differences of the contraction one-form.
    """
    dq, m, k = tc.dim_q, tc.m, tc.k
    dim = tc.dim
    rng = np.random.Generator(np.random.Philox(7))
    scale = np.ones(dim)
    scale[dq + m :] = c

    def rho(x):
        # (R . Omega~)_j = Omega(e, .) on the E block
        out = np.zeros(dim)
        out[dq + m :] = np.asarray(x[dq + m :], dtype=float) @ tc.Omega
        return out

    worst_scale = 0.0
    worst_cartan = 0.0
    for x in points:
        x = np.asarray(x, dtype=float)
        Om = tc.omega_tilde(x)
        xs = x.copy()
        xs[dq + m :] *= c
        Om_scaled = tc.omega_tilde(xs)
        for _ in range(4):
            v = rng.standard_normal(dim)
            w = rng.standard_normal(dim)
            lhs = float((scale * v) @ Om_scaled @ (scale * w))
            rhs = c * c * float(v @ Om @ w)
            worst_scale = max(worst_scale, abs(lhs - rhs))
        # d(rho) by finite differences
        G = np.zeros((dim, dim))
        for i in range(dim):
            ei = np.zeros(dim)
            ei[i] = 1.0
            G[i, :] = (
                -rho(x + 2 * h * ei)
                + 8 * rho(x + h * ei)
                - 8 * rho(x - h * ei)
                + rho(x - 2 * h * ei)
            ) / (12 * h)
        drho = G - G.T
        worst_cartan = max(worst_cartan, float(np.max(np.abs(drho - 2 * Om))))
    return RadialReport(worst_scale, worst_cartan)


# ---------------------------------------------------------------------------
# adapted CR-almost complex structures


@dataclass
class AdaptedJ:
    J_G: np.ndarray
    J_E: np.ndarray
    B: np.ndarray
    matrix: np.ndarray  # endomorphism in thickening coordinates
    square_defect: float
    adapted: bool


def _check_tamed(J_blk: np.ndarray, omega: np.ndarray, label: str, tol: float = 1e-10):
    if J_blk.size == 0:
        return
    if np.max(np.abs(J_blk @ J_blk + np.eye(J_blk.shape[0]))) > tol:
        raise BadBlocks(label, f"{label}^2 != -I")
    M = omega @ J_blk
    if np.max(np.abs(M - M.T)) > 1e-8:
        raise BadBlocks(label, f"{label} not omega-compatible (symmetry)")
    if np.any(np.linalg.eigvalsh(0.5 * (M + M.T)) <= 0):
        raise BadBlocks(label, f"{label} not omega-tamed (positivity)")


def _structure_frames(tc: ThickeningChart, q=None):
    """Coordinate columns of the splitting RX + N + G + T*N + E."""
    dq, m, k = tc.dim_q, tc.m, tc.k
    dim = tc.dim

    def emb(vs, offset, width):
        cols = np.zeros((dim, len(vs))) if len(vs) else np.zeros((dim, 0))
        for i, v in enumerate(vs):
            cols[offset : offset + width, i] = v
        return cols

    B = tc.setup.splitting_matrix(q)
    X = emb([B[:, 0]], 0, dq)
    N = emb([B[:, 1 + a] for a in range(m)], 0, dq)
    G = emb([B[:, 1 + m + b] for b in range(2 * tc.setup.g)], 0, dq)
    MU = emb(list(np.eye(m)), dq, m)
    E = emb(list(np.eye(2 * k)), dq + m, 2 * k)
    return X, N, G, MU, E


def make_adapted_J(tc: ThickeningChart, J_G, J_E, B, tol: float = 1e-12) -> AdaptedJ:
    """Assemble an endomorphism adapted to the zero section from block data.

    Blocks: J_G on the symplectic complement inside TQ (compatible with
    d theta there), J_E on the symplectic fiber (compatible with Omega), the
    canonical pairing rotation on N + T*N, and a coupling block B from G to E
    constrained by B J_G = 0.  Since J_G squares to -I it is invertible, so
    the constraint forces B = 0 up to the tolerance; the coupling slot is
    kept so that violating inputs are caught rather than ignored.
    """
    J_G = np.asarray(J_G, dtype=float).reshape(2 * tc.setup.g, 2 * tc.setup.g)
    J_E = np.asarray(J_E, dtype=float).reshape(2 * tc.k, 2 * tc.k)
    B = np.asarray(B, dtype=float).reshape(2 * tc.k, 2 * tc.setup.g)

    q0 = np.zeros(tc.dim_q)
    Dth = tc.setup.dtheta_at(q0)
    Gcols = tc.setup.splitting_matrix(q0)[:, 1 + tc.m :]
    omega_G = Gcols.T @ Dth @ Gcols
    _check_tamed(J_G, omega_G, "J_G")
    _check_tamed(J_E, tc.Omega, "J_E")
    if B.size and np.max(np.abs(B @ J_G)) > tol:
        raise BadBlocks("B", f"B J_G = 0 violated by {np.max(np.abs(B @ J_G)):.3e}")

    X, N, G, MU, E = _structure_frames(tc, q0)
    m, g, k = tc.m, tc.setup.g, tc.k
    dim = tc.dim
    P = np.column_stack([X, N, G, MU, E])
    Pinv = np.linalg.inv(P)
    Jb = np.zeros((dim, dim))
    # block order in P: [X | N(m) | G(2g) | MU(m) | E(2k)]
    iN = 1
    iG = 1 + m
    iMU = 1 + m + 2 * g
    iE = 1 + 2 * m + 2 * g
    # canonical pairing: J(N_a) = -MU_a, J(MU_a) = +N_a (positivity against
    # the d Theta_G pairing, which couples N and MU with a minus sign)
    for a in range(m):
        Jb[iMU + a, iN + a] = -1.0
        Jb[iN + a, iMU + a] = 1.0
    Jb[iG : iG + 2 * g, iG : iG + 2 * g] = J_G
    Jb[iE :, iG : iG + 2 * g] = B
    Jb[iE :, iE :] = J_E
    Jmat = P @ Jb @ Pinv

    x0 = tc.zero_section_point(q0)
    lam0 = tc.chart.lambda_at(x0)
    X_F = reeb_solve(tc.chart, x0).vector
    Pi = np.eye(dim) - np.outer(X_F, lam0)
    square_defect = float(np.max(np.abs(Jmat @ Jmat + Pi)))
    ok, _ = check_adapted(tc, Jmat, q0)
    return AdaptedJ(J_G, J_E, B, Jmat, square_defect, bool(ok))


@dataclass
class AdaptedDiagnostics:
    containment_ok: bool
    splitting_ok: bool
    agree: bool
    containment_rank: int
    expected_rank: int
    gj_dim: int


def check_adapted(tc: ThickeningChart, J, q=None, tol: float = 1e-8):
    """Two equivalent adaptedness tests for an endomorphism at the zero section.

    Containment: J TQ lies inside TQ + J N (rank of the stacked spans does
    not exceed dim TQ + m).  Splitting: TQ is the direct sum of TQ intersect
    J TQ and the characteristic directions RX + N.  Both are computed and
    must agree.
    """
    J = np.asarray(J, dtype=float)
    X, N, G, MU, E = _structure_frames(tc, q)
    TQ = np.column_stack([X, N, G])
    TF = np.column_stack([X, N])
    JN = J @ N if N.size else np.zeros((tc.dim, 0))
    JTQ = J @ TQ

    def rank(A):
        if A.size == 0:
            return 0
        s = np.linalg.svd(A, compute_uv=False)
        return int(np.sum(s > tol * max(1.0, s[0])))

    base = np.column_stack([TQ, JN])
    r_base = rank(base)
    r_all = rank(np.column_stack([base, JTQ]))
    expected = TQ.shape[1] + N.shape[1]
    containment_ok = (r_base == expected) and (r_all == r_base)

    # intersection dim of col(TQ) and col(JTQ): solve TQ a = JTQ b
    r_TQ = rank(TQ)
    r_JTQ = rank(JTQ)
    r_sum = rank(np.column_stack([TQ, JTQ]))
    gj_dim = r_TQ + r_JTQ - r_sum
    # basis of the intersection for the direct-sum test
    if gj_dim > 0:
        ns = null_space(np.column_stack([TQ, -JTQ]), rcond=None)
        inter = TQ @ ns[: TQ.shape[1], :]
        # orthonormalize and drop numerically null columns
        Qm, Rm = np.linalg.qr(inter)
        keep = np.abs(np.diag(Rm)) > tol * max(1.0, np.abs(Rm).max())
        inter = Qm[:, : len(keep)][:, keep]
    else:
        inter = np.zeros((tc.dim, 0))
    r_direct = rank(np.column_stack([inter, TF]))
    splitting_ok = (gj_dim == 2 * tc.setup.g) and (r_direct == TQ.shape[1]) and (
        rank(inter) + rank(TF) == r_direct
    )
    diag = AdaptedDiagnostics(
        bool(containment_ok),
        bool(splitting_ok),
        bool(containment_ok == splitting_ok),
        r_all,
        expected,
        int(gj_dim),
    )
    return bool(containment_ok), diag


def zero_section_pullback_defect(tc: ThickeningChart, points) -> float:
    """Worst gap between lambda_F restricted to base directions and theta."""
    worst = 0.0
    for q in points:
        x = tc.zero_section_point(q)
        lam = tc.chart.lambda_at(x)
        th = tc.setup.theta.at(np.asarray(q, dtype=float))
        worst = max(worst, float(np.max(np.abs(lam[: tc.dim_q] - th))))
        worst = max(worst, float(np.max(np.abs(lam[tc.dim_q :]))) if tc.dim > tc.dim_q else 0.0)
    return worst


def vertical_dlambda_block(tc: ThickeningChart, q) -> np.ndarray:
    """Vertical-vertical block of d lambda_F at a zero-section point.

    Should equal 0 on the cotangent factor plus Omega on the symplectic
    factor."""
    x = tc.zero_section_point(q)
    D = tc.chart.dlambda_at(x)
    s = tc.dim_q
    return D[s:, s:]
