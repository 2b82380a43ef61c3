"""Normal geodesics of H-type groups in exponential coordinates.

The group law is ``(x, t)(x', t') = (x + x', t + t' + 1/2 [x, x'])``.  Its
left-invariant horizontal frame is

    X_i = d/dx_i - 1/2 sum_a (B_a x)_i d/dt_a,

and with ``Omega = sum_a theta_a B_a`` the horizontal velocity of a normal
geodesic obeys ``x'' = K x'`` with ``K = -J_H Omega``.  Since
``K^2 = -Theta^2 I`` the exponential ``exp(sK)`` splits into four series
(two trigonometric, two hyperbolic) which is what the closed-form solver uses.
The vertical part ``t`` is recovered by quadrature of the horizontality
condition ``t_a' = -1/2 x'^T B_a x``.

:func:`integrate_hamiltonian` is an independent RK4 integration of the full
Hamiltonian system written in terms of the frame; it is the reference the
closed form is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import HTypeAlgebra, bracket
from .quadrature import adaptive_gauss_legendre

NULL_TOL = 1e-14


class Regime(str, Enum):
    ZERO_THETA = "ZeroTheta"
    NULL_THETA = "NullTheta"
    NON_NULL = "NonNull"


@dataclass(frozen=True)
class GroupPoint:
    x: np.ndarray
    t: np.ndarray


@dataclass(frozen=True)
class Covector:
    xi: np.ndarray
    theta: np.ndarray


@dataclass
class Trajectory:
    """Samples ``(s_k, x(s_k), t(s_k))`` of a geodesic through the identity.

    ``xi`` holds the horizontal covector along the curve when it is known.
    """

    s: np.ndarray
    x: np.ndarray
    t: np.ndarray
    regime: Regime
    theta2: float
    v0: np.ndarray
    theta: np.ndarray
    xi: np.ndarray | None = None

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        if s.ndim != 1 or s.size == 0 or s[0] != 0.0:
            raise ValueError("trajectory must start at s = 0")
        if np.any(np.diff(s) <= 0):
            raise ValueError("sample parameters must be strictly increasing")
        if len(self.x) != s.size or len(self.t) != s.size:
            raise ValueError("sample arrays disagree in length")
        if np.any(self.x[0] != 0) or np.any(self.t[0] != 0):
            raise ValueError("trajectory must start at the identity")

    @property
    def samples(self) -> list[tuple[float, GroupPoint]]:
        return [(float(s), GroupPoint(x, t)) for s, x, t in zip(self.s, self.x, self.t)]

    def covector(self, k: int) -> Covector:
        if self.xi is None:
            raise ValueError("trajectory carries no covector samples")
        return Covector(self.xi[k], self.theta)


def _check_point(alg: HTypeAlgebra, g: GroupPoint) -> GroupPoint:
    return GroupPoint(alg.H.check(g.x, "x"), alg.V.check(g.t, "t"))


def identity(alg: HTypeAlgebra) -> GroupPoint:
    return GroupPoint(np.zeros(alg.n), np.zeros(alg.m))


def group_mul(alg: HTypeAlgebra, g: GroupPoint, g2: GroupPoint) -> GroupPoint:
    g, g2 = _check_point(alg, g), _check_point(alg, g2)
    return GroupPoint(g.x + g2.x, g.t + g2.t + 0.5 * bracket(alg, g.x, g2.x))


def group_inverse(alg: HTypeAlgebra, g: GroupPoint) -> GroupPoint:
    g = _check_point(alg, g)
    return GroupPoint(-g.x, -g.t)


def left_frame(alg: HTypeAlgebra, g: GroupPoint) -> np.ndarray:
    """Rows ``X_i(g)`` in coordinates ``(d/dx, d/dt)``, shape ``(n, n + m)``.

    Obtained by differentiating ``g * (s e_i, 0)`` at ``s = 0``.
    """
    g = _check_point(alg, g)
    vert = 0.5 * np.einsum("j,aji->ia", g.x, alg.B)
    return np.hstack([np.eye(alg.n), vert])


def hamiltonian(alg: HTypeAlgebra, g: GroupPoint, lam: Covector) -> float:
    """``1/2 sum_i eps_i lambda(X_i)^2``."""
    xi = alg.H.check(lam.xi, "xi")
    theta = alg.V.check(lam.theta, "theta")
    p = left_frame(alg, g) @ np.concatenate([xi, theta])
    return 0.5 * float(np.dot(alg.H.signs * p, p))


def hamiltonian_expanded(alg: HTypeAlgebra, g: GroupPoint, lam: Covector) -> float:
    """Same value as :func:`hamiltonian`, written through ``Omega``."""
    g = _check_point(alg, g)
    xi = alg.H.check(lam.xi, "xi")
    wx = omega(alg, lam.theta) @ g.x
    ip = lambda a, b: float(np.dot(alg.H.signs * a, b))
    return 0.5 * ip(xi, xi) - 0.5 * ip(xi, wx) + 0.125 * ip(wx, wx)


def omega(alg: HTypeAlgebra, theta) -> np.ndarray:
    theta = alg.V.check(theta, "theta")
    return np.einsum("a,aij->ij", theta, alg.B)


def theta2(alg: HTypeAlgebra, theta) -> float:
    return alg.V.norm2(theta)


def classify_regime(alg: HTypeAlgebra, theta, tol: float = NULL_TOL) -> Regime:
    theta = alg.V.check(theta, "theta")
    if not np.any(theta):
        return Regime.ZERO_THETA
    if abs(theta2(alg, theta)) <= tol * max(1.0, float(np.dot(theta, theta))):
        return Regime.NULL_THETA
    return Regime.NON_NULL


def horizontal_generator(alg: HTypeAlgebra, theta) -> np.ndarray:
    """``K`` with ``x'' = K x'`` along the geodesic with vertical covector ``theta``."""
    return -alg.JH @ omega(alg, theta)


# ---------------------------------------------------------------------------
# four-series exponential

_FACT = [math.factorial(k) for k in range(40)]


def _series(z4: np.ndarray, r: int, terms: int = 8) -> np.ndarray:
    return sum(z4**k / _FACT[4 * k + r] for k in range(terms))


def four_series_coefficients(z) -> np.ndarray:
    """Coefficients ``e_r(z) = sum_k z^(4k) / (4k + r)!`` for ``r = 0..4``.

    ``exp(sK) = sum_{r<4} e_r(s Theta) (sK)^r`` whenever ``K^4 = Theta^4 I``;
    ``e_4`` appears in the integral of that series.  Shape ``(5,) + z.shape``.
    """
    z0 = np.abs(np.asarray(z, dtype=float))
    z = z0.ravel()
    out = np.empty((5, z.size))
    small = z < 1.0
    zs = z[small]
    z4 = zs**4
    for r in range(5):
        out[r][small] = _series(z4, r)
    zb = z[~small]
    c, ch, sn, sh = np.cos(zb), np.cosh(zb), np.sin(zb), np.sinh(zb)
    out[0][~small] = 0.5 * (c + ch)
    out[1][~small] = 0.5 * (sn + sh) / zb
    out[2][~small] = 0.5 * (ch - c) / zb**2
    out[3][~small] = 0.5 * (sh - sn) / zb**3
    out[4][~small] = 0.5 * (c + ch - 2.0) / zb**4
    return out.reshape((5,) + z0.shape)


def exp_four_series(alg: HTypeAlgebra, theta, s: float) -> np.ndarray:
    """``exp(sK)`` from the four-series closed form."""
    K = horizontal_generator(alg, theta)
    Th = math.sqrt(abs(theta2(alg, theta)))
    e = four_series_coefficients(s * Th)
    sK = s * K
    out = e[0] * np.eye(alg.n)
    P = np.eye(alg.n)
    for r in range(1, 4):
        P = P @ sK
        out = out + e[r] * P
    return out


def _closed_form_x(alg: HTypeAlgebra, v0, theta, s: np.ndarray, regime: Regime):
    """``(x(s), x'(s))`` for an array of parameters, shapes ``(len(s), n)``."""
    s = np.asarray(s, dtype=float)
    if regime is Regime.ZERO_THETA:
        return np.outer(s, v0), np.tile(v0, (s.size, 1))
    K = horizontal_generator(alg, theta)
    if regime is Regime.NULL_THETA:
        Kv = K @ v0
        return np.outer(s, v0) + 0.5 * np.outer(s**2, Kv), v0 + np.outer(s, Kv)
    Th = math.sqrt(abs(theta2(alg, theta)))
    e = four_series_coefficients(s * Th)
    powers = [v0]
    for _ in range(3):
        powers.append(K @ powers[-1])
    P = np.array(powers)
    sp = np.array([s**r for r in range(4)])
    xdot = np.einsum("rk,rk,ri->ki", e[:4], sp, P)
    x = s[:, None] * np.einsum("rk,rk,ri->ki", e[1:], sp, P)
    return x, xdot


def null_theta_quartic(alg: HTypeAlgebra, v0, theta, s) -> np.ndarray:
    """Closed-form ``t(s)`` in the null regime (exact when ``K^2 = 0``); shape ``(len(s), m)``."""
    v0 = alg.H.check(v0, "v0")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    Kv = horizontal_generator(alg, theta) @ v0
    cubic = np.einsum("i,aij,j->a", v0, alg.B, Kv)
    quartic = np.einsum("i,aij,j->a", Kv, alg.B, Kv)
    return np.outer(s**3 / 12.0, cubic) - np.outer(s**4 / 16.0, quartic)


def geodesic_closed_form(alg: HTypeAlgebra, v0, theta, s_values, tol: float = 1e-10) -> Trajectory:
    """Geodesic from the identity with initial velocity ``v0`` and vertical covector ``theta``.

    ``s = 0`` is prepended to ``s_values`` if absent.
    """
    v0 = alg.H.check(v0, "v0")
    theta = alg.V.check(theta, "theta")
    s = np.atleast_1d(np.asarray(s_values, dtype=float))
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ValueError("s values must be finite and >= 0")
    if s.size == 0 or s[0] != 0.0:
        s = np.concatenate([[0.0], s])
    if np.any(np.diff(s) <= 0):
        raise ValueError("s values must be strictly increasing")

    regime = classify_regime(alg, theta)
    x, _ = _closed_form_x(alg, v0, theta, s, regime)
    x[0] = 0.0
    if regime is Regime.ZERO_THETA:
        t = np.zeros((s.size, alg.m))
    else:
        def tdot(p):
            xp, xdp = _closed_form_x(alg, v0, theta, p, regime)
            return -0.5 * np.einsum("ki,aij,kj->ka", xdp, alg.B, xp)

        pieces = adaptive_gauss_legendre(tdot, s[:-1], s[1:], tol=tol)
        t = np.vstack([np.zeros((1, alg.m)), np.cumsum(pieces, axis=0)])
    xi = alg.JH @ v0 - 0.5 * x @ omega(alg, theta).T
    return Trajectory(s, x, t, regime, theta2(alg, theta), v0, theta, xi)


# ---------------------------------------------------------------------------
# Runge-Kutta reference


def _hamilton_rhs(B: np.ndarray, signs: np.ndarray, Om: np.ndarray, x, xi):
    """Hamilton's equations for ``H = 1/2 sum eps_i lambda(X_i)^2``, batched over the first axis.

    ``Om[b] = sum_a theta[b, a] B[a]`` is constant along each trajectory.
    """
    # lambda(X_i) = xi_i + 1/2 sum_j x_j Om[j, i]
    w = xi + 0.5 * np.matmul(x[:, None, :], Om)[:, 0]
    xdot = signs * w
    tdot = 0.5 * np.einsum("baj,bj->ba", np.tensordot(xdot, B, axes=([1], [2])), x)
    xidot = -0.5 * np.matmul(Om, xdot[:, :, None])[:, :, 0]
    return xdot, tdot, xidot


def integrate_hamiltonian_batch(alg: HTypeAlgebra, v0s, thetas, s_max: float, dt: float,
                                record_every: int = 1):
    """Classical RK4 for many initial conditions at once.

    Returns ``(s, x, t, xi)`` with shapes ``(N,)``, ``(N, b, n)``, ``(N, b, m)``,
    ``(N, b, n)``; the last step is shortened so that ``s`` ends at ``s_max``.
    """
    if not dt > 0 or not s_max > 0:
        raise ValueError("dt and s_max must be > 0")
    v0s = np.atleast_2d(np.asarray(v0s, dtype=float))
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if v0s.shape[1] != alg.n or thetas.shape[1] != alg.m or len(v0s) != len(thetas):
        raise ValueError("initial data do not match the algebra")
    B, signs = alg.B, alg.H.signs
    Om = np.einsum("ba,aij->bij", thetas, B)
    b = len(v0s)
    x = np.zeros((b, alg.n))
    t = np.zeros((b, alg.m))
    xi = v0s * signs
    steps = int(math.ceil(s_max / dt - 1e-9))
    rec_s, rec_x, rec_t, rec_xi = [0.0], [x], [t], [xi]
    s = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            h = min(dt, s_max - s) if k == steps else dt
            k1 = _hamilton_rhs(B, signs, Om, x, xi)
            k2 = _hamilton_rhs(B, signs, Om, x + 0.5 * h * k1[0], xi + 0.5 * h * k1[2])
            k3 = _hamilton_rhs(B, signs, Om, x + 0.5 * h * k2[0], xi + 0.5 * h * k2[2])
            k4 = _hamilton_rhs(B, signs, Om, x + h * k3[0], xi + h * k3[2])
            x = x + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            t = t + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            xi = xi + h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            s = s_max if k == steps else k * dt
            if k % record_every == 0 or k == steps:
                # overflow never recovers, so checking at recorded steps is enough
                if not np.isfinite(x.sum() + xi.sum() + t.sum()):
                    raise FloatingPointError(f"non-finite state by s = {s:.6g}")
                rec_s.append(s)
                rec_x.append(x)
                rec_t.append(t)
                rec_xi.append(xi)
    return np.array(rec_s), np.array(rec_x), np.array(rec_t), np.array(rec_xi)


def integrate_hamiltonian(alg: HTypeAlgebra, v0, theta, s_max: float, dt: float) -> Trajectory:
    """RK4 on ``(x, t, xi, theta)`` from ``x = 0``, ``t = 0``, ``xi = J_H v0``; sampled every step."""
    v0 = alg.H.check(v0, "v0")
    theta = alg.V.check(theta, "theta")
    s, x, t, xi = integrate_hamiltonian_batch(alg, v0[None], theta[None], s_max, dt)
    return Trajectory(s, x[:, 0], t[:, 0], classify_regime(alg, theta), theta2(alg, theta),
                      v0, theta, xi[:, 0])
