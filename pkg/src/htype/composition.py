"""Compositions of quadratic forms and their correspondence with H-type algebras."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .algebra import HTypeAlgebra, validate_h_type
from .spaces import ScalarSpace, canonical_permutation

IDENTITY_TOL = 1e-12


class CompositionError(ValueError):
    """A map fails the composition identity, or an algebra fails H-type validation."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class QuadraticForm:
    """The diagonal form ``x -> <x, x>`` of a canonically ordered space."""

    space: ScalarSpace

    def __call__(self, x) -> float:
        return self.space.norm2(x)

    def polar(self, x, y) -> float:
        x = self.space.check(x)
        y = self.space.check(y)
        return float(np.dot(self.space.signs * x, y))


@dataclass(frozen=True, eq=False)
class CompositionMap:
    """Bilinear ``mu: U x H -> H`` with ``mu(u_k, h_i) = sum_j M[k, i, j] h_j``.

    The slice at ``u0_index`` must be the identity (normalized composition).
    """

    U: ScalarSpace
    H: ScalarSpace
    M: np.ndarray
    u0_index: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        if M.shape != (self.U.dim, self.H.dim, self.H.dim):
            raise ValueError(f"M has shape {M.shape}, expected {(self.U.dim, self.H.dim, self.H.dim)}")
        if not 0 <= self.u0_index < self.U.dim:
            raise ValueError(f"u0_index {self.u0_index} out of range")
        if np.abs(M[self.u0_index] - np.eye(self.H.dim)).max() > IDENTITY_TOL:
            raise ValueError("the u0 slice must be the identity (normalized composition)")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)

    @property
    def phi(self) -> QuadraticForm:
        return QuadraticForm(self.H)

    @property
    def lam(self) -> QuadraticForm:
        return QuadraticForm(self.U)

    def __call__(self, u, h) -> np.ndarray:
        u = self.U.check(u, "u")
        h = self.H.check(h, "h")
        return np.einsum("k,i,kij->j", u, h, self.M)

    def column_matrices(self) -> np.ndarray:
        """``mu(u_k, h) = column_matrices()[k] @ h``."""
        return self.M.transpose(0, 2, 1)

    def to_dict(self) -> dict[str, Any]:
        return {"dim_u": self.U.dim, "nu_u": self.U.index, "n": self.H.dim,
                "nu_h": self.H.index, "u0_index": self.u0_index, "M": self.M.tolist()}


def verify_composition(mu: CompositionMap, trials: int = 1000, tol: float = 1e-10,
                       seed: int = 0) -> bool:
    """Sampled check of ``phi(mu(u, h)) = lambda(u) phi(h)`` and its polarized form."""
    return composition_residual(mu, trials, seed) <= tol


def composition_residual(mu: CompositionMap, trials: int = 1000, seed: int = 0) -> float:
    """Worst relative residual of the composition identity and its polarization."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    U, H = mu.U, mu.H
    us = rng.uniform(-1, 1, (trials, U.dim))
    u2s = rng.uniform(-1, 1, (trials, U.dim))
    hs = rng.uniform(-1, 1, (trials, H.dim))
    img = np.einsum("tk,ti,kij->tj", us, hs, mu.M)
    img2 = np.einsum("tk,ti,kij->tj", u2s, hs, mu.M)
    phi_h = np.einsum("ti,i,ti->t", hs, H.signs, hs)
    lam_u = np.einsum("tk,k,tk->t", us, U.signs, us)
    lam_uu2 = np.einsum("tk,k,tk->t", us, U.signs, u2s)
    lhs = np.einsum("tj,j,tj->t", img, H.signs, img)
    rhs = lam_u * phi_h
    r1 = np.abs(lhs - rhs) / (1.0 + np.abs(rhs))
    pol = np.einsum("tj,j,tj->t", img, H.signs, img2)
    prhs = lam_uu2 * phi_h
    r2 = np.abs(pol - prhs) / (1.0 + np.abs(prhs))
    return float(max(r1.max(), r2.max()))


def phi_map(mu: CompositionMap, h, h2) -> np.ndarray:
    """``Phi(h, h2)`` in U, defined by ``<u, Phi(h, h2)>_lambda = <mu(u, h), h2>_phi``."""
    h = mu.H.check(h, "h")
    h2 = mu.H.check(h2, "h2")
    return mu.U.signs * np.einsum("i,kij,j->k", h, mu.M, mu.H.signs * h2)


def algebra_from_composition(mu: CompositionMap, label: str = "custom", trials: int = 1000,
                             tol: float = 1e-10) -> HTypeAlgebra:
    """Lie algebra on ``H + V`` with bracket ``pi o Phi``, where V is the complement of ``u0``."""
    if mu.U.signs[mu.u0_index] == 0:
        raise CompositionError("lambda(u0) = 0")
    res = composition_residual(mu, trials)
    if res > tol:
        raise CompositionError(f"map is not a composition (residual {res:.3g})")
    keep = [k for k in range(mu.U.dim) if k != mu.u0_index]
    v_signs = mu.U.signs[keep]
    V = ScalarSpace(len(keep), int(np.sum(v_signs < 0)))
    JH = mu.H.gram
    B = np.array([mu.U.signs[k] * (mu.M[k] @ JH) for k in keep])
    skew = np.abs(B + B.transpose(0, 2, 1)).max()
    if skew > tol:
        raise CompositionError(f"projected Phi is not anti-symmetric (violation {skew:.3g})")
    # remove roundoff-level symmetric parts left by a numerically found map
    B = 0.5 * (B - B.transpose(0, 2, 1))
    meta = {k: v for k, v in mu.metadata.items()}
    meta["u_indices_of_v"] = keep
    return HTypeAlgebra(mu.H, V, B, label, meta)


def composition_from_algebra(alg: HTypeAlgebra, u0_sign: int = 1, validate: bool = True,
                             trials: int = 256, tol: float = 1e-9) -> CompositionMap:
    """Extend ``mu`` from V to ``U = V + span{u0}`` with ``mu(v + a u0, h) = mu(v, h) + a h``.

    ``u0`` is placed as the first positive direction of U.  A normalized
    composition forces ``lambda(u0) = +1`` (``phi(h) = lambda(u0) phi(h)``), so
    ``u0_sign = -1`` is rejected.
    """
    if u0_sign not in (1, -1):
        raise ValueError("u0_sign must be +1 or -1")
    if u0_sign == -1:
        raise ValueError("a normalized composition requires lambda(u0) = +1")
    if validate:
        report = validate_h_type(alg, trials=trials, tol=tol)
        if not report.passed:
            raise CompositionError("algebra is not of general H-type", report)
    m, n = alg.m, alg.n
    u0 = alg.V.index
    U = ScalarSpace(m + 1, alg.V.index)
    A = alg.clifford_coefficients()
    M = np.empty((m + 1, n, n))
    v_positions = [k for k in range(m + 1) if k != u0]
    for a, k in enumerate(v_positions):
        M[k] = A[a]
    M[u0] = np.eye(n)
    return CompositionMap(U, alg.H, M, u0, {"source": alg.label})


def tabulate_composition(func: Callable[[np.ndarray, np.ndarray], np.ndarray], lambda_signs,
                         phi_signs, u0: int = 0, metadata: dict | None = None) -> CompositionMap:
    """Build a canonical ``CompositionMap`` from a bilinear callable in natural coordinates.

    ``func(u, h)`` acts on natural coordinates whose diagonal forms have the
    given signs; ``u0`` is the natural index of the normalizing direction.
    Both spaces are permuted so that negative directions come first.
    """
    lambda_signs = np.asarray(lambda_signs, dtype=float)
    phi_signs = np.asarray(phi_signs, dtype=float)
    du, n = len(lambda_signs), len(phi_signs)
    Eu, Eh = np.eye(du), np.eye(n)
    Mnat = np.array([[func(Eu[k], Eh[i]) for i in range(n)] for k in range(du)], dtype=float)
    pu = canonical_permutation(lambda_signs)
    ph = canonical_permutation(phi_signs)
    M = Mnat[np.ix_(pu, ph, ph)]
    U = ScalarSpace(du, int(np.sum(lambda_signs < 0)))
    H = ScalarSpace(n, int(np.sum(phi_signs < 0)))
    u0_canon = int(np.where(pu == u0)[0][0])
    meta = dict(metadata or {})
    meta.update({"h_permutation": ph.tolist(), "u_permutation": pu.tolist()})
    return CompositionMap(U, H, M, u0_canon, meta)


# ---------------------------------------------------------------------------
# 2D composition search


def _coeffs_to_tensor(c: np.ndarray) -> np.ndarray:
    """Map ``(a, b, c, d, alpha, beta, gamma, delta)`` to ``M[k, i, j]``.

    ``mu(y, x) = (a y1x1 + b y1x2 + c y2x1 + d y2x2, alpha y1x1 + ... + delta y2x2)``.
    """
    c = np.asarray(c, dtype=float)
    M = np.zeros(c.shape[:-1] + (2, 2, 2))
    M[..., 0, 0, 0], M[..., 0, 1, 0], M[..., 1, 0, 0], M[..., 1, 1, 0] = (c[..., 0], c[..., 1], c[..., 2], c[..., 3])
    M[..., 0, 0, 1], M[..., 0, 1, 1], M[..., 1, 0, 1], M[..., 1, 1, 1] = (c[..., 4], c[..., 5], c[..., 6], c[..., 7])
    return M


_PAIRS = [(0, 0), (0, 1), (1, 1)]


def coefficient_system(phi_signs, lambda_signs) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic system ``r_e(c) = c^T G_e c - t_e`` whose zeros are the 2D compositions.

    One equation per monomial ``y_k y_l x_i x_j`` (``k <= l``, ``i <= j``) of
    ``phi(mu(y, x)) - lambda(y) phi(x)``, normalized so square terms read
    ``a^2 - alpha^2 = ...`` and mixed terms ``ab - alpha beta = 0``.
    """
    p = np.asarray(phi_signs, dtype=float)
    lam = np.asarray(lambda_signs, dtype=float)
    E = np.eye(8)
    Ms = _coeffs_to_tensor(E)

    def S(M1, M2, k, l, i, j):
        t1 = np.dot(p * M1[k, i], M2[l, j])
        t2 = np.dot(p * M1[l, i], M2[k, j])
        return 0.5 * (t1 + t2)

    G, t = [], []
    for k, l in _PAIRS:
        for i, j in _PAIRS:
            g = np.array([[S(Ms[a], Ms[b], k, l, i, j) for b in range(8)] for a in range(8)])
            G.append(0.5 * (g + g.T))
            t.append(lam[k] * p[i] if (k == l and i == j) else 0.0)
    return np.array(G), np.array(t)


@dataclass
class SearchResult:
    verdict: str  # "found" or "infeasible"
    residual: float
    coefficients: list[float]
    composition: CompositionMap | None = None
    certificate: dict | None = None

    @property
    def found(self) -> bool:
        return self.verdict == "found"

    def to_dict(self) -> dict[str, Any]:
        d = {"verdict": self.verdict, "residual": self.residual, "coefficients": self.coefficients}
        if self.certificate is not None:
            d["certificate"] = self.certificate
        return d


def _damped_gauss_newton(G, t, starts, max_iter=300):
    """Batched Levenberg-damped Gauss-Newton on ``r_e(c) = c^T G_e c - t_e``."""
    c = starts.copy()
    R = c.shape[0]
    lam = np.full(R, 1e-3)
    I8 = np.eye(8)

    def resid(c):
        return np.einsum("ra,eab,rb->re", c, G, c) - t

    r = resid(c)
    cost = np.einsum("re,re->r", r, r)
    for _ in range(max_iter):
        J = 2.0 * np.einsum("eab,rb->rea", G, c)
        JtJ = np.einsum("rea,reb->rab", J, J)
        g = np.einsum("rea,re->ra", J, r)
        diag = np.einsum("raa->ra", JtJ)
        A = JtJ + lam[:, None, None] * (I8 * (1.0 + diag[:, :, None]))
        step = -np.linalg.solve(A, g[:, :, None])[:, :, 0]
        c_new = c + step
        r_new = resid(c_new)
        cost_new = np.einsum("re,re->r", r_new, r_new)
        ok = cost_new < cost
        c[ok], r[ok], cost[ok] = c_new[ok], r_new[ok], cost_new[ok]
        lam = np.where(ok, np.maximum(lam / 3.0, 1e-12), np.minimum(lam * 4.0, 1e12))
        if np.all((cost < 1e-28) | (lam >= 1e12)):
            break
    return c, cost


def _normalize(M: np.ndarray, U: ScalarSpace, H: ScalarSpace) -> CompositionMap | None:
    """Compose with the inverse of ``mu(u0, .)`` so that the u0 slice is the identity."""
    if U.index == U.dim:
        return None
    u0 = U.index
    Minv = np.linalg.inv(M[u0])
    Mn = np.einsum("ij,kjl->kil", Minv, M)
    Mn[u0] = np.eye(H.dim)
    return CompositionMap(U, H, Mn, u0)


def search_composition_2d(phi_index: int, lambda_index: int, restarts: int = 100,
                          seed: int = 0, threshold: float = 1e-10) -> SearchResult:
    """Multistart search for a composition of 2D forms of the given indices.

    Starts are uniform in ``[-2, 2]^8``; restart ``k`` draws from a generator
    seeded by ``(seed, k)``.  ``residual`` is the best sum of squared equation
    residuals; an infeasible verdict is numerical evidence only, except where
    :func:`nonexistence_certificate` supplies an exact argument.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    H = ScalarSpace(2, phi_index)
    U = ScalarSpace(2, lambda_index)
    G, t = coefficient_system(H.signs, U.signs)
    starts = np.array([np.random.default_rng([seed, k]).uniform(-2.0, 2.0, 8) for k in range(restarts)])
    c, cost = _damped_gauss_newton(G, t, starts)
    best = int(np.argmin(cost))
    residual = float(cost[best])
    coeffs = [float(x) for x in c[best]]
    cert = nonexistence_certificate(phi_index, lambda_index)
    if residual <= threshold:
        comp = _normalize(_coeffs_to_tensor(c[best]), U, H)
        if comp is not None:
            return SearchResult("found", residual, coeffs, comp, None)
    return SearchResult("infeasible", residual, coeffs, None, cert)


def nonexistence_certificate(phi_index: int, lambda_index: int) -> dict | None:
    """Exact obstruction for a split ``phi`` on R^2 against a definite ``lambda``.

    With ``p = mu(u_1, h_1)`` and ``r = mu(u_2, h_1)`` the coefficient system
    forces ``<p,p> = lambda_1 phi_1``, ``<r,r> = lambda_2 phi_1`` and
    ``<p,r> = 0``.  In a plane of signature (1,1) the identity
    ``<p,p><r,r> - <p,r>^2 = -det[p r]^2`` makes ``<p,p><r,r> <= 0``, which
    contradicts ``lambda_1 lambda_2 phi_1^2 = 1``.  Both the system and the
    identity are checked symbolically.  Returns None when the argument does
    not apply.
    """
    if phi_index != 1 or lambda_index not in (0, 2):
        return None
    import sympy as sp

    a, b, c, d, al, be, ga, de = sp.symbols("a b c d alpha beta gamma delta", real=True)
    x1, x2, y1, y2 = sp.symbols("x1 x2 y1 y2", real=True)
    p_s = [-1, 1]
    l_s = [-1, -1] if lambda_index == 2 else [1, 1]
    mu1 = a * y1 * x1 + b * y1 * x2 + c * y2 * x1 + d * y2 * x2
    mu2 = al * y1 * x1 + be * y1 * x2 + ga * y2 * x1 + de * y2 * x2
    poly = sp.Poly(sp.expand(p_s[0] * mu1**2 + p_s[1] * mu2**2
                             - (l_s[0] * y1**2 + l_s[1] * y2**2) * (p_s[0] * x1**2 + p_s[1] * x2**2)),
                   y1, y2, x1, x2)
    eq_pp = poly.coeff_monomial(y1**2 * x1**2)
    eq_rr = poly.coeff_monomial(y2**2 * x1**2)
    eq_pr = poly.coeff_monomial(y1 * y2 * x1**2)

    def ip(u, w):
        return p_s[0] * u[0] * w[0] + p_s[1] * u[1] * w[1]

    pv, rv = (a, al), (c, ga)
    t_pp, t_rr = l_s[0] * p_s[0], l_s[1] * p_s[0]
    system_ok = (sp.expand(eq_pp - (ip(pv, pv) - t_pp)) == 0
                 and sp.expand(eq_rr - (ip(rv, rv) - t_rr)) == 0
                 and sp.expand(eq_pr - 2 * ip(pv, rv)) == 0)
    det = a * ga - al * c
    identity_ok = sp.expand(ip(pv, pv) * ip(rv, rv) - ip(pv, rv) ** 2 + det**2) == 0
    forced_product = t_pp * t_rr
    contradiction = bool(system_ok and identity_ok and forced_product > 0)
    return {
        "contradiction": contradiction,
        "forced": {"<p,p>": t_pp, "<r,r>": t_rr, "<p,r>": 0},
        "identity": "<p,p><r,r> - <p,r>^2 = -(a*gamma - alpha*c)^2",
        "reason": "forced <p,p><r,r> = %d > 0 but the identity gives <p,p><r,r> <= 0" % forced_product,
    }
