"""Step-2 nilpotent Lie algebras ``H + V`` with scalar products, and the H-type validator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .spaces import ScalarSpace

SKEW_TOL = 1e-14


class AlgebraSpecError(ValueError):
    """Malformed algebra description; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True, eq=False)
class HTypeAlgebra:
    """Structure constants ``B[a, i, j]`` with ``[h_i, h_j] = sum_a B[a, i, j] v_a``.

    ``H`` and ``V`` are canonically ordered (negative directions first).
    ``metadata`` carries provenance such as the permutation applied to a
    catalog presentation.
    """

    H: ScalarSpace
    V: ScalarSpace
    B: np.ndarray
    label: str = "custom"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        B = np.array(self.B, dtype=float)
        n, m = self.H.dim, self.V.dim
        if B.shape != (m, n, n):
            raise AlgebraSpecError("B", f"expected shape {(m, n, n)}, got {B.shape}")
        if not np.all(np.isfinite(B)):
            raise AlgebraSpecError("B", "entries must be finite")
        skew = np.abs(B + B.transpose(0, 2, 1)).max()
        if skew > SKEW_TOL:
            raise AlgebraSpecError("B", f"slices must be skew-symmetric (violation {skew:.3g})")
        B.setflags(write=False)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.H.dim

    @property
    def m(self) -> int:
        return self.V.dim

    @property
    def JH(self) -> np.ndarray:
        return self.H.gram

    @property
    def JV(self) -> np.ndarray:
        return self.V.gram

    def clifford_coefficients(self) -> np.ndarray:
        """``A[a] = eps_a B[a] J_H``, so that ``mu(v_a, h_i) = sum_j A[a, i, j] h_j``."""
        return self.V.signs[:, None, None] * (self.B @ self.JH)

    def mu_matrices(self) -> np.ndarray:
        """Column-action matrices of ``mu(v_a, .)``: ``mu(v_a, h) = mu_matrices()[a] @ h``."""
        return self.clifford_coefficients().transpose(0, 2, 1)

    def ad_matrix(self, h) -> np.ndarray:
        """The ``m x n`` matrix of ``ad_h: H -> V``."""
        h = self.H.check(h, "h")
        return np.einsum("i,aij->aj", h, self.B)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "nu_h": self.H.index,
            "m": self.m,
            "nu_v": self.V.index,
            "B": self.B.tolist(),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "HTypeAlgebra":
        if not isinstance(d, dict):
            raise AlgebraSpecError("<root>", "algebra spec must be a JSON object")
        ints = {}
        for key in ("n", "nu_h", "m", "nu_v"):
            if key not in d:
                raise AlgebraSpecError(key, "missing")
            val = d[key]
            if isinstance(val, bool) or not isinstance(val, int):
                raise AlgebraSpecError(key, f"must be an integer, got {val!r}")
            ints[key] = val
        try:
            H = ScalarSpace(ints["n"], ints["nu_h"])
        except ValueError as exc:
            raise AlgebraSpecError("nu_h" if ints["n"] >= 1 else "n", str(exc)) from None
        try:
            V = ScalarSpace(ints["m"], ints["nu_v"])
        except ValueError as exc:
            raise AlgebraSpecError("nu_v" if ints["m"] >= 1 else "m", str(exc)) from None
        if "B" not in d:
            raise AlgebraSpecError("B", "missing")
        try:
            B = np.array(d["B"], dtype=float)
        except (TypeError, ValueError):
            raise AlgebraSpecError("B", "must be an m-length array of n x n numeric arrays") from None
        label = d.get("label", "custom")
        if not isinstance(label, str):
            raise AlgebraSpecError("label", "must be a string")
        return cls(H, V, B, label)


def bracket(alg: HTypeAlgebra, h1, h2) -> np.ndarray:
    """``[h1, h2]`` in V-coordinates."""
    h1 = alg.H.check(h1, "h1")
    h2 = alg.H.check(h2, "h2")
    return np.einsum("i,aij,j->a", h1, alg.B, h2)


def mu(alg: HTypeAlgebra, v, h) -> np.ndarray:
    """The map defined by ``<mu(v, h), h'>_H = <v, [h, h']>_V``."""
    v = alg.V.check(v, "v")
    h = alg.H.check(h, "h")
    return np.einsum("a,aij,j->i", v, alg.mu_matrices(), h)


# ---------------------------------------------------------------------------
# validation


@dataclass
class CheckResult:
    name: str
    max_residual: float
    threshold: float
    passed: bool
    note: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult]
    sampled_vectors: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "sampled_vectors": self.sampled_vectors,
            "checks": [
                {"name": c.name, "max_residual": float(c.max_residual), "threshold": float(c.threshold),
                 "passed": bool(c.passed), **({"note": c.note} if c.note else {})}
                for c in self.checks
            ],
        }


def sample_unit(space: ScalarSpace, rng: np.random.Generator, sign: float | None = None,
                min_abs: float = 0.1) -> np.ndarray:
    """Uniform draw in ``[-1, 1]^dim`` rescaled to ``<h, h> = +-1``.

    Draws with ``|<h, h>| < min_abs`` (or of the wrong sign, when ``sign`` is
    given) are rejected.
    """
    if sign is not None:
        if sign > 0 and space.index == space.dim:
            raise ValueError("space has no positive vectors")
        if sign < 0 and space.index == 0:
            raise ValueError("space has no negative vectors")
    while True:
        h = rng.uniform(-1.0, 1.0, space.dim)
        q = space.norm2(h)
        if abs(q) < min_abs or (sign is not None and np.sign(q) != np.sign(sign)):
            continue
        return h / np.sqrt(abs(q))


def _null_space(A: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal (Euclidean) basis of ker A, as columns, by SVD thresholding."""
    rows, cols = A.shape
    if rows == 0:
        return np.eye(cols)
    _, s, vt = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rel_tol * smax)) if smax > 0 else 0
    return vt[rank:].T


def horizontal_complement(alg: HTypeAlgebra, h) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(ker ad_h, complement)`` as column bases.

    The complement is orthogonal to the kernel with respect to the scalar
    product on H, not the Euclidean one.
    """
    ker = _null_space(alg.ad_matrix(h))
    if ker.shape[1] == 0:
        return ker, np.eye(alg.n)
    comp = _null_space(ker.T @ alg.JH)
    return ker, comp


def _rel(residual: float, scale: float) -> float:
    return residual / max(1.0, scale)


def validate_h_type(alg: HTypeAlgebra, trials: int = 256, tol: float = 1e-9,
                    seed: int = 0) -> ValidationReport:
    """Decide whether ``alg`` is a general H-type algebra.

    Sampled checks: (a) the defining identity of ``mu``; (b) ``[h, mu(v, h)] =
    <h, h> v``; (c) the polarized composition formula; (g) that ``ad_h`` maps
    the complement of its kernel onto V as an isometry or anti-isometry for
    unit ``h``.  Exact matrix checks: (d) ``A_a^2 = -eps_a I``; (e)
    ``(J_H B_a)^2 = -eps_a I``; (f) anticommutation of ``J_H B_a`` and ``J_H B_b``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    rng = np.random.default_rng(seed)
    H, V = alg.H, alg.V
    n, m = alg.n, alg.m
    JH = alg.JH
    eps = V.signs
    I = np.eye(n)
    checks: list[CheckResult] = []

    hs = rng.uniform(-1, 1, (trials, n))
    h2s = rng.uniform(-1, 1, (trials, n))
    vs = rng.uniform(-1, 1, (trials, m))
    v2s = rng.uniform(-1, 1, (trials, m))
    Mu = alg.mu_matrices()

    res_a = res_b = res_c = 0.0
    for h, h2, v, v2 in zip(hs, h2s, vs, v2s):
        muvh = np.einsum("a,aij,j->i", v, Mu, h)
        lhs = float(np.dot(H.signs * muvh, h2))
        rhs = float(np.dot(eps * v, bracket(alg, h, h2)))
        res_a = max(res_a, abs(lhs - rhs))
        q = H.norm2(h)
        res_b = max(res_b, np.abs(bracket(alg, h, muvh) - q * v).max())
        muv2h = np.einsum("a,aij,j->i", v2, Mu, h)
        pol = float(np.dot(H.signs * muvh, muv2h)) - float(np.dot(eps * v, v2)) * q
        res_c = max(res_c, abs(pol))
    checks.append(CheckResult("a_mu_definition", res_a, tol, res_a <= tol))
    checks.append(CheckResult("b_image_identity", res_b, tol, res_b <= tol))
    checks.append(CheckResult("c_composition", res_c, tol, res_c <= tol))

    A = alg.clifford_coefficients()
    res_d = max(np.abs(A[a] @ A[a] + eps[a] * I).max() for a in range(m))
    checks.append(CheckResult("d_clifford_A_squared", float(res_d), tol, res_d <= tol))
    JB = JH @ alg.B
    res_e = max(np.abs(JB[a] @ JB[a] + eps[a] * I).max() for a in range(m))
    checks.append(CheckResult("e_clifford_JB_squared", float(res_e), tol, res_e <= tol))
    res_f = 0.0
    for a in range(m):
        for b in range(a + 1, m):
            res_f = max(res_f, np.abs(JB[a] @ JB[b] + JB[b] @ JB[a]).max())
    checks.append(CheckResult("f_anticommutation", float(res_f), tol, res_f <= tol))

    res_g = 0.0
    bad_rank = 0
    signs_seen = set()
    for _ in range(trials):
        h = sample_unit(H, rng)
        ker, comp = horizontal_complement(alg, h)
        ad = alg.ad_matrix(h)
        rank = n - ker.shape[1]
        if rank != m or comp.shape[1] != m:
            bad_rank += 1
            continue
        img = ad @ comp
        gv = img.T @ alg.JV @ img
        gh = comp.T @ JH @ comp
        scale = np.abs(gh).max()
        r_plus = np.abs(gv - gh).max()
        r_minus = np.abs(gv + gh).max()
        signs_seen.add("isometry" if r_plus <= r_minus else "anti-isometry")
        res_g = max(res_g, _rel(min(r_plus, r_minus), scale))
    passed_g = bad_rank == 0 and res_g <= tol
    note = f"{bad_rank} samples where ad_h is not onto V" if bad_rank else ", ".join(sorted(signs_seen))
    checks.append(CheckResult("g_adjoint_isometry", float(res_g), tol, passed_g, note))
    return ValidationReport(checks, sampled_vectors=2 * trials)


def center_check(alg: HTypeAlgebra, trials: int = 1, tol: float = 1e-10) -> bool:
    """True iff no nonzero horizontal vector is central, i.e. the stacked B slices have rank n."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    stacked = alg.B.reshape(alg.m * alg.n, alg.n)
    s = np.linalg.svd(stacked, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return False
    return int(np.sum(s > tol * s[0])) == alg.n
