"""Levi-Civita connection and curvature of the left-invariant metric on an H-type group.

Left-invariant fields are identified with elements ``(h, v)`` of ``H + V``.
The connection is

    nabla_{h1} h2 = 1/2 [h1, h2],   nabla_v h = nabla_h v = -1/2 mu(v, h),
    nabla_{v1} v2 = 0,

and the curvature is built from it by ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``.
Sectional curvature uses ``<R(a, b) a, b> / (|a|^2 |b|^2 - <a, b>^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import HTypeAlgebra, _null_space, bracket, mu, sample_unit


class DegeneratePlaneError(ValueError):
    pass


class RicciMismatchError(RuntimeError):
    pass


@dataclass(frozen=True)
class TangentElement:
    h: np.ndarray
    v: np.ndarray

    @classmethod
    def horizontal(cls, alg: HTypeAlgebra, h) -> "TangentElement":
        return cls(alg.H.check(h, "h"), np.zeros(alg.m))

    @classmethod
    def vertical(cls, alg: HTypeAlgebra, v) -> "TangentElement":
        return cls(np.zeros(alg.n), alg.V.check(v, "v"))

    @classmethod
    def from_vector(cls, alg: HTypeAlgebra, w) -> "TangentElement":
        w = np.asarray(w, dtype=float)
        if w.shape != (alg.n + alg.m,):
            raise ValueError(f"expected a vector of length {alg.n + alg.m}, got shape {w.shape}")
        return cls(w[: alg.n], w[alg.n:])

    def vector(self) -> np.ndarray:
        return np.concatenate([self.h, self.v])

    def __add__(self, other: "TangentElement") -> "TangentElement":
        return TangentElement(self.h + other.h, self.v + other.v)

    def __sub__(self, other: "TangentElement") -> "TangentElement":
        return TangentElement(self.h - other.h, self.v - other.v)

    def __mul__(self, c: float) -> "TangentElement":
        return TangentElement(c * self.h, c * self.v)

    __rmul__ = __mul__


def _check(alg: HTypeAlgebra, X: TangentElement) -> TangentElement:
    return TangentElement(alg.H.check(X.h, "h"), alg.V.check(X.v, "v"))


def inner(alg: HTypeAlgebra, X: TangentElement, Y: TangentElement) -> float:
    return float(np.dot(alg.H.signs * X.h, Y.h) + np.dot(alg.V.signs * X.v, Y.v))


def lie_bracket(alg: HTypeAlgebra, X: TangentElement, Y: TangentElement) -> TangentElement:
    X, Y = _check(alg, X), _check(alg, Y)
    return TangentElement(np.zeros(alg.n), bracket(alg, X.h, Y.h))


def covariant_derivative(alg: HTypeAlgebra, X: TangentElement, Y: TangentElement) -> TangentElement:
    """``nabla_X Y`` for left-invariant fields."""
    X, Y = _check(alg, X), _check(alg, Y)
    h = -0.5 * (mu(alg, X.v, Y.h) + mu(alg, Y.v, X.h))
    return TangentElement(h, 0.5 * bracket(alg, X.h, Y.h))


def curvature_endomorphism(alg: HTypeAlgebra, X: TangentElement, Y: TangentElement,
                           Z: TangentElement) -> TangentElement:
    """``R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X, Y] Z``."""
    nab = lambda A, C: covariant_derivative(alg, A, C)
    return nab(X, nab(Y, Z)) - nab(Y, nab(X, Z)) - nab(lie_bracket(alg, X, Y), Z)


# ---------------------------------------------------------------------------
# planes


@dataclass(frozen=True)
class Plane:
    a: TangentElement
    b: TangentElement
    alg: HTypeAlgebra = field(repr=False)

    @property
    def discriminant(self) -> float:
        ab = inner(self.alg, self.a, self.b)
        return inner(self.alg, self.a, self.a) * inner(self.alg, self.b, self.b) - ab * ab

    def degeneracy_threshold(self) -> float:
        scale = float(np.dot(self.a.vector(), self.a.vector()) * np.dot(self.b.vector(), self.b.vector()))
        return 1e-12 * max(1.0, scale)

    @property
    def degenerate(self) -> bool:
        return abs(self.discriminant) < self.degeneracy_threshold()


def plane(alg: HTypeAlgebra, a, b) -> Plane:
    """Plane spanned by two tangent elements or two raw vectors of length ``n + m``."""
    if not isinstance(a, TangentElement):
        a = TangentElement.from_vector(alg, a)
    if not isinstance(b, TangentElement):
        b = TangentElement.from_vector(alg, b)
    return Plane(_check(alg, a), _check(alg, b), alg)


def sectional_curvature(alg: HTypeAlgebra, P: Plane) -> float:
    disc = P.discriminant
    if abs(disc) < P.degeneracy_threshold():
        raise DegeneratePlaneError(f"plane is degenerate (discriminant {disc:.3g})")
    return inner(alg, curvature_endomorphism(alg, P.a, P.b, P.a), P.b) / disc


@dataclass(frozen=True)
class PlaneKind:
    kind: str
    note: str = ""


def _rank(rows: np.ndarray, tol: float = 1e-10) -> int:
    s = np.linalg.svd(np.atleast_2d(rows), compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0]))) if s.size and s[0] > 0 else 0


def _invariant_directions(alg: HTypeAlgebra, h1, h2) -> np.ndarray:
    """Basis (columns) of all ``v`` with ``mu(v, P) in P`` for ``P = span{h1, h2}``."""
    Q, _ = np.linalg.qr(np.column_stack([h1, h2]))
    proj_out = np.eye(alg.n) - Q @ Q.T
    Mu = alg.mu_matrices()
    A = np.vstack([proj_out @ np.einsum("aij,j->ia", Mu, p) for p in (h1, h2)])
    # threshold against the size of mu(., h), not against A itself: A may be pure roundoff
    scale = max(np.abs(h1).max(), np.abs(h2).max()) * max(1.0, np.abs(Mu).max())
    _, sv, vt = np.linalg.svd(A)
    rank = int(np.sum(sv > 1e-10 * scale))
    return vt[rank:].T


def _maps_into(alg: HTypeAlgebra, v, h1, h2, tol: float) -> bool:
    Q, _ = np.linalg.qr(np.column_stack([h1, h2]))
    resid = [mu(alg, v, p) - Q @ (Q.T @ mu(alg, v, p)) for p in (h1, h2)]
    scale = max(1.0, np.abs(v).max() * max(np.abs(h1).max(), np.abs(h2).max()))
    return max(np.abs(r).max() for r in resid) <= tol * scale


def classify_plane(alg: HTypeAlgebra, P: Plane, tol: float = 1e-10) -> PlaneKind:
    """Classify as degenerate, vertical, mixed, abelian, stable or generic."""
    if P.degenerate:
        return PlaneKind("degenerate")
    a, b = P.a, P.b
    scale = max(np.abs(a.vector()).max(), np.abs(b.vector()).max())
    hor_rank = _rank(np.vstack([a.h, b.h]))
    ver_rank = _rank(np.vstack([a.v, b.v]))
    if hor_rank == 0:
        return PlaneKind("vertical")
    if hor_rank == 1 and ver_rank == 1:
        return PlaneKind("mixed")
    if ver_rank > 0:
        return PlaneKind("generic", "plane is neither horizontal, vertical nor mixed")

    h1, h2 = a.h, b.h
    br = bracket(alg, h1, h2)
    if np.abs(br).max() <= 1e-12 * max(1.0, scale**2):
        return PlaneKind("abelian")
    for p in (h1, h2):
        q = alg.H.norm2(p)
        if abs(q) > tol * max(1.0, scale**2):
            v = br / q
            if abs(alg.V.norm2(v)) > tol * max(1.0, float(np.dot(v, v))) and _maps_into(alg, v, h1, h2, tol):
                return PlaneKind("stable")
            break
    # exhaustive: the invariant directions form a subspace; it needs a non-null member
    S = _invariant_directions(alg, h1, h2)
    if S.shape[1] and np.abs(S.T @ alg.JV @ S).max() > tol:
        note = "" if abs(alg.H.norm2(h1)) > tol or abs(alg.H.norm2(h2)) > tol else "null basis; found by subspace search"
        return PlaneKind("stable", note)
    return PlaneKind("generic")


# ---------------------------------------------------------------------------
# random planes of each kind


def random_mixed_plane(alg: HTypeAlgebra, rng: np.random.Generator) -> Plane:
    h = sample_unit(alg.H, rng)
    v = sample_unit(alg.V, rng)
    return plane(alg, TangentElement.horizontal(alg, h), TangentElement.vertical(alg, v))


def random_vertical_plane(alg: HTypeAlgebra, rng: np.random.Generator) -> Plane:
    if alg.m < 2:
        raise ValueError("vertical planes need m >= 2")
    while True:
        P = plane(alg, TangentElement.vertical(alg, rng.uniform(-1, 1, alg.m)),
                  TangentElement.vertical(alg, rng.uniform(-1, 1, alg.m)))
        if abs(P.discriminant) > 1e-3:
            return P


def random_stable_plane(alg: HTypeAlgebra, rng: np.random.Generator) -> Plane:
    h = sample_unit(alg.H, rng)
    v = sample_unit(alg.V, rng)
    # mix the basis so the plane is not presented in its adapted form
    h2 = mu(alg, v, h)
    c = rng.uniform(-1, 1, (2, 2))
    while abs(np.linalg.det(c)) < 0.1:
        c = rng.uniform(-1, 1, (2, 2))
    return plane(alg, TangentElement.horizontal(alg, c[0, 0] * h + c[0, 1] * h2),
                 TangentElement.horizontal(alg, c[1, 0] * h + c[1, 1] * h2))


def random_abelian_plane(alg: HTypeAlgebra, rng: np.random.Generator) -> Plane:
    if alg.n - alg.m < 2:
        raise ValueError("abelian planes need n - m >= 2")
    while True:
        h = sample_unit(alg.H, rng)
        ker = _null_space(alg.ad_matrix(h))
        h2 = ker @ rng.uniform(-1, 1, ker.shape[1])
        P = plane(alg, TangentElement.horizontal(alg, h), TangentElement.horizontal(alg, h2))
        if abs(P.discriminant) > 1e-3:
            return P


def random_horizontal_plane(alg: HTypeAlgebra, rng: np.random.Generator) -> Plane:
    return plane(alg, TangentElement.horizontal(alg, rng.uniform(-1, 1, alg.n)),
                 TangentElement.horizontal(alg, rng.uniform(-1, 1, alg.n)))


# ---------------------------------------------------------------------------
# Ricci and scalar curvature


def _basis(alg: HTypeAlgebra) -> list[TangentElement]:
    eye = np.eye(alg.n + alg.m)
    return [TangentElement.from_vector(alg, e) for e in eye]


def ricci_closed_form(alg: HTypeAlgebra) -> np.ndarray:
    """Block form ``diag(-m/2 J_H, n/4 J_V)`` of the Ricci tensor of an H-type algebra."""
    out = np.zeros((alg.n + alg.m,) * 2)
    out[: alg.n, : alg.n] = -0.5 * alg.m * alg.JH
    out[alg.n:, alg.n:] = 0.25 * alg.n * alg.JV
    return out


def ricci_signed_block_form(alg: HTypeAlgebra) -> np.ndarray:
    """``diag(-1/2 (sum eps_a) J_H, 1/4 (sum eps_i) J_V)``.

    Equal to :func:`ricci_closed_form` when both scalar products are
    definite, different otherwise.
    """
    out = np.zeros((alg.n + alg.m,) * 2)
    out[: alg.n, : alg.n] = -0.5 * alg.V.signs.sum() * alg.JH
    out[alg.n:, alg.n:] = 0.25 * alg.H.signs.sum() * alg.JV
    return out


def _signs(alg: HTypeAlgebra) -> np.ndarray:
    return np.concatenate([alg.H.signs, alg.V.signs])


def ricci_tensor(alg: HTypeAlgebra, tol: float = 1e-8) -> np.ndarray:
    """``Ric(X, Y) = sum_k eps_k <R(e_k, X) Y, e_k>`` by direct summation over the basis.

    Raises :class:`RicciMismatchError` if the result differs from
    :func:`ricci_closed_form` by more than ``tol``, which happens when the
    algebra is not of H-type.
    """
    E = _basis(alg)
    eps = _signs(alg)
    N = len(E)
    ric = np.zeros((N, N))
    for a in range(N):
        for b in range(a, N):
            val = sum(e * inner(alg, curvature_endomorphism(alg, ek, E[a], E[b]), ek)
                      for e, ek in zip(eps, E))
            ric[a, b] = ric[b, a] = val
    gap = float(np.abs(ric - ricci_closed_form(alg)).max())
    if gap > tol:
        raise RicciMismatchError(f"direct Ricci contraction differs from the block form by {gap:.3g}")
    return ric


def metric_trace(alg: HTypeAlgebra, S: np.ndarray) -> float:
    """``sum_k eps_k S[k, k]``, the trace of a bilinear form with respect to the metric."""
    return float(np.dot(_signs(alg), np.diag(S)))


def scalar_curvature_formula(alg: HTypeAlgebra) -> float:
    """``-nm/4``."""
    return -0.25 * alg.n * alg.m


def scalar_curvature_signed_formula(alg: HTypeAlgebra) -> float:
    """``-1/4 (sum eps_a)(sum eps_i)``; agrees with the scalar curvature only for definite signatures."""
    return -0.25 * float(alg.V.signs.sum()) * float(alg.H.signs.sum())


def scalar_curvature(alg: HTypeAlgebra, tol: float = 1e-10) -> float:
    """Metric trace of :func:`ricci_tensor`, cross-checked against ``-nm/4``."""
    trace = metric_trace(alg, ricci_tensor(alg))
    formula = scalar_curvature_formula(alg)
    if abs(trace - formula) > tol:
        raise RicciMismatchError(f"trace of Ricci {trace!r} differs from formula value {formula!r}")
    return trace


# Values tabulated in the literature for the catalog families.  The split
# entries disagree with the trace of the Ricci matrix and are kept so that the
# report can flag the difference.
TABULATED_SCALAR = {
    "heis": lambda n: -n / 2,
    "quat": lambda n: -3.0 * n,
    "heis_split": lambda n: -0.25,
    "quat_split": lambda n: -0.25,
}


def curvature_report(alg: HTypeAlgebra, samples: int = 4, seed: int = 0) -> dict[str, Any]:
    """Ricci matrix, scalar curvature and a few classified sample planes."""
    ric = ricci_tensor(alg)
    trace = metric_trace(alg, ric)
    signed = scalar_curvature_signed_formula(alg)
    report: dict[str, Any] = {
        "label": alg.label,
        "ricci": ric.tolist(),
        "scalar": trace,
        "scalar_formula": signed,
        "scalar_formula_matches": bool(abs(signed - trace) <= 1e-10),
    }
    fam = alg.metadata.get("family")
    if fam in TABULATED_SCALAR:
        listed = TABULATED_SCALAR[fam](alg.metadata.get("n", 1))
        report["scalar_tabulated"] = listed
        report["scalar_discrepancy"] = bool(abs(listed - trace) > 1e-10)
        if report["scalar_discrepancy"]:
            report["scalar_note"] = (f"tabulated value {listed} disagrees with the Ricci trace {trace}; "
                                     "the trace is taken as correct")

    rng = np.random.default_rng(seed)
    makers = [random_mixed_plane, random_stable_plane, random_horizontal_plane]
    if alg.m >= 2:
        makers.append(random_vertical_plane)
    if alg.n - alg.m >= 2:
        makers.append(random_abelian_plane)
    planes = []
    for make in makers:
        for _ in range(samples):
            P = make(alg, rng)
            kind = classify_plane(alg, P)
            k = None if kind.kind == "degenerate" else sectional_curvature(alg, P)
            entry = {"basis": [P.a.vector().tolist(), P.b.vector().tolist()], "class": kind.kind, "k": k}
            if kind.note:
                entry["note"] = kind.note
            planes.append(entry)
    report["sample_planes"] = planes
    return report
