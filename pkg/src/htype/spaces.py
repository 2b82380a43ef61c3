"""Scalar-product linear algebra on diagonal, signed orthonormal bases.

Every space uses the canonical ordering in which the negative directions
come first: basis vector ``k`` (1-based) squares to ``-1`` when ``k <= index``
and to ``+1`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


def sign_symbol(k: int, nu: int) -> float:
    """Return -1.0 if ``k <= nu`` else +1.0 (``k`` is 1-based)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return -1.0 if k <= nu else 1.0


@dataclass(frozen=True)
class ScalarSpace:
    """Real vector space of dimension ``dim`` carrying a scalar product of index ``index``."""

    dim: int
    index: int = 0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if int(self.index) != self.index or not 0 <= self.index <= self.dim:
            raise ValueError(f"index must satisfy 0 <= index <= dim, got {self.index}")

    @cached_property
    def signs(self) -> np.ndarray:
        s = np.ones(self.dim)
        s[: self.index] = -1.0
        s.setflags(write=False)
        return s

    @cached_property
    def gram(self) -> np.ndarray:
        g = np.diag(self.signs)
        g.setflags(write=False)
        return g

    def check(self, a, name: str = "vector") -> np.ndarray:
        """Coerce ``a`` to a float vector of this space, raising on dimension mismatch."""
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim,):
            raise ValueError(f"{name} has shape {a.shape}, expected ({self.dim},)")
        return a

    def basis(self, k: int) -> np.ndarray:
        """0-based basis vector ``e_k``."""
        e = np.zeros(self.dim)
        e[k] = 1.0
        return e

    def norm2(self, a) -> float:
        """Signed square norm ``<a, a>``."""
        a = self.check(a)
        return float(np.dot(self.signs * a, a))


def scalar_product(space: ScalarSpace, a, b) -> float:
    """Return ``sum_k eps_k a_k b_k``."""
    a = space.check(a, "a")
    b = space.check(b, "b")
    return float(np.dot(space.signs * a, b))


def direct_sum_signature(*spaces: ScalarSpace) -> np.ndarray:
    """Concatenated sign vector of several spaces (not reordered)."""
    return np.concatenate([s.signs for s in spaces])


def canonical_permutation(signs) -> np.ndarray:
    """Stable permutation moving negative-sign coordinates first.

    ``new = old[perm]`` converts coordinates from the given ordering to the
    canonical one.
    """
    signs = np.asarray(signs, dtype=float)
    if not np.all(np.abs(signs) == 1.0):
        raise ValueError("signs must all be +-1 (degenerate forms are not supported)")
    neg = [k for k, s in enumerate(signs) if s < 0]
    pos = [k for k, s in enumerate(signs) if s > 0]
    return np.array(neg + pos, dtype=int)


# Pade [13/13] coefficients and the 1-norm bound below which no scaling is
# needed for double precision (Higham 2005).
_PADE13 = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
])
_THETA13 = 5.371920351148152


def mat_exp(M) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a [13/13] Pade approximant."""
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"mat_exp needs a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("mat_exp needs finite entries")
    n = A.shape[0]
    ident = np.eye(n)
    norm1 = np.abs(A).sum(axis=0).max() if n else 0.0
    squarings = 0
    if norm1 > _THETA13:
        squarings = int(np.ceil(np.log2(norm1 / _THETA13)))
        A = A / 2.0**squarings

    b = _PADE13
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    E = np.linalg.solve(V - U, V + U)
    for _ in range(squarings):
        E = E @ E
    return E
