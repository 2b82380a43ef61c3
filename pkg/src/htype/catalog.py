"""Named families of general H-type algebras together with a composition witness.

Each family is presented by a bilinear product on natural coordinates and
then moved to the canonical ordering (negative directions first); the
permutations are kept in the metadata of both returned objects.
"""

from __future__ import annotations

import numpy as np

from .algebra import HTypeAlgebra
from .composition import CompositionMap, algebra_from_composition, tabulate_composition

FAMILIES = ("heis", "heis_split", "quat", "quat_split")


def _complex_product(u, h):
    # (u1 + i u2)(x + i y) on each pair (x_k, y_k); gives [X_k, Y_k] = Z
    out = np.empty_like(h)
    x, y = h[0::2], h[1::2]
    out[0::2] = u[0] * x - u[1] * y
    out[1::2] = u[0] * y + u[1] * x
    return out


def _split_complex_product(u, h):
    # (u1 + j u2)(x + j y) with j^2 = 1, for x^2 - y^2 against u1^2 - u2^2
    out = np.empty_like(h)
    x, y = h[0::2], h[1::2]
    out[0::2] = u[0] * x + u[1] * y
    out[1::2] = u[0] * y + u[1] * x
    return out


def _quaternion_product(a: float, b: float):
    """``conj(y) x`` in the quaternion algebra with ``i^2 = -a``, ``j^2 = -b``, on 4-blocks.

    The norm is ``x1^2 + a x2^2 + b x3^2 + ab x4^2``.
    """
    def prod(y, h):
        out = np.empty_like(h)
        for s in range(0, len(h), 4):
            x = h[s:s + 4]
            out[s:s + 4] = (
                y[0] * x[0] + a * y[1] * x[1] + b * y[2] * x[2] + a * b * y[3] * x[3],
                y[0] * x[1] - y[1] * x[0] - b * y[2] * x[3] + b * y[3] * x[2],
                y[0] * x[2] - y[2] * x[0] + a * y[1] * x[3] - a * y[3] * x[1],
                y[0] * x[3] - y[3] * x[0] - y[1] * x[2] + y[2] * x[1],
            )
        return out
    return prod


def binary_composition(a: float) -> CompositionMap:
    """``mu_a(y, x) = (y1 x1 + a y2 x2, y1 x2 - y2 x1)`` for ``x1^2 + a x2^2``, ``a = +-1``."""
    if a not in (1, -1):
        raise ValueError("a must be +1 or -1 (other values give non-orthonormal forms)")

    def prod(y, x):
        return np.array([y[0] * x[0] + a * y[1] * x[1], y[0] * x[1] - y[1] * x[0]])

    signs = [1.0, float(a)]
    return tabulate_composition(prod, signs, signs, u0=0, metadata={"a": a})


def quaternion_composition(a: float, b: float) -> CompositionMap:
    """``conj(y) x`` on the quaternion algebra with ``i^2 = -a``, ``j^2 = -b`` (``a, b = +-1``)."""
    if a not in (1, -1) or b not in (1, -1):
        raise ValueError("a and b must be +-1")
    signs = [1.0, float(a), float(b), float(a * b)]
    return tabulate_composition(_quaternion_product(a, b), signs, signs, u0=0, metadata={"a": a, "b": b})


def catalog(name: str, n: int = 1) -> tuple[HTypeAlgebra, CompositionMap]:
    """Return ``(algebra, composition)`` for a catalog family.

    ``heis``: H^{2n,0,1}; ``heis_split``: H^{2n,n,1}; ``quat``: H^{4n,0,3};
    ``quat_split``: H^{4n,2n,3}.
    """
    if name not in FAMILIES:
        raise ValueError(f"unknown catalog family {name!r}; expected one of {FAMILIES}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if name == "heis":
        lam = [1.0, 1.0]
        phi = [1.0] * (2 * n)
        func = _complex_product
        label = f"H^{{{2 * n},0,1}}"
    elif name == "heis_split":
        lam = [1.0, -1.0]
        phi = [1.0, -1.0] * n
        func = _split_complex_product
        label = f"H^{{{2 * n},{n},1}}"
    elif name == "quat":
        lam = [1.0, 1.0, 1.0, 1.0]
        phi = lam * n
        func = _quaternion_product(1.0, 1.0)
        label = f"H^{{{4 * n},0,3}}"
    else:
        lam = [1.0, 1.0, -1.0, -1.0]
        phi = lam * n
        func = _quaternion_product(1.0, -1.0)
        label = f"H^{{{4 * n},{2 * n},3}}"
    meta = {"family": name, "n": n}
    comp = tabulate_composition(func, lam, phi, u0=0, metadata=meta)
    alg = algebra_from_composition(comp, label=label)
    return alg, comp


def parse_catalog_ref(ref: str) -> tuple[str, int]:
    """Parse ``"name:n"`` (``n`` defaults to 1)."""
    name, _, num = ref.partition(":")
    try:
        n = int(num) if num else 1
    except ValueError:
        raise ValueError(f"bad catalog reference {ref!r}; expected name:n") from None
    return name, n
