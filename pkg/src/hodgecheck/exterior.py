"""Componentwise exterior algebra on flat R^n in the global Cartesian frame.

Degree-p forms are represented by their coefficient vectors over the ordered
basis ``e_I = dx_{i1} ^ ... ^ dx_{ip}`` with ``I`` running over increasing
index tuples.  All operators on forms (wedge with a covector, interior
product, derivation lifts, exterior powers, Hodge star) become small dense
matrices on those coefficient vectors, which is what the quadrature-point
evaluators in the rest of the package consume.

The domain modules only use n in {1, 2}; everything here works for any n
since the lift algebra is tested against brute-force enumeration in n = 3.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

__all__ = [
    "basis_indices",
    "num_components",
    "basis_position",
    "wedge_covector_matrix",
    "interior_product_matrix",
    "lift_matrix",
    "exterior_power_matrix",
    "hodge_star_matrix",
    "tangential_projector",
    "normal_projector",
]


def basis_indices(n: int, p: int) -> list[tuple[int, ...]]:
    """Ordered basis of Lambda^p(R^n)*: increasing index tuples."""
    if p < 0 or p > n:
        return []
    return list(combinations(range(n), p))


def num_components(n: int, p: int) -> int:
    if p < 0 or p > n:
        return 0
    return comb(n, p)


def basis_position(n: int, p: int) -> dict[tuple[int, ...], int]:
    return {I: k for k, I in enumerate(basis_indices(n, p))}


def _insertion_sign(idx: int, tup: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Insert idx into the increasing tuple; None if already present."""
    if idx in tup:
        return None
    pos = sum(1 for t in tup if t < idx)
    return (-1) ** pos, tup[:pos] + (idx,) + tup[pos:]


def wedge_covector_matrix(a: np.ndarray, p: int) -> np.ndarray:
    """Matrix of ``w -> a ^ w`` from Lambda^p to Lambda^(p+1).

    ``a`` is the coefficient vector of a 1-form (length n).
    """
    n = len(a)
    src = basis_indices(n, p)
    pos = basis_position(n, p + 1)
    out = np.zeros((num_components(n, p + 1), num_components(n, p)))
    for j, I in enumerate(src):
        for idx in range(n):
            ins = _insertion_sign(idx, I)
            if ins is None:
                continue
            sign, J = ins
            out[pos[J], j] += sign * a[idx]
    return out


def interior_product_matrix(x: np.ndarray, p: int) -> np.ndarray:
    """Matrix of ``w -> i_X w`` from Lambda^p to Lambda^(p-1) for the vector X.

    Pointwise adjoint of ``wedge_covector_matrix(x_flat, p-1)`` since the
    metric is Euclidean.
    """
    return wedge_covector_matrix(np.asarray(x, dtype=float), p - 1).T


def lift_matrix(a: np.ndarray, p: int) -> np.ndarray:
    """Derivation-style lift of a 1-form endomorphism to Lambda^p.

    Acts on decomposable forms as the sum over wedge slots of ``a`` applied
    in each slot; the lift of the Hessian and of the Weitzenboeck/boundary
    operators all go through here.  For p = 0 the lift is the 1x1 zero
    matrix (empty slot sum).
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    src = basis_indices(n, p)
    pos = basis_position(n, p)
    out = np.zeros((len(src), len(src)))
    for j, I in enumerate(src):
        for slot in range(p):
            rest = I[:slot] + I[slot + 1:]
            col = a[:, I[slot]]  # a e_{I[slot]} = sum_k a[k, I[slot]] e_k
            for k in range(n):
                if col[k] == 0.0:
                    continue
                ins = _insertion_sign(k, rest)
                if ins is None:
                    continue
                sign, J = ins
                # e_k sits in the replaced slot; sorting it into place costs
                # (slot - insertion position) transpositions
                out[pos[J], j] += sign * (-1) ** slot * col[k]
    return out


def exterior_power_matrix(m: np.ndarray, p: int) -> np.ndarray:
    """Matrix of slotwise precomposition with ``m``: (Q w)(X1..Xp) = w(mX1..mXp).

    Entry [I, J] is the (I, J) minor determinant of ``m``.  Used for the
    tangential projector on boundary traces (exterior power of I - nu nu^T),
    which is idempotent but is not the derivation lift.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    src = basis_indices(n, p)
    out = np.zeros((len(src), len(src)))
    for j, J in enumerate(src):
        for i, I in enumerate(src):
            if p == 0:
                out[i, j] = 1.0
            else:
                out[i, j] = np.linalg.det(m[np.ix_(I, J)])
    return out


def hodge_star_matrix(n: int, p: int) -> np.ndarray:
    """Matrix of the Euclidean Hodge star Lambda^p -> Lambda^(n-p)."""
    src = basis_indices(n, p)
    pos = basis_position(n, n - p)
    out = np.zeros((num_components(n, n - p), num_components(n, p)))
    for j, I in enumerate(src):
        Ic = tuple(k for k in range(n) if k not in I)
        perm = I + Ic
        sign = _permutation_sign(perm)
        out[pos[Ic], j] = sign
    return out


def _permutation_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def tangential_projector(nu: np.ndarray, p: int) -> np.ndarray:
    """Projector onto tangential p-forms at a boundary point with unit normal nu.

    Tangential part of a form = its values on tangential vectors only, i.e.
    slotwise precomposition with P = I - nu nu^T.
    """
    nu = np.asarray(nu, dtype=float)
    P = np.eye(len(nu)) - np.outer(nu, nu)
    return exterior_power_matrix(P, p)


def normal_projector(nu: np.ndarray, p: int) -> np.ndarray:
    n = len(nu)
    return np.eye(num_components(n, p)) - tangential_projector(nu, p)
