"""Lowest-order Whitney form assembly on simplicial complexes.

The Whitney spaces are: hat functions (p = 0), edge forms
``W_ab = lambda_a d lambda_b - lambda_b d lambda_a`` (p = 1, 2D) or
per-element constants ``dx / h`` (p = 1, 1D), and per-triangle constants
``dx^dy / area`` (p = 2).  Degrees of freedom are integrals over oriented
simplices, so the discrete exterior derivative is exactly the integer
incidence matrix.

Mass matrices carry the weight exp(-V) via per-element quadrature; they are
consistent (full quadrature), never lumped - lumping breaks the weighted
adjointness identity at order h.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.sparse as sparse

from .meshing import SimplicialComplex
from .potentials import Potential

__all__ = ["assemble_mass", "interpolate", "AssemblyWarning", "segment_rule", "triangle_rule"]


class AssemblyWarning(UserWarning):
    """Quadrature order too low for the requested potential degree."""


def segment_rule(order: int):
    """Gauss-Legendre on [0, 1]; exact to polynomial degree 2m-1 >= order+2."""
    m = max(2, (int(order) + 4) // 2)
    xg, wg = np.polynomial.legendre.leggauss(m)
    return 0.5 * (xg + 1.0), 0.5 * wg


def triangle_rule(order: int):
    """Collapsed tensor Gauss rule on the reference triangle (area 1/2)."""
    m = max(2, (int(order) + 4) // 2)
    xg, wg = np.polynomial.legendre.leggauss(m)
    u = 0.5 * (xg + 1.0)
    wu = 0.5 * wg
    U, V = np.meshgrid(u, u, indexing="ij")
    pts = np.column_stack([(U * (1 - V)).ravel(), (U * V).ravel()])
    w = (np.outer(wu, wu) * U).ravel()
    return pts, w


def _check_quadrature_adequacy(potential: Potential, p: int, order: int):
    if order < 2:
        raise ValueError("quad_order >= 2 required for mass assembly")
    basis_deg = 2 if p <= 1 else 0
    if potential.poly_degree is not None and potential.poly_degree > 0:
        needed = basis_deg + potential.poly_degree
        if order + 2 < needed:
            warnings.warn(
                f"quad_order {order} low for potential degree {potential.poly_degree} "
                f"at form degree {p}; mass entries only approximate the weight",
                AssemblyWarning, stacklevel=3)


def _weight_at(potential: Potential, pts: np.ndarray) -> np.ndarray:
    w = potential.weight(pts)
    if not np.all(np.isfinite(w)):
        bad = pts[~np.isfinite(w)][0]
        raise FloatingPointError(f"non-finite weight exp(-V) at {bad}")
    return w


def assemble_mass(cplx: SimplicialComplex, p: int, potential: Potential,
                  quad_order: int = 4) -> sparse.csr_matrix:
    """Weighted mass matrix M_p[i,j] = int <W_i, W_j> exp(-V) dmu."""
    if p < 0 or p > cplx.dim:
        raise ValueError(f"degree p={p} out of range")
    _check_quadrature_adequacy(potential, p, quad_order)
    if cplx.dim == 1:
        return _mass_1d(cplx, p, potential, quad_order)
    return _mass_2d(cplx, p, potential, quad_order)


def _mass_1d(cplx, p, potential, order):
    t, wt = segment_rule(order)
    ec = cplx.element_coords(1)            # (ne, 2, 1)
    a, b = ec[:, 0, 0], ec[:, 1, 0]
    h = b - a
    pts = (a[:, None] + t[None, :] * h[:, None]).reshape(-1, 1)
    rho = _weight_at(potential, pts).reshape(len(a), len(t))
    wq = wt[None, :] * h[:, None]          # physical weights per element
    if p == 1:
        diag = (rho * wq).sum(axis=1) / h**2
        return sparse.diags(diag).tocsr()
    lam = np.column_stack([1 - t, t])      # (nq, 2)
    loc = np.einsum("eq,qa,qb->eab", rho * wq, lam, lam)
    edges = cplx.simplices[1]
    rows = np.repeat(edges, 2, axis=1).reshape(-1)        # a,a,b,b
    cols = np.tile(edges, (1, 2)).reshape(-1)             # a,b,a,b
    vals = loc.transpose(0, 2, 1).reshape(-1)
    nv = cplx.vertex_coords.shape[0]
    return sparse.csr_matrix((vals, (rows, cols)), shape=(nv, nv))


_REF_GRAD = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
_LOCAL_EDGES = [(0, 1), (0, 2), (1, 2)]


def _element_geometry(cplx):
    ec = cplx.element_coords(2)            # (nt, 3, 2)
    J = np.stack([ec[:, 1, :] - ec[:, 0, :], ec[:, 2, :] - ec[:, 0, :]], axis=2)
    detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    Jinv = np.empty_like(J)
    Jinv[:, 0, 0] = J[:, 1, 1] / detJ
    Jinv[:, 0, 1] = -J[:, 0, 1] / detJ
    Jinv[:, 1, 0] = -J[:, 1, 0] / detJ
    Jinv[:, 1, 1] = J[:, 0, 0] / detJ
    grads = np.einsum("ak,tkx->tax", _REF_GRAD, Jinv)     # (nt, 3, 2)
    return ec, J, detJ, grads


def _triangle_edge_dofs(cplx):
    """Global edge index and orientation sign for each local edge."""
    edge_pos = {tuple(e): i for i, e in enumerate(cplx.simplices[1])}
    tris = cplx.simplices[2]
    idx = np.empty((tris.shape[0], 3), dtype=int)
    sgn = np.empty((tris.shape[0], 3))
    for li, (la, lb) in enumerate(_LOCAL_EDGES):
        ga, gb = tris[:, la], tris[:, lb]
        lo, hi = np.minimum(ga, gb), np.maximum(ga, gb)
        idx[:, li] = [edge_pos[(a, b)] for a, b in zip(lo, hi)]
        sgn[:, li] = np.where(ga < gb, 1.0, -1.0)
    return idx, sgn


def _mass_2d(cplx, p, potential, order):
    ref, wref = triangle_rule(order)
    ec, J, detJ, grads = _element_geometry(cplx)
    nt, nq = ec.shape[0], ref.shape[0]
    pts = ec[:, None, 0, :] + np.einsum("qk,tkx->tqx", ref, J.transpose(0, 2, 1))
    rho = _weight_at(potential, pts.reshape(-1, 2)).reshape(nt, nq)
    wq = wref[None, :] * np.abs(detJ)[:, None]
    if p == 0:
        lam = np.column_stack([1 - ref[:, 0] - ref[:, 1], ref[:, 0], ref[:, 1]])
        loc = np.einsum("tq,qa,qb->tab", rho * wq, lam, lam)
        dofs = cplx.simplices[2]
        nv = cplx.vertex_coords.shape[0]
        return _scatter(loc, dofs, nv)
    if p == 2:
        area = 0.5 * np.abs(detJ)
        diag = (rho * wq).sum(axis=1) / area**2
        return sparse.diags(diag).tocsr()
    # p == 1: Whitney edge forms
    lam = np.column_stack([1 - ref[:, 0] - ref[:, 1], ref[:, 0], ref[:, 1]])
    W = np.empty((nt, nq, 3, 2))
    for li, (la, lb) in enumerate(_LOCAL_EDGES):
        W[:, :, li, :] = (lam[None, :, la, None] * grads[:, None, lb, :]
                          - lam[None, :, lb, None] * grads[:, None, la, :])
    idx, sgn = _triangle_edge_dofs(cplx)
    loc = np.einsum("tq,tqax,tqbx->tab", rho * wq, W, W)
    loc = loc * sgn[:, :, None] * sgn[:, None, :]
    ne = cplx.simplices[1].shape[0]
    return _scatter(loc, idx, ne)


def _scatter(loc, dofs, size):
    k = dofs.shape[1]
    rows = np.repeat(dofs, k, axis=1).reshape(-1)
    cols = np.tile(dofs, (1, k)).reshape(-1)
    vals = loc.transpose(0, 2, 1).reshape(-1)
    M = sparse.csr_matrix((vals, (rows, cols)), shape=(size, size))
    return 0.5 * (M + M.T)  # symmetrize away roundoff asymmetry


def interpolate(form, cplx: SimplicialComplex, quad_order: int = 6) -> np.ndarray:
    """Canonical Whitney interpolation: DOF integrals of an analytic form.

    p = 0: vertex values; p = 1: oriented edge integrals of the tangential
    component; p = 2: triangle integrals of the density.
    """
    p = form.degree
    if p == 0:
        return form.components(cplx.vertex_coords)[:, 0]
    if p == 1:
        t, wt = segment_rule(quad_order)
        ec = cplx.element_coords(1)
        a = ec[:, 0, :]
        d = ec[:, 1, :] - a
        pts = a[:, None, :] + t[None, :, None] * d[:, None, :]
        vals = form.components(pts.reshape(-1, cplx.n)).reshape(len(a), len(t), -1)
        return np.einsum("q,eqx,ex->e", wt, vals, d)
    ref, wref = triangle_rule(quad_order)
    ec, J, detJ, _ = _element_geometry(cplx)
    pts = ec[:, None, 0, :] + np.einsum("qk,tkx->tqx", ref, J.transpose(0, 2, 1))
    vals = form.components(pts.reshape(-1, 2)).reshape(ec.shape[0], len(wref))
    return np.einsum("q,tq,t->t", wref, vals, np.abs(detJ))
