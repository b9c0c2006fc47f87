"""Discrete weighted Laplacians under tangential/normal boundary realizations.

The weighted picture keeps the exterior derivative as the plain integer
incidence matrix D_p and confines all distortion to the weighted mass
matrices: the codifferential is the weighted adjoint
``d*_V = M_{p-1}^{-1} D_{p-1}^T M_p`` and the Laplacian action is

    L^(p) x = M_p^{-1} D_p^T M_{p+1} D_p x  +  D_{p-1} M_{p-1}^{-1} D_{p-1}^T M_p x.

On a chain sharing one mass matrix per degree this gives the exact matrix
identity ``L^(p+1) D_p = D_p L^(p)`` (supersymmetry), the backbone of the
variance-identity checks.

Realizations: the tangential realization drops DOFs on boundary simplices
(t w = 0 strongly; t d*_V w = 0 arises weakly); the normal realization is
natural (unconstrained) at p = 0 and goes through Hodge-star duality for
p >= 1 (see dual_problem), because Whitney DOFs carry tangential traces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from .meshing import SimplicialComplex, incidence_matrix
from .potentials import Potential
from .whitney import assemble_mass

__all__ = [
    "UnsupportedRealizationError",
    "Cochain",
    "OperatorChain",
    "AssembledOperator",
    "assemble_weighted_laplacian",
    "dual_problem",
]

REALIZATIONS = ("tangential", "normal", "none")


class UnsupportedRealizationError(ValueError):
    pass


@dataclass
class Cochain:
    """Coefficients of a discrete p-form on the retained degrees of freedom."""

    degree: int
    realization: str
    values: np.ndarray

    def copy(self):
        return Cochain(self.degree, self.realization, self.values.copy())

    def export_csv(self, chain: "OperatorChain", path):
        """Write (simplex id, value) rows, zeros on constrained simplices."""
        full = chain.prolong(self)
        with open(path, "w") as f:
            f.write("simplex_id,value\n")
            for i, v in enumerate(full):
                f.write(f"{i},{float(v)!r}\n")


def _chain_realization(b: str) -> str:
    if b in ("normal", "none"):
        return "natural"
    if b == "tangential":
        return "tangential"
    raise UnsupportedRealizationError(f"unknown realization {b!r}")


class OperatorChain:
    """All degrees of the weighted complex under one boundary realization.

    Masses and incidence matrices are assembled lazily and shared between
    the per-degree operators, which is what makes the supersymmetry
    identity exact at the matrix level.  ``quad_orders`` may assign a
    different quadrature order per degree (used as a negative control:
    mismatched orders break the shared-mass assumption).
    """

    def __init__(self, cplx: SimplicialComplex, potential: Potential,
                 realization: str = "natural", quad_order: int = 4,
                 quad_orders: dict | None = None):
        if realization not in ("natural", "tangential"):
            realization = _chain_realization(realization)
        self.cplx = cplx
        self.potential = potential
        self.realization = realization
        self.quad_order = quad_order
        self.quad_orders = dict(quad_orders or {})
        self._mass = {}
        self._factor = {}
        self._D = {}
        self._free = {}

    # -- degrees of freedom ----------------------------------------------
    def free_dofs(self, p: int) -> np.ndarray:
        if p not in self._free:
            nsimp = self.cplx.num(p)
            if self.realization == "tangential" and self.cplx.spec is not None \
                    and p in self.cplx.boundary_marker:
                self._free[p] = np.nonzero(~self.cplx.boundary_marker[p])[0]
            elif self.realization == "tangential":
                self._free[p] = np.nonzero(~self.cplx.boundary_marker.get(
                    p, np.zeros(nsimp, dtype=bool)))[0]
            else:
                self._free[p] = np.arange(nsimp)
        return self._free[p]

    def dim(self, p: int) -> int:
        return len(self.free_dofs(p))

    def prolong(self, c: Cochain) -> np.ndarray:
        """Cochain values on all simplices (zeros on constrained ones)."""
        full = np.zeros(self.cplx.num(c.degree))
        full[self.free_dofs(c.degree)] = c.values
        return full

    # -- assembled pieces ---------------------------------------------------
    def mass(self, p: int) -> sparse.csr_matrix:
        if p not in self._mass:
            order = self.quad_orders.get(p, self.quad_order)
            M = assemble_mass(self.cplx, p, self.potential, order)
            free = self.free_dofs(p)
            self._mass[p] = M[np.ix_(free, free)].tocsc()
        return self._mass[p]

    def mass_factor(self, p: int):
        if p not in self._factor:
            self._factor[p] = spla.splu(self.mass(p).tocsc())
        return self._factor[p]

    def mass_solve(self, p: int, b: np.ndarray) -> np.ndarray:
        return self.mass_factor(p).solve(b)

    def d_matrix(self, p: int) -> sparse.csr_matrix:
        if p not in self._D:
            D = incidence_matrix(self.cplx, p).entries
            self._D[p] = D[np.ix_(self.free_dofs(p + 1), self.free_dofs(p))].tocsr()
        return self._D[p]

    # -- cochain calculus ----------------------------------------------------
    def inner(self, a: Cochain, b: Cochain) -> float:
        return float(a.values @ (self.mass(a.degree) @ b.values))

    def norm(self, a: Cochain) -> float:
        return float(np.sqrt(max(0.0, self.inner(a, a))))

    def apply_d(self, c: Cochain) -> Cochain:
        if c.degree >= self.cplx.dim:
            raise ValueError("apply_d at top degree")
        return Cochain(c.degree + 1, c.realization, self.d_matrix(c.degree) @ c.values)

    def apply_codifferential(self, c: Cochain) -> Cochain:
        """Weighted adjoint d*_V = M_{p-1}^{-1} D^T M_p."""
        if c.degree < 1:
            raise ValueError("codifferential at degree 0")
        p = c.degree
        rhs = self.d_matrix(p - 1).T @ (self.mass(p) @ c.values)
        return Cochain(p - 1, c.realization, self.mass_solve(p - 1, rhs))

    def operator(self, p: int) -> "AssembledOperator":
        return AssembledOperator(self, p)

    def interpolate(self, form, quad_order: int = 6) -> Cochain:
        from .whitney import interpolate

        full = interpolate(form, self.cplx, quad_order)
        b = "tangential" if self.realization == "tangential" else "none"
        return Cochain(form.degree, b, full[self.free_dofs(form.degree)])


class AssembledOperator:
    """Weighted Laplacian at one degree: pencil (S_p, M_p) plus its action.

    The quadratic form is x^T S_p x = ||d x||^2_{M_{p+1}} + ||d*_V x||^2_{M_{p-1}}.
    The up-block D_p^T M_{p+1} D_p is sparse; the down-block
    M_p D M_{p-1}^{-1} D^T M_p is kept as an exact action through the sparse
    mass factorization (it is dense as a matrix).
    """

    def __init__(self, chain: OperatorChain, p: int):
        self.chain = chain
        self.p = p
        cplx = chain.cplx
        self.has_up = p < cplx.dim
        self.has_down = p > 0 and chain.dim(p - 1) > 0
        self.M = chain.mass(p)
        self.up_stiff = None
        if self.has_up:
            D = chain.d_matrix(p)
            self.up_stiff = (D.T @ chain.mass(p + 1) @ D).tocsr()

    @property
    def realization(self) -> str:
        return self.chain.realization

    @property
    def dim(self) -> int:
        return self.chain.dim(self.p)

    def stiff_matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if self.has_up:
            out += self.up_stiff @ x
        if self.has_down:
            D = self.chain.d_matrix(self.p - 1)
            out += self.M @ (D @ self.chain.mass_solve(self.p - 1, D.T @ (self.M @ x)))
        return out

    def op_matvec(self, x: np.ndarray) -> np.ndarray:
        """Action of L^(p) = M^{-1} S on cochain coefficients."""
        return self.chain.mass_solve(self.p, self.stiff_matvec(x))

    def quadratic_form(self, x: np.ndarray) -> float:
        return float(np.dot(x, self.stiff_matvec(x)))

    def stiffness_dense(self) -> np.ndarray:
        S = np.zeros((self.dim, self.dim))
        if self.has_up:
            S += self.up_stiff.toarray()
        if self.has_down:
            D = self.chain.d_matrix(self.p - 1)
            B = (D.T @ self.M).toarray()           # (dim_{p-1}, dim_p)
            S += B.T @ self.chain.mass_factor(self.p - 1).solve(B)
        return 0.5 * (S + S.T)

    def stiffness_linear_operator(self) -> spla.LinearOperator:
        return spla.LinearOperator((self.dim, self.dim), matvec=self.stiff_matvec,
                                   dtype=float)


def assemble_weighted_laplacian(cplx: SimplicialComplex, p: int, potential: Potential,
                                b: str, quad_order: int = 4) -> AssembledOperator:
    """Spec-facing constructor for the realization b in {tangential, normal}.

    Normal realizations with p >= 1 are not expressible in the primal Whitney
    basis (its DOFs carry tangential traces); use dual_problem and assemble
    the (n-p, tangential, -V) operator instead.
    """
    if b not in REALIZATIONS:
        raise UnsupportedRealizationError(f"unknown realization {b!r}")
    has_bdry = cplx.spec.has_boundary if cplx.spec is not None else bool(
        cplx.boundary_marker[0].any())
    if b == "normal" and p >= 1 and has_bdry:
        n = cplx.dim
        raise UnsupportedRealizationError(
            f"normal realization at p={p} is not available in the primal Whitney basis; "
            f"use dual_problem: assemble (p={n - p}, tangential, -V) and map spectra "
            f"through the weighted Hodge star")
    chain = OperatorChain(cplx, potential, _chain_realization(b), quad_order)
    return chain.operator(p)


def dual_problem(p: int, b: str, potential: Potential, n: int):
    """Hodge-star dual description of a realization: (n-p, t<->n, -V).

    The weighted star w -> star(exp(-V) w) is unitary from L^2(e^{-V}dmu)
    p-forms to L^2(e^{+V}dmu) (n-p)-forms and intertwines the two
    realizations, so their spectra agree; this is the implementation route
    for normal realizations at p >= 1 and a cross-check at p = 0.
    """
    if not (0 <= p <= n):
        raise ValueError("degree out of range")
    if b not in ("tangential", "normal"):
        raise UnsupportedRealizationError(f"dual_problem needs tangential/normal, got {b!r}")
    dual_b = "tangential" if b == "normal" else "normal"
    return (n - p, dual_b, potential.negated())
