"""Analytic differential forms with exact derivative evaluators.

Components are sympy expressions in Cartesian coordinates (x1[, x2]); the
constructors lambdify values and first derivatives, and the calculus
helpers (exterior derivative, flat/weighted codifferential, weighted
scalar Laplacian) produce new forms symbolically, so every identity check
can integrate both of its sides from independent closed-form integrands.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

from . import exterior
from .potentials import Potential, _COORDS

__all__ = ["AnalyticForm", "BoundaryConditionError"]


class BoundaryConditionError(ValueError):
    pass


def _lambdify_comp(expr, n):
    f = sp.lambdify(_COORDS[:n], expr, modules="numpy")

    def wrapped(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = f(*[x[:, i] for i in range(n)])
        return np.broadcast_to(np.asarray(out, dtype=float), (x.shape[0],)).copy()

    return wrapped


class AnalyticForm:
    """Degree-p form with C(n, p) sympy component expressions."""

    def __init__(self, n: int, degree: int, comps, bc: str = "none", name: str = "form"):
        self.n = int(n)
        self.degree = int(degree)
        C = exterior.num_components(self.n, self.degree)
        comps = [sp.sympify(c) for c in (comps if isinstance(comps, (list, tuple)) else [comps])]
        if len(comps) != C:
            raise ValueError(f"degree {degree} in n={n} needs {C} components, got {len(comps)}")
        self.comps = comps
        self.bc = bc
        self.name = name
        self._vals = [_lambdify_comp(c, self.n) for c in comps]
        self._grads = [[_lambdify_comp(sp.diff(c, s), self.n) for s in _COORDS[:self.n]]
                       for c in comps]

    # -- pointwise evaluation ------------------------------------------------
    def components(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.column_stack([v(x) for v in self._vals])

    def component_grads(self, x) -> np.ndarray:
        """(m, C, n) array of d(component_c)/dx_i."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty((x.shape[0], len(self.comps), self.n))
        for c, row in enumerate(self._grads):
            for i, g in enumerate(row):
                out[:, c, i] = g(x)
        return out

    def norm_sq(self, x) -> np.ndarray:
        v = self.components(x)
        return np.einsum("mc,mc->m", v, v)

    # -- symbolic calculus -----------------------------------------------------
    def d(self) -> "AnalyticForm":
        """Exterior derivative (zero form at top degree)."""
        n, p = self.n, self.degree
        if p >= n:
            raise ValueError("exterior derivative at top degree")
        src = exterior.basis_indices(n, p)
        pos = exterior.basis_position(n, p + 1)
        out = [sp.Integer(0)] * exterior.num_components(n, p + 1)
        for j, I in enumerate(src):
            for i in range(n):
                ins = exterior._insertion_sign(i, I)
                if ins is None:
                    continue
                sign, J = ins
                out[pos[J]] += sign * sp.diff(self.comps[j], _COORDS[i])
        return AnalyticForm(n, p + 1, out, bc="none", name=f"d({self.name})")

    def codifferential(self) -> "AnalyticForm":
        """Flat codifferential d* = -sum_i i_{e_i} partial_i."""
        n, p = self.n, self.degree
        if p < 1:
            raise ValueError("codifferential at degree 0")
        tgt = exterior.basis_indices(n, p - 1)
        pos_src = exterior.basis_position(n, p)
        out = [sp.Integer(0)] * len(tgt)
        for kpos, K in enumerate(tgt):
            for i in range(n):
                ins = exterior._insertion_sign(i, K)
                if ins is None:
                    continue
                sign, J = ins
                out[kpos] += -sign * sp.diff(self.comps[pos_src[J]], _COORDS[i])
        return AnalyticForm(n, p - 1, out, bc="none", name=f"d*({self.name})")

    def interior_with(self, vec_exprs) -> "AnalyticForm":
        """Interior product with a vector field given by sympy components."""
        n, p = self.n, self.degree
        if p < 1:
            raise ValueError("interior product at degree 0")
        tgt = exterior.basis_indices(n, p - 1)
        pos_src = exterior.basis_position(n, p)
        out = [sp.Integer(0)] * len(tgt)
        for kpos, K in enumerate(tgt):
            for i in range(n):
                ins = exterior._insertion_sign(i, K)
                if ins is None:
                    continue
                sign, J = ins
                out[kpos] += sign * vec_exprs[i] * self.comps[pos_src[J]]
        return AnalyticForm(n, p - 1, out, name=f"i_X({self.name})")

    def wedge_with(self, cov_exprs) -> "AnalyticForm":
        """Left wedge with a 1-form given by sympy components."""
        n, p = self.n, self.degree
        src = exterior.basis_indices(n, p)
        pos = exterior.basis_position(n, p + 1)
        out = [sp.Integer(0)] * exterior.num_components(n, p + 1)
        for j, I in enumerate(src):
            for i in range(n):
                ins = exterior._insertion_sign(i, I)
                if ins is None:
                    continue
                sign, J = ins
                out[pos[J]] += sign * cov_exprs[i] * self.comps[j]
        return AnalyticForm(n, p + 1, out, name=f"a^({self.name})")

    def scale(self, expr) -> "AnalyticForm":
        return AnalyticForm(self.n, self.degree, [sp.sympify(expr) * c for c in self.comps],
                            bc=self.bc, name=f"({expr})*{self.name}")

    def add(self, other: "AnalyticForm") -> "AnalyticForm":
        return AnalyticForm(self.n, self.degree,
                            [a + b for a, b in zip(self.comps, other.comps)],
                            name=f"{self.name}+{other.name}")

    def codifferential_weighted(self, potential: Potential) -> "AnalyticForm":
        """d*_V = d* + i_{grad V} (the adjoint of d in L^2(e^{-V} dmu))."""
        gradV = [sp.diff(potential.expr, s) for s in _COORDS[:self.n]]
        return self.codifferential().add(self.interior_with(gradV))

    def star(self) -> "AnalyticForm":
        M = exterior.hodge_star_matrix(self.n, self.degree)
        out = [sp.Integer(0)] * M.shape[0]
        for i in range(M.shape[0]):
            for j in range(M.shape[1]):
                if M[i, j] != 0:
                    out[i] += sp.Rational(int(M[i, j])) * self.comps[j]
        return AnalyticForm(self.n, self.n - self.degree, out, name=f"*({self.name})")

    def weighted_laplacian_scalar(self, potential: Potential):
        """L^(0) w = -Delta w + grad V . grad w as a sympy expression (p = 0)."""
        if self.degree != 0:
            raise ValueError("scalar weighted Laplacian needs a 0-form")
        w = self.comps[0]
        syms = _COORDS[:self.n]
        lap = sum(sp.diff(w, s, 2) for s in syms)
        drift = sum(sp.diff(potential.expr, s) * sp.diff(w, s) for s in syms)
        return -lap + drift

    def weighted_laplacian_one_form(self, potential: Potential) -> "AnalyticForm":
        """L^(1) on flat domains: componentwise L^(0) plus the Hessian action."""
        if self.degree != 1:
            raise ValueError("needs a 1-form")
        syms = _COORDS[:self.n]
        out = []
        for c, comp in enumerate(self.comps):
            lap = sum(sp.diff(comp, s, 2) for s in syms)
            drift = sum(sp.diff(potential.expr, s) * sp.diff(comp, s) for s in syms)
            hess_action = sum(sp.diff(potential.expr, syms[c], syms[k]) * self.comps[k]
                              for k in range(self.n))
            out.append(-lap + drift + hess_action)
        return AnalyticForm(self.n, 1, out, name=f"L1({self.name})")

    # -- boundary traces --------------------------------------------------------
    def boundary_trace_norms(self, boundary) -> tuple[float, float]:
        """(max |t w|, max |n w|) over the boundary rule's points."""
        pts = np.atleast_2d(boundary.points)
        if pts.shape[0] == 0:
            return 0.0, 0.0
        comp = self.components(pts)
        tmax = nmax = 0.0
        for i in range(pts.shape[0]):
            Pt = exterior.tangential_projector(boundary.normals[i], self.degree)
            tpart = Pt @ comp[i]
            npart = comp[i] - tpart
            tmax = max(tmax, float(np.linalg.norm(tpart)))
            nmax = max(nmax, float(np.linalg.norm(npart)))
        return tmax, nmax

    def verify_bc(self, boundary, tol: float = 1e-10):
        """Check the declared boundary condition on sampled boundary points."""
        if self.bc == "none":
            return
        tmax, nmax = self.boundary_trace_norms(boundary)
        if self.bc == "tangential" and tmax > tol:
            raise BoundaryConditionError(
                f"{self.name}: declared t w = 0 but max |t w| = {tmax:.2e}")
        if self.bc == "normal" and nmax > tol:
            raise BoundaryConditionError(
                f"{self.name}: declared n w = 0 but max |n w| = {nmax:.2e}")

    def __repr__(self):
        return f"AnalyticForm({self.name}, n={self.n}, p={self.degree}, bc={self.bc})"
