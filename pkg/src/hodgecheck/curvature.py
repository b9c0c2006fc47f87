"""Pointwise endomorphism fields on Lambda^p: curvature lifts and boundary operators.

Everything is expressed in the global Cartesian frame of the flat ambient
space, where the local orthonormal frames collapse to the standard basis;
this is the package's scope boundary (Ric == 0 on all supported domains,
carried as a pluggable field regardless).

Boundary operators, with outward unit normal nu, tangent T, scalar shape
operator K1 (so grad_T nu = -K1 T, convex <=> K1 <= 0):

* normal realization:  K_n^(p) = Pi_t lift_p(-K1 T T^T) Pi_t, which acts on
  tangential traces as the derivation lift of w -> w(grad_{X^T} nu);
* tangential realization: on normal forms nu^b ^ tau,
  K_t^(p)(nu^b ^ tau) = nu^b ^ (-Tr(K1) tau + lift_{p-1}(K1 T T^T) tau),
  reducing to -(Tr K1) w(nu) at p = 1 and vanishing identically at p = n = 2
  (degenerate slots evaluate to zero rather than erroring).

Both vanish on 0-forms and on 1D domains (the boundary is points).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
import json

import numpy as np

from . import exterior
from .potentials import Potential

__all__ = [
    "EndomorphismField",
    "CurvatureData",
    "PositivityViolationError",
    "lift_batch",
    "lift_endomorphism",
    "hessian_p",
    "ricci_p",
    "zero_ricci",
    "bakry_emery_tensor",
    "boundary_operator",
    "invert_endo_field",
    "restricted_min_eig",
]


class PositivityViolationError(ValueError):
    """A field required positive definite failed at a sampled point."""

    def __init__(self, point, min_eig, tol):
        self.point = np.asarray(point)
        self.min_eig = float(min_eig)
        self.tol = float(tol)
        super().__init__(
            f"positivity violated: min eigenvalue {min_eig:.4e} < {tol:.1e} "
            f"at point {np.array2string(self.point, precision=4)}")


@dataclass
class EndomorphismField:
    """x -> symmetric matrix on Lambda^p components in the Cartesian frame."""

    degree: int
    n: int
    evaluator: callable                  # (m, n) points -> (m, C, C)
    support: str = "interior"            # or "boundary"
    name: str = "field"

    @property
    def num_components(self) -> int:
        return exterior.num_components(self.n, self.degree)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.asarray(self.evaluator(points), dtype=float)
        C = self.num_components
        if out.shape != (points.shape[0], C, C):
            raise ValueError(f"evaluator returned {out.shape}, expected ({points.shape[0]},{C},{C})")
        sym_dev = np.abs(out - out.transpose(0, 2, 1)).max(initial=0.0)
        if sym_dev > 1e-12 * (1.0 + np.abs(out).max(initial=0.0)):
            raise ValueError(f"field {self.name} not symmetric: deviation {sym_dev:.2e}")
        return out

    def __add__(self, other: "EndomorphismField") -> "EndomorphismField":
        if (self.degree, self.n) != (other.degree, other.n):
            raise ValueError("field degree/dimension mismatch")
        return EndomorphismField(
            self.degree, self.n,
            lambda x, a=self, b=other: a.evaluate(x) + b.evaluate(x),
            self.support, f"{self.name}+{other.name}")

    def apply(self, points: np.ndarray, comps: np.ndarray) -> np.ndarray:
        """Matrix-vector action at each point: (m, C) -> (m, C)."""
        return np.einsum("mij,mj->mi", self.evaluate(points), comps)

    def quadratic(self, points: np.ndarray, comps: np.ndarray) -> np.ndarray:
        return np.einsum("mi,mij,mj->m", comps, self.evaluate(points), comps)

    def min_eigenvalues(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.eigvalsh(self.evaluate(points))[:, 0]

    def to_sample_json(self, points: np.ndarray) -> str:
        mats = self.evaluate(points)
        rows = [{"point": list(map(float, p)), "matrix": m.tolist()}
                for p, m in zip(np.atleast_2d(points), mats)]
        return json.dumps(rows, sort_keys=True)


def constant_field(degree: int, n: int, matrix: np.ndarray, name="const",
                   support="interior") -> EndomorphismField:
    matrix = np.asarray(matrix, dtype=float)
    return EndomorphismField(
        degree, n, lambda x: np.broadcast_to(matrix, (x.shape[0],) + matrix.shape).copy(),
        support, name)


@dataclass
class CurvatureData:
    """Pluggable ambient curvature; identically zero on supported flat domains."""

    n: int
    ric1_field: EndomorphismField = dc_field(default=None)

    def __post_init__(self):
        if self.ric1_field is None:
            C = exterior.num_components(self.n, 1)
            self.ric1_field = constant_field(1, self.n, np.zeros((C, C)), name="Ric1=0")


def lift_batch(A: np.ndarray, p: int) -> np.ndarray:
    """Derivation lift applied to a batch of 1-form endomorphisms (m,n,n)."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape[0], A.shape[1]
    src = exterior.basis_indices(n, p)
    pos = exterior.basis_position(n, p)
    C = len(src)
    out = np.zeros((m, C, C))
    for j, I in enumerate(src):
        for slot in range(p):
            rest = I[:slot] + I[slot + 1:]
            for k in range(n):
                ins = exterior._insertion_sign(k, rest)
                if ins is None:
                    continue
                sign, J = ins
                out[:, pos[J], j] += sign * (-1) ** slot * A[:, k, I[slot]]
    return out


def lift_endomorphism(field: EndomorphismField, p: int) -> EndomorphismField:
    """(A)^(p): sum over wedge slots of the 1-form endomorphism A."""
    if field.degree != 1:
        raise ValueError("lift starts from a degree-1 field")
    if not (0 <= p <= field.n):
        raise ValueError(f"lift degree p={p} out of range")
    return EndomorphismField(p, field.n,
                             lambda x, f=field: lift_batch(f.evaluate(x), p),
                             field.support, f"lift{p}({field.name})")


def hessian_p(potential: Potential, p: int) -> EndomorphismField:
    """Lift of the pointwise Hessian of V to Lambda^p (zero at p = 0)."""
    base = EndomorphismField(1, potential.n, lambda x: potential.hess(x),
                             "interior", f"Hess[{potential.name}]")
    return lift_endomorphism(base, p)


def zero_ricci(n: int) -> CurvatureData:
    return CurvatureData(n)


def ricci_p(curvature: CurvatureData, p: int) -> EndomorphismField:
    """Weitzenboeck curvature term on Lambda^p; vanishes on 0-forms."""
    if p == 0:
        return constant_field(0, curvature.n, np.zeros((1, 1)), name="Ric0=0")
    return lift_endomorphism(curvature.ric1_field, p)


def bakry_emery_tensor(potential: Potential, N: float,
                       curvature: CurvatureData | None = None) -> EndomorphismField:
    """Ric + Hess V - (1/(N-n)) grad V (x) grad V on 1-forms.

    Admissible N: (-inf, 0] union [n, +inf]; N = n only for constant V
    (the correction term is dropped entirely at N = +inf).
    """
    n = potential.n
    if not (N == np.inf or N <= 0 or N >= n):
        raise ValueError(f"N={N} in the forbidden band (0, {n})")
    if N == n and not potential.is_constant:
        raise ValueError(f"N = n = {n} requires a constant potential")
    curv = curvature if curvature is not None else zero_ricci(n)

    def evaluator(x):
        H = potential.hess(x) + curv.ric1_field.evaluate(x)
        if N == np.inf or N == n:
            return H
        g = potential.grad(x)
        return H - np.einsum("mi,mj->mij", g, g) / (N - n)

    return EndomorphismField(1, n, evaluator, "interior",
                             f"Ric_V,N={N:g}[{potential.name}]")


def _boundary_matrices(b: str, p: int, normals: np.ndarray, k1: np.ndarray,
                       trace_k1: np.ndarray) -> np.ndarray:
    m, n = normals.shape
    C = exterior.num_components(n, p)
    out = np.zeros((m, C, C))
    if p == 0 or n == 1:
        return out
    # n == 2: tangent T = rot90(nu), K1_full = k1 * T T^T
    T = np.column_stack([-normals[:, 1], normals[:, 0]])
    K1_full = k1[:, None, None] * np.einsum("mi,mj->mij", T, T)
    if b == "normal":
        lift = lift_batch(-K1_full, p)
        for i in range(m):
            Pt = exterior.tangential_projector(normals[i], p)
            out[i] = Pt @ lift[i] @ Pt
        return out
    if b == "tangential":
        lift = lift_batch(K1_full, p - 1)
        Cm = exterior.num_components(n, p - 1)
        mid = lift - trace_k1[:, None, None] * np.eye(Cm)[None, :, :]
        for i in range(m):
            W = exterior.wedge_covector_matrix(normals[i], p - 1)
            out[i] = W @ mid[i] @ W.T
        return out
    raise ValueError(f"boundary operator needs tangential/normal, got {b!r}")


def boundary_operator(b: str, p: int, boundary) -> EndomorphismField:
    """K_b^(p) on the boundary geometry's quadrature points.

    ``boundary`` is any object with points/normals/k1/trace_k1 arrays
    (meshing.BoundaryGeometry or domains.BoundaryQuadrature).  The returned
    field evaluates at exactly those points.
    """
    pts = np.atleast_2d(boundary.points)
    if pts.shape[0] == 0:
        n = pts.shape[1] if pts.size else 1
        return constant_field(p, n, np.zeros((exterior.num_components(n, p),) * 2),
                              name=f"K_{b}^{p}(empty)", support="boundary")
    n = pts.shape[1]
    mats = _boundary_matrices(b, p, np.atleast_2d(boundary.normals),
                              np.asarray(boundary.k1), np.asarray(boundary.trace_k1))

    def evaluator(x):
        x = np.atleast_2d(x)
        if x.shape[0] != pts.shape[0] or not np.allclose(x, pts, atol=1e-9):
            raise ValueError("boundary field evaluated away from its quadrature points")
        return mats

    return EndomorphismField(p, n, evaluator, "boundary", f"K_{b}^{p}")


def invert_endo_field(field: EndomorphismField, positivity_tol: float = 1e-10) -> EndomorphismField:
    """Pointwise inverse; positivity is checked at every evaluated point."""

    def evaluator(x):
        mats = field.evaluate(x)
        vals = np.linalg.eigvalsh(mats)
        idx = int(np.argmin(vals[:, 0]))
        if vals[idx, 0] < positivity_tol:
            raise PositivityViolationError(np.atleast_2d(x)[idx], vals[idx, 0], positivity_tol)
        return np.linalg.inv(mats)

    return EndomorphismField(field.degree, field.n, evaluator, field.support,
                             f"inv({field.name})")


def restricted_min_eig(mats: np.ndarray, normals: np.ndarray, p: int,
                       trace: str) -> np.ndarray:
    """Min eigenvalue of each matrix compressed to the tangential/normal trace
    subspace at its boundary point.

    trace="tangential": forms with n w = 0 (the invariant block of K_n);
    trace="normal": forms with t w = 0 (the block entering the K_t terms).
    Points whose subspace is trivial report +inf (no constraint).
    """
    m = mats.shape[0]
    out = np.full(m, np.inf)
    for i in range(m):
        proj = (exterior.tangential_projector(normals[i], p) if trace == "tangential"
                else exterior.normal_projector(normals[i], p))
        w, v = np.linalg.eigh(proj)
        basis = v[:, w > 0.5]
        if basis.shape[1] == 0:
            continue
        out[i] = np.linalg.eigvalsh(basis.T @ mats[i] @ basis)[0]
    return out
