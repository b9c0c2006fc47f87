"""Generalized symmetric eigensolves, kernel projectors, and range solves.

Eigenproblems S x = lambda M x are solved on two paths:

* dense ``scipy.linalg.eigh`` on the materialized pencil for small problems
  (the down-block of S is dense anyway once materialized);
* sparse shift-invert ``eigsh`` for larger problems.  When the operator has
  a codifferential block, the dense inverse is avoided through the mixed
  saddle form with the auxiliary variable sigma = d*_V u:

      [-M_{p-1}   D^T M_p ] [sigma]          [0   0 ] [sigma]
      [ M_p D     S_up    ] [  u  ]  = lambda [0  M_p] [  u  ],

  whose finite eigenvalues are exactly those of the primal pencil.

Solves on Ran d use conjugate gradients preconditioned by the mass matrix
with explicit kernel deflation each iteration, mirroring the restriction of
the operator to the orthogonal complement of its kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as dla
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from .operators import AssembledOperator, Cochain, OperatorChain

__all__ = [
    "SpectralResult",
    "HodgeSplit",
    "SolverError",
    "lowest_eigenpairs",
    "kernel_projector",
    "KernelProjector",
    "hodge_decompose",
    "solve_on_range",
    "check_intertwining",
]

DENSE_CUTOFF = 1700


class SolverError(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass
class SpectralResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray           # columns, M-orthonormal
    kernel_dim: int
    residual_norms: np.ndarray
    kernel_threshold: float
    seed: int
    mesh_h: float
    solver: str
    tol: float
    degree: int = 0
    realization: str = "none"

    def cochains(self) -> list:
        """Eigenvectors as Cochain objects (M-orthonormal)."""
        return [Cochain(self.degree, self.realization, self.eigenvectors[:, i].copy())
                for i in range(self.eigenvectors.shape[1])]

    def to_json_dict(self) -> dict:
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "kernel_dim": int(self.kernel_dim),
            "residuals": [float(v) for v in self.residual_norms],
            "seed": int(self.seed),
            "mesh_h": float(self.mesh_h),
        }


def _estimate_lambda_max(op: AssembledOperator, seed: int) -> float:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.dim)
    x /= np.linalg.norm(x)
    lam = 1.0
    for _ in range(25):
        y = op.op_matvec(x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 1.0
        lam = ny
        x = y / ny
    return float(lam)


def _residual_norms(op: AssembledOperator, vals, vecs) -> np.ndarray:
    out = np.empty(len(vals))
    for i, lam in enumerate(vals):
        r = op.stiff_matvec(vecs[:, i]) - lam * (op.M @ vecs[:, i])
        out[i] = np.sqrt(max(0.0, float(r @ op.chain.mass_solve(op.p, r))))
    return out


def _m_orthonormalize(M, vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for i in range(out.shape[1]):
        for j in range(i):
            out[:, i] -= (out[:, j] @ (M @ out[:, i])) * out[:, j]
        nrm = np.sqrt(out[:, i] @ (M @ out[:, i]))
        out[:, i] /= nrm
    return out


def lowest_eigenpairs(op: AssembledOperator, k: int, tol: float = 1e-9,
                      seed: int = 1234) -> SpectralResult:
    """k smallest eigenpairs of S x = lambda M x with certified residuals."""
    if not (1 <= k <= op.dim):
        raise ValueError(f"need 1 <= k <= {op.dim}, got {k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if op.dim <= DENSE_CUTOFF:
        vals, vecs = dla.eigh(op.stiffness_dense(), op.M.toarray())
        vals, vecs = vals[:k], vecs[:, :k]
        solver = "dense-eigh"
    elif not op.has_down:
        vals, vecs = _sparse_eigs(op.up_stiff if op.has_up else
                                  sparse.csr_matrix((op.dim, op.dim)),
                                  op.M, k, seed)
        solver = "eigsh-shift-invert"
    else:
        vals, vecs = _mixed_eigs(op, k, seed)
        solver = "eigsh-mixed"
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    vecs = _m_orthonormalize(op.M, vecs)
    res = _residual_norms(op, vals, vecs)
    bad = res > max(tol, 1e-12) * 100 * (1.0 + np.abs(vals))
    if bad.any():
        raise SolverError("eigenpair residuals did not certify", residuals=res)
    lam_max = _estimate_lambda_max(op, seed)
    threshold = 1e-8 * max(lam_max, 1.0)
    kernel_dim = int(np.sum(vals < threshold))
    vals = np.where(np.abs(vals) < 1e-14 * max(lam_max, 1.0), 0.0, vals)
    h = op.chain.cplx.mesh_size_h
    b = "tangential" if op.realization == "tangential" else "none"
    return SpectralResult(vals, vecs, kernel_dim, res, threshold, seed, h, solver, tol,
                          degree=op.p, realization=b)


def _sparse_eigs(S, M, k, seed):
    n = S.shape[0]
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    sigma = -1e-2
    try:
        vals, vecs = spla.eigsh(S.tocsc(), k=k, M=M.tocsc(), sigma=sigma, which="LM",
                                v0=v0, maxiter=500)
    except spla.ArpackNoConvergence as e:
        raise SolverError(f"eigensolver hit the iteration cap: {e}",
                          residuals=getattr(e, "eigenvalues", None)) from e
    return vals, vecs


def _mixed_eigs(op: AssembledOperator, k, seed):
    chain, p = op.chain, op.p
    Mlow = chain.mass(p - 1).tocsr()
    D = chain.d_matrix(p - 1)
    B = (D.T @ op.M).T.tocsr()     # M_p D
    up = op.up_stiff if op.has_up else sparse.csr_matrix((op.dim, op.dim))
    A = sparse.bmat([[-Mlow, B.T], [B, up]], format="csc")
    nlow = Mlow.shape[0]
    Mbig = sparse.bmat([[sparse.csr_matrix((nlow, nlow)), None],
                        [None, op.M]], format="csc")
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(A.shape[0])
    scale = float(np.mean(op.M.diagonal()))
    sigma = -1e-2 * scale
    try:
        vals, vecs = spla.eigsh(A, k=k, M=Mbig, sigma=sigma, which="LM", v0=v0,
                                maxiter=500)
    except spla.ArpackNoConvergence as e:
        raise SolverError(f"mixed-pencil eigensolver hit the iteration cap: {e}",
                          residuals=getattr(e, "eigenvalues", None)) from e
    u = vecs[nlow:, :]
    keep = np.linalg.norm(u, axis=0) > 1e-8
    if not np.all(keep):
        u, vals = u[:, keep], vals[keep]
    return vals, u


@dataclass
class KernelProjector:
    """M-orthogonal projector onto the kernel of an assembled operator."""

    M: sparse.csr_matrix
    basis: np.ndarray          # columns, M-orthonormal kernel vectors
    eigenvalue_window: tuple = (0.0, 0.0)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros_like(x)
        return self.basis @ (self.basis.T @ (self.M @ x))

    def complement(self, x: np.ndarray) -> np.ndarray:
        return x - self.apply(x)


def kernel_projector(op: AssembledOperator, kernel_threshold: float | None = None,
                     seed: int = 1234, n_probe: int = 6) -> KernelProjector:
    """Projector onto the span of kernel eigenvectors.

    Requires a clean spectral gap: the first retained eigenvalue above the
    threshold must exceed 10x the threshold, otherwise the kernel is
    ambiguous and an error reports the eigenvalue window.
    """
    k = min(op.dim, n_probe)
    res = lowest_eigenpairs(op, k, seed=seed)
    threshold = kernel_threshold if kernel_threshold is not None else res.kernel_threshold
    below = res.eigenvalues < threshold
    kdim = int(np.sum(below))
    if kdim < k and kdim < op.dim:
        lam_next = res.eigenvalues[kdim]
        if lam_next <= 10 * threshold:
            raise SolverError(
                f"ambiguous kernel: eigenvalue window [{threshold:.3e}, {lam_next:.3e}] "
                "has no clean gap")
    elif kdim == k and k < op.dim:
        raise SolverError("kernel candidate count reached probe size; raise n_probe")
    basis = res.eigenvectors[:, :kdim]
    window = (float(res.eigenvalues[kdim - 1]) if kdim else 0.0,
              float(res.eigenvalues[kdim]) if kdim < k else np.inf)
    return KernelProjector(op.M, basis, window)


def solve_on_range(op: AssembledOperator, rhs: np.ndarray, tol: float = 1e-11,
                   kernel: KernelProjector | None = None,
                   maxiter: int | None = None) -> np.ndarray:
    """Solve L^(p) w = rhs for rhs in Ran d, with w orthogonal to the kernel.

    Conjugate gradients on S w = M rhs, preconditioned by M^{-1}, deflating
    kernel components by explicit projection every iteration.
    """
    chain, p = op.chain, op.p
    if maxiter is None:
        maxiter = max(2000, 30 * op.dim)
    b = op.M @ np.asarray(rhs, dtype=float)

    def project(x):
        return kernel.complement(x) if kernel is not None and kernel.dim else x

    x = np.zeros_like(b)
    r = b.copy()
    z = project(chain.mass_solve(p, r))
    q = z.copy()
    rz = float(r @ z)
    bnorm = np.sqrt(max(float(b @ chain.mass_solve(p, b)), 1e-300))
    for _ in range(maxiter):
        if np.sqrt(max(rz, 0.0)) <= tol * bnorm:
            return x
        Sq = op.stiff_matvec(q)
        alpha = rz / float(q @ Sq)
        x += alpha * q
        r -= alpha * Sq
        z = project(chain.mass_solve(p, r))
        rz_new = float(r @ z)
        if np.sqrt(max(rz_new, 0.0)) <= tol * bnorm:
            return x
        q = z + (rz_new / rz) * q
        rz = rz_new
    raise SolverError(f"projected CG stagnated: residual {np.sqrt(max(rz,0))/bnorm:.2e}")


@dataclass
class HodgeSplit:
    kernel_part: Cochain
    exact_part: Cochain
    coexact_part: Cochain
    recomposition_residual: float
    orthogonality_residuals: tuple = field(default_factory=tuple)


def hodge_decompose(x: Cochain, op: AssembledOperator,
                    kernel: KernelProjector | None = None, tol: float = 1e-11) -> HodgeSplit:
    """Split a cochain into kernel + d(d*_V v) + d*_V(d v) parts.

    v solves the operator equation on the kernel complement, so the exact
    part is d(d*_V v) and the coexact part d*_V(d v).
    """
    chain, p = op.chain, op.p
    if kernel is None:
        kernel = kernel_projector(op)
    xk = kernel.apply(x.values)
    v = solve_on_range(op, x.values - xk, tol=tol, kernel=kernel)
    vc = Cochain(p, x.realization, v)
    if op.has_down:
        exact = chain.apply_d(chain.apply_codifferential(vc)).values
    else:
        exact = np.zeros_like(x.values)
    if op.has_up:
        coexact = chain.apply_codifferential(chain.apply_d(vc)).values
    else:
        coexact = np.zeros_like(x.values)
    recomposed = xk + exact + coexact
    scale = max(chain.norm(x), 1e-300)
    rec = float(np.sqrt(max(0.0, (x.values - recomposed) @ (op.M @ (x.values - recomposed))))) / scale
    parts = [Cochain(p, x.realization, xk), Cochain(p, x.realization, exact),
             Cochain(p, x.realization, coexact)]
    orth = []
    for i in range(3):
        for j in range(i + 1, 3):
            ni, nj = chain.norm(parts[i]), chain.norm(parts[j])
            if ni > 0 and nj > 0:
                orth.append(abs(chain.inner(parts[i], parts[j])) / (ni * nj))
    return HodgeSplit(parts[0], parts[1], parts[2], rec, tuple(orth))


def check_intertwining(chain: OperatorChain, p: int, n_samples: int = 10,
                       seed: int = 1234, upper_chain: OperatorChain | None = None) -> dict:
    """Relative residual of L^(p+1) D_p - D_p L^(p) over random cochains.

    Exact (solver roundoff) when both operators share the degree-(p+1) mass
    matrix; passing a separately assembled ``upper_chain`` with different
    quadrature breaks the shared mass and serves as the negative control.
    """
    upper = upper_chain if upper_chain is not None else chain
    op_lo = chain.operator(p)
    op_hi = upper.operator(p + 1)
    D = chain.d_matrix(p)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        x = rng.standard_normal(chain.dim(p))
        Lx = op_lo.op_matvec(x)
        lhs = op_hi.op_matvec(D @ x)
        rhs = D @ Lx
        scale = max(np.linalg.norm(Lx), 1e-300)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / scale))
    return {"residual": worst, "p": p, "samples": n_samples,
            "matched_masses": upper_chain is None}
