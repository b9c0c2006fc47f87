"""Eigensolves against closed forms and an independent finite-difference oracle."""

import numpy as np
import pytest
from scipy.special import jnp_zeros

from hodgecheck.domains import DomainSpec
from hodgecheck.meshing import generate_mesh, refine
from hodgecheck.operators import Cochain, OperatorChain
from hodgecheck.potentials import Potential
from hodgecheck.spectral import (hodge_decompose, kernel_projector,
                                 lowest_eigenpairs, solve_on_range)

from oracles import fd_oracle_1d


def test_interval_closed_form_spectra():
    m = generate_mesh(DomainSpec.interval(0, 1), 1 / 64)
    res = lowest_eigenpairs(OperatorChain(m, Potential.zero(1), "natural").operator(0), 3)
    assert res.kernel_dim == 1
    assert np.allclose(res.eigenvalues, [0, np.pi**2, 4 * np.pi**2], rtol=3e-3)
    rest = lowest_eigenpairs(OperatorChain(m, Potential.zero(1), "tangential").operator(0), 2)
    assert rest.kernel_dim == 0
    assert np.allclose(rest.eigenvalues, [np.pi**2, 4 * np.pi**2], rtol=3e-3)


def test_interval_convergence_order():
    errs, hs = [], []
    for ne in (16, 32, 64, 128):
        m = generate_mesh(DomainSpec.interval(0, 1), 1 / ne)
        res = lowest_eigenpairs(OperatorChain(m, Potential.zero(1), "natural").operator(0), 2)
        errs.append(abs(res.eigenvalues[1] - np.pi**2))
        hs.append(1 / ne)
    order = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert order >= 1.9


def test_fd_oracle_agreement():
    """Independent dense FD oracle matches the Whitney route at matched h."""
    ne = 256
    for pot, bc, realization in [
        (Potential.zero(1), "neumann", "natural"),
        (Potential.zero(1), "dirichlet", "tangential"),
        (Potential.quadratic(2.0, 1), "neumann", "natural"),
    ]:
        m = generate_mesh(DomainSpec.interval(0, 1), 1 / ne)
        res = lowest_eigenpairs(OperatorChain(m, pot, realization).operator(0), 3)
        fd = fd_oracle_1d(0, 1, ne, pot, bc)[:3]
        start = 1 if bc == "neumann" else 0
        for lam, mu in zip(res.eigenvalues[start:], fd[start:]):
            assert abs(lam - mu) <= 1e-3 * max(abs(mu), 1.0)


def test_disk_neumann_bessel_convergence():
    """V = 0 disk: lambda_1 -> (j'_{1,1})^2 with observed order >= 1.5."""
    target = jnp_zeros(1, 1)[0] ** 2
    errs, hs = [], []
    m = generate_mesh(DomainSpec.disk(1.0), 0.4)
    for _ in range(3):
        chain = OperatorChain(m, Potential.zero(2), "natural")
        res = lowest_eigenpairs(chain.operator(0), 2)
        errs.append(abs(res.eigenvalues[1] - target))
        hs.append(m.mesh_size_h)
        m = refine(m)
    order = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert order >= 1.5


def test_eigenvalues_nonnegative_and_orthonormal():
    m = generate_mesh(DomainSpec.annulus(0.5, 1.0), 0.25)
    chain = OperatorChain(m, Potential.linear(0.4, 2), "tangential")
    res = lowest_eigenpairs(chain.operator(1), 5)
    assert np.all(res.eigenvalues >= -1e-9)
    V = res.eigenvectors
    G = V.T @ (chain.mass(1) @ V)
    assert np.abs(G - np.eye(5)).max() <= 1e-8
    assert np.all(res.residual_norms <= 1e-7 * (1 + np.abs(res.eigenvalues)))


def test_annulus_harmonic_one_form():
    """First Betti number of the annulus: one tangential harmonic 1-form."""
    m = generate_mesh(DomainSpec.annulus(0.5, 1.0), 0.22)
    chain = OperatorChain(m, Potential.zero(2), "tangential")
    res = lowest_eigenpairs(chain.operator(1), 4)
    assert res.kernel_dim == 1
    assert res.eigenvalues[1] > 100 * res.kernel_threshold


def test_kernel_projector_properties():
    m = generate_mesh(DomainSpec.disk(1.0), 0.3)
    chain = OperatorChain(m, Potential.quadratic(1.0, 2), "natural")
    op = chain.operator(0)
    kp = kernel_projector(op)
    assert kp.dim == 1
    rng = np.random.default_rng(0)
    x = rng.standard_normal(op.dim)
    assert np.linalg.norm(kp.apply(kp.apply(x)) - kp.apply(x)) <= 1e-10 * np.linalg.norm(x)
    y = rng.standard_normal(op.dim)
    assert abs(kp.apply(x) @ (op.M @ y) - x @ (op.M @ kp.apply(y))) <= 1e-10
    # tangential realization with convex V has no kernel
    chain_t = OperatorChain(m, Potential.quadratic(1.0, 2), "tangential")
    assert kernel_projector(chain_t.operator(0)).dim == 0


def test_solve_on_range_consistency():
    m = generate_mesh(DomainSpec.interval(0, 1), 1 / 128)
    chain = OperatorChain(m, Potential.zero(1), "natural")
    op0, op1 = chain.operator(0), chain.operator(1)
    eta = chain.interpolate(_linear_form())
    kp = kernel_projector(op0)
    centered = kp.complement(eta.values)
    lhs = float(centered @ (chain.mass(0) @ centered))
    deta = chain.apply_d(eta)
    w = solve_on_range(op1, deta.values, tol=1e-12)
    rhs = float(w @ (chain.mass(1) @ deta.values))
    assert abs(lhs - rhs) <= 1e-9 * lhs
    assert abs(lhs - 1 / 12) <= 1e-6
    assert np.allclose(solve_on_range(op1, np.zeros(op1.dim)), 0.0)


def _linear_form():
    from hodgecheck.analytic_forms import AnalyticForm
    from hodgecheck.potentials import _COORDS

    return AnalyticForm(1, 0, [_COORDS[0]], name="x")


def test_hodge_decomposition():
    m = generate_mesh(DomainSpec.annulus(0.5, 1.0), 0.25)
    chain = OperatorChain(m, Potential.quadratic(1.0, 2), "tangential")
    op = chain.operator(1)
    kp = kernel_projector(op)
    rng = np.random.default_rng(3)
    x = Cochain(1, "tangential", rng.standard_normal(chain.dim(1)))
    split = hodge_decompose(x, op, kernel=kp)
    assert split.recomposition_residual <= 1e-8
    assert max(split.orthogonality_residuals, default=0.0) <= 1e-8
    # kernel input decomposes to itself
    if kp.dim:
        xk = Cochain(1, "tangential", kp.basis[:, 0].copy())
        s2 = hodge_decompose(xk, op, kernel=kp)
        assert chain.norm(s2.exact_part) <= 1e-8
        assert chain.norm(s2.coexact_part) <= 1e-8
    # exact input has negligible coexact part
    y = Cochain(0, "tangential", rng.standard_normal(chain.dim(0)))
    dy = chain.apply_d(y)
    s3 = hodge_decompose(dy, op, kernel=kp)
    assert chain.norm(s3.coexact_part) <= 1e-8 * chain.norm(dy)


def test_lowest_eigenpairs_validation():
    m = generate_mesh(DomainSpec.interval(0, 1), 0.25)
    op = OperatorChain(m, Potential.zero(1), "natural").operator(0)
    with pytest.raises(ValueError):
        lowest_eigenpairs(op, 0)
    with pytest.raises(ValueError):
        lowest_eigenpairs(op, op.dim + 1)
    with pytest.raises(ValueError):
        lowest_eigenpairs(op, 1, tol=-1.0)


def test_spectral_result_json():
    m = generate_mesh(DomainSpec.interval(0, 1), 1 / 16)
    res = lowest_eigenpairs(OperatorChain(m, Potential.zero(1), "natural").operator(0), 2,
                            seed=42)
    d = res.to_json_dict()
    assert set(d) == {"eigenvalues", "kernel_dim", "residuals", "seed", "mesh_h"}
    assert d["seed"] == 42 and d["kernel_dim"] == 1


def test_sparse_paths_match_dense():
    """Shift-invert and mixed-pencil paths agree with dense eigh."""
    import hodgecheck.spectral as spectral

    m = generate_mesh(DomainSpec.disk(1.0), 0.25)
    chain = OperatorChain(m, Potential.quadratic(1.0, 2), "tangential")
    for p in (0, 1):
        op = chain.operator(p)
        dense = lowest_eigenpairs(op, 4).eigenvalues
        old = spectral.DENSE_CUTOFF
        spectral.DENSE_CUTOFF = 1
        try:
            sparse_vals = lowest_eigenpairs(op, 4).eigenvalues
        finally:
            spectral.DENSE_CUTOFF = old
        assert np.allclose(dense, sparse_vals, rtol=1e-7, atol=1e-9)


def test_spectral_result_cochains():
    m = generate_mesh(DomainSpec.interval(0, 1), 1 / 32)
    chain = OperatorChain(m, Potential.zero(1), "tangential")
    res = lowest_eigenpairs(chain.operator(0), 2)
    cochains = res.cochains()
    assert len(cochains) == 2
    assert cochains[0].degree == 0 and cochains[0].realization == "tangential"
    assert abs(chain.norm(cochains[0]) - 1.0) <= 1e-9


def test_normal_realization_two_routes_agree():
    """p = 1 normal realization: the unconstrained (natural-bc) chain with V
    and the star-dual tangential chain with -V extrapolate to the same
    spectrum, validating the duality signs beyond p = 0."""
    from hodgecheck.checks import _richardson

    disk = DomainSpec.disk(1.0)
    V = Potential.quadratic(2.0, 2)
    cplx = generate_mesh(disk, 0.3)
    nat_levels, dual_levels = [], []
    for _ in range(4):
        res_n = lowest_eigenpairs(OperatorChain(cplx, V, "natural").operator(1), 3,
                                  seed=1)
        res_d = lowest_eigenpairs(OperatorChain(cplx, V.negated(),
                                                "tangential").operator(1), 3, seed=1)
        assert res_n.kernel_dim == 0 and res_d.kernel_dim == 0  # H^1(disk) = 0
        nat_levels.append(res_n.eigenvalues)
        dual_levels.append(res_d.eigenvalues)
        cplx = refine(cplx)
    for i in range(3):
        a = _richardson([lev[i] for lev in nat_levels])
        b = _richardson([lev[i] for lev in dual_levels])
        assert abs(a - b) <= 1e-6 * abs(a)
    # the exact branch shares the degree-0 spectrum (supersymmetry)
    assert abs(_richardson([lev[0] for lev in nat_levels]) - 4.344690) < 1e-4


def test_circle_periodic_spectrum():
    """Unit circle, V = 0: eigenvalues k^2 with multiplicity two."""
    m = generate_mesh(DomainSpec.circle(1.0), 2 * np.pi / 96)
    res = lowest_eigenpairs(OperatorChain(m, Potential.zero(1), "none").operator(0), 5)
    assert res.kernel_dim == 1
    assert np.allclose(res.eigenvalues, [0, 1, 1, 4, 4], rtol=5e-3)
