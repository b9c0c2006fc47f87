"""Verification checkers: hand-derived oracles, controls, hypothesis logic."""

import math

import numpy as np
import pytest
import sympy as sp

from hodgecheck.analytic_forms import AnalyticForm, BoundaryConditionError
from hodgecheck.checks import (check_bl_forms, check_bl_scalar, check_gamma2,
                               check_gap_lower_bound, check_variance_identity,
                               duality_spectrum_check, eval_decomposition_identity,
                               eval_green_identity, eval_h1_identity,
                               hodge_decomposition_record, hypothesis_check,
                               quadratic_form_analytic, semiclassical_sweep,
                               variance_identity_record)
from hodgecheck.domains import DomainSpec
from hodgecheck.meshing import generate_mesh
from hodgecheck.operators import Cochain, OperatorChain
from hodgecheck.potentials import Potential, _COORDS

x1, x2 = _COORDS
DISK = DomainSpec.disk(1.0)
VX2 = Potential.quadratic(2.0, 2)       # V = |x|^2

RADIAL = AnalyticForm(2, 1, [x1, x2], bc="tangential", name="radial")
ROT = AnalyticForm(2, 1, [-x2, x1], bc="normal", name="rot")


def test_quadratic_form_examples():
    interval = DomainSpec.interval(0, 1)
    one = AnalyticForm(1, 0, [sp.Integer(1)])
    val, ok = quadratic_form_analytic(one, Potential.linear(1.0, 1), interval)
    assert ok and abs(val) < 1e-14
    xf = AnalyticForm(1, 0, [x1])
    val, ok = quadratic_form_analytic(xf, Potential.zero(1), interval)
    assert ok and abs(val - 1.0) < 1e-12
    val, ok = quadratic_form_analytic(xf, Potential.linear(1.0, 1), interval)
    assert ok and abs(val - (1 - math.exp(-1))) < 1e-12


def test_decomposition_identity_hand_values():
    """Unit-disk cases evaluated by hand: 7*pi/3 (tangential radial form,
    V = |x|^2) and 19*pi/3 (normal rotational form)."""
    rec = eval_decomposition_identity(RADIAL, VX2, DISK, "tangential", 8)
    assert rec.passed and abs(rec.lhs - 7 * np.pi / 3) < 1e-12
    terms = rec.extra["terms"]
    assert abs(terms["h1_seminorm"] - 10 * np.pi / 3) < 1e-12
    assert abs(terms["curvature"] - np.pi) < 1e-12
    assert abs(terms["boundary_K"] - 2 * np.pi) < 1e-12
    assert abs(terms["boundary_weight"] + 4 * np.pi) < 1e-12
    rec = eval_decomposition_identity(ROT, VX2, DISK, "normal", 8)
    assert rec.passed and abs(rec.lhs - 19 * np.pi / 3) < 1e-12


def test_decomposition_zero_form_and_zero_input():
    zero = AnalyticForm(2, 1, [sp.Integer(0), sp.Integer(0)], bc="tangential")
    rec = eval_decomposition_identity(zero, VX2, DISK, "tangential", 6)
    assert rec.lhs == 0.0 and rec.rhs == 0.0 and rec.passed


def test_decomposition_negative_control():
    """Perturbing any single rhs term by 1% flips pass to fail at 1e-6."""
    for i in range(4):
        rec = eval_decomposition_identity(RADIAL, VX2, DISK, "tangential", 8,
                                          tolerance=1e-6, perturb_term=i)
        assert not rec.passed, f"term {i} not detected"
        assert rec.extra["terms"][list(rec.extra["terms"])[i]] != 0.0


def test_decomposition_bc_mismatch_raises():
    with pytest.raises(BoundaryConditionError):
        eval_decomposition_identity(RADIAL, VX2, DISK, "normal", 6)


def test_identity_convergence_in_quad_order():
    """rel_err decreases (noise factor 2) along quad_order 4 -> 8 -> 12."""
    g = sp.exp(-(x1**2 + x2**2) / 3) * (1 + x1 * x2 / 4)
    form = AnalyticForm(2, 1, [g * x1, g * x2], bc="tangential", name="smooth")
    pot = Potential.quadratic(1.0, 2)
    errs = [max(eval_decomposition_identity(form, pot, DISK, "tangential", qo).rel_err,
                1e-15) for qo in (4, 8, 12)]
    assert errs[1] <= 2 * errs[0] and errs[2] <= 2 * errs[1]
    assert errs[2] <= 1e-8


def test_green_identity_cases():
    for form, b in [(RADIAL, "tangential"), (ROT, "normal")]:
        rec = eval_green_identity(form, VX2, DISK, b, 8)
        assert rec.passed and rec.rel_err <= 1e-10
    # V = 0 collapses both identities to D = D
    rec = eval_green_identity(RADIAL, Potential.zero(2), DISK, "tangential", 6)
    assert rec.passed
    for key in ("gradf_sq", "lie", "boundary"):
        assert abs(rec.extra["terms"][key]) < 1e-13
    # 1D tangential scalar with V = x (spec example family)
    s = AnalyticForm(1, 0, [sp.sin(sp.pi * x1)], bc="tangential")
    rec = eval_green_identity(s, Potential.linear(1.0, 1), DomainSpec.interval(0, 1), "tangential", 8)
    assert rec.passed and rec.rel_err <= 1e-9


def test_lie_term_matches_hessian_lift_form():
    """<(Lie+Lie*)w,w> integrated equals int <(2 Hess f - lap f) w, w>."""
    from hodgecheck.checks import _half, _lie_term_quadratic
    from hodgecheck.curvature import hessian_p
    from hodgecheck.domains import domain_quadrature

    pot = Potential.polynomial([(2, 0, 0.4), (1, 1, 0.3), (0, 3, 0.1)], 2)
    fpot = _half(pot)
    form = AnalyticForm(2, 1, [sp.sin(x1), x2 * x1], name="generic")
    quad = domain_quadrature(DISK, 8)
    got = _lie_term_quadratic(form, fpot, quad)
    vals = form.components(quad.points)
    hess_term = hessian_p(fpot, 1).quadratic(quad.points, vals)
    lap = fpot.laplacian(quad.points)
    expect = quad.integrate(2 * hess_term - lap * np.einsum("mc,mc->m", vals, vals))
    assert abs(got - expect) <= 1e-8 * max(abs(expect), 1.0)


def test_h1_identity_cases():
    for form, b in [(RADIAL, "tangential"), (ROT, "normal")]:
        rec = eval_h1_identity(form, DISK, b, 8)
        assert rec.passed and rec.rel_err <= 1e-12
        assert rec.extra["terms"]["boundary_K"] != 0.0


def test_gamma2_cases_and_support_guard():
    bump = AnalyticForm(1, 0, [(x1 * (1 - x1)) ** 4])
    interval = DomainSpec.interval(0, 1)
    assert check_gamma2(bump, Potential.zero(1), interval, 8).passed
    assert check_gamma2(bump, Potential.quadratic(1.5, 1), interval, 8).passed
    zero = AnalyticForm(1, 0, [sp.Integer(0)])
    rec = check_gamma2(zero, Potential.zero(1), interval, 6)
    assert rec.passed and rec.lhs == 0.0
    bad = AnalyticForm(1, 0, [x1])
    with pytest.raises(BoundaryConditionError):
        check_gamma2(bad, Potential.zero(1), interval, 6)


def test_hypothesis_check_examples():
    rep = hypothesis_check(VX2, DISK, "normal", 1)
    assert rep.status == "satisfied" and rep.boundary_min >= 1.0 - 1e-12
    rep = hypothesis_check(Potential.quartic_double_well(1.0, 2), DISK, "normal", 1,
                           N=math.inf)
    assert rep.status == "violated" and np.linalg.norm(rep.witness) < 0.2
    rep = hypothesis_check(Potential.zero(2), DISK, "tangential", 1)
    # -Tr K1 - dV/dn = 1 >= 0, but Hess 0 fails positivity
    assert rep.boundary_min >= 1.0 - 1e-12 and rep.status == "violated"
    rep = hypothesis_check(VX2, DISK, "normal", 0)
    assert rep.status == "violated" and "0-forms" in rep.note


def test_bl_scalar_pass_and_refinement_ordering():
    w = AnalyticForm(2, 0, [x1], name="x1")
    V1 = Potential.quadratic(1.0, 2)
    recs = {N: check_bl_scalar(w, V1, DISK, "normal", N) for N in
            (math.inf, 4.0, -1.0, 0.0)}
    assert all(r.status == "pass" for r in recs.values())
    # finite N >= n strengthens the bound; N <= 0 weakens it
    assert recs[4.0].rhs < recs[math.inf].rhs < recs[-1.0].rhs
    assert recs[0.0].rhs == math.inf
    with pytest.raises(ValueError):
        check_bl_scalar(w, V1, DISK, "normal", 1.2)


def test_bl_scalar_violations_report_not_applicable():
    w = AnalyticForm(2, 0, [x1], name="x1")
    dw = Potential.quartic_double_well(1.0, 2)
    assert check_bl_scalar(w, dw, DISK, "normal", math.inf).status == "not_applicable"
    ann = DomainSpec.annulus(0.5, 1.0)
    rec = check_bl_scalar(w, Potential.quadratic(1.0, 2), ann, "normal", math.inf)
    assert rec.status == "not_applicable"
    assert abs(np.linalg.norm(rec.witness) - 0.5) < 1e-9  # inner (concave) circle
    wt = AnalyticForm(2, 0, [(1 - x1**2 - x2**2) * x1], bc="tangential")
    rec = check_bl_scalar(wt, VX2, DISK, "tangential", math.inf)
    assert rec.status == "not_applicable"  # dV/dn = 2 > -Tr K1 = 1


def test_bl_cross_route_consistency():
    """check_bl_forms at q = 0 agrees with check_bl_scalar to 1e-6."""
    w = AnalyticForm(2, 0, [x1], name="x1")
    V1 = Potential.quadratic(1.0, 2)
    a = check_bl_scalar(w, V1, DISK, "normal", math.inf)
    b = check_bl_forms(w, V1, DISK, "normal", "coclosed", mesh_h=0.3)
    assert abs(a.lhs - b.lhs) <= 1e-6 * max(a.lhs, 1e-30)
    assert abs(a.rhs - b.rhs) <= 1e-6 * max(a.rhs, 1e-30)


def test_bl_forms_degenerate_p0():
    psi = (1 - x1**2 - x2**2) ** 2
    closed = AnalyticForm(2, 1, [sp.diff(psi, x1), sp.diff(psi, x2)], bc="normal")
    rec = check_bl_forms(closed, Potential.quadratic(1.0, 2), DISK, "normal", "closed",
                         mesh_h=0.35)
    assert rec.status == "not_applicable"
    assert rec.extra["bound_degree"] == 0


def test_bl_forms_constraint_violation():
    not_closed = AnalyticForm(2, 1, [-x2 * x1, x1], bc="normal")
    with pytest.raises(ValueError):
        check_bl_forms(not_closed, Potential.quadratic(1.0, 2), DISK, "normal",
                       "closed", mesh_h=0.35)


def test_variance_identity_exactness():
    rec = variance_identity_record(DISK, VX2, "normal", 0.3, n_samples=8)
    assert rec.passed and rec.rel_err <= 1e-10
    rec = variance_identity_record(DomainSpec.interval(0, 1), Potential.linear(1.0, 1),
                                   "tangential", 1 / 64, n_samples=8)
    assert rec.passed
    # constant cochain, normal realization: both sides vanish
    m = generate_mesh(DISK, 0.35)
    chain = OperatorChain(m, VX2, "normal")
    lhs, rhs = check_variance_identity(Cochain(0, "normal", np.ones(chain.dim(0))), chain)
    assert abs(lhs) < 1e-14 and abs(rhs) < 1e-12


def test_gap_lower_bound_disk():
    rec = check_gap_lower_bound(VX2, DISK, "normal", 0, mesh_h=0.45, levels=3)
    assert rec.status == "pass"
    assert rec.lhs == pytest.approx(2.0)
    assert all(lam >= 2.0 - 1e-9 for lam in rec.extra["eigenvalues"])
    # V = 0: bound is 0 and trivially passes, hypothesis fails positivity though
    rec = check_gap_lower_bound(Potential.zero(2), DISK, "normal", 0,
                                mesh_h=0.45, levels=3)
    assert rec.status == "not_applicable"


def test_semiclassical_sweep_behaviour():
    recs = semiclassical_sweep(VX2, DISK, "normal", 0, [1.0, 0.5], mesh_h=0.3)
    assert all(r.status == "pass" for r in recs)
    gaps = [r.extra["h_lambda1"] for r in recs]
    assert all(g >= 2.0 - 1e-9 for g in gaps)
    recs = semiclassical_sweep(VX2, DISK, "tangential", 0, [1.0, 0.5], mesh_h=0.3)
    assert all(r.status == "not_applicable" for r in recs)  # dV/dn > 0 on the boundary


def test_hodge_decomposition_record_and_annulus_kernel():
    rec = hodge_decomposition_record(DomainSpec.interval(0, 1), Potential.zero(1),
                                     "normal", 1, 1 / 32, n_samples=3)
    assert rec.passed
    ann = DomainSpec.annulus(0.5, 1.0)
    rec = hodge_decomposition_record(ann, Potential.zero(2), "tangential", 1, 0.25,
                                     n_samples=3)
    assert rec.passed and rec.extra["kernel_dim"] == 1


def test_duality_interval():
    rec = duality_spectrum_check(DomainSpec.interval(0, 1), Potential.quadratic(1.0, 1),
                                 k=3, mesh_h=1 / 64, levels=3)
    assert rec.passed and rec.rel_err <= 1e-8


def test_duality_disk_example():
    """Direct natural p = 0 assembly vs the dual (2, tangential, -V) route on
    the disk preset with V = |x|^2, compared after ladder extrapolation."""
    rec = duality_spectrum_check(DISK, VX2, k=3, mesh_h=0.28, levels=4)
    assert rec.passed and rec.rel_err <= 1e-6


def test_bl_sharpness_ratio_trend():
    """Gaussian limit: rhs/lhs decreases toward 1 on growing centered disks."""
    w = AnalyticForm(2, 0, [x1], name="x1")
    V1 = Potential.quadratic(1.0, 2)
    ratios = []
    for R in (1.0, 2.0, 4.0):
        rec = check_bl_scalar(w, V1, DomainSpec.disk(R), "normal", math.inf, 10)
        ratios.append(rec.rhs / rec.lhs)
    assert ratios[0] > ratios[1] > ratios[2] >= 1.0
    assert ratios[2] < 1.01


def test_gap_trend_on_growing_intervals():
    """lambda_1 of the weighted Neumann problem decreases to alpha from above
    as the interval grows (Ornstein-Uhlenbeck limit)."""
    from hodgecheck.spectral import lowest_eigenpairs

    alpha = 1.0
    lams = []
    for L in (1.5, 2.5, 3.5):
        m = generate_mesh(DomainSpec.interval(-L, L), 1 / 128)
        chain = OperatorChain(m, Potential.quadratic(alpha, 1), "normal")
        lams.append(lowest_eigenpairs(chain.operator(0), 2).eigenvalues[1])
    assert lams[0] > lams[1] > lams[2] >= alpha - 1e-3
    assert lams[2] <= alpha + 0.05


def test_variance_identity_boundaryless():
    """Torus: the degree-1 kernel (two harmonic classes) is deflated."""
    rec = variance_identity_record(DomainSpec.flat_torus(1.0, 1.0),
                                   Potential.zero(2), "none", 0.3, n_samples=5)
    assert rec.passed and rec.rel_err <= 1e-9


def test_bl_scalar_on_polygon_bubble():
    """Convex polygon: tangential scalar case with the edge-line bubble."""
    from hodgecheck.presets import test_form

    square = DomainSpec.polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    form = test_form(square, 0, "tangential")
    rec = check_bl_scalar(form, Potential.quadratic(0.5, 2), square,
                          "tangential", math.inf, 8)
    # -Tr K1 - dV/dn = -dV/dn < 0 somewhere on a straight-edged boundary
    assert rec.status == "not_applicable"
    rec = check_bl_scalar(AnalyticForm(2, 0, [x1], name="x1"),
                          Potential.quadratic(1.0, 2), square, "normal", math.inf, 8)
    assert rec.status == "pass"


def test_decomposition_convergence_flag():
    g = sp.exp(-(x1**2 + x2**2) / 3)
    form = AnalyticForm(2, 1, [g * x1, g * x2], bc="tangential")
    rec = eval_decomposition_identity(form, Potential.quadratic(1.0, 2), DISK,
                                      "tangential", 8, check_convergence=True)
    assert rec.passed
    with pytest.raises(ValueError):
        eval_decomposition_identity(form, Potential.quadratic(1.0, 2), DISK,
                                    "tangential", 2, check_convergence=True)


def test_gap_lower_bound_n_refined():
    """Finite N strengthens the exact-branch bound; N <= 0 weakens it."""
    recs = {}
    for N in (None, 4.0, -1.0):
        recs[N] = check_gap_lower_bound(VX2, DISK, "normal", 0, use_N=N,
                                        mesh_h=0.4, levels=3)
        assert recs[N].status == "pass", (N, recs[N].extra)
    # bounds: plain Hess = 2; N-scaled = (N/(N-1)) min eig(Ric_{V,N})
    assert recs[None].lhs == pytest.approx(2.0)
    assert recs[-1.0].lhs < 2.0  # weaker bound for N < 0
    # same measured gap sequence in every variant (exact branch)
    assert recs[4.0].extra["eigenvalues"] == recs[None].extra["eigenvalues"]


def test_bl_forms_annulus_with_harmonic_kernel():
    """Annulus, coclosed 1-form, normal realization: the bound degree is
    p = 2 where the boundary operator vanishes identically in n = 2, so the
    hypothesis holds despite the concave inner circle; the projector must
    remove a large harmonic component (kernel dim 1 through the dual complex)."""
    ann = DomainSpec.annulus(0.5, 1.0)
    V1 = Potential.quadratic(1.0, 2)
    gt = x1**2 + x2**2
    ev = sp.exp(V1.expr)
    w = AnalyticForm(2, 1, [ev * sp.diff(gt, x2), -ev * sp.diff(gt, x1)],
                     bc="normal", name="cocl-ann")
    rec = check_bl_forms(w, V1, ann, "normal", "coclosed", quad_order=8, mesh_h=0.2)
    assert rec.status == "pass"
    assert rec.extra["kernel_dim"] == 1
    # the harmonic part carries most of the squared norm here
    assert rec.extra["projection_norm_sq"] > 0.5 * rec.extra["l2_norm_sq"]
    assert rec.lhs <= rec.rhs


def test_semiclassical_tangential_threshold():
    """h K_t - dV/dn >= 0 holds above h = alpha R^2 and fails below."""
    pot = Potential.quadratic(0.3, 2)
    recs = semiclassical_sweep(pot, DISK, "tangential", 0, [1.0, 0.5, 0.2],
                               mesh_h=0.3)
    assert [r.hypothesis_status for r in recs] == ["satisfied", "satisfied",
                                                   "violated"]
    assert [r.status for r in recs] == ["pass", "pass", "not_applicable"]


def test_variance_identity_annulus_tangential():
    rec = variance_identity_record(DomainSpec.annulus(0.5, 1.0),
                                   Potential.linear(0.4, 2), "tangential", 0.22,
                                   n_samples=8)
    assert rec.passed and rec.rel_err <= 1e-9
