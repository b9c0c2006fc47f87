"""Identity and inequality checkers against independent high-order quadrature.

Every identity is evaluated from both sides with separately constructed
integrands (symbolic derivatives on the analytic side, assembled matrices on
the discrete side); residuals are pure quadrature/solver error, so the
checks converge under order refinement and fail loudly under term
perturbation (negative controls).

Identity inventory (f = V/2 throughout, flat ambient so Ric = 0):

* decomposition:  ||d_f w||^2 + ||d*_f w||^2
    = sum_c int |grad w_c + w_c grad f|^2 dmu
      + int <(Ric^(p) + 2 Hess^(p) f) w, w> dmu
      + oint <K_b^(p) w, w> - 2*[b=t] oint |w|^2 df/dn
* Green:          D_f(w) = D(w) + || |grad f| w ||^2 + <(L + L*) w, w>
                            + s(b) oint |w|^2 df/dn,  s(t) = -1, s(n) = +1
  (the Lie terms are evaluated from their raw local expressions, which is
  what makes the check sensitive to the wedge/interior algebra);
* f = 0 limit:    ||w||^2_{H1-dot} = D(w) - oint <K_b w, w>;
* carre-du-champ chains and the variance identity;
* Brascamp-Lieb-type bounds with explicit hypothesis verification at all
  quadrature points (violations report not_applicable, never pass/fail).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy as sp

from . import exterior
from .analytic_forms import AnalyticForm, BoundaryConditionError
from .curvature import (bakry_emery_tensor, boundary_operator, hessian_p,
                        invert_endo_field, restricted_min_eig, ricci_p, zero_ricci)
from .domains import DomainSpec, boundary_quadrature, domain_quadrature
from .meshing import generate_mesh, refine
from .operators import Cochain, OperatorChain
from .potentials import Potential, WeightedMeasure
from .records import CheckRecord, identity_record, inequality_record
from .spectral import kernel_projector, lowest_eigenpairs, solve_on_range

__all__ = [
    "quadratic_form_analytic",
    "eval_decomposition_identity",
    "eval_green_identity",
    "eval_h1_identity",
    "check_gamma2",
    "hypothesis_check",
    "HypothesisReport",
    "check_bl_scalar",
    "check_bl_forms",
    "check_variance_identity",
    "variance_identity_record",
    "check_gap_lower_bound",
    "semiclassical_sweep",
    "duality_spectrum_check",
    "hodge_decomposition_record",
    "DECOMPOSITION_TERMS",
]

IDENTITY_TOL = 1e-8
INEQ_REL = 1e-6
INEQ_ABS = 1e-9
POSITIVITY_TOL = 1e-10
BOUNDARY_SLACK = 1e-9

DECOMPOSITION_TERMS = ("h1_seminorm", "curvature", "boundary_K", "boundary_weight")


def _half(potential: Potential) -> Potential:
    return Potential(potential.expr / 2, potential.n, name=f"{potential.name}/2")


def _label(spec: DomainSpec) -> str:
    if spec.kind == "polygon":
        return f"polygon[{len(spec.vertices)} vertices]"
    return f"{spec.kind}{list(spec.parameters)}"


# ---------------------------------------------------------------------------
# Quadratic forms and the integration-by-parts identities
# ---------------------------------------------------------------------------

def quadratic_form_analytic(form: AnalyticForm, potential: Potential,
                            domain: DomainSpec, quad_order: int = 8):
    """Weighted quadratic form int (|d w|^2 + |d*_V w|^2) e^{-V} dmu.

    Returns (value, converged); converged is False when doubling the
    quadrature order moves the value by more than 1e-6 relative.
    """
    dform = form.d() if form.degree < form.n else None
    cform = form.codifferential_weighted(potential) if form.degree >= 1 else None

    def value(qo):
        quad = domain_quadrature(domain, qo)
        w = potential.weight(quad.points)
        total = 0.0
        if dform is not None:
            total += quad.integrate(w * dform.norm_sq(quad.points))
        if cform is not None:
            total += quad.integrate(w * cform.norm_sq(quad.points))
        return total

    coarse, fine = value(quad_order), value(2 * quad_order)
    converged = abs(fine - coarse) <= 1e-6 * max(abs(fine), 1e-300)
    return fine, converged


def _flat_witten_quadratic_form(form, fpot, domain, quad_order):
    """D_f(w) = ||(d + df^)w||^2 + ||(d* + i_{grad f})w||^2 in L^2(dmu)."""
    from .potentials import _COORDS

    n, p = form.n, form.degree
    dfc = [sp.diff(fpot.expr, s) for s in _COORDS[:n]]
    quad = domain_quadrature(domain, quad_order)
    total = 0.0
    if p < n:
        dpart = form.d().add(form.wedge_with(dfc))
        total += quad.integrate(dpart.norm_sq(quad.points))
    elif p == n and p > 0:
        pass  # df ^ w vanishes at top degree
    if p >= 1:
        cpart = form.codifferential().add(form.interior_with(dfc))
        total += quad.integrate(cpart.norm_sq(quad.points))
    return total


def _weighted_h1_seminorm(form, fpot, domain, quad_order):
    """|| e^f w ||^2_{H1-dot(e^{-2f} dmu)} = sum_c int |grad w_c + w_c grad f|^2 dmu."""
    quad = domain_quadrature(domain, quad_order)
    grads = form.component_grads(quad.points)
    vals = form.components(quad.points)
    gf = fpot.grad(quad.points)
    total = grads + vals[:, :, None] * gf[:, None, :]
    return quad.integrate(np.einsum("mcx,mcx->m", total, total))


def eval_decomposition_identity(form: AnalyticForm, potential: Potential,
                                domain: DomainSpec, b: str, quad_order: int = 8,
                                tolerance: float = IDENTITY_TOL,
                                perturb_term: int | None = None,
                                perturb_rel: float = 0.01,
                                check_convergence: bool = False) -> CheckRecord:
    """Both sides of the weighted integration-by-parts decomposition.

    The right-hand side splits into the four terms of DECOMPOSITION_TERMS;
    ``perturb_term`` multiplies one of them by (1 + perturb_rel) as a
    negative control.  ``check_convergence`` re-evaluates the left side at
    doubled quadrature order and raises if it moves by > 1e-6 relative.
    """
    bq = boundary_quadrature(domain, quad_order)
    form.verify_bc(bq)
    if form.bc != b and domain.has_boundary:
        raise BoundaryConditionError(
            f"form declares bc={form.bc!r} but realization is {b!r}")
    fpot = _half(potential)
    lhs = _flat_witten_quadratic_form(form, fpot, domain, quad_order)
    if check_convergence:
        fine = _flat_witten_quadratic_form(form, fpot, domain, 2 * quad_order)
        if abs(fine - lhs) > 1e-6 * max(abs(fine), 1e-300):
            raise ValueError(
                f"quadrature not converged at order {quad_order}: "
                f"{lhs!r} vs {fine!r} at doubled order")

    quad = domain_quadrature(domain, quad_order)
    vals = form.components(quad.points)
    t_curv = 0.0
    if form.degree >= 1:
        field = hessian_p(potential, form.degree) + ricci_p(zero_ricci(form.n), form.degree)
        t_curv = quad.integrate(field.quadratic(quad.points, vals))
    t_h1 = _weighted_h1_seminorm(form, fpot, domain, quad_order)
    t_bdy = 0.0
    t_weight = 0.0
    if not bq.points.shape[0] == 0:
        K = boundary_operator(b if b in ("tangential", "normal") else "normal",
                              form.degree, bq)
        bvals = form.components(bq.points)
        t_bdy = bq.integrate(K.quadratic(bq.points, bvals))
        if b == "tangential":
            dnf = fpot.normal_derivative(bq.points, bq.normals)
            t_weight = -2.0 * bq.integrate(np.einsum("mc,mc->m", bvals, bvals) * dnf)
    terms = [t_h1, t_curv, t_bdy, t_weight]
    if perturb_term is not None:
        terms[perturb_term] *= (1.0 + perturb_rel)
    rhs = sum(terms)
    rec = identity_record("decomposition_identity", lhs, rhs, tolerance,
                          domain=_label(domain), potential=potential.name,
                          p=form.degree, b=b, quad_order=quad_order,
                          h_param=potential.h_param,
                          extra={"terms": dict(zip(DECOMPOSITION_TERMS, terms)),
                                 "perturbed": perturb_term})
    return rec


def _lie_term_quadratic(form, fpot, quad):
    """int <(Lie + Lie*) w, w> dmu from the raw local expressions.

    Lie w   = grad_{grad f} w + HessLift w   (slot action of Hess f)
    Lie* w  = -grad_{grad f} w - (Delta f) w + sum_i (Hess f e_i)^b ^ i_{e_i} w

    The first two directional terms cancel in the sum; they are kept and
    evaluated anyway so the check exercises the full expressions.
    """
    n, p = form.n, form.degree
    pts = quad.points
    vals = form.components(pts)
    grads = form.component_grads(pts)
    gf = fpot.grad(pts)
    H = fpot.hess(pts)
    lap = fpot.laplacian(pts)
    directional = np.einsum("mcx,mx->mc", grads, gf)
    lie = directional.copy()
    from .curvature import lift_batch

    lie += np.einsum("mij,mj->mi", lift_batch(H, p), vals)
    lie_star = -directional - lap[:, None] * vals
    if p >= 1:
        W = [exterior.wedge_covector_matrix(e, p - 1) for e in np.eye(n)]
        I = [exterior.interior_product_matrix(e, p) for e in np.eye(n)]
        G = np.array([[W[k] @ I[i] for i in range(n)] for k in range(n)])
        lie_star += np.einsum("mki,kiab,mb->ma", H, G, vals)
    total = np.einsum("mc,mc->m", lie + lie_star, vals)
    return quad.integrate(total)


def eval_green_identity(form: AnalyticForm, potential: Potential, domain: DomainSpec,
                        b: str, quad_order: int = 8,
                        tolerance: float = IDENTITY_TOL) -> CheckRecord:
    """Green identity relating D_f and D for tangential/normal forms.

    Boundary sign: -1 for the tangential realization, +1 for the normal
    one.  Integration by parts gives

        D_f(w) - D(w) - || |grad f| w ||^2
            = <(Lie + Lie*) w, w> + oint |w|^2 df/dn
              - 2 oint <i_{grad f} w, i_nu w>,

    and the last integral vanishes on normal traces (i_nu w = 0) while it
    equals oint |w|^2 df/dn on tangential ones; the p = 0 classical
    computation and the decomposition identity both confirm the signs.
    """
    bq = boundary_quadrature(domain, quad_order)
    form.verify_bc(bq)
    fpot = _half(potential)
    lhs = _flat_witten_quadratic_form(form, fpot, domain, quad_order)
    zero = Potential.zero(potential.n)
    t_d = _flat_witten_quadratic_form(form, zero, domain, quad_order)
    quad = domain_quadrature(domain, quad_order)
    gf = fpot.grad(quad.points)
    t_f2 = quad.integrate(np.einsum("mx,mx->m", gf, gf) * form.norm_sq(quad.points))
    t_lie = _lie_term_quadratic(form, fpot, quad)
    sign = -1.0 if b == "tangential" else 1.0
    t_bdy = 0.0
    if bq.points.shape[0]:
        dnf = fpot.normal_derivative(bq.points, bq.normals)
        t_bdy = sign * bq.integrate(form.norm_sq(bq.points) * dnf)
    rhs = t_d + t_f2 + t_lie + t_bdy
    return identity_record("green_identity", lhs, rhs, tolerance,
                           domain=_label(domain), potential=potential.name,
                           p=form.degree, b=b, quad_order=quad_order,
                           h_param=potential.h_param,
                           extra={"terms": {"unweighted_form": t_d, "gradf_sq": t_f2,
                                            "lie": t_lie, "boundary": t_bdy}})


def eval_h1_identity(form: AnalyticForm, domain: DomainSpec, b: str,
                     quad_order: int = 8, tolerance: float = IDENTITY_TOL) -> CheckRecord:
    """f = 0 case: H1-dot seminorm = D(w) - boundary K_b term (flat Ric = 0)."""
    bq = boundary_quadrature(domain, quad_order)
    form.verify_bc(bq)
    zero = Potential.zero(form.n)
    lhs = _weighted_h1_seminorm(form, zero, domain, quad_order)
    t_d = _flat_witten_quadratic_form(form, zero, domain, quad_order)
    t_bdy = 0.0
    if bq.points.shape[0]:
        K = boundary_operator(b, form.degree, bq)
        bvals = form.components(bq.points)
        t_bdy = bq.integrate(K.quadratic(bq.points, bvals))
    rhs = t_d - t_bdy
    return identity_record("h1_identity", lhs, rhs, tolerance,
                           domain=_label(domain), potential="zero",
                           p=form.degree, b=b, quad_order=quad_order,
                           extra={"terms": {"unweighted_form": t_d, "boundary_K": t_bdy}})


def check_gamma2(form: AnalyticForm, potential: Potential, domain: DomainSpec,
                 quad_order: int = 8, tolerance: float = IDENTITY_TOL) -> CheckRecord:
    """Carre-du-champ chains for an interior-supported scalar.

    chain 1:  int Gamma(w) dnu' = int |dw|^2 dnu' = int (L0 w) w dnu'
    chain 2:  int (L0 w)^2 dnu' = int <L1 dw, dw> dnu'      (dnu' = e^{-V} dmu)

    Gamma is evaluated through the generator, Gamma = w L0 w - L0(w^2)/2,
    so the first equality is not definitional.
    """
    if form.degree != 0:
        raise ValueError("gamma2 check needs a 0-form")
    bq = boundary_quadrature(domain, quad_order)
    if bq.points.shape[0]:
        wmax = float(np.abs(form.components(bq.points)).max())
        dmax = float(np.abs(form.d().components(bq.points)).max())
        scale = 1.0 + float(np.abs(form.components(
            domain_quadrature(domain, 4).points)).max())
        if wmax > 1e-10 * scale or dmax > 1e-10 * scale:
            raise BoundaryConditionError(
                f"gamma2 needs w and dw to vanish on the boundary "
                f"(|w|={wmax:.1e}, |dw|={dmax:.1e})")
    quad = domain_quadrature(domain, quad_order)
    wgt = potential.weight(quad.points)
    L0w = AnalyticForm(form.n, 0, [form.weighted_laplacian_scalar(potential)])
    wsq = AnalyticForm(form.n, 0, [form.comps[0] ** 2])
    gamma = AnalyticForm(form.n, 0,
                         [form.comps[0] * L0w.comps[0]
                          - sp.Rational(1, 2) * wsq.weighted_laplacian_scalar(potential)])
    dw = form.d()
    t1 = quad.integrate(wgt * gamma.components(quad.points)[:, 0])
    t2 = quad.integrate(wgt * dw.norm_sq(quad.points))
    t3 = quad.integrate(wgt * (L0w.components(quad.points)[:, 0]
                               * form.components(quad.points)[:, 0]))
    t4 = quad.integrate(wgt * L0w.components(quad.points)[:, 0] ** 2)
    L1dw = dw.weighted_laplacian_one_form(potential)
    t5 = quad.integrate(wgt * np.einsum("mc,mc->m", L1dw.components(quad.points),
                                        dw.components(quad.points)))
    scale1 = max(abs(t1), abs(t2), abs(t3), 1e-13)
    chain1 = max(abs(t1 - t2), abs(t2 - t3)) / scale1
    scale2 = max(abs(t4), abs(t5), 1e-13)
    chain2 = abs(t4 - t5) / scale2
    rel = max(chain1, chain2)
    rec = CheckRecord("gamma2", kind="identity", domain=_label(domain),
                      potential=potential.name, p=0, b="interior",
                      lhs=t4, rhs=t5, abs_err=abs(t4 - t5), rel_err=rel,
                      tolerance=tolerance, passed=rel <= tolerance,
                      hypothesis_status="satisfied", quad_order=quad_order,
                      h_param=potential.h_param,
                      extra={"gamma": t1, "dirichlet": t2, "generator": t3,
                             "gamma2_lhs": t4, "gamma2_rhs": t5,
                             "chain1_rel": chain1, "chain2_rel": chain2})
    return rec


# ---------------------------------------------------------------------------
# Hypotheses for the inequality checks
# ---------------------------------------------------------------------------

@dataclass
class HypothesisReport:
    status: str                    # "satisfied" | "violated"
    witness: list | None = None
    interior_min: float = math.inf
    boundary_min: float = math.inf
    note: str = ""

    def to_dict(self):
        return {"status": self.status, "witness": self.witness,
                "interior_min": self.interior_min, "boundary_min": self.boundary_min,
                "note": self.note}


def hypothesis_check(potential: Potential, domain: DomainSpec, b: str, p: int,
                     N: float | None = None, quad_order: int = 8,
                     kt_scale: float = 1.0, curvature=None) -> HypothesisReport:
    """Pointwise hypothesis validation for the curvature-based bounds.

    Interior: Ric_V^(p) > 0 (or Ric_{V,N} > 0 at p = 1 when N is given) at
    every interior quadrature point.  Boundary: K_n^(p) >= 0 on tangential
    traces (normal realization) or kt_scale*K_t^(p) - dV/dn >= 0 on normal
    traces (tangential realization).  Returns witnesses and margins.
    """
    n = potential.n
    if p == 0:
        return HypothesisReport("violated", None, 0.0, math.inf,
                                note="curvature term is identically zero on 0-forms")
    quad = domain_quadrature(domain, quad_order)
    if p == 1 and N is not None:
        field = bakry_emery_tensor(potential, N, curvature)
    else:
        field = hessian_p(potential, p) + ricci_p(curvature or zero_ricci(n), p)
    vals = field.min_eigenvalues(quad.points)
    i_min = float(vals.min())
    witness = None
    note = ""
    status = "satisfied"
    if i_min < POSITIVITY_TOL:
        status = "violated"
        witness = [float(c) for c in quad.points[int(np.argmin(vals))]]
        note = "curvature tensor not positive definite"
    b_min = math.inf
    if domain.has_boundary:
        bq = boundary_quadrature(domain, quad_order)
        if b == "normal":
            mats = boundary_operator("normal", p, bq).evaluate(bq.points)
            r = restricted_min_eig(mats, bq.normals, p, "tangential")
        elif b == "tangential":
            mats = kt_scale * boundary_operator("tangential", p, bq).evaluate(bq.points)
            dnv = potential.normal_derivative(bq.points, bq.normals)
            C = mats.shape[1]
            mats = mats - dnv[:, None, None] * np.eye(C)[None, :, :]
            r = restricted_min_eig(mats, bq.normals, p, "normal")
        else:
            r = np.array([math.inf])
        finite = r[np.isfinite(r)]
        if finite.size:
            b_min = float(finite.min())
            if b_min < -BOUNDARY_SLACK and status == "satisfied":
                status = "violated"
                witness = [float(c) for c in bq.points[int(np.argmin(
                    np.where(np.isfinite(r), r, math.inf)))]]
                note = f"boundary sign condition fails for realization {b}"
    return HypothesisReport(status, witness, i_min, b_min, note)


# ---------------------------------------------------------------------------
# Brascamp-Lieb inequalities
# ---------------------------------------------------------------------------

def _n_factor(N: float) -> float:
    if N == math.inf:
        return 1.0
    if N == 0:
        return math.inf
    return (N - 1.0) / N


def check_bl_scalar(form: AnalyticForm, potential: Potential, domain: DomainSpec,
                    b: str, N: float = math.inf, quad_order: int = 8,
                    tol_rel: float = INEQ_REL, tol_abs: float = INEQ_ABS) -> CheckRecord:
    """Variance / Dirichlet-norm bound for scalars against the inverse
    curvature tensor, with the (N-1)/N refinement for admissible N."""
    if form.degree != 0:
        raise ValueError("scalar check needs a 0-form")
    bakry_emery_tensor(potential, N)  # admissibility check (raises)
    bq = boundary_quadrature(domain, quad_order)
    if b == "tangential" and bq.points.shape[0]:
        wmax = float(np.abs(form.components(bq.points)).max())
        if wmax > 1e-8 * (1.0 + abs(float(form.components(
                domain_quadrature(domain, 4).points).max()))):
            raise BoundaryConditionError("tangential scalar case needs w = 0 on the boundary")
    hyp = hypothesis_check(potential, domain, b, p=1, N=N, quad_order=quad_order)
    measure = WeightedMeasure(potential, domain, quad_order)
    quad = measure.quadrature
    vals = form.components(quad.points)[:, 0]
    if b == "tangential" and domain.has_boundary:
        lhs = measure.expect(vals ** 2)
    else:
        mean = measure.expect(vals)
        lhs = measure.expect((vals - mean) ** 2)
    rhs = math.nan
    if hyp.status == "satisfied":
        factor = _n_factor(N)
        if factor == math.inf:
            rhs = math.inf
        else:
            field = bakry_emery_tensor(potential, N)
            inv = invert_endo_field(field, POSITIVITY_TOL)
            grads = form.component_grads(quad.points)[:, 0, :]
            rhs = factor * measure.expect(
                np.einsum("mi,mi->m", np.einsum("mij,mj->mi",
                                                inv.evaluate(quad.points), grads), grads))
    return inequality_record("bl_scalar", lhs, rhs, hyp.status, tol_rel, tol_abs,
                             witness=hyp.witness, domain=_label(domain),
                             potential=potential.name, p=1, b=b, N=N,
                             quad_order=quad_order, h_param=potential.h_param,
                             extra={"hypothesis": hyp.to_dict(),
                                    "factor": _n_factor(N)})


def check_bl_forms(form: AnalyticForm, potential: Potential, domain: DomainSpec,
                   b: str, variant: str, quad_order: int = 8, mesh_h: float = 0.15,
                   tol_rel: float = INEQ_REL, tol_abs: float = INEQ_ABS,
                   seed: int = 1234) -> CheckRecord:
    """Form-degree bound ||w - pi_b w||^2 <= int <(Ric_V^(p))^-1 Dw, Dw> dnu.

    variant "coclosed" (d*_V w = 0, D = d, p = q+1) or "closed"
    (d w = 0, D = d*_V, p = q-1).  The projector pi_b comes from the
    discrete kernel projector applied to the Whitney interpolant (through
    the weighted-star dual complex for the normal realization at q >= 1);
    its interpolation error is reported separately in extra.
    """
    q = form.degree
    n = form.n
    if variant not in ("coclosed", "closed"):
        raise ValueError(f"variant must be coclosed/closed, got {variant!r}")
    if variant == "coclosed" and q >= n:
        raise ValueError("coclosed variant needs q < n (the bound uses d w)")
    if variant == "closed" and q < 1:
        raise ValueError("closed variant needs q >= 1 (the bound uses d*_V w)")
    p = q + 1 if variant == "coclosed" else q - 1
    quad = domain_quadrature(domain, quad_order)
    scale = 1.0 + float(np.sqrt(form.norm_sq(quad.points).max()))
    # constraint verification by quadrature
    if variant == "coclosed" and q >= 1:
        resid = form.codifferential_weighted(potential)
        worst = float(np.sqrt(resid.norm_sq(quad.points).max()))
        if worst > 1e-8 * scale:
            raise ValueError(f"constraint d*_V w = 0 fails: {worst:.2e}")
    if variant == "closed" and q < n:
        worst = float(np.sqrt(form.d().norm_sq(quad.points).max()))
        if worst > 1e-8 * scale:
            raise ValueError(f"constraint d w = 0 fails: {worst:.2e}")
    bq = boundary_quadrature(domain, quad_order)
    form.verify_bc(bq)

    measure = WeightedMeasure(potential, domain, quad_order)
    extra = {"variant": variant, "q": q, "bound_degree": p}
    if p == 0:
        hyp = HypothesisReport("violated", None, 0.0, math.inf,
                               note="bound degree p = 0: curvature term vanishes")
        extra["hypothesis"] = hyp.to_dict()
        return inequality_record("bl_forms", math.nan, math.nan, hyp.status,
                                 tol_rel, tol_abs, domain=_label(domain),
                                 potential=potential.name, p=p, b=b,
                                 quad_order=quad_order, extra=extra,
                                 h_param=potential.h_param)
    hyp = hypothesis_check(potential, domain, b, p=p, quad_order=quad_order)
    extra["hypothesis"] = hyp.to_dict()

    sigma = measure.expect(form.norm_sq(quad.points))
    lhs, kdim, proj_sq = _projected_deficit(form, potential, domain, b, sigma,
                                            measure.Z, mesh_h, seed)
    extra.update({"kernel_dim": kdim, "projection_norm_sq": proj_sq,
                  "l2_norm_sq": sigma})
    rhs = math.nan
    if hyp.status == "satisfied":
        field = hessian_p(potential, p) + ricci_p(zero_ricci(n), p)
        inv = invert_endo_field(field, POSITIVITY_TOL)
        D = form.d() if variant == "coclosed" else form.codifferential_weighted(potential)
        dvals = D.components(quad.points)
        rhs = measure.expect(np.einsum(
            "mi,mi->m", np.einsum("mij,mj->mi", inv.evaluate(quad.points), dvals), dvals))
    return inequality_record("bl_forms", lhs, rhs, hyp.status, tol_rel, tol_abs,
                             witness=hyp.witness, domain=_label(domain),
                             potential=potential.name, p=p, b=b,
                             quad_order=quad_order, mesh_h=mesh_h, extra=extra,
                             h_param=potential.h_param)


def _projected_deficit(form, potential, domain, b, sigma, Z, mesh_h, seed):
    """||w - pi_b w||^2_{L^2(dnu)} = sigma - ||pi_b w||^2 with the kernel
    projector from the discrete complex (dual complex for normal, q >= 1)."""
    q, n = form.degree, form.n
    if b == "normal" and q == 0:
        measure = WeightedMeasure(potential, domain, 8)
        mean = measure.expect(form.components(measure.quadrature.points)[:, 0])
        return sigma - mean ** 2, 1, mean ** 2
    cplx = generate_mesh(domain, mesh_h)
    if b == "tangential":
        chain = OperatorChain(cplx, potential, "tangential")
        c = chain.interpolate(form)
        op = chain.operator(q)
        kp = kernel_projector(op, seed=seed)
        proj = kp.apply(c.values)
        proj_sq = float(proj @ (chain.mass(q) @ proj)) / Z
        return sigma - proj_sq, kp.dim, proj_sq
    # normal, q >= 1: weighted-star dual (n - q, tangential, -V)
    dual_pot = potential.negated()
    dual_form = form.scale(sp.exp(-potential.expr)).star()
    chain = OperatorChain(cplx, dual_pot, "tangential")
    c = chain.interpolate(dual_form)
    op = chain.operator(n - q)
    kp = kernel_projector(op, seed=seed)
    proj = kp.apply(c.values)
    proj_sq = float(proj @ (chain.mass(n - q) @ proj)) / Z
    return sigma - proj_sq, kp.dim, proj_sq


# ---------------------------------------------------------------------------
# Variance identity and spectral-side checks
# ---------------------------------------------------------------------------

def _constant_kernel_projection(chain: OperatorChain, values: np.ndarray) -> np.ndarray:
    ones = np.ones_like(values)
    M = chain.mass(0)
    return (float(ones @ (M @ values)) / float(ones @ (M @ ones))) * ones


def check_variance_identity(eta: Cochain, chain: OperatorChain,
                            tol: float = 1e-7, solver_tol: float = 1e-11,
                            kernel1=None) -> tuple[float, float]:
    """Two routes of the exact discrete variance identity.

    lhs = ||eta - pi eta||^2_M,  rhs = <(L^(1)|_{Ran d})^{-1} d eta, d eta>_M.
    """
    if eta.degree != 0:
        raise ValueError("variance identity needs a 0-cochain")
    has_bdry = bool(chain.cplx.boundary_marker[0].any())
    if chain.realization == "tangential" and has_bdry:
        centered = eta.values
    else:
        centered = eta.values - _constant_kernel_projection(chain, eta.values)
    lhs = float(centered @ (chain.mass(0) @ centered))
    deta = chain.apply_d(eta)
    w = solve_on_range(chain.operator(1), deta.values, tol=solver_tol, kernel=kernel1)
    rhs = float(w @ (chain.mass(1) @ deta.values))
    return lhs, rhs


def variance_identity_record(domain: DomainSpec, potential: Potential, b: str,
                             mesh_h: float, n_samples: int = 50, seed: int = 1234,
                             tol: float = 1e-7, quad_order: int = 4) -> CheckRecord:
    cplx = generate_mesh(domain, mesh_h)
    chain = OperatorChain(cplx, potential, b, quad_order)
    kernel1 = None
    if domain.kind in ("annulus", "flat_torus", "circle"):
        kernel1 = kernel_projector(chain.operator(1), seed=seed)
    rng = np.random.default_rng(seed)
    worst = 0.0
    pair = (0.0, 0.0)
    for _ in range(n_samples):
        eta = Cochain(0, b, rng.standard_normal(chain.dim(0)))
        lhs, rhs = check_variance_identity(eta, chain, kernel1=kernel1)
        rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
        if rel > worst:
            worst, pair = rel, (lhs, rhs)
    rec = CheckRecord("variance_identity", kind="identity", domain=_label(domain),
                      potential=potential.name, p=0, b=b, lhs=pair[0], rhs=pair[1],
                      abs_err=abs(pair[0] - pair[1]), rel_err=worst, tolerance=tol,
                      passed=worst <= tol, hypothesis_status="satisfied",
                      mesh_h=cplx.mesh_size_h, quad_order=quad_order,
                      h_param=potential.h_param,
                      extra={"samples": n_samples, "worst_rel": worst})
    return rec


def _first_nonkernel_eigenvalue(op, seed, k=4):
    res = lowest_eigenpairs(op, min(k, op.dim), seed=seed)
    above = res.eigenvalues[res.kernel_dim:]
    if len(above) == 0:
        raise RuntimeError("no nonkernel eigenvalue found; raise k")
    return float(above[0]), res


def check_gap_lower_bound(potential: Potential, domain: DomainSpec, b: str, p: int,
                          use_N: float | None = None, mesh_h: float = 0.3,
                          levels: int = 3, quad_order: int = 4, seed: int = 1234,
                          c_cap: float | None = None,
                          tol_rel: float = INEQ_REL) -> CheckRecord:
    """First nonkernel eigenvalue vs the pointwise curvature lower bound.

    lambda_1(h) >= bound - C*h across a refinement ladder with C required
    bounded (default cap max(10, 10|bound|)).  For p = 0 the bound lives at
    degree 1 restricted to Ran d; a finite N scales it by N/(N-1) and only
    controls that exact branch, so the measured eigenvalue is then the
    degree-0 gap (= the bottom of L^(1) restricted to Ran d) for p <= 1.
    """
    bound_degree = max(p, 1)
    n_scaled = use_N is not None and bound_degree == 1
    hyp = hypothesis_check(potential, domain, b, bound_degree,
                           N=use_N if n_scaled else None,
                           quad_order=max(quad_order, 6))
    quad = domain_quadrature(domain, max(quad_order, 6))
    if n_scaled:
        field = bakry_emery_tensor(potential, use_N)
        nf = _n_factor(use_N)
        scale = math.inf if nf == 0 else 1.0 / nf
        bound = scale * float(field.min_eigenvalues(quad.points).min())
    else:
        field = hessian_p(potential, bound_degree) + ricci_p(zero_ricci(potential.n),
                                                             bound_degree)
        bound = float(field.min_eigenvalues(quad.points).min())
    eig_degree = 0 if n_scaled else p
    cplx = generate_mesh(domain, mesh_h)
    lam, hs = [], []
    for _ in range(levels):
        chain = OperatorChain(cplx, potential, b, quad_order)
        l1, _ = _first_nonkernel_eigenvalue(chain.operator(eig_degree), seed)
        lam.append(l1)
        hs.append(cplx.mesh_size_h)
        cplx = refine(cplx)
    cap = c_cap if c_cap is not None else max(10.0, 10.0 * abs(bound))
    cs = [max(0.0, (bound - l) / h) for l, h in zip(lam, hs)]
    c_fit = max(cs)
    passed = hyp.status == "satisfied" and c_fit <= cap
    return CheckRecord("gap_lower_bound", kind="inequality", domain=_label(domain),
                       potential=potential.name, p=p, b=b, N=use_N,
                       lhs=bound, rhs=lam[-1], abs_err=bound - lam[-1],
                       rel_err=max(0.0, bound - lam[-1]) / max(abs(bound), 1e-300),
                       tolerance=tol_rel, passed=passed,
                       hypothesis_status=hyp.status, witness=hyp.witness,
                       mesh_h=hs[-1], quad_order=quad_order,
                       h_param=potential.h_param,
                       extra={"bound": bound, "eigenvalues": lam, "mesh_sizes": hs,
                              "C_fit": c_fit, "C_cap": cap,
                              "hypothesis": hyp.to_dict()})


def semiclassical_sweep(potential: Potential, domain: DomainSpec, b: str, p: int,
                        h_list, mesh_h: float = 0.2, quad_order: int = 4,
                        seed: int = 1234) -> list[CheckRecord]:
    """Gap records for the rescaled potentials V/h (report-style).

    Hypotheses per the semiclassical scaling: the normal-side condition is
    h-independent; the tangential side needs h*K_t^(p') - dV/dn >= 0.
    On flat domains h * lambda_1(V/h) is bounded below by the Hess V
    minimum up to the mesh-resolution term.
    """
    records = []
    bound_degree = max(p, 1)
    quad = domain_quadrature(domain, max(quad_order, 6))
    hessmin = float((hessian_p(potential, bound_degree)
                     + ricci_p(zero_ricci(potential.n), bound_degree))
                    .min_eigenvalues(quad.points).min())
    cplx = generate_mesh(domain, mesh_h)
    for h in h_list:
        hyp = hypothesis_check(potential, domain, b, bound_degree,
                               quad_order=max(quad_order, 6), kt_scale=h)
        scaled = potential.rescaled(h)
        chain = OperatorChain(cplx, scaled, b, quad_order)
        lam1, _ = _first_nonkernel_eigenvalue(chain.operator(p), seed)
        lhs_bound = hessmin
        gap_scaled = h * lam1
        cap = max(10.0, 10.0 * abs(hessmin))
        passed = hyp.status != "satisfied" or gap_scaled >= lhs_bound - cap * cplx.mesh_size_h
        records.append(CheckRecord(
            "semiclassical_sweep", kind="inequality", domain=_label(domain),
            potential=potential.name, p=p, b=b, h_param=h,
            lhs=lhs_bound, rhs=gap_scaled, abs_err=lhs_bound - gap_scaled,
            rel_err=max(0.0, lhs_bound - gap_scaled) / max(abs(lhs_bound), 1e-300),
            tolerance=INEQ_REL, passed=passed and hyp.status == "satisfied",
            hypothesis_status=hyp.status, witness=hyp.witness,
            mesh_h=cplx.mesh_size_h, quad_order=quad_order,
            extra={"h": h, "lambda1": lam1, "h_lambda1": gap_scaled,
                   "hypothesis": hyp.to_dict()}))
    return records


def _richardson(values: np.ndarray) -> float:
    """Extrapolate a sequence on meshes h, h/2, h/4, ... assuming even powers."""
    seq = np.asarray(values, dtype=float)
    power = 2.0
    while len(seq) > 1:
        factor = 2.0 ** power
        seq = (factor * seq[1:] - seq[:-1]) / (factor - 1.0)
        power += 2.0
    return float(seq[0])


def duality_spectrum_check(domain: DomainSpec, potential: Potential, k: int = 3,
                           mesh_h: float = 0.4, levels: int = 3, quad_order: int = 4,
                           seed: int = 1234, tol: float = 1e-6) -> CheckRecord:
    """Star-duality validation at p = 0.

    Route A: natural (normal) assembly of the degree-0 operator with V.
    Route B: the dual problem (n, tangential, -V).  Both discretizations
    converge to the same spectrum (the content of the duality); eigenvalues
    are Richardson-extrapolated over the refinement ladder on each route and
    compared index by index.
    """
    n = domain.ambient_dim
    dual_pot = potential.negated()
    cplx = generate_mesh(domain, mesh_h)
    a_levels, b_levels = [], []
    for _ in range(levels):
        chain_a = OperatorChain(cplx, potential, "natural", quad_order)
        res_a = lowest_eigenpairs(chain_a.operator(0), k + 1, seed=seed)
        if res_a.kernel_dim != 1:
            raise RuntimeError(f"direct route kernel dim {res_a.kernel_dim} != 1")
        a_levels.append(res_a.eigenvalues[1:k + 1])
        chain_b = OperatorChain(cplx, dual_pot, "tangential", quad_order)
        res_b = lowest_eigenpairs(chain_b.operator(n), k + 1, seed=seed)
        if res_b.kernel_dim != 1:
            raise RuntimeError(f"dual route kernel dim {res_b.kernel_dim} != 1")
        b_levels.append(res_b.eigenvalues[1:k + 1])
        cplx = refine(cplx)
    a_ex = [_richardson([lev[i] for lev in a_levels]) for i in range(k)]
    b_ex = [_richardson([lev[i] for lev in b_levels]) for i in range(k)]
    rel = max(abs(a - b) / max(abs(a), abs(b), 1e-300) for a, b in zip(a_ex, b_ex))
    return CheckRecord("duality_spectrum", kind="identity", domain=_label(domain),
                       potential=potential.name, p=0, b="normal",
                       lhs=a_ex[0], rhs=b_ex[0], abs_err=abs(a_ex[0] - b_ex[0]),
                       rel_err=rel, tolerance=tol, passed=rel <= tol,
                       hypothesis_status="satisfied", mesh_h=mesh_h,
                       quad_order=quad_order, h_param=potential.h_param,
                       extra={"direct_extrapolated": a_ex, "dual_extrapolated": b_ex,
                              "direct_levels": [list(map(float, v)) for v in a_levels],
                              "dual_levels": [list(map(float, v)) for v in b_levels]})


def hodge_decomposition_record(domain: DomainSpec, potential: Potential, b: str,
                               p: int, mesh_h: float, n_samples: int = 5,
                               seed: int = 1234, tol: float = 1e-8,
                               quad_order: int = 4) -> CheckRecord:
    from .spectral import hodge_decompose

    cplx = generate_mesh(domain, mesh_h)
    chain = OperatorChain(cplx, potential, b, quad_order)
    op = chain.operator(p)
    kp = kernel_projector(op, seed=seed)
    rng = np.random.default_rng(seed)
    worst_rec, worst_orth = 0.0, 0.0
    for _ in range(n_samples):
        x = Cochain(p, b, rng.standard_normal(chain.dim(p)))
        split = hodge_decompose(x, op, kernel=kp)
        worst_rec = max(worst_rec, split.recomposition_residual)
        worst_orth = max(worst_orth, max(split.orthogonality_residuals, default=0.0))
    rel = max(worst_rec, worst_orth)
    return CheckRecord("hodge_decomposition", kind="identity", domain=_label(domain),
                       potential=potential.name, p=p, b=b, lhs=worst_rec,
                       rhs=0.0, abs_err=worst_rec, rel_err=rel, tolerance=tol,
                       passed=rel <= tol, hypothesis_status="satisfied",
                       mesh_h=cplx.mesh_size_h, quad_order=quad_order,
                       extra={"kernel_dim": kp.dim, "recomposition": worst_rec,
                              "orthogonality": worst_orth, "samples": n_samples})
