"""Analytic potentials V and the weighted probability measure exp(-V) dmu / Z.

A Potential bundles mutually consistent evaluators for V, grad V, Hess V и
Delta V (= trace Hess V, the Euclidean sign convention).  Evaluators are
lambdified from one sympy expression so consistency is structural; the
finite-difference validator below is the independent guard the type
contract asks for.

Presets: "zero", "quadratic(alpha)" = alpha|x|^2/2,
"quartic_double_well(a)" = (|x|^2 - a^2)^2/4, "linear(c)" = c*x1,
plus arbitrary polynomials from a coefficient table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .domains import DomainSpec, domain_quadrature

__all__ = ["Potential", "WeightedMeasure", "parse_potential", "PRESET_POTENTIALS"]

_COORDS = [sp.Symbol("x1"), sp.Symbol("x2")]


def _lambdify(expr, n):
    syms = _COORDS[:n]
    f = sp.lambdify(syms, expr, modules="numpy")

    def wrapped(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        cols = [x[:, i] for i in range(n)]
        out = f(*cols)
        return np.broadcast_to(np.asarray(out, dtype=float), (x.shape[0],)).copy()

    return wrapped


class Potential:
    """Potential with exact derivative evaluators on R^n."""

    def __init__(self, expr, n: int, name: str = "custom", h_param: float = 1.0):
        if h_param <= 0:
            raise ValueError("h_param must be positive")
        self.n = int(n)
        self.name = name
        self.h_param = float(h_param)
        # effective potential V/h is what every evaluator sees
        self.expr = sp.sympify(expr) / h_param
        syms = _COORDS[: self.n]
        self._v = _lambdify(self.expr, self.n)
        self._grad = [_lambdify(sp.diff(self.expr, s), self.n) for s in syms]
        self._hess = [[_lambdify(sp.diff(self.expr, si, sj), self.n) for sj in syms] for si in syms]
        lap = sum(sp.diff(self.expr, s, 2) for s in syms)
        self._lap = _lambdify(lap, self.n)
        self.is_constant = all(sp.simplify(sp.diff(self.expr, s)) == 0 for s in syms)
        poly = self.expr.as_poly(*syms) if self.expr.free_symbols else None
        self.poly_degree = poly.total_degree() if poly is not None else (0 if self.is_constant else None)

    # -- evaluators ----------------------------------------------------------
    def value(self, x) -> np.ndarray:
        return self._v(x)

    def grad(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.column_stack([g(x) for g in self._grad])

    def hess(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        m = x.shape[0]
        H = np.empty((m, self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                H[:, i, j] = self._hess[i][j](x)
        return H

    def laplacian(self, x) -> np.ndarray:
        return self._lap(x)

    def weight(self, x) -> np.ndarray:
        """exp(-V)."""
        return np.exp(-self.value(x))

    def normal_derivative(self, x, normals) -> np.ndarray:
        return np.einsum("ij,ij->i", self.grad(x), np.asarray(normals, dtype=float))

    # -- transforms ----------------------------------------------------------
    def negated(self) -> "Potential":
        return Potential(-self.expr, self.n, name=f"neg({self.name})")

    def rescaled(self, h: float) -> "Potential":
        """Semiclassical rescaling: effective potential becomes V/h."""
        return Potential(self.expr, self.n, name=f"{self.name}/h={h:g}", h_param=h)

    def validate(self, points: np.ndarray, tol: float = 1e-6) -> float:
        """Finite-difference consistency of grad/Hess/Laplacian vs V.

        Returns the worst normalized discrepancy; raises if above tol.
        """
        x = np.atleast_2d(np.asarray(points, dtype=float))
        eps = 1e-6
        worst = 0.0
        g = self.grad(x)
        H = self.hess(x)
        for i in range(self.n):
            e = np.zeros(self.n)
            e[i] = eps
            fd_g = (self.value(x + e) - self.value(x - e)) / (2 * eps)
            worst = max(worst, float(np.max(np.abs(fd_g - g[:, i]) / (1.0 + np.abs(g[:, i])))))
            fd_h = (self.grad(x + e) - self.grad(x - e)) / (2 * eps)
            for j in range(self.n):
                worst = max(worst, float(np.max(
                    np.abs(fd_h[:, j] - H[:, i, j]) / (1.0 + np.abs(H[:, i, j])))))
        lap_err = np.abs(self.laplacian(x) - np.trace(H, axis1=1, axis2=2))
        worst = max(worst, float(np.max(lap_err / (1.0 + np.abs(self.laplacian(x))))))
        if worst > tol:
            raise ValueError(f"potential evaluators inconsistent: {worst:.2e} > {tol:.0e}")
        return worst

    def __repr__(self):
        return f"Potential({self.name}, n={self.n})"

    # -- presets ---------------------------------------------------------------
    @staticmethod
    def zero(n: int) -> "Potential":
        return Potential(sp.Integer(0), n, name="zero")

    @staticmethod
    def quadratic(alpha: float, n: int) -> "Potential":
        r2 = sum(s**2 for s in _COORDS[:n])
        return Potential(sp.Rational(1, 2) * alpha * r2, n, name=f"quadratic({alpha:g})")

    @staticmethod
    def quartic_double_well(a: float, n: int) -> "Potential":
        r2 = sum(s**2 for s in _COORDS[:n])
        return Potential((r2 - a**2) ** 2 / 4, n, name=f"quartic_double_well({a:g})")

    @staticmethod
    def linear(c: float, n: int) -> "Potential":
        return Potential(c * _COORDS[0], n, name=f"linear({c:g})")

    @staticmethod
    def polynomial(terms, n: int) -> "Potential":
        """terms: iterable of (exponents..., coefficient) rows."""
        expr = sp.Integer(0)
        for row in terms:
            *exps, coef = row
            if len(exps) != n:
                raise ValueError(f"polynomial term {row} needs {n} exponents")
            mono = sp.Integer(1)
            for s, e in zip(_COORDS[:n], exps):
                mono *= s ** int(e)
            expr += float(coef) * mono
        return Potential(expr, n, name="polynomial")


PRESET_POTENTIALS = {
    "zero": "zero dV/dx everywhere; unweighted Lebesgue measure",
    "quadratic(alpha)": "alpha*|x|^2/2 (Hess V = alpha*I)",
    "quartic_double_well(a)": "(|x|^2 - a^2)^2/4 (indefinite Hessian near 0)",
    "linear(c)": "c*x1",
}

_PRESET_RE = re.compile(r"^(zero|quadratic|quartic_double_well|linear)(?:\(([^)]*)\))?$")


def parse_potential(text_or_table, n: int, h_param: float = 1.0) -> Potential:
    """Parse "quadratic(1.0)"-style preset names or a polynomial table."""
    if isinstance(text_or_table, dict):
        pot = Potential.polynomial(text_or_table["terms"], n)
    else:
        m = _PRESET_RE.match(str(text_or_table).strip())
        if not m:
            raise ValueError(f"unknown potential preset {text_or_table!r}")
        kind, arg = m.group(1), m.group(2)
        if kind == "zero":
            pot = Potential.zero(n)
        else:
            if arg is None or arg == "":
                raise ValueError(f"potential {kind!r} needs a parameter")
            val = float(arg)
            pot = {"quadratic": Potential.quadratic,
                   "quartic_double_well": Potential.quartic_double_well,
                   "linear": Potential.linear}[kind](val, n)
    if h_param != 1.0:
        pot = pot.rescaled(h_param)
    return pot


@dataclass
class WeightedMeasure:
    """Probability measure d nu = exp(-V) dmu / Z on a domain."""

    potential: Potential
    domain: DomainSpec
    quad_order: int = 8

    def __post_init__(self):
        quad = domain_quadrature(self.domain, self.quad_order)
        w = self.potential.weight(quad.points)
        if not np.all(np.isfinite(w)):
            raise ValueError("weight exp(-V) not finite on the domain")
        self.normalization = float(quad.integrate(w))
        if not (np.isfinite(self.normalization) and self.normalization > 0):
            raise ValueError("normalization of exp(-V) d mu must be positive and finite")
        self._quad = quad

    @property
    def Z(self) -> float:
        return self.normalization

    def expect(self, values: np.ndarray) -> float:
        """Integral against d nu, for values sampled at the rule's points."""
        w = self.potential.weight(self._quad.points)
        return float(np.dot(self._quad.weights * w, values)) / self.normalization

    @property
    def quadrature(self):
        return self._quad
