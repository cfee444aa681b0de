"""Reduction of (f, g) to the scalar functions that drive a single peakon.

For u(x,t) = A exp(-|x-X|) the jumps of F = int f dux and G = int g dux
across the crest give

    f0(A) = (1/(2A)) * int_{-A}^{A} f(A, y) dy
    g0(A) = (1/(2A)) * int_{-A}^{A} g(A, y) dy

(only the even parts of f, g survive the symmetric integral), and then
dA/dt = -A f0(A), dX/dt = g0(A), d2X/dt2 = -A f0(A) g0'(A).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsl import (ExprEvalError, NonlinearitySpec, NotDifferentiable, compile_expr,
                  derivative)
from .quadrature import QuadratureError, gk_quad

ZERO_GUARD = 1e-12
_RICHARDSON_STEPS = (1e-4, 5e-5, 2.5e-5)
DEFAULT_SAMPLES = (0.5, 1.0, 2.0, 4.0, -0.5, -1.0, -2.0, -4.0)


class SingularOriginError(ArithmeticError):
    """f0 or g0 has no finite limit as the amplitude goes to zero."""


ReductionError = (ExprEvalError, QuadratureError, SingularOriginError, ZeroDivisionError)


class ReducedSystem:
    """Quadrature-backed evaluators for f0, g0 and alpha = g0'.

    Parameters
    ----------
    spec : NonlinearitySpec
    quad_tol : float
        Absolute and relative tolerance handed to the Gauss-Kronrod driver.
    deriv_step_scale : float
        Relative step of the numeric derivative of g0 (used only when the
        symbolic u-derivative of g is unavailable).
    use_cache : bool
        Memoise f0/g0/alpha on the exact abscissa.
    """

    def __init__(self, spec: NonlinearitySpec, quad_tol: float = 1e-10,
                 deriv_step_scale: float = 6e-6, use_cache: bool = True):
        self.spec = spec
        self.quad_tol = quad_tol
        self.deriv_step_scale = deriv_step_scale
        self.use_cache = use_cache
        self._cache: dict = {}
        self._f, self._g = spec.compiled()
        try:
            dg = derivative(spec.g, "u", frozenset(spec.functions))
            self._g_u = compile_expr(dg, spec.params, spec.functions)
        except NotDifferentiable:
            self._g_u = None

    def _fn(self, which):
        if which == "f":
            return self._f
        if which == "g":
            return self._g
        raise ValueError(f"which must be 'f' or 'g', not {which!r}")

    def _quad(self, integrand, a, b):
        value, _ = gk_quad(integrand, a, b, abs_tol=self.quad_tol, rel_tol=self.quad_tol)
        return value

    def _cached(self, key, compute):
        if not self.use_cache:
            return compute()
        try:
            return self._cache[key]
        except KeyError:
            value = self._cache[key] = compute()
            return value

    # -- antiderivatives in ux -------------------------------------------

    def antiderivative_at(self, which: str, u: float, b: float) -> float:
        """int_0^b h(u, y) dy for h = f or g (integration constant fixed at 0)."""
        return self.jump(which, u, 0.0, b)

    def jump(self, which: str, u: float, lo: float, hi: float) -> float:
        """H(u, hi) - H(u, lo) where H is the ux-antiderivative of f or g."""
        fn = self._fn(which)
        return self._quad(lambda y: fn(u, y), lo, hi)

    # -- reduced functions ------------------------------------------------

    def _even_mean(self, which, A):
        fn = self._fn(which)
        integral = self._quad(lambda y: fn(A, y) + fn(A, -y), 0.0, A)
        return integral / (2.0 * A)

    def _reduced(self, which, A):
        A = float(A)
        if abs(A) >= ZERO_GUARD:
            return self._cached((which, A), lambda: self._even_mean(which, A))
        return self._cached((which, A), lambda: self._origin_limit(which, A))

    def _origin_limit(self, which, A):
        sgn = -1.0 if A < 0 else 1.0
        v1, v2, v4 = (self._even_mean(which, sgn * h) for h in _RICHARDSON_STEPS)
        d_far, d_near = abs(v2 - v1), abs(v4 - v2)
        if d_near >= d_far and d_near > 1e3 * self.quad_tol * max(1.0, abs(v4)):
            raise SingularOriginError(f"{which}0 diverges as the amplitude goes to zero")
        return (8.0 * v4 - 6.0 * v2 + v1) / 3.0

    def f0_at(self, A: float) -> float:
        return self._reduced("f", A)

    def g0_at(self, A: float) -> float:
        return self._reduced("g", A)

    def alpha_at(self, A: float) -> float:
        """g0'(A): Leibniz rule on the symbolic u-derivative when available."""
        A = float(A)
        return self._cached(("alpha", A), lambda: self._alpha(A))

    def _alpha(self, A):
        if self._g_u is not None and abs(A) >= ZERO_GUARD:
            try:
                return self._alpha_symbolic(A)
            except ReductionError:
                pass
        return self.alpha_numeric(A)

    def _alpha_symbolic(self, A):
        g, g_u = self._g, self._g_u
        boundary = float(g(A, A)) + float(g(A, -A))
        interior = self._quad(lambda y: g_u(A, y) + g_u(A, -y), 0.0, A)
        return (boundary + interior) / (2.0 * A) - self.g0_at(A) / A

    def alpha_numeric(self, A: float, step: float | None = None) -> float:
        """Fourth-order central difference of g0."""
        h = step if step is not None else self.deriv_step_scale * max(abs(A), 1.0)
        g0 = self.g0_at
        return (-g0(A + 2 * h) + 8 * g0(A + h) - 8 * g0(A - h) + g0(A - 2 * h)) / (12 * h)

    # -- single-peakon vector field ---------------------------------------

    def amplitude_rate(self, A: float) -> float:
        """dA/dt = -A f0(A); zero at A = 0 whenever f0 has a finite limit."""
        if A == 0.0:
            self.f0_at(0.0)
            return 0.0
        return -A * self.f0_at(A)

    def acceleration(self, A: float) -> float:
        return self.amplitude_rate(A) * self.alpha_at(A)

    def classify_peakon_kind(self, samples=DEFAULT_SAMPLES, tol: float = 1e-8) -> "PeakonKind":
        return classify_peakon_kind(self, samples, tol)


# module-level spellings of the operations


def antiderivative_at(rs: ReducedSystem, which: str, u: float, b: float) -> float:
    return rs.antiderivative_at(which, u, b)


def f0_at(rs: ReducedSystem, A: float) -> float:
    return rs.f0_at(A)


def g0_at(rs: ReducedSystem, A: float) -> float:
    return rs.g0_at(A)


def alpha_at(rs: ReducedSystem, A: float) -> float:
    return rs.alpha_at(A)


@dataclass
class PeakonKind:
    kind: str
    evidence: list = field(default_factory=list)
    tol: float = 1e-8

    def __str__(self):
        return self.kind


def classify_peakon_kind(rs: ReducedSystem, samples=DEFAULT_SAMPLES, tol: float = 1e-8) -> PeakonKind:
    """Travelling wave, stationary, constant-speed or accelerating dynamical peakon.

    Evaluation failures at a sample are recorded and the sample skipped.
    """
    evidence = []
    for a in samples:
        try:
            row = {"a": a, "f0": rs.f0_at(a), "g0": rs.g0_at(a), "alpha": rs.alpha_at(a)}
        except ReductionError as exc:
            evidence.append({"a": a, "error": str(exc)})
            continue
        evidence.append(row)
    good = [r for r in evidence if "error" not in r]
    if not good:
        raise ValueError("reduced system could not be evaluated at any sample amplitude")

    f0_zero = all(abs(r["f0"]) <= tol for r in good)
    g0_zero = all(abs(r["g0"]) <= tol for r in good)
    if f0_zero and g0_zero:
        kind = "stationary"
    elif f0_zero:
        kind = "travelling-wave"
    elif any(abs(r["alpha"]) > tol for r in good):
        kind = "dynamical-accelerating"
    else:
        kind = "dynamical-constant-speed"
    return PeakonKind(kind, evidence, tol)
