"""Closed-form dynamical peakons and inverse design of oscillating amplitudes.

Each catalog entry carries the nonlinearity it solves, so oracle tests run
the full text -> reduce -> integrate pipeline against the exact formulas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dsl import (BinOp, Call, ExprEvalError, Neg, NonlinearitySpec, Param, Var, compile_expr,
                  derivative, parse_expr)
from .peakon1 import PeakonState, rhs1
from .reduce import ReducedSystem

CATALOG_IDS = ("power-family", "stationary-family", "travelling-ex1", "asymptotic-ex2",
               "reversing-ex3", "dissipating-ex5", "blowup-ex5", "breather")


class OutsideDomainError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    params: dict
    spec: NonlinearitySpec
    domain: tuple = (-math.inf, math.inf)
    oscillatory: bool = False
    caveat: str = ""
    window: tuple = (-4.0, 4.0)

    def contains(self, t: float) -> bool:
        lo, hi = self.domain
        return lo < t < hi

    def initial_state(self, t: float = 0.0) -> PeakonState:
        A, X = closed_form(self, t)
        return PeakonState(t, A, X)

    def config_snippet(self) -> str:
        lines = ["[equation]", f"f = {self.spec.f_text}", f"g = {self.spec.g_text}"]
        lines += [f"{k} = {v!r}" for k, v in sorted(self.spec.params.items())]
        return "\n".join(lines) + "\n"


_DEFAULTS = {
    "power-family": dict(p=1.0, q=2.0, k=1.0, lam=1.0, t0=-1.0, X0=0.0),
    "stationary-family": dict(p=1.0, q=1.0, k=1.0, lam=1.0, t0=-1.0, X0=0.0),
    "travelling-ex1": dict(p=1.0, k=1.0, lam=-1.0, a=2.0, X0=0.0),
    "asymptotic-ex2": dict(k=1.0, lam=1.0, t0=0.0, X0=0.0),
    "reversing-ex3": dict(k=1.0, lam=1.0, t0=0.0, X0=0.0),
    "dissipating-ex5": dict(k=1.0, a=1.0, lam=1.0, t0=0.0, X0=0.0),
    "blowup-ex5": dict(k=1.0, a=1.0, lam=1.0, t0=1.0, X0=0.0),
    "breather": dict(a=1.0, k=2.0, c=0.0, X0=0.0),
}

# (f, g, names of the equation parameters among the entry parameters)
_EQUATIONS = {
    "power-family": ("k*u^p", "lam*u^q", ("k", "lam", "p", "q")),
    "stationary-family": ("k*u^p", "lam*u^q*ux", ("k", "lam", "p", "q")),
    "travelling-ex1": ("k*u^p*ux", "u^(p-1)*(u^2 + lam*ux^2)", ("k", "lam", "p")),
    "asymptotic-ex2": ("k*(u-2)*(u-1)", "lam*u", ("k", "lam")),
    "reversing-ex3": ("k*(u-2)*(u-1)", "lam*(3-2*u)", ("k", "lam")),
    "dissipating-ex5": ("k*(a-u)", "lam*u", ("k", "a", "lam")),
    "blowup-ex5": ("k*(a-u)", "lam*u", ("k", "a", "lam")),
}


def make_entry(entry_id: str, **overrides) -> CatalogEntry:
    """Build a catalog entry with default parameters replaced by ``overrides``."""
    if entry_id not in _DEFAULTS:
        raise KeyError(f"unknown catalog entry {entry_id!r}; choose from {', '.join(CATALOG_IDS)}")
    unknown = set(overrides) - set(_DEFAULTS[entry_id])
    if unknown:
        raise KeyError(f"{entry_id} has no parameter(s) {', '.join(sorted(unknown))}")
    params = {**_DEFAULTS[entry_id], **{k: float(v) for k, v in overrides.items()}}
    if entry_id == "breather":
        spec = design_breather(params["a"], params["k"], params["c"])
        period = 2 * math.pi / abs(params["k"])
        return CatalogEntry(entry_id, params, spec, oscillatory=True,
                            caveat="f0 is singular at u = 0 and real only for |u| <= |a|",
                            window=(0.0, 2 * period))
    f, g, names = _EQUATIONS[entry_id]
    spec = NonlinearitySpec.from_text(f, g, {n: params[n] for n in names})
    domain = _domain(entry_id, params)
    return CatalogEntry(entry_id, params, spec, domain, window=_window(domain))


def catalog() -> list[CatalogEntry]:
    return [make_entry(i) for i in CATALOG_IDS]


def _domain(entry_id, P):
    if entry_id in ("power-family", "stationary-family"):
        if P["p"] == 0 or P["k"] == 0:
            raise ValueError("power family needs p != 0 and k != 0")
        return (P["t0"], math.inf) if P["p"] * P["k"] > 0 else (-math.inf, P["t0"])
    if entry_id == "blowup-ex5":
        return (-math.inf, P["t0"]) if P["k"] * P["a"] > 0 else (P["t0"], math.inf)
    return (-math.inf, math.inf)


def _window(domain):
    """A simulation span inside ``domain`` that stays one time unit clear of a finite end."""
    lo, hi = domain
    if math.isfinite(lo):
        return (lo + 1.0, lo + 5.0)
    if math.isfinite(hi):
        return (hi - 5.0, hi - 0.5)
    return (-4.0, 4.0)


def closed_form(entry: CatalogEntry, t: float) -> tuple[float, float]:
    """Exact (A(t), X(t)) for a catalog entry."""
    if not entry.contains(t):
        raise OutsideDomainError(f"t = {t!r} lies outside {entry.id} domain {entry.domain}")
    P = entry.params
    eid = entry.id
    if eid in ("power-family", "stationary-family"):
        p, k, t0 = P["p"], P["k"], P["t0"]
        base = p * k * (t - t0)
        A = base ** (-1.0 / p)
        if eid == "stationary-family":
            return A, P["X0"]
        q, lam = P["q"], P["lam"]
        if q == p:
            return A, P["X0"] + lam / (p * k) * math.log(abs(t - t0))
        return A, P["X0"] + lam / ((p - q) * k) * base ** (1.0 - q / p)
    if eid == "travelling-ex1":
        a = P["a"]
        return a, P["X0"] + (1.0 + P["lam"] / 3.0) * a ** (P["p"] + 1.0) * t
    if eid in ("asymptotic-ex2", "reversing-ex3"):
        k, lam, t0 = P["k"], P["lam"], P["t0"]
        s = math.sqrt(1.0 + math.exp(2.0 * k * (t0 - t)))
        A = 1.0 + 1.0 / s
        if eid == "asymptotic-ex2":
            X = 2.0 * lam * (t - t0) + lam / k * math.log1p(s) + P["X0"]
        else:
            X = lam * (t0 - t) - 2.0 * lam / k * math.log1p(s) + P["X0"]
        return A, X
    if eid == "dissipating-ex5":
        k, a, lam, tau = P["k"], P["a"], P["lam"], t - P["t0"]
        A = a / (1.0 + math.exp(k * a * tau))
        X = lam / k * (math.log(2.0) - math.log1p(math.exp(-k * a * tau))) + P["X0"]
        return A, X
    if eid == "blowup-ex5":
        k, a, lam, tau = P["k"], P["a"], P["lam"], t - P["t0"]
        A = a / (1.0 - math.exp(k * a * tau))
        X = -lam / k * math.log(abs(1.0 - math.exp(-k * a * tau))) + P["X0"]
        return A, X
    if eid == "breather":
        return P["a"] * math.cos(P["k"] * t), P["c"] * t + P["X0"]
    raise KeyError(eid)


def closed_form_rates(entry: CatalogEntry, t: float) -> tuple[float, float]:
    """(dA/dt, dX/dt) from a 4th-order central difference of the closed form."""
    h = 1e-4 * max(1.0, abs(t))
    pts = [closed_form(entry, t + s * h) for s in (-2, -1, 1, 2)]
    w = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * h)
    return float(w @ [p[0] for p in pts]), float(w @ [p[1] for p in pts])


def self_consistency(entry: CatalogEntry, times, rs: ReducedSystem | None = None) -> float:
    """Largest relative mismatch between closed-form rates and the reduced ODEs.

    For oscillatory entries the amplitude equation is compared in the
    branch-free form (dA/dt)^2 = (A f0(A))^2.
    """
    rs = rs or ReducedSystem(entry.spec)
    worst = 0.0
    for t in times:
        A, X = closed_form(entry, t)
        Adot, Xdot = closed_form_rates(entry, t)
        Adot_ode, Xdot_ode = rhs1(rs, PeakonState(t, A, X))
        scale = max(1.0, abs(Adot), abs(Xdot))
        if entry.oscillatory:
            mis_A = abs(Adot ** 2 - Adot_ode ** 2) / max(1.0, Adot ** 2)
        else:
            mis_A = abs(Adot - Adot_ode) / scale
        worst = max(worst, mis_A, abs(Xdot - Xdot_ode) / scale)
    return worst


def sample_times(entry: CatalogEntry, n: int = 50, span: float = 4.0) -> np.ndarray:
    """``n`` times inside the entry's domain, kept clear of finite endpoints."""
    lo, hi = entry.domain
    if math.isfinite(lo) and math.isfinite(hi):
        a, b = lo, hi
    elif math.isfinite(lo):
        a, b = lo, lo + span
    elif math.isfinite(hi):
        a, b = hi - span, hi
    else:
        a, b = -span / 2, span / 2
    margin = 0.05 * (b - a)
    return np.linspace(a + margin, b - margin, n)


# --------------------------------------------------------------------------
# Inverse design


def design_breather(a: float, kappa: float, c: float) -> NonlinearitySpec:
    """Equation whose peakon has amplitude a*cos(kappa*t) and constant speed c."""
    if a == 0 or kappa == 0:
        raise ValueError("breather design needs a != 0 and kappa != 0")
    return NonlinearitySpec.from_text("k*sqrt((a/u)^2 - 1)", "c",
                                      {"a": float(a), "k": float(kappa), "c": float(c)})


@dataclass
class PeriodicDesign:
    """Result of :func:`design_periodic`: the spec plus the monotone branch used."""

    spec: NonlinearitySpec
    t_start: float
    t_end: float
    u_range: tuple
    phi: Callable = field(repr=False)

    def amplitude(self, t):
        return self.phi(t)


def _rename_t(node):
    if isinstance(node, Param) and node.name == "t":
        return Var("u")
    if isinstance(node, Neg):
        return Neg(_rename_t(node.arg))
    if isinstance(node, BinOp):
        return BinOp(node.op, _rename_t(node.left), _rename_t(node.right))
    if isinstance(node, Call):
        return Call(node.name, tuple(_rename_t(a) for a in node.args))
    return node


def _phi_from_text(text, params):
    node = _rename_t(parse_expr(text))
    value = compile_expr(node, params, None)
    slope = compile_expr(derivative(node, "u"), params, None)
    return (lambda t: value(t, 0.0)), (lambda t: slope(t, 0.0))


def _phi_from_table(ts, values):
    from scipy.interpolate import PchipInterpolator

    interp = PchipInterpolator(np.asarray(ts, float), np.asarray(values, float))
    return interp, interp.derivative()


def _phi_from_callable(fn):
    def slope(t):
        t = np.asarray(t, dtype=float)
        h = 1e-4 * np.maximum(1.0, np.abs(t))
        return (-fn(t + 2 * h) + 8 * fn(t + h) - 8 * fn(t - h) + fn(t - 2 * h)) / (12 * h)
    return fn, slope


def design_periodic(phi, c: float, t_start: float = 0.0, t_end: float | None = None,
                    params: dict | None = None, n_check: int = 2001,
                    inverse_tol: float = 1e-12) -> PeriodicDesign:
    """Equation whose peakon amplitude follows a prescribed periodic ``phi``.

    ``phi`` is an expression in ``t`` (text), a vectorised callable, or a
    sampled half-period table ``(times, values)``.  On the monotone branch
    [t_start, t_end] the construction is f0(u) = -phi'(phi^{-1}(u))/u, g = c.
    The oscillatory integrator reproduces phi when phi is symmetric about its
    extrema (the branch-free form only sees phi'^2).
    """
    if isinstance(phi, str):
        value, slope = _phi_from_text(phi, dict(params or {}))
    elif isinstance(phi, tuple) and len(phi) == 2:
        ts = np.asarray(phi[0], float)
        value, slope = _phi_from_table(ts, phi[1])
        t_start, t_end = float(ts[0]), float(ts[-1])
    elif callable(phi):
        value, slope = _phi_from_callable(phi)
    else:
        raise TypeError("phi must be text in t, a callable, or a (times, values) table")
    if t_end is None or not t_end > t_start:
        raise ValueError("a half period [t_start, t_end] with t_end > t_start is required")

    grid = np.linspace(t_start, t_end, n_check)
    vals = np.asarray(value(grid), dtype=float)
    diffs = np.diff(vals)
    if np.all(diffs == 0):
        raise ValueError("phi is constant on the half period; no admissible equation")
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ValueError("phi is not strictly monotone on the half period")
    increasing = diffs[0] > 0
    u_lo, u_hi = float(min(vals[0], vals[-1])), float(max(vals[0], vals[-1]))
    if u_lo <= 0 <= u_hi:
        raise ValueError("phi crosses zero on the half period; f0 would be singular there")

    def inverse(u):
        u = np.asarray(u, dtype=float)
        if np.any((u < u_lo) | (u > u_hi)):
            raise ExprEvalError("amplitude outside the range of phi on its monotone branch")
        lo = np.full(u.shape, float(t_start))
        hi = np.full(u.shape, float(t_end))
        while np.max(hi - lo, initial=0.0) > inverse_tol:
            mid = 0.5 * (lo + hi)
            below = (np.asarray(value(mid)) < u) == increasing
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def phidot(u):
        # quadrature panels query one amplitude many times; invert each value once
        u = np.asarray(u, dtype=float)
        uniq, where = np.unique(u, return_inverse=True)
        return np.asarray(slope(inverse(uniq)), dtype=float)[where].reshape(u.shape)

    spec = NonlinearitySpec.from_text("-phidot(u)/u", "c", {"c": float(c)}, {"phidot": phidot})
    return PeriodicDesign(spec, float(t_start), float(t_end), (u_lo, u_hi), value)
