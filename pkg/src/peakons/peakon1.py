"""Single dynamical peakon u = A(t) exp(-|x - X(t)|).

    dA/dt = -A f0(A),   dX/dt = g0(A),   d2X/dt2 = -A f0(A) alpha(A)

``integrate1`` solves these with an adaptive RK 5(4) pair and reports
events; ``quadrature_solve`` is the independent route through

    t - t1 = int_A^{A1} dy / (y f0(y)),   X - X1 = int_A^{A1} g0(y) / (y f0(y)) dy.

Oscillatory mode integrates the second-order form A'' = (1/2) d(P^2)/dA with
P(A) = -A f0(A).  It coincides with the first-order system on every monotone
branch and continues smoothly through turning points where f0 vanishes like
a square root (breathers), flipping the branch of dA/dt.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .integrator import DormandPrince, StepSizeUnderflow, locate_root
from .quadrature import gk_quad
from .reduce import ReducedSystem, ReductionError

TERMINATIONS = ("horizon-reached", "blow-up", "extinction", "equilibrium", "domain-error", "collision")
EVENT_KINDS = ("blow-up", "extinction", "direction-reversal", "equilibrium", "branch-switch", "collision")
CSV_HEADER = "t,A,X,Xdot,Xddot,M,H1"


@dataclass
class PeakonState:
    t: float
    A: float
    X: float


@dataclass
class EventRecord:
    kind: str
    time: float
    payload: dict = field(default_factory=dict)

    def to_dict(self):
        return {"kind": self.kind, "time": self.time, "payload": self.payload}


@dataclass
class IntegratorOptions:
    tol: float = 1e-10
    sample_dt: float = 0.01
    A_max: float = 1e8
    eps_ext: float = 1e-9
    eps_eq: float = 1e-12
    stall_window: int = 100
    oscillatory: bool = False
    branch: int = 1
    max_steps: int = 500_000
    event_xtol: float = 1e-10
    fit_window: int = 10


@dataclass
class Trajectory:
    t: np.ndarray
    A: np.ndarray
    X: np.ndarray
    Xdot: np.ndarray
    Xddot: np.ndarray
    events: list
    termination: str
    message: str = ""
    Adot: np.ndarray | None = None
    oscillatory: bool = False

    @property
    def M(self):
        return 2.0 * self.A

    @property
    def H1(self):
        return 2.0 * self.A ** 2

    def events_of(self, kind):
        return [e for e in self.events if e.kind == kind]

    def columns(self):
        return np.column_stack([self.t, self.A, self.X, self.Xdot, self.Xddot, self.M, self.H1])

    def to_csv(self, meta: dict | None = None) -> str:
        return format_csv(CSV_HEADER, self.columns(), meta)


def format_csv(header: str, rows: np.ndarray, meta: dict | None = None) -> str:
    out = io.StringIO()
    if meta is not None:
        out.write("# meta: " + json.dumps(meta, sort_keys=True) + "\n")
    out.write(header + "\n")
    for row in rows:
        out.write(",".join(repr(float(v)) for v in row) + "\n")
    return out.getvalue()


def rhs1(rs: ReducedSystem, state: PeakonState) -> tuple[float, float]:
    return rs.amplitude_rate(state.A), rs.g0_at(state.A)


def accel1(rs: ReducedSystem, A: float) -> float:
    return rs.acceleration(A)


# --------------------------------------------------------------------------
# branch-continuation helpers


def _fd_weights(offsets):
    """First-derivative weights at 0 for the given stencil offsets."""
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    V = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


_STENCILS = [
    np.array([-2.0, -1.0, 1.0, 2.0]),
    np.array([0.0, -1.0, -2.0, -3.0, -4.0]),
    np.array([0.0, 1.0, 2.0, 3.0, 4.0]),
    np.array([-1.0, -2.0, -3.0, -4.0, -5.0]),
    np.array([1.0, 2.0, 3.0, 4.0, 5.0]),
]
_WEIGHTS = [_fd_weights(s) for s in _STENCILS]


def half_dp2(rs: ReducedSystem, A: float, rel_step: float = 1e-4) -> float:
    """(1/2) d/dA [A f0(A)]^2, falling back to one-sided stencils at domain edges."""
    h = rel_step * max(abs(A), 1e-2)

    def p2(a):
        return (a * rs.f0_at(a)) ** 2

    last = None
    for offsets, weights in zip(_STENCILS, _WEIGHTS):
        try:
            vals = [p2(A + k * h) for k in offsets]
        except ReductionError as exc:
            last = exc
            continue
        return 0.5 * float(np.dot(weights, vals)) / h
    raise last


def local_exponent(fn, x0, side, scales=(1e-3, 1e-4, 1e-5, 1e-6)):
    """Log-log slope of |fn(x0 + side*d)| against d over the given offsets."""
    ds = np.array(scales) * max(abs(x0), 1.0)
    vals = np.abs([fn(x0 + side * d) for d in ds])
    if np.any(vals == 0):
        return math.inf
    return float(np.polyfit(np.log(ds), np.log(vals), 1)[0])


# --------------------------------------------------------------------------


def integrate1(rs: ReducedSystem, init: PeakonState, horizon: float,
               opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate a single peakon from ``init`` to time ``horizon``.

    ``horizon < init.t`` integrates backwards in time.  Terminal events
    (blow-up, extinction, equilibrium) end the run early; the trajectory
    then ends at the event time.
    """
    opts = opts or IntegratorOptions()
    if horizon == init.t:
        raise ValueError("horizon must differ from the initial time")
    return _Run(rs, init, float(horizon), opts).run()


class _Run:
    def __init__(self, rs, init, horizon, opts):
        self.rs = rs
        self.opts = opts
        self.t0 = float(init.t)
        self.horizon = horizon
        self.direction = 1.0 if horizon > init.t else -1.0
        self.osc = opts.oscillatory
        if self.osc:
            V0 = opts.branch * rs.amplitude_rate(init.A)
            y0 = [init.A, V0, init.X]
        else:
            rs.amplitude_rate(init.A)
            y0 = [init.A, init.X]
        rs.g0_at(init.A)
        self.solver = DormandPrince(self._fun, self.t0, y0, horizon, rtol=opts.tol, atol=opts.tol,
                                    recoverable=ReductionError + (ValueError,))
        self.events: list[EventRecord] = []
        self.samples_t: list[float] = []
        self.samples_y: list[np.ndarray] = []
        self.next_k = 0
        self.history: list[tuple[float, float, float]] = []

    # state layout helpers
    def _fun(self, t, y):
        A = y[0]
        if self.osc:
            return np.array([y[1], half_dp2(self.rs, A), self.rs.g0_at(A)])
        return np.array([self.rs.amplitude_rate(A), self.rs.g0_at(A)])

    def _A(self, y):
        return y[0]

    def _Adot(self, y):
        return y[1] if self.osc else self.rs.amplitude_rate(y[0])

    def _X(self, y):
        return y[2] if self.osc else y[1]

    def _sample_time(self, k):
        return self.t0 + self.direction * k * self.opts.sample_dt

    def _collect(self, dense, t_end):
        """Record the regular samples falling in (t_old, t_end]."""
        while True:
            ts = self._sample_time(self.next_k)
            if self.direction * (ts - t_end) > 1e-12 * max(1.0, abs(ts)):
                break
            self.samples_t.append(ts)
            self.samples_y.append(dense(ts))
            self.next_k += 1

    def _close(self, t_end, y_end):
        if not self.samples_t or abs(self.samples_t[-1] - t_end) > 1e-12 * max(1.0, abs(t_end)):
            self.samples_t.append(t_end)
            self.samples_y.append(np.array(y_end, dtype=float))

    def run(self) -> Trajectory:
        rs, opts = self.rs, self.opts
        solver = self.solver
        termination = "horizon-reached"
        message = ""
        stall = 0
        y_prev = solver.y.copy()
        self.history.append((self.t0, self._A(y_prev), self._Adot(y_prev)))
        g_sign = np.sign(rs.g0_at(self._A(y_prev)))
        v_sign = np.sign(y_prev[1]) if self.osc else 0.0
        self.samples_t.append(self.t0)
        self.samples_y.append(y_prev.copy())
        self.next_k = 1

        while not solver.finished:
            if solver.n_accepted >= opts.max_steps:
                termination, message = "domain-error", f"maximum step count {opts.max_steps} reached"
                break
            try:
                dense = solver.step()
            except StepSizeUnderflow as exc:
                termination, message = "domain-error", str(exc)
                break
            y = solver.y
            A = self._A(y)
            terminal = None
            self.history.append((solver.t, A, self._Adot(y)))
            del self.history[:-opts.fit_window]

            # direction reversal: sign change of the speed g0(A)
            try:
                g_new = rs.g0_at(A)
            except ReductionError:
                g_new = 0.0
            s_new = np.sign(g_new)
            if s_new != 0 and g_sign != 0 and s_new != g_sign:
                te = self._locate(dense, lambda yy: rs.g0_at(yy[0]))
                ye = dense(te)
                # a speed that flips only because the peak itself vanishes is not a reversal
                if abs(ye[0]) > self.opts.eps_ext:
                    self.events.append(EventRecord("direction-reversal", te,
                                                   {"X": float(self._X(ye)), "A": float(ye[0])}))
            if s_new != 0:
                g_sign = s_new

            if self.osc:
                v_new = np.sign(y[1])
                if v_new != 0 and v_sign != 0 and v_new != v_sign:
                    te = self._locate(dense, lambda yy: yy[1])
                    ye = dense(te)
                    self.events.append(EventRecord("branch-switch", te, self._switch_payload(ye)))
                if v_new != 0:
                    v_sign = v_new

            # blow-up
            if abs(A) >= opts.A_max:
                te = self._locate(dense, lambda yy: abs(yy[0]) - opts.A_max)
                payload = self._blowup_payload(te)
                terminal = ("blow-up", te, payload["t_star"], payload)
            elif not self.osc:
                A_old = self._A(dense.y_old)
                Adot = self._Adot(y)
                if A_old != 0 and np.sign(A) != np.sign(A_old):
                    te = self._locate(dense, lambda yy: yy[0])
                    try:
                        rate = rs.amplitude_rate(A_old)
                    except ReductionError:
                        rate = math.nan
                    terminal = ("extinction", te, te, {"crossed_zero": True, "Adot_before": float(rate),
                                                   "singular": bool(abs(rate) > opts.eps_ext)})
                elif abs(A) <= opts.eps_ext and abs(Adot) <= opts.eps_ext:
                    if abs(A_old) > opts.eps_ext:
                        te = self._locate(dense, lambda yy: abs(yy[0]) - opts.eps_ext)
                    else:
                        te = solver.t
                    terminal = ("extinction", te, te, {"crossed_zero": False})
                elif abs(Adot) < opts.eps_eq and abs(A) > opts.eps_ext:
                    stall += 1
                    if stall >= opts.stall_window:
                        terminal = ("equilibrium", solver.t, solver.t, {"A": float(A)})
                else:
                    stall = 0

            if terminal is not None:
                kind, t_cut, t_event, payload = terminal
                self._collect(dense, t_cut)
                self._close(t_cut, dense(t_cut))
                self.events.append(EventRecord(kind, t_event, payload))
                termination = kind
                if kind == "equilibrium":
                    self._fill_equilibrium(solver.t, y)
                break
            self._collect(dense, solver.t)
        else:
            self._close(solver.t, solver.y)

        if termination == "domain-error":
            self._close(solver.t, solver.y)
        return self._build(termination, message)

    def _locate(self, dense, fn):
        return locate_root(lambda t: fn(dense(t)), dense.t_old, dense.t, xtol=self.opts.event_xtol)

    def _switch_payload(self, ye):
        A = float(ye[0])
        payload = {"A": A, "X": float(self._X(ye))}
        for side in (-np.sign(A) or -1.0, np.sign(A) or 1.0):
            try:
                payload["f0_exponent"] = local_exponent(self.rs.f0_at, A, side)
                break
            except ReductionError:
                continue
        return payload

    def _blowup_payload(self, t_located):
        payload = {"t_located": t_located}
        hist = self.history[-self.opts.fit_window:]
        if len(hist) >= 4:
            ts = np.array([h[0] for h in hist])
            ratio = np.array([h[1] / h[2] if h[2] != 0 else np.nan for h in hist])
            if np.all(np.isfinite(ratio)):
                slope, icpt = np.polyfit(ts, ratio, 1)
                resid = ratio - (slope * ts + icpt)
                rel = float(np.sqrt(np.mean(resid ** 2)) / max(np.mean(np.abs(ratio)), 1e-300))
                if slope != 0:
                    t_star = -icpt / slope
                    exponent = -1.0 / slope
                    ahead = self.direction * (t_star - ts[-1]) >= 0
                    if rel < 1e-3 and exponent > 0 and ahead:
                        payload.update({"t_star_fit": float(t_star), "fit_exponent": float(exponent),
                                        "fit_residual": rel})
        payload["t_star"] = payload.get("t_star_fit", float(self.history[-1][0]))
        return payload

    def _fill_equilibrium(self, t_stop, y):
        A, X = self._A(y), self._X(y)
        c = self.rs.g0_at(A)
        k = self.next_k
        while self.direction * (self._sample_time(k) - self.horizon) < -1e-12:
            ts = self._sample_time(k)
            if self.direction * (ts - t_stop) > 0:
                self.samples_t.append(ts)
                self.samples_y.append(self._pack(A, X + c * (ts - t_stop)))
            k += 1
        self._close(self.horizon, self._pack(A, X + c * (self.horizon - t_stop)))

    def _pack(self, A, X):
        return np.array([A, 0.0, X]) if self.osc else np.array([A, X])

    def _build(self, termination, message):
        rs = self.rs
        t = np.array(self.samples_t)
        Y = np.array(self.samples_y)
        A = Y[:, 0]
        X = Y[:, 2] if self.osc else Y[:, 1]
        Xdot = np.empty_like(A)
        Xddot = np.empty_like(A)
        Adot = np.empty_like(A)
        for i, a in enumerate(A):
            try:
                Xdot[i] = rs.g0_at(a)
                Adot[i] = Y[i, 1] if self.osc else rs.amplitude_rate(a)
                Xddot[i] = Adot[i] * rs.alpha_at(a)
            except ReductionError:
                Xdot[i] = Xddot[i] = Adot[i] = np.nan
        events = sorted(self.events, key=lambda e: self.direction * e.time)
        return Trajectory(t, A, X, Xdot, Xddot, events, termination, message, Adot, self.osc)


# --------------------------------------------------------------------------


def quadrature_solve(rs: ReducedSystem, A0: float, A1: float, tol: float = 1e-12) -> tuple[float, float]:
    """Elapsed time and displacement while the amplitude moves from A0 to A1.

    Raises ValueError if y f0(y) changes sign between A0 and A1 (an
    equilibrium lies in between and is never crossed).
    """
    if A0 == A1:
        return 0.0, 0.0
    ys = np.linspace(A0, A1, 65)
    p = np.array([y * rs.f0_at(y) if y != 0 else rs.amplitude_rate(y) for y in ys])
    if np.any(p == 0) or np.any(np.sign(p) != np.sign(p[0])):
        raise ValueError("y*f0(y) vanishes or changes sign between the amplitude levels")

    def inv(y):
        return np.array([1.0 / (v * rs.f0_at(v)) for v in np.atleast_1d(y)])

    def speed(y):
        return np.array([rs.g0_at(v) / (v * rs.f0_at(v)) for v in np.atleast_1d(y)])

    dt, _ = gk_quad(inv, A1, A0, abs_tol=tol, rel_tol=tol)
    dX, _ = gk_quad(speed, A1, A0, abs_tol=tol, rel_tol=tol)
    return dt, dX
