"""N-peakon weak solutions u = sum_i a_i exp(-|x - x_i|) of the (f, g) family.

Each crest carries the jump dynamics

    da_i/dt =  (1/2) [F(u, ux)]_{x_i}
    dx_i/dt = -(1/2) [G(u, ux)]_{x_i} / a_i

with [.] the right-minus-left jump and F, G the ux-antiderivatives of f, g.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .integrator import DormandPrince, StepSizeUnderflow, locate_root
from .peakon1 import EventRecord, IntegratorOptions, format_csv
from .reduce import ReducedSystem, ReductionError


class DegenerateStateError(ValueError):
    pass


@dataclass
class NPeakonState:
    t: float
    a: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        self.a = np.atleast_1d(np.asarray(self.a, dtype=float))
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if self.a.shape != self.x.shape:
            raise ValueError("amplitude and position vectors differ in length")

    @property
    def n(self):
        return self.a.size


@dataclass
class NOptions(IntegratorOptions):
    gap_min: float = 1e-9
    a_min: float = 1e-12


@dataclass
class NTrajectory:
    t: np.ndarray
    a: np.ndarray          # shape (samples, N)
    x: np.ndarray
    events: list = field(default_factory=list)
    termination: str = "horizon-reached"
    message: str = ""

    @property
    def M(self):
        return 2.0 * self.a.sum(axis=1)

    @property
    def H1(self):
        return np.array([h1_functional(a, x) for a, x in zip(self.a, self.x)])

    def header(self):
        n = self.a.shape[1]
        return ",".join(["t"] + [f"a_{i}" for i in range(1, n + 1)]
                        + [f"x_{i}" for i in range(1, n + 1)] + ["M", "H1"])

    def to_csv(self, meta: dict | None = None) -> str:
        rows = np.column_stack([self.t, self.a, self.x, self.M, self.H1])
        return format_csv(self.header(), rows, meta)


def h1_functional(a, x) -> float:
    """int (u^2 + ux^2) dx = 2 sum_ij a_i a_j exp(-|x_i - x_j|)."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    return float(2.0 * a @ np.exp(-np.abs(x[:, None] - x[None, :])) @ a)


def field_at(state: NPeakonState, x: float) -> tuple[float, float, float]:
    """u and its one-sided x-derivatives at ``x``.

    A crest sitting exactly at ``x`` contributes +a_i from the left and -a_i
    from the right.
    """
    d = x - state.x
    e = state.a * np.exp(-np.abs(d))
    u = float(e.sum())
    at = d == 0
    smooth = float(-(np.sign(d[~at]) * e[~at]).sum())
    peak = float(e[at].sum())
    return u, smooth + peak, smooth - peak


def rhsN(rs: ReducedSystem, state: NPeakonState) -> tuple[np.ndarray, np.ndarray]:
    adot = np.empty(state.n)
    xdot = np.empty(state.n)
    for i in range(state.n):
        if abs(state.a[i]) == 0:
            raise DegenerateStateError(f"amplitude {i} vanished")
        u, ux_left, ux_right = field_at(state, state.x[i])
        adot[i] = 0.5 * rs.jump("f", u, ux_left, ux_right)
        xdot[i] = -rs.jump("g", u, ux_left, ux_right) / (2.0 * state.a[i])
    return adot, xdot


def integrateN(rs: ReducedSystem, init: NPeakonState, horizon: float,
               opts: NOptions | None = None) -> NTrajectory:
    """Integrate the 2N jump ODEs; collisions and vanishing amplitudes terminate."""
    opts = opts or NOptions()
    n = init.n
    t0 = float(init.t)
    direction = 1.0 if horizon > t0 else -1.0

    def fun(t, y):
        adot, xdot = rhsN(rs, NPeakonState(t, y[:n], y[n:]))
        return np.concatenate([adot, xdot])

    def min_gap(y):
        xs = np.sort(y[n:])
        return np.inf if n < 2 else float(np.min(np.diff(xs)))

    def order(y):
        return tuple(np.argsort(y[n:], kind="stable"))

    y0 = np.concatenate([init.a, init.x])
    if n > 1 and min_gap(y0) < opts.gap_min:
        raise DegenerateStateError("initial peaks closer than the collision guard")
    solver = DormandPrince(fun, t0, y0, horizon, rtol=opts.tol, atol=opts.tol,
                           recoverable=ReductionError + (ValueError,))
    ts, ys, events = [t0], [y0.copy()], []
    termination, message = "horizon-reached", ""
    k = 1
    ordering = order(y0)

    def collect(dense, t_end):
        nonlocal k
        while True:
            tk = t0 + direction * k * opts.sample_dt
            if direction * (tk - t_end) > 1e-12 * max(1.0, abs(tk)):
                return
            ts.append(tk)
            ys.append(dense(tk))
            k += 1

    while not solver.finished:
        if solver.n_accepted >= opts.max_steps:
            termination, message = "domain-error", "maximum step count reached"
            break
        try:
            dense = solver.step()
        except StepSizeUnderflow as exc:
            termination, message = "domain-error", str(exc)
            break
        y = solver.y
        terminal = None
        if n > 1 and (min_gap(y) < opts.gap_min or order(y) != ordering):
            te = locate_root(lambda t: _signed_gap(dense(t), n, ordering) - opts.gap_min,
                             dense.t_old, dense.t, xtol=opts.event_xtol)
            ye = dense(te)
            terminal = EventRecord("collision", te, {"gap": _signed_gap(ye, n, ordering),
                                                     "a": ye[:n].tolist(), "x": ye[n:].tolist()})
            termination = "collision"
        elif np.min(np.abs(y[:n])) < opts.a_min:
            i = int(np.argmin(np.abs(y[:n])))
            te = locate_root(lambda t: abs(dense(t)[i]) - opts.a_min, dense.t_old, dense.t,
                             xtol=opts.event_xtol)
            terminal = EventRecord("extinction", te, {"index": i, "degenerate": True})
            termination = "extinction"
        if terminal is not None:
            collect(dense, terminal.time)
            if abs(ts[-1] - terminal.time) > 1e-12 * max(1.0, abs(terminal.time)):
                ts.append(terminal.time)
                ys.append(dense(terminal.time))
            events.append(terminal)
            break
        collect(dense, solver.t)
    else:
        if abs(ts[-1] - solver.t) > 1e-12 * max(1.0, abs(solver.t)):
            ts.append(solver.t)
            ys.append(solver.y.copy())
    if termination == "domain-error" and abs(ts[-1] - solver.t) > 0:
        ts.append(solver.t)
        ys.append(solver.y.copy())
    Y = np.array(ys)
    return NTrajectory(np.array(ts), Y[:, :n], Y[:, n:], events, termination, message)


def _signed_gap(y, n, ordering):
    """Smallest gap between neighbours in the initial ordering (negative once they cross)."""
    xs = y[n:][list(ordering)]
    return float(np.min(np.diff(xs)))
