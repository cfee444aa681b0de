"""Dormand-Prince 5(4) stepper with dense output and event location.

The stepper is driven one accepted step at a time so callers can run their
own event bookkeeping (stall windows, blow-up fits, branch switches) between
steps.  Right-hand-side failures inside a step are treated as a signal to
shrink the step, not as fatal errors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# continuous extension (Shampine), y(t0 + s h) = y0 + h K^T P [s, s^2, s^3, s^4]
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


class StepSizeUnderflow(ArithmeticError):
    pass


@dataclass
class DenseStep:
    t_old: float
    t: float
    y_old: np.ndarray
    y: np.ndarray
    K: np.ndarray

    def __call__(self, t):
        h = self.t - self.t_old
        s = (t - self.t_old) / h
        powers = np.array([s, s * s, s ** 3, s ** 4])
        return self.y_old + h * (self.K.T @ (_P @ powers))


class DormandPrince:
    """Adaptive explicit RK 5(4) integrator.

    ``fun(t, y)`` returns dy/dt as an array; any exception listed in
    ``recoverable`` raised by ``fun`` rejects the step and shrinks it.
    """

    def __init__(self, fun, t0, y0, t_bound, rtol=1e-10, atol=1e-10, first_step=None,
                 max_step=np.inf, recoverable=(ArithmeticError, ValueError)):
        self.fun = fun
        self.t = float(t0)
        self.y = np.array(y0, dtype=float)
        self.t_bound = float(t_bound)
        self.direction = 1.0 if t_bound >= t0 else -1.0
        self.rtol = rtol
        self.atol = atol
        self.max_step = max_step
        self.recoverable = recoverable
        self.f = np.asarray(fun(self.t, self.y), dtype=float)
        self.h_abs = abs(first_step) if first_step else self._initial_step()
        self.n_accepted = 0
        self.n_rejected = 0
        self.last_error = None
        self.t_old = None
        self.y_old = None
        self.K = None

    @property
    def finished(self):
        return self.direction * (self.t - self.t_bound) >= 0

    def _initial_step(self):
        scale = self.atol + np.abs(self.y) * self.rtol
        d0 = np.linalg.norm(self.y / scale) / np.sqrt(self.y.size)
        d1 = np.linalg.norm(self.f / scale) / np.sqrt(self.y.size)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, abs(self.t_bound - self.t))
        try:
            y1 = self.y + self.direction * h0 * self.f
            f1 = np.asarray(self.fun(self.t + self.direction * h0, y1), dtype=float)
            d2 = np.linalg.norm((f1 - self.f) / scale) / np.sqrt(self.y.size) / h0
        except self.recoverable:
            return max(h0 * 1e-3, 1e-12)
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1 / 5)
        return min(100 * h0, h1, self.max_step)

    def _attempt(self, h):
        t, y = self.t, self.y
        K = np.empty((7, y.size))
        K[0] = self.f
        for i in range(1, 6):
            dy = h * (np.asarray(_A[i]) @ K[:i])
            K[i] = self.fun(t + _C[i] * h, y + dy)
        y_new = y + h * (_B @ K[:6])
        K[6] = self.fun(t + h, y_new)
        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(K))):
            raise FloatingPointError("non-finite state in step")
        err = h * (_E @ K)
        scale = self.atol + np.maximum(np.abs(y), np.abs(y_new)) * self.rtol
        norm = np.linalg.norm(err / scale) / np.sqrt(y.size)
        return y_new, K, norm

    def step(self) -> DenseStep:
        """Advance by one accepted step and return its dense interpolant."""
        t = self.t
        min_step = 16 * np.spacing(max(abs(t), 1.0))
        h_abs = min(self.h_abs, self.max_step)
        while True:
            if h_abs < min_step:
                raise StepSizeUnderflow(
                    f"step size underflow at t={t!r}" + (f" ({self.last_error})" if self.last_error else ""))
            h = self.direction * h_abs
            t_new = t + h
            if self.direction * (t_new - self.t_bound) > 0:
                t_new = self.t_bound
                h = t_new - t
                h_abs = abs(h)
            try:
                y_new, K, norm = self._attempt(h)
            except self.recoverable + (FloatingPointError,) as exc:
                self.last_error = exc
                self.n_rejected += 1
                h_abs *= 0.25
                continue
            if norm < 1.0:
                factor = MAX_FACTOR if norm == 0 else min(MAX_FACTOR, SAFETY * norm ** -0.2)
                self.h_abs = h_abs * factor
                break
            self.n_rejected += 1
            h_abs *= max(MIN_FACTOR, SAFETY * norm ** -0.2)
        self.t_old, self.y_old, self.K = t, self.y, K
        self.t, self.y, self.f = t_new, y_new, K[6]
        self.n_accepted += 1
        self.last_error = None
        return DenseStep(t, t_new, self.y_old, y_new, K)


def locate_root(fn, t_lo, t_hi, f_lo=None, f_hi=None, xtol=1e-10, max_iter=200):
    """Bisection for a sign change of ``fn`` on [t_lo, t_hi]."""
    f_lo = fn(t_lo) if f_lo is None else f_lo
    f_hi = fn(t_hi) if f_hi is None else f_hi
    if f_lo == 0:
        return float(t_lo)
    if f_hi == 0:
        return float(t_hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError("no sign change on the bracket")
    for _ in range(max_iter):
        if abs(t_hi - t_lo) <= xtol:
            break
        mid = 0.5 * (t_lo + t_hi)
        f_mid = fn(mid)
        if f_mid == 0:
            return float(mid)
        if np.sign(f_mid) == np.sign(f_lo):
            t_lo, f_lo = mid, f_mid
        else:
            t_hi, f_hi = mid, f_mid
    return float(0.5 * (t_lo + t_hi))
