"""Amplitude and position behaviour of a single dynamical peakon.

Along a monotone branch the amplitude approaches the next zero A* of A f0(A)
in its direction of motion (possibly 0 or infinity).  Everything about the
late-time behaviour follows from how a handful of scalar quantities scale as
A -> A*:

    1/(A f0)       integrable      <=>  A* is reached in finite time
    g0             -> 0 / c / inf       limiting speed
    g0/(A f0)      integrable      <=>  position stays bounded
    A f0 g0'       -> 0 or not          limiting acceleration
    A f0           -> 0 or not          limiting amplitude rate

For the power family f0 = k u^p, g0 = lam u^q these scalings are exact; for
general equations they are estimated from log-log slopes over a geometric
ladder of probe points and cross-checked against a simulation.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .peakon1 import IntegratorOptions, PeakonState, Trajectory, integrate1, quadrature_solve
from .quadrature import QuadratureError, gk_quad
from .reduce import ReducedSystem, ReductionError

AMPLITUDE_CLASSES = ("constant", "finite-asymptote", "unbounded", "blow-up", "extinction",
                     "periodic", "singular-derivative")
POSITION_CLASSES = ("constant-speed", "finite-asymptotic-speed", "braking", "runaway",
                    "finite-time-runaway", "wheelspin-limit", "thrust-reverse-braking",
                    "direction-reversal")
VERDICTS = ("confirmed", "consistent", "undetermined")


@dataclass
class ClassLabel:
    name: str
    value: object = None
    time: float | None = None
    detail: str | None = None

    def to_dict(self) -> dict:
        out = {"class": self.name}
        for key in ("value", "time", "detail"):
            v = getattr(self, key)
            if v is not None:
                out[key] = _jsonable(v)
        return out


@dataclass
class Evidence:
    condition: str
    probes: dict
    verdict: str

    def to_dict(self) -> dict:
        return {"condition": self.condition, "probes": _jsonable(self.probes), "verdict": self.verdict}


@dataclass
class BehaviorReport:
    mode: str
    amplitude: ClassLabel
    position: ClassLabel
    reversals: list = field(default_factory=list)
    evidence: list = field(default_factory=list)
    direction: str = "forward"
    notes: list = field(default_factory=list)

    @property
    def amplitude_class(self) -> str:
        return self.amplitude.name

    @property
    def position_class(self) -> str:
        return self.position.name

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "direction": self.direction,
            "amplitude": self.amplitude.to_dict(),
            "position": self.position.to_dict(),
            "reversals": [float(t) for t in self.reversals],
            "evidence": [e.to_dict() for e in self.evidence],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, np.integer):
        return int(v)
    return v


# --------------------------------------------------------------------------
# Shared decision table


@dataclass
class Limits:
    """Late-time limits along one monotone branch."""

    finite_time: bool
    A_lim: str                 # "0", "inf" or "finite"
    A_star: float
    Adot_vanishes: bool
    v_lim: str                 # "0", "inf" or "finite"
    speed: float               # limiting speed when v_lim == "finite"
    acc_vanishes: bool
    X_bounded: bool
    X_limit: float = math.nan
    t_star: float = math.nan


def assign_classes(lim: Limits) -> tuple[ClassLabel, ClassLabel]:
    t_star = lim.t_star if lim.finite_time else None
    if lim.A_lim == "inf":
        amp = ClassLabel("blow-up", math.inf, t_star) if lim.finite_time else ClassLabel("unbounded", math.inf)
    elif lim.A_lim == "0":
        if not lim.finite_time:
            amp = ClassLabel("extinction", 0.0, detail="asymptotic")
        elif lim.Adot_vanishes:
            amp = ClassLabel("extinction", 0.0, t_star, detail="finite-time")
        else:
            amp = ClassLabel("singular-derivative", 0.0, t_star)
    else:
        amp = ClassLabel("finite-asymptote", lim.A_star, t_star)

    x_inf = lim.X_limit if lim.X_bounded else math.inf
    x_detail = "X -> X_inf" if lim.X_bounded else "X -> inf"
    if not lim.finite_time:
        if lim.v_lim == "inf":
            pos = ClassLabel("runaway", math.inf)
        elif lim.v_lim == "0":
            pos = ClassLabel("braking", x_inf, detail=x_detail)
        else:
            pos = ClassLabel("finite-asymptotic-speed", lim.speed)
    else:
        if lim.v_lim == "inf":
            if lim.X_bounded:
                pos = ClassLabel("wheelspin-limit", lim.X_limit, t_star)
            else:
                pos = ClassLabel("finite-time-runaway", math.inf, t_star)
        elif lim.v_lim == "0":
            if lim.acc_vanishes:
                pos = ClassLabel("braking", x_inf, t_star, detail=x_detail)
            else:
                pos = ClassLabel("thrust-reverse-braking", lim.X_limit, t_star)
        else:
            pos = ClassLabel("finite-asymptotic-speed", lim.speed, t_star)
    return amp, pos


# --------------------------------------------------------------------------
# Exact classification of f = k u^p, g = lam u^q


def classify_power_family(p: float, q: float, kappa: float, lam: float, t0: float,
                          X0: float = 0.0, direction: str = "forward") -> BehaviorReport:
    """Classes from the exact limits of A = (p k (t - t0))^(-1/p) and its position.

    With B = p k (t - t0) > 0 on the lifespan, the boundary approached is
    B -> infinity (infinite time) or B -> 0 (finite time t = t0).
    """
    for name, v in (("p", p), ("q", q), ("kappa", kappa), ("lambda", lam)):
        if v == 0:
            raise ValueError(f"{name} must be non-zero")
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    s = p * kappa
    finite_time = (s < 0) == (direction == "forward")
    r = q / p
    # exponents in B of A, Xdot, Xddot, Adot, X - X0
    e_A, e_v, e_acc, e_Adot, e_X = -1.0 / p, -r, -(1.0 + r), -(p + 1.0) / p, 1.0 - r

    def lim_of(e):
        if e == 0:
            return "finite"
        grows = (e > 0) != finite_time      # B -> inf: positive exponent grows
        return "inf" if grows else "0"

    A_lim = lim_of(e_A)
    if q == p:
        X_bounded = False
    else:
        X_bounded = lim_of(e_X) != "inf"
    X_limit = X0 if (X_bounded and e_X != 0) else math.nan
    v_lim = lim_of(e_v)
    lim = Limits(finite_time=finite_time, A_lim=A_lim, A_star=0.0 if A_lim == "0" else math.inf,
                 Adot_vanishes=lim_of(e_Adot) == "0", v_lim=v_lim, speed=lam if v_lim == "finite" else math.nan,
                 acc_vanishes=lim_of(e_acc) == "0", X_bounded=X_bounded, X_limit=X_limit,
                 t_star=t0 if finite_time else math.nan)
    amp, pos = assign_classes(lim)
    boundary = "t -> t0" if finite_time else ("t -> +inf" if direction == "forward" else "t -> -inf")
    probes = {"B": "p*kappa*(t - t0)", "boundary": boundary,
              "exponents": {"A": e_A, "Xdot": e_v, "Xddot": e_acc, "Adot": e_Adot,
                            "X": "log" if q == p else e_X}}
    evidence = [
        Evidence("amplitude limit from A = B^(-1/p)", {**probes, "limit": A_lim}, "confirmed"),
        Evidence("lifespan boundary", {"p*kappa": s, "finite_time": finite_time}, "confirmed"),
        Evidence("speed limit from Xdot = lam B^(-q/p)", {"limit": v_lim}, "confirmed"),
        Evidence("acceleration limit from Xddot = -q k lam B^(-(1+q/p))",
                 {"limit": lim_of(e_acc)}, "confirmed"),
        Evidence("position boundedness", {"X_bounded": X_bounded, "logarithmic": q == p}, "confirmed"),
    ]
    notes = []
    if (p > 0) != (kappa > 0) and p > 0:
        notes.append("case p > 0, kappa < 0: the literal range 0 < q < -p is empty; "
                     "classes come from the exponents above")
    if p < 0 < kappa:
        notes.append("case p < 0, kappa > 0: the literal range 0 < q < -p was not used; "
                     "classes come from the exponents above")
    return BehaviorReport("exact-power-family", amp, pos, [], evidence, direction, notes)


# --------------------------------------------------------------------------
# Numeric classification


@dataclass
class ProbeSettings:
    slope_tol: float = 0.1
    ladder_points: int = 11          # k = 0..10, three decades at factor 2
    zero_tol: float = 1e-12
    scan_factor: float = 2 ** 0.125
    scan_small: float = 1e-10
    scan_large: float = 1e12


def _slope(d, q):
    d = np.asarray(d, float)
    q = np.abs(np.asarray(q, float))
    if np.all(q == 0):
        return math.inf
    if np.any(q == 0) or not np.all(np.isfinite(q)):
        raise ArithmeticError("probe values vanish or are not finite on part of the ladder")
    return float(np.polyfit(np.log(d), np.log(q), 1)[0])


class _Probe:
    """Geometric ladder approaching A* and scalings of the reduced quantities on it."""

    def __init__(self, rs, A_from, A_star, settings):
        self.rs = rs
        self.settings = settings
        self.A_star = A_star
        n = settings.ladder_points
        sgn = 1.0 if A_from >= 0 else -1.0
        if math.isinf(A_star):
            self.kind = "inf"
            ref = min(max(abs(A_from), 1.0), 1e6)
            self.d = (1.0 / ref) * 2.0 ** -np.arange(n)
            self.A = sgn / self.d
        elif A_star == 0:
            self.kind = "0"
            ref = min(max(abs(A_from), 1e-4), 1.0)
            self.d = ref * 2.0 ** -np.arange(n)
            self.A = sgn * self.d
        else:
            self.kind = "finite"
            scale = max(1.0, abs(A_star))
            gap = abs(A_from - A_star)
            ref = min(max(gap, 1e-4 * scale), 0.5 * abs(A_star))
            side = 1.0 if A_from > A_star else -1.0
            self.d = ref * 2.0 ** -np.arange(n)
            self.A = A_star + side * self.d
        # dy = -d^-2 dd when A = 1/d
        self.jacobian_shift = -2.0 if self.kind == "inf" else 0.0

    def values(self, fn):
        return np.array([fn(float(a)) for a in self.A])

    def slope(self, fn, integrand=False):
        s = _slope(self.d, self.values(fn))
        return s + self.jacobian_shift if integrand else s

    def tail_integral(self, fn, A_from):
        """int_{A_from}^{A*} fn(y) dy via the ladder plus a geometric tail."""
        def quad(a, b):
            return gk_quad(np.vectorize(fn), a, b, abs_tol=1e-12, rel_tol=1e-10)[0]
        total = quad(A_from, self.A[0])
        segs = [quad(self.A[k], self.A[k + 1]) for k in range(len(self.A) - 1)]
        total += sum(segs)
        if len(segs) >= 2 and segs[-2] != 0:
            rho = segs[-1] / segs[-2]
            if 0 <= rho < 1:
                total += segs[-1] * rho / (1 - rho)
            else:
                raise ArithmeticError("ladder integral does not converge")
        return total


def _limit_class(slope, tol):
    if slope == math.inf or slope > tol:
        return "0"
    if slope < -tol:
        return "inf"
    return "finite"


def _verdict(slope, threshold, tol):
    return "confirmed" if abs(slope - threshold) > tol else "undetermined"


def _scan_for_root(fn, A_from, upward, settings):
    """First sign change of fn along a geometric ladder from A_from; None if none."""
    a = A_from
    try:
        fa = fn(a)
    except ReductionError:
        return None, "evaluation failed at the starting amplitude"
    while True:
        b = a * settings.scan_factor if upward else a / settings.scan_factor
        if abs(b) > settings.scan_large or abs(b) < settings.scan_small:
            return None, None
        try:
            fb = fn(b)
        except ReductionError:
            return a, "evaluation failed beyond this amplitude"
        if fa == 0:
            return a, None
        if fb == 0 or np.sign(fb) != np.sign(fa):
            if fb == 0:
                return b, None
            return brentq(fn, min(a, b), max(a, b), xtol=1e-14 * max(1.0, abs(a)), rtol=1e-15), None
        a, fa = b, fb


def classify_numeric(rs: ReducedSystem, init: PeakonState, horizon: float,
                     opts: IntegratorOptions | None = None,
                     settings: ProbeSettings | None = None) -> BehaviorReport:
    """Simulate, locate the amplitude limit, probe scalings there, and assign classes."""
    opts = opts or IntegratorOptions()
    settings = settings or ProbeSettings()
    direction = "forward" if horizon >= init.t else "backward"
    tdir = 1.0 if direction == "forward" else -1.0
    tol = settings.slope_tol
    evidence, notes = [], []

    traj = integrate1(rs, init, horizon, opts)
    sim_probe = {"termination": traj.termination, "t_end": float(traj.t[-1]),
                 "A_end": float(traj.A[-1]), "X_end": float(traj.X[-1]),
                 "events": [e.to_dict() for e in traj.events]}
    evidence.append(Evidence("simulation", sim_probe, "confirmed" if traj.termination != "domain-error"
                             else "undetermined"))
    reversals = [e.time for e in traj.events_of("direction-reversal")]

    if opts.oscillatory and len(traj.events_of("branch-switch")) >= 2:
        return _classify_periodic(rs, traj, evidence, reversals, direction)

    rate0 = rs.amplitude_rate(init.A)
    if abs(rate0) <= settings.zero_tol * max(1.0, abs(init.A)):
        c = rs.g0_at(init.A)
        evidence.append(Evidence("A f0(A0) = 0", {"A0": init.A, "A f0": -rate0, "g0": c}, "confirmed"))
        return BehaviorReport("numeric", ClassLabel("constant", float(init.A)),
                              ClassLabel("constant-speed", float(c)), reversals, evidence, direction)

    A_end, t_end, X_end = float(traj.A[-1]), float(traj.t[-1]), float(traj.X[-1])
    upward = (rate0 * tdir > 0) == (init.A > 0)       # |A| increasing
    A_star, verdict_star = _locate_limit(rs, traj, A_end, upward, settings, evidence, notes)

    probe = _Probe(rs, A_end, A_star, settings)
    try:
        s_T = probe.slope(lambda y: 1.0 / (y * rs.f0_at(y)), integrand=True)
        finite_time = s_T > -1.0 + tol
        v_T = _verdict(s_T, -1.0, tol)
    except (ArithmeticError, ReductionError) as exc:
        s_T, v_T = math.nan, "undetermined"
        finite_time = traj.termination in ("blow-up", "extinction")
        notes.append(f"time integrability probe failed: {exc}")
    sim_finite = traj.termination in ("blow-up", "extinction")
    if v_T == "confirmed" and sim_finite and not finite_time:
        v_T = "consistent"
    evidence.append(Evidence("int dA/(A f0) converges toward A* (finite-time limit)",
                             {"ladder": probe.A, "slope": s_T, "threshold": -1.0,
                              "finite_time": finite_time}, v_T))

    if probe.kind == "finite":
        try:
            s_f = probe.slope(rs.f0_at)
            v_f = "confirmed" if s_f >= 1.0 - tol else "undetermined"
        except (ArithmeticError, ReductionError) as exc:
            s_f, v_f = math.nan, "undetermined"
            notes.append(f"f0 order probe failed: {exc}")
        evidence.append(Evidence("f0(u) = O(u - A*)", {"ladder": probe.A, "slope": s_f, "threshold": 1.0}, v_f))

    # speed
    if probe.kind == "finite":
        c = rs.g0_at(A_star)
        v_lim = "finite" if abs(c) > settings.zero_tol else "0"
        evidence.append(Evidence("g0(A*)", {"A_star": A_star, "g0": c}, "confirmed"))
    else:
        try:
            s_v = probe.slope(rs.g0_at)
            v_lim = _limit_class(s_v, tol)
            v_v = _verdict(s_v, 0.0, tol) if s_v != math.inf else "confirmed"
        except (ArithmeticError, ReductionError) as exc:
            s_v, v_lim, v_v = math.nan, "finite", "undetermined"
            notes.append(f"speed probe failed: {exc}")
        c = rs.g0_at(float(probe.A[-1])) if v_lim == "finite" else math.nan
        evidence.append(Evidence("limit of g0 toward A*", {"ladder": probe.A, "slope": s_v, "limit": v_lim,
                                                             "value": c}, v_v))

    # acceleration and amplitude rate
    acc_vanishes = _vanishes(probe, lambda y: rs.amplitude_rate(y) * rs.alpha_at(y),
                             "limit of A f0 g0' (acceleration)", evidence, tol, notes)
    Adot_vanishes = _vanishes(probe, rs.amplitude_rate, "limit of A f0 (amplitude rate)", evidence, tol, notes)

    # position boundedness and limits by quadrature toward A*
    def speed_density(y):
        return -rs.g0_at(y) / (y * rs.f0_at(y))

    try:
        s_X = probe.slope(speed_density, integrand=True)
        X_bounded = s_X > -1.0 + tol
        v_X = _verdict(s_X, -1.0, tol)
    except (ArithmeticError, ReductionError) as exc:
        s_X, X_bounded, v_X = math.nan, False, "undetermined"
        notes.append(f"position probe failed: {exc}")
    X_limit = math.nan
    t_star = math.nan
    if X_bounded:
        try:
            X_limit = X_end + probe.tail_integral(speed_density, A_end)
        except (ArithmeticError, ReductionError) as exc:
            notes.append(f"X limit quadrature failed: {exc}")
    if finite_time:
        t_star = _finite_time_limit(rs, traj, probe, A_end, t_end, notes)
    evidence.append(Evidence("int g0/(A f0) dA converges toward A* (bounded position)",
                             {"ladder": probe.A, "slope": s_X, "threshold": -1.0, "X_limit": X_limit}, v_X))

    lim = Limits(finite_time=finite_time, A_lim=probe.kind, A_star=A_star, Adot_vanishes=Adot_vanishes,
                 v_lim=v_lim, speed=c, acc_vanishes=acc_vanishes, X_bounded=X_bounded,
                 X_limit=X_limit, t_star=t_star)
    amp, pos = assign_classes(lim)
    if amp.name in ("extinction", "singular-derivative") and not sim_finite and finite_time:
        notes.append("no extinction within horizon; finite-time limit inferred from the probes")

    reversals = _reversal_times(rs, reversals, A_end, t_end, A_star, probe, c, v_lim, notes)
    if reversals:
        pos = ClassLabel("direction-reversal", pos.value, pos.time, detail=pos.name)
        evidence.append(Evidence("g0 changes sign along the branch", {"times": reversals}, "confirmed"))
    if verdict_star != "confirmed":
        notes.append("amplitude limit located with reduced confidence")
    return BehaviorReport("numeric", amp, pos, reversals, evidence, direction, notes)


def _vanishes(probe, fn, condition, evidence, tol, notes):
    try:
        s = probe.slope(fn)
        verdict = "confirmed" if s == math.inf or abs(s) > tol else "undetermined"
        vanishes = s == math.inf or s > tol
    except (ArithmeticError, ReductionError) as exc:
        s, verdict, vanishes = math.nan, "undetermined", False
        notes.append(f"probe '{condition}' failed: {exc}")
    evidence.append(Evidence(condition, {"ladder": probe.A, "slope": s, "vanishes": vanishes}, verdict))
    return vanishes


def _locate_limit(rs, traj, A_end, upward, settings, evidence, notes):
    """Next zero of A f0 beyond A_end in the direction of motion (0 and inf included)."""
    if traj.termination == "blow-up":
        evidence.append(Evidence("amplitude limit", {"A_star": math.inf, "source": "blow-up event"},
                                 "confirmed"))
        return math.inf, "confirmed"
    if traj.termination == "extinction":
        evidence.append(Evidence("amplitude limit", {"A_star": 0.0, "source": "extinction event"},
                                 "confirmed"))
        return 0.0, "confirmed"
    if traj.termination == "equilibrium":
        evidence.append(Evidence("amplitude limit", {"A_star": A_end, "source": "equilibrium event"},
                                 "confirmed"))
        return A_end, "confirmed"
    root, problem = _scan_for_root(rs.f0_at, A_end, upward, settings)
    if root is None and problem is None:
        A_star = math.inf if upward else 0.0
        verdict = "confirmed"
    elif root is None:
        A_star, verdict = (math.inf if upward else 0.0), "undetermined"
        notes.append(problem)
    else:
        A_star, verdict = float(root), "confirmed" if problem is None else "undetermined"
        if problem:
            notes.append(problem)
    evidence.append(Evidence("amplitude limit", {"A_star": A_star, "source": "phase-line scan of f0",
                                                 "from": A_end, "upward": upward}, verdict))
    return A_star, verdict


def _finite_time_limit(rs, traj, probe, A_end, t_end, notes):
    blow = traj.events_of("blow-up") or traj.events_of("extinction")
    if blow:
        return float(blow[-1].time)
    try:
        return t_end + probe.tail_integral(lambda y: -1.0 / (y * rs.f0_at(y)), A_end)
    except (ArithmeticError, ReductionError) as exc:
        notes.append(f"time-to-limit quadrature failed: {exc}")
        return math.nan


def _reversal_times(rs, seen, A_end, t_end, A_star, probe, c_lim, v_lim, notes):
    """Reversals met by the simulation plus any predicted beyond its end."""
    times = list(seen)
    try:
        g_end = rs.g0_at(A_end)
        g_far = rs.g0_at(float(probe.A[-1]))
    except ReductionError:
        return times
    if g_end != 0 and g_far != 0 and np.sign(g_end) != np.sign(g_far):
        lo, hi = sorted((A_end, float(probe.A[-1])))
        try:
            A_r = brentq(rs.g0_at, lo, hi, xtol=1e-14)
            times.append(t_end + quadrature_solve(rs, A_end, A_r)[0])
        except (ValueError, ArithmeticError, ReductionError) as exc:
            notes.append(f"predicted reversal could not be timed: {exc}")
    return times


def _classify_periodic(rs, traj: Trajectory, evidence, reversals, direction):
    switches = traj.events_of("branch-switch")
    times = np.array([e.time for e in switches])
    period = 2.0 * float(np.mean(np.abs(np.diff(times)))) if times.size >= 2 else math.nan
    exps = [e.payload.get("exponent") for e in switches]
    evidence.append(Evidence("branch switches at square-root zeros of f0",
                             {"times": times, "exponents": exps}, "confirmed"))
    amp = ClassLabel("periodic", [float(np.min(traj.A)), float(np.max(traj.A))], period)
    speeds = np.asarray(traj.Xdot)
    spread = float(np.ptp(speeds))
    if spread <= 1e-9 * max(1.0, float(np.max(np.abs(speeds)))):
        pos = ClassLabel("constant-speed", float(speeds[0]))
        verdict = "confirmed"
    else:
        pos = ClassLabel("constant-speed", float(np.mean(speeds)), detail="mean of an oscillating speed")
        verdict = "consistent"
    evidence.append(Evidence("speed along the orbit", {"min": float(np.min(speeds)),
                                                       "max": float(np.max(speeds))}, verdict))
    if reversals:
        pos = ClassLabel("direction-reversal", pos.value, detail=pos.name)
    return BehaviorReport("numeric", amp, pos, reversals, evidence, direction)


def classify_both(rs: ReducedSystem, init: PeakonState, span: float,
                  opts: IntegratorOptions | None = None,
                  settings: ProbeSettings | None = None) -> tuple[BehaviorReport, BehaviorReport]:
    """Independent forward and backward classifications over ``span`` time units."""
    fwd = classify_numeric(rs, init, init.t + span, opts, settings)
    bwd = classify_numeric(rs, init, init.t - span, opts, settings)
    return fwd, bwd


def asymptotic_travelling_wave_test(rs: ReducedSystem, report: BehaviorReport,
                                    settings: ProbeSettings | None = None):
    """(a, c) when the peakon settles into a travelling wave of amplitude a and speed c."""
    settings = settings or ProbeSettings()
    amp = report.amplitude
    pos = report.position
    speed_class = pos.detail if pos.name == "direction-reversal" else pos.name
    if amp.name == "constant" and speed_class == "constant-speed":
        a, c = float(amp.value), float(pos.value)
        return (a, c) if abs(c) > settings.zero_tol else None
    if amp.name != "finite-asymptote" or speed_class != "finite-asymptotic-speed":
        return None
    a, c = float(amp.value), float(pos.value)
    if a == 0 or abs(c) <= settings.zero_tol:
        return None
    ladder = a + np.sign(a) * abs(a) * 1e-2 * 2.0 ** -np.arange(settings.ladder_points)
    try:
        s = _slope(np.abs(ladder - a), [rs.f0_at(float(y)) for y in ladder])
    except (ArithmeticError, ReductionError):
        return None
    return (a, c) if s >= 1.0 - settings.slope_tol else None
