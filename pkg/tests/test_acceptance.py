"""Acceptance criteria, one test each.

Every check records a PASS/FAIL line with its measured figure; the lines are
printed in the terminal summary (and by running this file directly).
"""
import itertools
import math

import numpy as np
import pytest

from peakons.analytic import catalog, closed_form, design_breather, make_entry
from peakons.classify import classify_numeric, classify_power_family
from peakons.dsl import ExprEvalError, ExprSyntaxError, NonlinearitySpec, eval_expr, parse_expr, to_text
from peakons.npeakon import NPeakonState, integrateN, rhsN
from peakons.peakon1 import IntegratorOptions, PeakonState, integrate1, rhs1
from peakons.reduce import ReducedSystem
from peakons.verify import functionals, ode_residual, offpeak_residual

RESULTS: dict[int, tuple[bool, str]] = {}


def record(number, title, ok, detail):
    RESULTS[number] = (bool(ok), f"{title}: {detail}")
    assert ok, f"criterion {number} failed: {detail}"


def rs_of(f, g, **params):
    return ReducedSystem(NonlinearitySpec.from_text(f, g, params))


def test_criterion_01_classical_speed_amplitude():
    cases = [("CH", "ux", "u", lambda a: a), ("DP", "2*ux", "u", lambda a: a),
             ("Novikov", "u*ux", "u^2", lambda a: a * a), ("mCH", "0", "u^2 - ux^2", lambda a: 2 * a * a / 3)]
    worst_rate = worst_speed = 0.0
    for _, f, g, law in cases:
        rs = rs_of(f, g)
        for a in (0.5, 1.0, 2.0):
            traj = integrate1(rs, PeakonState(0.0, a, 0.0), 2.0)
            worst_rate = max(worst_rate, float(np.max(np.abs(traj.Adot))))
            worst_speed = max(worst_speed, float(np.max(np.abs(traj.Xdot - law(a)))))
    record(1, "classical speed laws", worst_rate < 1e-9 and worst_speed < 1e-8,
           f"max|dA/dt| = {worst_rate:.2e}, max speed error = {worst_speed:.2e}")


def test_criterion_02_power_family_speed_law():
    worst = zero = kappa = 0.0
    for p, lam in itertools.product(range(4), (-3, -1, 0, 1, 3)):
        rs = rs_of("k*u^p*ux", "u^(p-1)*(u^2 + lam*ux^2)", k=1.0, p=float(p), lam=float(lam))
        other = rs_of("k*u^p*ux", "u^(p-1)*(u^2 + lam*ux^2)", k=-4.0, p=float(p), lam=float(lam))
        for a in (0.5, 1.0, 2.0):
            g0 = rs.g0_at(a)
            worst = max(worst, abs(g0 - (1 + lam / 3) * a ** (p + 1)))
            if lam == -3:
                zero = max(zero, abs(g0))
            kappa = max(kappa, abs(g0 - other.g0_at(a)))
    record(2, "speed law (1+lam/3) a^(p+1)", worst < 1e-8 and zero < 1e-9 and kappa < 1e-9,
           f"max error = {worst:.2e}, |g0| at lam=-3 = {zero:.2e}, kappa change = {kappa:.2e}")


def test_criterion_03_asymptotic_ex2():
    entry = make_entry("asymptotic-ex2")
    rs = ReducedSystem(entry.spec)
    worst = 0.0
    for end in (10.0, -10.0):
        traj = integrate1(rs, entry.initial_state(0.0), end)
        exact = np.array([closed_form(entry, float(t)) for t in traj.t])
        worst = max(worst, float(np.max(np.abs(traj.A - exact[:, 0]))),
                    float(np.max(np.abs(traj.X - exact[:, 1]))))
    fwd = classify_numeric(rs, entry.initial_state(0.0), 10.0)
    bwd = classify_numeric(rs, entry.initial_state(0.0), -10.0)
    fitted = (bwd.amplitude.value, fwd.amplitude.value, bwd.position.value, fwd.position.value)
    fit_err = max(abs(v - e) for v, e in zip(fitted, (1.0, 2.0, 1.0, 2.0)))
    record(3, "ex2 closed form and asymptotes", worst < 1e-6 and fit_err < 1e-3,
           f"max closed-form error = {worst:.2e}, asymptote error = {fit_err:.2e}")


def test_criterion_04_direction_reversal():
    entry = make_entry("reversing-ex3")
    rs = ReducedSystem(entry.spec)
    traj = integrate1(rs, entry.initial_state(-6.0), 4.0)
    events = traj.events_of("direction-reversal")
    t_exp = -math.log(math.sqrt(3))
    x_exp = -3 * math.log(math.sqrt(3))
    ok = len(events) == 1
    dt = abs(events[0].time - t_exp) if ok else math.inf
    dx = abs(events[0].payload["X"] - x_exp) if ok else math.inf
    record(4, "ex3 direction reversal", ok and dt < 1e-4 and dx < 1e-3,
           f"{len(events)} reversal(s), time error = {dt:.2e}, position error = {dx:.2e}")


def test_criterion_05_dissipation_and_blowup():
    smooth = make_entry("dissipating-ex5")
    rs = ReducedSystem(smooth.spec)
    traj = integrate1(rs, smooth.initial_state(0.0), 20.0)
    A20 = float(traj.A[-1])
    X_err = abs(float(traj.X[-1]) - (smooth.params.get("X0", 0.0) + math.log(2)))
    blow = make_entry("blowup-ex5")
    btraj = integrate1(ReducedSystem(blow.spec), blow.initial_state(0.0), 5.0)
    events = btraj.events_of("blow-up")
    t_err = abs(events[0].time - blow.params["t0"]) if events else math.inf
    record(5, "ex5 extinction and blow-up",
           traj.t[-1] == pytest.approx(20.0) and A20 < 1e-6 and X_err < 1e-4 and t_err < 1e-3,
           f"A(20) = {A20:.2e}, X(20) error = {X_err:.2e}, blow-up time error = {t_err:.2e}")


def test_criterion_06_power_family():
    worst = 0.0
    for p, q, k in [(1, 2, 1), (2, 1, 1), (1, -1, -1), (1, 1, 1), (-1, 2, 1)]:
        entry = make_entry("power-family", p=float(p), q=float(q), k=float(k))
        lo, hi = entry.window
        traj = integrate1(ReducedSystem(entry.spec), entry.initial_state(lo), hi)
        exact = np.array([closed_form(entry, float(t)) for t in traj.t])
        worst = max(worst, float(np.max(np.abs(traj.A - exact[:, 0]))),
                    float(np.max(np.abs(traj.X - exact[:, 1]))))
    mismatches = []
    for p, kappa, q in itertools.product((1.0, 2.0, -1.0), (1.0, -1.0), (-1.0, 1.0, 2.0)):
        t0 = -1.0 / (p * kappa)
        exact = classify_power_family(p, q, kappa, 1.0, t0)
        rs = rs_of("k*u^p", "lam*u^q", k=kappa, p=p, lam=1.0, q=q)
        numeric = classify_numeric(rs, PeakonState(0.0, 1.0, 0.0), 20.0)
        if (exact.amplitude_class, exact.position_class) != (numeric.amplitude_class, numeric.position_class):
            mismatches.append((p, kappa, q))
    record(6, "power family closed form and classification", worst < 1e-6 and not mismatches,
           f"max closed-form error = {worst:.2e}, class mismatches on 18-case grid = {mismatches or 0}")


SPEC_POOL = [
    ("k*u^p", "lam*u^q", ("k", "p", "lam", "q")),
    ("k*(u-2)*(u-1) + lam*ux", "lam*u + k*ux^2", ("k", "lam")),
    ("k*u*ux + lam*ux^2", "u^2 - lam*ux^2", ("k", "lam")),
    ("k*cos(ux)*u", "lam*exp(-ux^2)*u", ("k", "lam")),
    ("k*(a-u)", "lam*(3-2*u) + ux", ("k", "a", "lam")),
]


def test_criterion_07_single_peak_reduction():
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(50):
        f, g, names = SPEC_POOL[i % len(SPEC_POOL)]
        params = {n: float(rng.integers(1, 4)) if n in ("p", "q") else float(rng.uniform(-2, 2)) for n in names}
        rs = rs_of(f, g, **params)
        A, X = float(rng.uniform(0.2, 3.0)), float(rng.uniform(-5, 5))
        adot, xdot = rhsN(rs, NPeakonState(0.0, [A], [X]))
        Ad, Xd = rhs1(rs, PeakonState(0.0, A, X))
        worst = max(worst, abs(adot[0] - Ad), abs(xdot[0] - Xd))
    record(7, "N=1 reduction", worst < 1e-8, f"max |rhsN - rhs1| over 50 pairs = {worst:.2e}")


def test_criterion_08_ch_conservation():
    rs = rs_of("ux", "u")
    traj = integrateN(rs, NPeakonState(0.0, [1.0, 0.5, 0.25], [-5.0, 0.0, 5.0]), 20.0)
    drift_a = float(np.ptp(traj.a.sum(axis=1)))
    drift_h = float(np.ptp(traj.H1))
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(30):
        n = int(rng.integers(2, 6))
        a = rng.uniform(0.2, 2.0, n) * rng.choice([-1.0, 1.0], n)
        x = np.sort(rng.uniform(-4, 4, n)) + 0.05 * np.arange(n)
        adot, xdot = rhsN(rs, NPeakonState(0.0, a, x))
        d = x[:, None] - x[None, :]
        E = a[None, :] * np.exp(-np.abs(d))
        worst = max(worst, float(np.max(np.abs(xdot - E.sum(axis=1)))),
                    float(np.max(np.abs(adot - a * (np.sign(d) * E).sum(axis=1)))))
    ok = traj.termination == "horizon-reached" and drift_a < 1e-8 and drift_h < 1e-6 and worst < 1e-10
    record(8, "CH multipeakon conservation", ok,
           f"sum a drift = {drift_a:.2e}, H1 drift = {drift_h:.2e}, formula error = {worst:.2e}")


def test_criterion_09_breather():
    opts = IntegratorOptions(oscillatory=True)
    still = integrate1(ReducedSystem(design_breather(1.0, 2.0, 0.0)), PeakonState(0.0, 1.0, 0.0),
                       2 * math.pi, opts)
    amp_err = float(np.max(np.abs(still.A - np.cos(2 * still.t))))
    moving = integrate1(ReducedSystem(design_breather(1.0, 2.0, 3.0)), PeakonState(0.0, 1.0, 0.0),
                        2 * math.pi, opts)
    drift = float(np.ptp(moving.X - 3 * moving.t))
    ok = still.t[-1] == pytest.approx(2 * math.pi) and amp_err < 1e-4 and drift < 1e-6
    record(9, "peakon breather", ok, f"max |A - cos 2t| = {amp_err:.2e}, X - 3t spread = {drift:.2e}")


def test_criterion_10_normalisation_anchor():
    rs = rs_of("ux", "u")
    adopted = max(abs(rs.g0_at(a) - a) for a in (0.5, 1.0, 2.0))
    doubled = min(abs(2 * rs.g0_at(a) - a) for a in (0.5, 1.0, 2.0))
    record(10, "half-factor normalisation", adopted < 1e-12 and doubled > 0.1,
           f"adopted c - a = {adopted:.2e}, doubled g0 misses c = a by >= {doubled:.2f}")


def test_criterion_11_verification_suite():
    worst_res = worst_fun = 0.0
    for entry in catalog():
        rs = ReducedSystem(entry.spec)
        lo, hi = entry.window
        traj = integrate1(rs, entry.initial_state(lo), hi, IntegratorOptions(oscillatory=entry.oscillatory))
        worst_res = max(worst_res, ode_residual(rs, traj))
        M, H1 = functionals(traj)
        worst_fun = max(worst_fun, float(np.max(np.abs(M - 2 * traj.A))),
                        float(np.max(np.abs(H1 - 2 * traj.A ** 2))))
    coarse = offpeak_residual((1.0, 0.0), np.arange(1.0, 5.0, 1e-3))
    fine = offpeak_residual((1.0, 0.0), np.arange(1.0, 5.0, 5e-4))
    ratio = coarse / fine
    ok = worst_res < 1e-5 and worst_fun < 1e-12 and abs(ratio - 4.0) < 0.2 and coarse < 1e-5
    record(11, "verification suite", ok,
           f"max ode residual = {worst_res:.2e}, halving ratio = {ratio:.3f}, functional error = {worst_fun:.1e}")


def _random_text(rng, depth=0):
    if depth > 3 or rng.random() < 0.3:
        return str(rng.choice(["u", "ux", "k", "1.5", "2", "0.25"]))
    kind = rng.integers(0, 4)
    if kind == 0:
        op = rng.choice(["+", "-", "*", "/"])
        return f"({_random_text(rng, depth + 1)}{op}{_random_text(rng, depth + 1)})"
    if kind == 1:
        return f"{_random_text(rng, depth + 1)}^{int(rng.integers(0, 3))}"
    if kind == 2:
        return f"-{_random_text(rng, depth + 1)}"
    return f"{rng.choice(['sin', 'cos', 'exp', 'abs'])}({_random_text(rng, depth + 1)})"


def test_criterion_12_parser():
    from test_dsl import ACCEPT, REJECT
    accepted = sum(parse_expr(text) == tree for text, tree in ACCEPT)
    rejected = 0
    for text, offset in REJECT:
        try:
            parse_expr(text)
        except ExprSyntaxError as exc:
            rejected += exc.offset == offset
    rng = np.random.default_rng(12)
    mismatches = compared = 0
    for _ in range(40):
        tree = parse_expr(_random_text(rng))
        again = parse_expr(to_text(tree))
        for u, ux in rng.uniform(-2, 2, size=(100, 2)):
            try:
                a = eval_expr(tree, u, ux, {"k": 0.7})
            except (ExprEvalError, OverflowError):
                continue
            compared += 1
            mismatches += a != eval_expr(again, u, ux, {"k": 0.7})
    ok = accepted == len(ACCEPT) == 10 and rejected == len(REJECT) == 6 and mismatches == 0 and compared > 1000
    record(12, "expression parser", ok,
           f"{accepted}/10 accepted, {rejected}/6 rejected at offset, {mismatches} round-trip mismatches "
           f"in {compared} evaluations")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
