import math

import numpy as np
import pytest

from peakons.dsl import NonlinearitySpec
from peakons.peakon1 import (CSV_HEADER, IntegratorOptions, PeakonState, integrate1,
                             quadrature_solve, rhs1)
from peakons.reduce import ReducedSystem


def rs_of(f, g, **params):
    return ReducedSystem(NonlinearitySpec.from_text(f, g, params))


CH = rs_of("ux", "u")
EX2 = rs_of("k*(u-2)*(u-1)", "lam*u", k=1.0, lam=1.0)
EX3 = rs_of("k*(u-2)*(u-1)", "lam*(3-2*u)", k=1.0, lam=1.0)
EX5 = rs_of("k*(a-u)", "lam*u", k=1.0, a=1.0, lam=1.0)


def test_rhs_examples():
    assert rhs1(CH, PeakonState(0.0, 2.0, 0.0)) == pytest.approx((0.0, 2.0))
    assert rhs1(EX5, PeakonState(0.0, 0.5, 0.0)) == pytest.approx((-0.25, 0.5))
    assert rhs1(EX5, PeakonState(0.0, 0.0, 0.0)) == pytest.approx((0.0, 0.0))


def test_ch_travels_at_amplitude_speed():
    traj = integrate1(CH, PeakonState(0.0, 1.5, 0.0), 5.0)
    assert traj.termination == "horizon-reached"
    assert np.ptp(traj.A) < 1e-12
    assert traj.X[-1] == pytest.approx(7.5, abs=1e-9)
    assert np.allclose(traj.Xdot, 1.5)
    assert traj.t[-1] == pytest.approx(5.0)


def test_ex2_matches_closed_form_endpoint():
    A0 = 1 + 1 / math.sqrt(2)
    traj = integrate1(EX2, PeakonState(0.0, A0, 0.0), 10.0)
    exact = 1 + 1 / math.sqrt(1 + math.exp(-20.0))
    assert traj.A[-1] == pytest.approx(exact, abs=1e-6)


def test_backward_integration():
    A0 = 1 + 1 / math.sqrt(2)
    traj = integrate1(EX2, PeakonState(0.0, A0, 0.0), -3.0)
    assert traj.t[-1] == pytest.approx(-3.0)
    assert np.all(np.diff(traj.t) < 0)
    assert traj.A[-1] == pytest.approx(1 + 1 / math.sqrt(1 + math.exp(6.0)), abs=1e-7)


def test_blowup_event():
    A0 = 1 / (1 - math.exp(-1))
    traj = integrate1(EX5, PeakonState(0.0, A0, 0.0), 5.0)
    assert traj.termination == "blow-up"
    (event,) = traj.events_of("blow-up")
    assert event.time == pytest.approx(1.0, abs=1e-3)


def test_direction_reversal_event():
    A = 1 + 1 / math.sqrt(1 + math.exp(12.0))
    traj = integrate1(EX3, PeakonState(-6.0, A, 0.0), 2.0)
    (event,) = traj.events_of("direction-reversal")
    assert event.time == pytest.approx(-math.log(math.sqrt(3)), abs=1e-4)


def test_extinction_when_crossing_zero():
    # dA/dt = -1 for f = 1/u: A reaches zero at t = 1 with nonzero rate
    rs = rs_of("1/u", "u")
    traj = integrate1(rs, PeakonState(0.0, 1.0, 0.0), 5.0)
    assert traj.termination == "extinction"
    assert traj.events[-1].time == pytest.approx(1.0, abs=1e-6)


def test_equilibrium_fills_to_horizon():
    traj = integrate1(EX2, PeakonState(0.0, 2.0, 0.0), 3.0)
    assert traj.t[-1] == pytest.approx(3.0)
    assert np.allclose(traj.A, 2.0)


def test_breather_tracks_cosine():
    from peakons.analytic import design_breather
    rs = ReducedSystem(design_breather(1.0, 2.0, 0.0))
    opts = IntegratorOptions(oscillatory=True)
    traj = integrate1(rs, PeakonState(0.0, 1.0, 0.0), 2 * math.pi, opts)
    assert np.max(np.abs(traj.A - np.cos(2 * traj.t))) < 1e-4
    assert len(traj.events_of("branch-switch")) >= 3


def test_same_horizon_rejected():
    with pytest.raises(ValueError):
        integrate1(CH, PeakonState(1.0, 1.0, 0.0), 1.0)


def test_quadrature_solve():
    fam = rs_of("k*u^p", "lam*u^q", k=1.0, p=1.0, lam=1.0, q=2.0)
    dt, _ = quadrature_solve(fam, 1.0, 0.5)
    assert dt == pytest.approx(1.0, abs=1e-10)
    dt, _ = quadrature_solve(EX5, 0.5, 1 / (1 + math.e))
    assert dt == pytest.approx(1.0, abs=1e-10)
    assert quadrature_solve(EX5, 0.3, 0.3) == (0.0, 0.0)
    with pytest.raises(ValueError):
        quadrature_solve(EX2, 1.5, 2.5)


def test_quadrature_solve_agrees_with_integration():
    traj = integrate1(EX5, PeakonState(0.0, 0.5, 0.0), 2.0)
    dt, dX = quadrature_solve(EX5, 0.5, float(traj.A[-1]))
    assert dt == pytest.approx(2.0, abs=1e-7)
    assert dX == pytest.approx(traj.X[-1], abs=1e-7)


def test_csv_layout():
    traj = integrate1(CH, PeakonState(0.0, 1.0, 0.0), 0.05)
    lines = traj.to_csv({"f": "ux"}).splitlines()
    assert lines[0].startswith("# meta: ")
    assert lines[1] == CSV_HEADER
    row = [float(v) for v in lines[2].split(",")]
    assert row == [0.0, 1.0, 0.0, 1.0, 0.0, 2.0, 2.0]
