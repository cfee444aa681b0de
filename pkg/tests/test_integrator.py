import math

import numpy as np
import pytest

from peakons.integrator import DormandPrince, StepSizeUnderflow, locate_root


def _run(solver):
    steps = []
    while not solver.finished:
        steps.append(solver.step())
    return steps


def test_exponential_decay_forward_and_backward():
    for t_end in (5.0, -5.0):
        solver = DormandPrince(lambda t, y: -y, 0.0, [1.0], t_end, rtol=1e-11, atol=1e-13)
        _run(solver)
        assert solver.t == pytest.approx(t_end)
        assert solver.y[0] == pytest.approx(math.exp(-t_end), rel=1e-9)


def test_dense_output_between_steps():
    solver = DormandPrince(lambda t, y: np.array([y[1], -y[0]]), 0.0, [0.0, 1.0], 10.0)
    for step in _run(solver):
        mid = 0.5 * (step.t_old + step.t)
        assert step(mid)[0] == pytest.approx(math.sin(mid), abs=1e-8)


def test_recoverable_error_shrinks_step():
    # blows up at t = 1; the solver must refuse to step past it
    def fun(t, y):
        if y[0] > 1e12:
            raise FloatingPointError("overflow")
        return np.array([y[0] ** 2])

    solver = DormandPrince(fun, 0.0, [1.0], 2.0, recoverable=(FloatingPointError,))
    with pytest.raises(StepSizeUnderflow):
        _run(solver)
    assert solver.t < 1.0


def test_locate_root():
    assert locate_root(math.cos, 0.0, 3.0, xtol=1e-13) == pytest.approx(math.pi / 2, abs=1e-12)
    with pytest.raises(ValueError):
        locate_root(lambda t: 1.0 + t * t, -1.0, 1.0)
