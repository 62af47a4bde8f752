import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from isomix.functions import PiecewiseLinear, StepFunction


def _increasing(draw_vals):
    return np.cumsum(np.asarray(draw_vals) + 0.01)


knots = st.lists(st.floats(0.0, 1.0), min_size=2, max_size=8)


@given(knots, st.data())
def test_piecewise_linear_integral_matches_quad(gaps, data):
    b = _increasing(gaps)
    b = b / b[-1]
    b[0] = 0.0
    v = np.asarray(data.draw(st.lists(st.floats(0.0, 2.0), min_size=len(b), max_size=len(b))))
    f = PiecewiseLinear(b, v)
    lo, hi = sorted(data.draw(st.tuples(st.floats(0, 1), st.floats(0, 1))))
    ref = integrate.quad(f, lo, hi, points=b, limit=200)[0] if hi > lo else 0.0
    assert f.integral(lo, hi) == pytest.approx(ref, abs=1e-10)


@given(knots, st.data())
def test_tsharp_integral_matches_quad(gaps, data):
    b = _increasing(gaps)
    b = b / b[-1]
    b[0] = 0.0
    v = np.asarray(data.draw(st.lists(st.floats(0.0, 1.0), min_size=len(b), max_size=len(b))))
    v[0] = v[-1] = 0.0  # finite integral needs f(0) = f(1) = 0
    f = PiecewiseLinear(b, v)
    pts = sorted(set(b.tolist()) | {0.5})
    ref = sum(integrate.quad(lambda t: f(t) / min(t, 1 - t), a, c, limit=200)[0]
              for a, c in zip(pts, pts[1:]) if c > a)
    assert f.integral_over_tsharp() == pytest.approx(ref, rel=1e-8, abs=1e-10)


def test_convexity_flags():
    assert PiecewiseLinear([0, 0.5, 1], [0, 0, 1]).is_convex(0, 1)
    assert PiecewiseLinear([0, 0.5, 1], [0, 1, 1]).is_concave(0, 1)
    assert not PiecewiseLinear([0, 0.5, 1], [0, 1, 1]).is_convex(0, 1)
    assert PiecewiseLinear([0, 0.5, 1], [0, 1, 1]).is_convex(0.5, 1)


def test_breakpoints_must_increase():
    with pytest.raises(ValueError):
        PiecewiseLinear([0, 0, 1], [0, 1, 2])


def test_step_function_right_continuous():
    s = StepFunction([0.25, 0.5], [3.0, 1.0])
    assert s(0.25) == 3.0 and s(0.4) == 3.0 and s(0.5) == 1.0
    assert s.integral(0.25, 0.5) == pytest.approx(0.75)
    # below the first breakpoint the first piece extends
    assert s.integral(0.125, 0.25) == pytest.approx(3 * 0.125)


def test_step_function_over_x_integrates_logs():
    s = StepFunction([0.125, 0.25, 0.5], [2.0, 1.0, 1.0], over_x=True)
    expected = 2 * math.log(2) + 1 * math.log(2)
    assert s.integral(0.125, 0.5) == pytest.approx(expected, rel=1e-14)
    assert s(0.25) == pytest.approx(4.0)


def test_step_csv_has_full_precision():
    s = StepFunction([0.25, 0.5], [1 / 3, 0.1])
    lines = s.to_csv().splitlines()
    assert lines[0] == "x,value"
    assert float(lines[1].split(",")[1]) == 1 / 3
