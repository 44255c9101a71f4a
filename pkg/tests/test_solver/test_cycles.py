import numpy as np
import pytest

from satsir import analysis
from satsir.continuation import section_start, stable_cycle, unstable_cycle
from satsir.model import State, reference_params
from satsir.solver import PreconditionError, detect_limit_cycle, integrate
from satsir.solver.cycles import _aitken


@pytest.fixture(scope='module')
def cycles_0_35():
    p = reference_params(0.35)
    stable = stable_cycle(p)
    return p, stable, unstable_cycle(p, stable)


def _returns_after_one_period(p, cycle):
    S, I = cycle.points[0]
    end = integrate(p, State(S=float(S), I=float(I), R=0.0), cycle.period).final_state
    return np.array([end.S, end.I])


@pytest.mark.slow
def test_stable_cycle_case_IV(params_factory):
    p = params_factory(0.3497)
    cycle = detect_limit_cycle(p, section_start(p, 0.05))
    assert cycle is not None
    assert cycle.stable
    assert cycle.period > 0
    assert cycle.closure_error <= 1e-6
    e1 = analysis.upper_endemic(p)
    assert cycle.section_I < e1.I < cycle.max_I


@pytest.mark.slow
def test_no_cycle_case_VIII(params_factory):
    p = params_factory(0.353)
    assert detect_limit_cycle(p, section_start(p, 0.05)) is None


def test_missing_upper_equilibrium(params_factory):
    with pytest.raises(PreconditionError):
        detect_limit_cycle(params_factory(0.36), (500.0, 10.0))


@pytest.mark.slow
def test_cycle_pair_case_VI(cycles_0_35):
    _, stable, unstable = cycles_0_35
    assert stable is not None and stable.stable
    assert unstable is not None and not unstable.stable
    assert unstable.section_I < stable.section_I
    assert unstable.period > stable.period
    assert unstable.closure_error <= 1e-6


@pytest.mark.slow
def test_cycle_reintegration(cycles_0_35):
    p, stable, _ = cycles_0_35
    start = stable.points[0]
    assert _returns_after_one_period(p, stable) == pytest.approx(start, rel=1e-5)


@pytest.mark.slow
def test_unstable_cycle_is_forward_invariant(cycles_0_35):
    p, _, unstable = cycles_0_35
    start = unstable.points[0]
    end = _returns_after_one_period(p, unstable)
    assert np.linalg.norm(end - start) <= 1e-3 * np.linalg.norm(start)


@pytest.mark.slow
def test_cycles_cross_dulac_curve(cycles_0_35):
    p, stable, unstable = cycles_0_35
    curve = analysis.dulac_curve(p)
    for cycle in (stable, unstable):
        values = [analysis.dulac_value(curve, S, I) for S, I in cycle.points]
        assert min(values) < 0 < max(values)


@pytest.mark.parametrize(
    'returns, expected',
    [
        pytest.param([10.0, 11.0, 11.5], 12.0, id='geometric'),
        pytest.param([10.0, 11.0, 13.0], None, id='expanding'),
        pytest.param([10.0, 11.0, 10.5], None, id='alternating'),
        pytest.param([10.0, 11.0], None, id='too-short'),
    ],
)
def test_aitken(returns, expected):
    history = [(float(i), np.array([0.0, x])) for i, x in enumerate(returns)]
    result = _aitken(history, upper=100.0)
    if expected is None:
        assert result is None
    else:
        assert result == pytest.approx(expected)


def test_aitken_stays_below_equilibrium():
    history = [(float(i), np.array([0.0, x])) for i, x in enumerate([10.0, 11.0, 11.5])]
    assert _aitken(history, upper=11.8) is None
