import sys

import numpy as np
import pytest

from satsir import analysis
from satsir.model import State, in_domain
from satsir.solver import (
    DomainError, GammaSchedule, PreconditionError, Trajectory, default_portrait_inits,
    integrate, integrate_schedule, phase_portrait,
)


START = State(S=100, I=0.001, R=0)


def test_disease_free_outcome(params_factory):
    p = params_factory(0.3)
    trajectory = integrate(p, START, 2000)
    assert trajectory.state_at(200).I < 1e-12
    end = trajectory.final_state
    assert end.S == pytest.approx(1000, rel=1e-3)
    assert end.I + end.R < 1e-3 * 1000


def test_population_grows_towards_capacity(params_factory):
    trajectory = integrate(params_factory(0.3), START, 200)
    n = trajectory.S + trajectory.I + trajectory.R
    assert n[-1] > n[-2]
    assert n[-1] <= 1000


def test_endemic_outcome(params):
    trajectory = integrate(params, START, 400)
    (e1,) = analysis.endemic_equilibria(params)
    assert trajectory.final_state.I == pytest.approx(e1.I, rel=0.01)


def test_trajectory_invariants(params):
    trajectory = integrate(params, START, 400)
    assert np.all(np.diff(trajectory.t) > 0)
    assert trajectory.t[0] == 0 and trajectory.t[-1] == 400
    for t, S, I, R in trajectory.samples:
        assert in_domain(params, State(S, I, R), 1e-6 * 1000)
    assert trajectory.accepted_steps == len(trajectory.samples) - 1


def test_infection_free_plane_is_invariant(params):
    trajectory = integrate(params, State(S=300, I=0, R=50), 300)
    assert np.all(trajectory.I == 0)


def test_tolerance_tightening(params):
    reference = integrate(params, START, 300, rtol=1e-12, atol=1e-14).final_state
    errors = []
    for rtol in (1e-6, 1e-8):
        end = integrate(params, START, 300, rtol=rtol, atol=rtol * 1e-3).final_state
        errors.append(np.abs(np.subtract(end.as_tuple(), reference.as_tuple())).max())
    assert errors[1] * 4 <= errors[0]


@pytest.mark.parametrize(
    'kwargs',
    [
        pytest.param({'init': State(1000, 1, 0), 't_end': 10}, id='over-capacity'),
        pytest.param({'init': State(-1, 1, 0), 't_end': 10}, id='negative'),
        pytest.param({'init': START, 't_end': 0}, id='empty-span'),
        pytest.param({'init': START, 't_end': 10, 'rtol': 0}, id='zero-rtol'),
        pytest.param({'init': START, 't_end': 10, 'atol': -1}, id='negative-atol'),
    ],
)
def test_preconditions(params, kwargs):
    with pytest.raises(PreconditionError):
        integrate(params, **kwargs)


def test_domain_escape(params, mocker):
    def runaway(p, reduced=False):
        return lambda y: np.array([5.0, 5.0, 5.0])

    mocker.patch.object(sys.modules['satsir.solver.integrate'], 'vector_field', side_effect=runaway)
    with pytest.raises(DomainError) as e:
        integrate(params, State(990, 1, 0), 100)
    assert e.value.t > 0


def test_single_segment_schedule(params_factory):
    p = params_factory(0.2)
    direct = integrate(p, START, 500)
    scheduled = integrate_schedule(params_factory(0.1), GammaSchedule.constant(0.2, 500), START)
    assert np.array_equal(direct.samples, scheduled.samples)


def test_schedule_boundaries(params):
    sched = GammaSchedule(segments=[(0, 0.36), (2000, 0.1)], t_end=4000)
    trajectory = integrate_schedule(params, sched, State(100, 60, 0))
    assert 2000 in trajectory.t
    assert trajectory.state_at(2000).I < 1e-3
    assert trajectory.final_state.I > 50

    first = integrate(params.with_gamma(0.36), State(100, 60, 0), 2000)
    assert trajectory.state_at(2000) == first.final_state


def test_trajectory_export(params):
    trajectory = integrate(params, START, 5)
    lines = trajectory.to_csv().splitlines()
    assert lines[0] == 't,S,I,R'
    assert len(lines) == len(trajectory.samples) + 1
    assert trajectory.to_dict()['samples'][0] == {'t': 0.0, 'S': 100.0, 'I': 0.001, 'R': 0.0}


def test_trajectory_window():
    samples = np.array([[t, 1.0, 2.0, 3.0] for t in range(10)], dtype=float)
    trajectory = Trajectory(samples=samples)
    assert list(trajectory.window(2, 5)[:, 0]) == [2, 3, 4]
    assert trajectory.state_at(2.5).S == 1.0


def test_default_portrait_inits(params):
    inits = default_portrait_inits(params)
    assert len(inits) == 8
    assert sum(1 for s in inits if s.S == 0) == 4
    assert sum(1 for s in inits if s.S + s.I == pytest.approx(1000)) == 4
    assert all(in_domain(params, s, 1e-9) for s in inits)


def test_phase_portrait(params_factory):
    p = params_factory(0.3)
    orbits = phase_portrait(p, 50)
    assert len(orbits) == 8
    for init, trajectory in orbits:
        assert tuple(trajectory.samples[0, 1:]) == init.as_tuple()
