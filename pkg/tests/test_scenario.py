import numpy as np
import pytest

from satsir import scenario
from satsir.continuation import BifurcationKind, BifurcationPoint, BifurcationSet
from satsir.model import State, reference_params
from satsir.solver import GammaSchedule


@pytest.fixture(scope='module')
def builtin_report():
    return scenario.run_scenario(scenario.builtin_schedule())


@pytest.fixture(scope='module')
def hysteresis_report():
    return scenario.run_hysteresis_demo()


def test_builtin_schedule():
    sched = scenario.builtin_schedule()
    assert len(sched) == 13
    assert sched.t_end == 4200
    assert sched.gamma_at(0) == 0.3
    assert sched.gamma_at(199.5) == 0.3
    assert sched.gamma_at(200) == 0.1
    assert sched.gamma_at(3600) == 0.3497
    assert sched.gamma_at(3999.9) == 0.3497
    assert sched.gamma_at(4100) == 0.35
    assert sched.label_at(3700) == 'emergency PPKM'
    assert sched.segments == tuple((t, gamma) for t, gamma, _ in scenario.BUILTIN_EVENTS)


def test_builtin_schedule_from_csv():
    sched = scenario.builtin_schedule()
    assert GammaSchedule.from_csv(sched.to_csv()).segments == sched.segments


@pytest.mark.parametrize(
    'samples, expected',
    [
        pytest.param([1, 3, 2, 4, 1], [3, 4], id='two'),
        pytest.param([1, 2, 3], [], id='monotone'),
        pytest.param([1, 2, 2, 1], [2], id='plateau'),
        pytest.param([5], [], id='short'),
    ],
)
def test_local_maxima(samples, expected):
    rows = np.array([[t, 0.0, I, 0.0] for t, I in enumerate(samples)], dtype=float)
    assert scenario.local_maxima(rows)[:, 2].tolist() == expected


def test_endemic_level(params):
    assert scenario.endemic_level(params, 0.1) == pytest.approx(74.546, abs=1e-3)
    assert scenario.endemic_level(params, 0.36) is None


def test_run_scenario_short_schedule():
    report = scenario.run_scenario(GammaSchedule.constant(0.3, 400))
    assert [i.label for i in report.checkpoints] == ['disease-free beginning']
    assert report.checkpoints[0].expectation_met
    assert report.hysteresis_verdict


def test_run_scenario_without_infected():
    report = scenario.run_scenario(
        GammaSchedule(segments=[(0, 0.3), (200, 0.1)], t_end=700), init=State(S=1000, I=0, R=0),
    )
    assert np.all(report.trajectory.I == 0)
    first, second = report.checkpoints
    assert first.expectation_met
    assert not second.expectation_met
    assert not report.hysteresis_verdict


def test_run_scenario_without_checkpoints():
    report = scenario.run_scenario(GammaSchedule.constant(0.3, 100))
    assert report.checkpoints == []
    assert not report.hysteresis_verdict


def test_report_to_dict():
    report = scenario.run_scenario(GammaSchedule.constant(0.3, 400))
    data = report.to_dict()
    assert set(data) == {'checkpoints', 'hysteresis_verdict'}
    assert data['checkpoints'][0]['t'] == 199
    assert 'trajectory' in report.to_dict(with_trajectory=True)


@pytest.mark.slow
def test_builtin_scenario(builtin_report):
    labels = [i.label for i in builtin_report.checkpoints]
    assert labels == ['disease-free beginning', 'start of pandemic', 'early effort fails', 'cycle regime']
    assert all(i.expectation_met for i in builtin_report.checkpoints)
    assert builtin_report.hysteresis_verdict


@pytest.mark.slow
def test_builtin_scenario_window(builtin_report):
    trajectory = builtin_report.trajectory
    peaks = scenario.local_maxima(trajectory.window(3600, 4200))[:, 2]
    assert np.count_nonzero((peaks >= 65) & (peaks <= 78)) >= 2
    lo, hi = scenario.window_range(trajectory, 3600, 4200)
    assert hi <= 78
    # the 0.3497 segment once the switch from 0.34 has died down
    lo, hi = scenario.window_range(trajectory, 3700, 4000)
    assert 65 <= lo < hi <= 78


@pytest.mark.slow
def test_hysteresis_demo(hysteresis_report):
    checkpoints = hysteresis_report.checkpoints
    assert [i.t for i in checkpoints] == [2000, 4000, 6000, 8000, 10000, 22000]
    assert all(i.expectation_met for i in checkpoints)
    assert hysteresis_report.hysteresis_verdict
    assert checkpoints[4].I < scenario.DISEASE_FREE_I
    assert checkpoints[5].I == pytest.approx(scenario.endemic_level(reference_params(), 0.16), rel=0.02)
    assert checkpoints[5].I > 70


def _bifurcation_set(tr, flc):
    def point(kind, gamma):
        return BifurcationPoint(kind=kind, gamma=gamma, I=0, R0=0)

    return BifurcationSet(
        tr=point(BifurcationKind.TR, tr),
        hb=point(BifurcationKind.HB, 0.34964),
        sn=point(BifurcationKind.SN, 0.3569),
        hm=point(BifurcationKind.HM, 0.3499),
        flc=point(BifurcationKind.FLC, flc),
    )


@pytest.mark.parametrize(
    'tr, flc, expected',
    [
        pytest.param(0.1603, 0.3501, True, id='straddled'),
        pytest.param(0.1603, 0.365, False, id='fold-above-last-leg'),
        pytest.param(0.175, 0.3501, False, id='transcritical-above-seeded-legs'),
    ],
)
def test_check_leg_values(tr, flc, expected):
    assert scenario._check_leg_values(_bifurcation_set(tr, flc)) is expected


def test_hysteresis_demo_with_bifurcations(mocker):
    mocker.patch.object(scenario, 'integrate_schedule', return_value=mocker.Mock(
        final_state=State(S=900, I=0, R=0), state_at=lambda t: State(S=900, I=0, R=0),
    ))
    mocker.patch.object(scenario, 'integrate', return_value=mocker.Mock(final_state=State(S=900, I=0, R=0)))
    report = scenario.run_hysteresis_demo(bifurcations=_bifurcation_set(0.175, 0.3501))
    assert not report.hysteresis_verdict


@pytest.mark.slow
def test_path_dependence():
    looped, held = scenario.path_dependence()
    assert looped > 50
    assert held < scenario.DISEASE_FREE_I
