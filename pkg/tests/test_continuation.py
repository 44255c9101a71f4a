import math

import pytest

from satsir import analysis, continuation
from satsir.analysis import StabilityClass
from satsir.continuation import (
    BifurcationKind, OutOfRangeError, Regime, SingularityError, StructureError,
)
from satsir.model import InvalidInputError, ModelParams, reference_params

from .conftest import F


GAMMA_TR = F(4969, 31000)
SN = (0.3569024925, 65.1955050073)
HB = (0.34964, 70.721)


@pytest.fixture(scope='module')
def base():
    return reference_params(0.1)


@pytest.fixture(scope='module')
def saddle_node(base):
    return continuation.locate_saddle_node(base)


@pytest.fixture(scope='module')
def hopf(base, saddle_node):
    return continuation.locate_hopf(base, saddle_node)


@pytest.fixture(scope='module')
def bifurcations(base):
    return continuation.locate_bifurcations(base)


def test_singular_infected(base):
    expected = 345 / 11 + 5 / 11 * math.sqrt(9161)
    assert continuation.singular_infected(base) == pytest.approx(expected, rel=1e-14)
    assert continuation.singular_infected(base) == pytest.approx(74.8696, abs=1e-4)


def test_singular_infected_without_occupancy():
    p = ModelParams(beta=0.05, lam=10, mu=0.01, mu_prime=0.1, alpha=0.2, rho=0, gamma=0.1)
    assert continuation.singular_infected(p) == pytest.approx(10 / 0.31)


def test_gamma_of_I_exact(exact_params):
    p = exact_params()
    gamma = continuation.gamma_of_I(p, F(30))
    assert isinstance(gamma, F)
    assert analysis.cubic_coefficients(p.with_gamma(gamma))(F(30)) == 0


@pytest.mark.parametrize('I', [1.0, 30.0, 65.0, 70.0, 74.0])
def test_gamma_of_I_round_trip(base, I):
    gamma = continuation.gamma_of_I(base, I)
    p = base.with_gamma(gamma)
    c = analysis.cubic_coefficients(p)
    assert abs(c(I)) <= 1e-10 * c.magnitude(I)
    found = [e.I for e in analysis.endemic_equilibria(p)]
    assert any(abs(x - I) <= 1e-6 * I for x in found)


def test_gamma_of_I_limits(base):
    assert continuation.gamma_of_I(base, 1e-9) == pytest.approx(float(GAMMA_TR), abs=1e-9)
    assert continuation.gamma_of_I(base, SN[1]) == pytest.approx(SN[0], abs=1e-9)
    # branch end of the gamma = 0.1 equilibrium
    assert continuation.gamma_of_I(base, 74.546) == pytest.approx(0.1, abs=5e-3)


@pytest.mark.parametrize(
    'I, error',
    [
        pytest.param(0.0, InvalidInputError, id='zero'),
        pytest.param(-1.0, InvalidInputError, id='negative'),
        pytest.param(75.0, SingularityError, id='beyond-singularity'),
    ],
)
def test_gamma_of_I_errors(base, I, error):
    with pytest.raises(error):
        continuation.gamma_of_I(base, I)


@pytest.mark.parametrize('I', [10.0, 65.0, 72.0])
def test_dgamma_dI(base, I):
    h = 1e-5
    fd = (continuation.gamma_of_I(base, I + h) - continuation.gamma_of_I(base, I - h)) / (2 * h)
    assert continuation.dgamma_dI(base, I) == pytest.approx(fd, rel=1e-6, abs=1e-10)


def test_r0_of_I(base):
    assert continuation.r0_of_I(base, SN[1]) == pytest.approx(0.4506543710, abs=1e-9)


def test_locate_transcritical_exact(exact_params):
    point = continuation.locate_transcritical(exact_params())
    assert point.kind == BifurcationKind.TR
    assert point.gamma == GAMMA_TR
    assert point.R0 == 1


def test_locate_transcritical_float(base):
    point = continuation.locate_transcritical(base)
    assert point.gamma == pytest.approx(0.1602903226, abs=1e-10)
    assert analysis.basic_reproduction_number(base, gamma=point.gamma) == pytest.approx(1, abs=1e-14)


def test_locate_transcritical_out_of_range():
    p = ModelParams(beta=0.0001, lam=10, mu=0.01, mu_prime=0.1, alpha=0.2, rho=0.1, gamma=0.1)
    with pytest.raises(OutOfRangeError):
        continuation.locate_transcritical(p)


def test_locate_saddle_node(base, saddle_node):
    assert saddle_node.kind == BifurcationKind.SN
    assert saddle_node.gamma == pytest.approx(SN[0], abs=1e-8)
    assert saddle_node.I == pytest.approx(SN[1], abs=1e-6)
    assert saddle_node.R0 == pytest.approx(0.4506543710, abs=1e-9)
    assert abs(continuation.dgamma_dI(base, saddle_node.I)) <= 1e-9


def test_locate_saddle_node_forward_bifurcation():
    p = ModelParams(beta=0.05, lam=10, mu=0.01, mu_prime=0.1, alpha=0.2, rho=0.0001, gamma=0.1)
    with pytest.raises(StructureError):
        continuation.locate_saddle_node(p)


def test_locate_hopf(hopf):
    assert hopf.kind == BifurcationKind.HB
    assert hopf.gamma == pytest.approx(HB[0], abs=2e-5)
    assert hopf.I == pytest.approx(HB[1], abs=1e-3)
    assert hopf.details['dP_dI'] == pytest.approx(0.0059945065, rel=1e-3)
    assert hopf.details['dgamma_dI'] == pytest.approx(-0.0043073268, rel=1e-3)
    assert hopf.details['crossing_speed'] > 0
    assert hopf.details['transversal'] is True
    assert hopf.details['Q'] > 0


def test_locate_hopf_non_transversal(mocker, base, saddle_node):
    mocker.patch.object(continuation, 'dgamma_dI', return_value=0.0043)
    hopf = continuation.locate_hopf(base, saddle_node)
    assert hopf.gamma == pytest.approx(HB[0], abs=2e-5)
    assert hopf.details['crossing_speed'] < 0
    assert hopf.details['transversal'] is False


def test_locate_hopf_absent(mocker, base, saddle_node):
    mocker.patch.object(continuation, 'trace_along_branch', return_value=1.0)
    with pytest.raises(continuation.AbsentHopfError) as e:
        continuation.locate_hopf(base, saddle_node)
    assert 'P_range' in e.value.diagnostics


def test_locate_node_focus(base, saddle_node):
    points = continuation.locate_node_focus(base, saddle_node)
    assert [i.kind for i in points] == [BifurcationKind.NF, BifurcationKind.NF]
    assert points[0].I == pytest.approx(65.6956172723, abs=1e-6)
    assert points[0].gamma == pytest.approx(0.3568741376, abs=1e-8)
    assert points[1].I == pytest.approx(74.2040760587, abs=1e-6)


def test_equilibrium_branch(base, saddle_node):
    points = continuation.equilibrium_branch(base, 0.01, 74.8, 500)
    assert len(points) == 500
    assert max(i.gamma for i in points) == pytest.approx(saddle_node.gamma, abs=1e-5)
    assert max(i.gamma for i in points) <= saddle_node.gamma + 1e-12
    for point in points:
        assert point.R0 == pytest.approx(analysis.basic_reproduction_number(base, gamma=point.gamma))


def test_equilibrium_branch_lower_part_is_saddle(base):
    points = continuation.equilibrium_branch(base, 1.0, 60.0, 20)
    assert {i.stability for i in points} == {StabilityClass.SADDLE}


def test_equilibrium_branch_stability_flip_at_hopf(base, hopf):
    below, above = continuation.equilibrium_branch(base, hopf.I - 0.05, hopf.I + 0.05, 2)
    assert below.stability.is_unstable
    assert above.stability.is_stable


def test_equilibrium_branch_round_trip(base):
    for point in continuation.equilibrium_branch(base, 5.0, 74.0, 25):
        found = analysis.endemic_equilibria(base.with_gamma(point.gamma))
        assert any(abs(e.I - point.I) <= 1e-6 * point.I and abs(e.S - point.S) <= 1e-6 * point.S
                   for e in found)


@pytest.mark.parametrize(
    'I_min, I_max, steps, error',
    [
        pytest.param(1.0, 60.0, 1, InvalidInputError, id='one-step'),
        pytest.param(30.0, 30.0, 2, InvalidInputError, id='empty-range'),
        pytest.param(1.0, 80.0, 10, SingularityError, id='beyond-singularity'),
    ],
)
def test_equilibrium_branch_errors(base, I_min, I_max, steps, error):
    with pytest.raises(error):
        continuation.equilibrium_branch(base, I_min, I_max, steps)


def test_backward_bifurcation_witness(base):
    gamma = float(GAMMA_TR) + 1e-3
    p = base.with_gamma(gamma)
    assert analysis.basic_reproduction_number(p) < 1
    e2, e1 = analysis.endemic_equilibria(p)
    assert e1.stability.is_stable
    assert e2.stability == StabilityClass.SADDLE


@pytest.mark.parametrize(
    'gamma, regime',
    [
        pytest.param(0.1, Regime.I, id='I'),
        pytest.param(float(GAMMA_TR), Regime.II, id='II'),
        pytest.param(0.3, Regime.III, id='III'),
        pytest.param(0.36, Regime.X, id='X'),
    ],
)
def test_classify_regime_analytic(base, gamma, regime):
    assert continuation.classify_regime(base, gamma) == regime


@pytest.mark.parametrize('gamma', [-0.1, 1.5, math.nan])
def test_classify_regime_invalid(base, gamma):
    with pytest.raises(InvalidInputError):
        continuation.classify_regime(base, gamma)


def test_regime_table_counts(base):
    for gamma, regime in ((0.1, Regime.I), (0.3, Regime.III), (0.36, Regime.X)):
        count = 1 + len(analysis.endemic_equilibria(base.with_gamma(gamma)))
        assert regime.info.equilibria == count


def test_classify_regime_with_bifurcation_set(base, saddle_node, hopf):
    located = continuation.BifurcationSet(
        tr=continuation.locate_transcritical(base),
        hb=hopf,
        sn=saddle_node,
        hm=continuation.BifurcationPoint(BifurcationKind.HM, 0.3498971211, 0, 0),
        flc=continuation.BifurcationPoint(BifurcationKind.FLC, 0.3500585184, 0, 0),
    )
    cases = {
        0.3497: Regime.IV,
        0.3498971211: Regime.V,
        0.35: Regime.VI,
        0.3500585184: Regime.VII,
        0.353: Regime.VIII,
    }
    for gamma, regime in cases.items():
        assert continuation.classify_regime(base, gamma, bifurcations=located) == regime
    assert [i.kind for i in located.points()] == [
        BifurcationKind.TR, BifurcationKind.HB, BifurcationKind.HM, BifurcationKind.FLC, BifurcationKind.SN,
    ]


@pytest.mark.slow
@pytest.mark.parametrize(
    'gamma, regime',
    [
        pytest.param(0.3497, Regime.IV, id='IV'),
        pytest.param(0.35, Regime.VI, id='VI'),
        pytest.param(0.353, Regime.VIII, id='VIII'),
    ],
)
def test_classify_regime_by_predicates(base, gamma, regime):
    assert continuation.classify_regime(base, gamma) == regime


@pytest.mark.slow
def test_locate_bifurcations(bifurcations):
    assert bifurcations.hm.gamma == pytest.approx(0.3498971211, abs=5e-4)
    assert bifurcations.flc.gamma == pytest.approx(0.3500585184, abs=2e-4)
    gammas = [i.gamma for i in bifurcations.points()]
    assert gammas == sorted(gammas)
    assert len(set(gammas)) == 5
    assert [i.kind for i in bifurcations.points()][2:4] == [BifurcationKind.HM, BifurcationKind.FLC]


@pytest.mark.slow
def test_homoclinic_neighbourhood(base, bifurcations):
    gamma = bifurcations.hm.gamma
    below = base.with_gamma(gamma - 5e-5)
    above = base.with_gamma(gamma + 5e-5)
    assert continuation.homoclinic_check(below)[0]
    assert not continuation.homoclinic_check(above)[0]
    assert continuation.unstable_cycle(above, continuation.stable_cycle(above)) is not None


@pytest.mark.slow
def test_cycle_fold_predicate(base):
    assert continuation.stable_cycle(base.with_gamma(0.35)) is not None
    assert continuation.stable_cycle(base.with_gamma(0.353)) is None


@pytest.mark.slow
def test_trace_cycle_branch(base):
    rows = continuation.trace_cycle_branch(base, 0.3497, 0.35, 2)
    at_iv = [r for r in rows if r.gamma == 0.3497]
    at_vi = [r for r in rows if r.gamma == 0.35]
    assert [r.stable for r in at_iv] == [True]
    assert sorted(r.stable for r in at_vi) == [False, True]
    stable, unstable = sorted(at_vi, key=lambda r: not r.stable)
    assert unstable.period != stable.period
    assert unstable.period > stable.period
    assert unstable.max_I > stable.max_I


@pytest.mark.slow
def test_unstable_period_grows_towards_homoclinic(base, bifurcations):
    hm, flc = bifurcations.hm.gamma, bifurcations.flc.gamma
    rows = continuation.trace_cycle_branch(base, hm + 0.05 * (flc - hm), hm + 0.45 * (flc - hm), 5)
    periods = [r.period for r in sorted((r for r in rows if not r.stable and not r.absent),
                                        key=lambda r: r.gamma)]
    assert len(periods) == 5
    # approaching the homoclinic point from above means walking the grid downwards
    assert all(a > b for a, b in zip(periods, periods[1:]))


@pytest.mark.slow
def test_trace_cycle_branch_absent_above_fold(base, bifurcations):
    lo = bifurcations.flc.gamma + 1e-3
    rows = continuation.trace_cycle_branch(base, lo, lo + 1e-3, 3)
    assert len(rows) == 3
    assert all(r.absent for r in rows)


def test_trace_cycle_branch_out_of_range(base):
    with pytest.raises(OutOfRangeError):
        continuation.trace_cycle_branch(base, 0.3, 0.35, 5)


def test_trace_cycle_branch_uses_workers(mocker, base):
    grid_map = mocker.patch.object(continuation, 'grid_map', return_value=[[], []])
    continuation.trace_cycle_branch(base, 0.3497, 0.35, 2, workers=3)
    args = grid_map.call_args[0]
    assert args[1] == [0.3497, 0.35]
    assert args[2] == 3


def test_classify_regime_at_saddle_node(base, saddle_node):
    assert continuation.classify_regime(base, saddle_node.gamma) == Regime.IX
    assert Regime.IX.info.equilibria == 2
