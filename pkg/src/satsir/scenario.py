"""
The event-driven cautiousness schedule and the hysteresis experiment.
"""

import logging

import attr
import numpy as np

from satsir import _config as settings
from satsir.analysis import upper_endemic
from satsir.model import State, reference_params
from satsir.solver import GammaSchedule, integrate, integrate_schedule


logger = logging.getLogger(__name__)


DISEASE_FREE_I = 1e-3
"""Infected level below which a leg counts as disease-free."""

ENDEMIC_RTOL = 0.02
"""Allowed relative distance of an endemic leg from the analytic I of e1."""

LEG_DURATION = 2000.0

CYCLE_BAND = (65.0, 78.0)
CYCLE_WINDOW = (3600.0, 4200.0)

SCENARIO_INIT = State(S=100.0, I=0.001, R=0.0)

BUILTIN_EVENTS = (
    (0, 0.3, "world's first case recorded, panic"),
    (200, 0.1, 'citizens urged not to panic, tourism incentives'),
    (600, 0.33, 'first national case, large-scale social restrictions (PSBB)'),
    (800, 0.32, 'homecoming (mudik) ban, not fully obeyed'),
    (1200, 0.31, "gradual transition from PSBB to 'new normal'"),
    (1800, 0.315, 'PSBB reimposed'),
    (2000, 0.305, "'transitional PSBB'"),
    (2400, 0.32, 'record weekly incidence after holidays'),
    (2800, 0.31, 'micro-level PPKM'),
    (3200, 0.305, 'second mudik ban ignored'),
    (3400, 0.34, 'post-holiday surge and clusters'),
    (3600, 0.3497, 'emergency PPKM'),
    (4000, 0.35, 'renewed health protocol warnings, Delta variant'),
)
"""``(t_start, gamma, event)`` rows of the builtin schedule."""

BUILTIN_T_END = 4200


@attr.s(frozen=True)
class Checkpoint:
    label = attr.ib()
    t = attr.ib()
    I = attr.ib()
    expectation_met = attr.ib()
    expectation = attr.ib(default=None)

    def to_dict(self):
        return attr.asdict(self)


@attr.s(frozen=True, eq=False)
class ScenarioReport:
    trajectory = attr.ib(repr=False)
    checkpoints = attr.ib(factory=list)
    hysteresis_verdict = attr.ib(default=False)

    def to_dict(self, with_trajectory=False):
        data = {
            'checkpoints': [i.to_dict() for i in self.checkpoints],
            'hysteresis_verdict': self.hysteresis_verdict,
        }
        if with_trajectory:
            data['trajectory'] = self.trajectory.to_dict()
        return data


def builtin_schedule():
    return GammaSchedule(
        segments=[(t, gamma) for t, gamma, _ in BUILTIN_EVENTS],
        t_end=BUILTIN_T_END,
        labels=[event for _, _, event in BUILTIN_EVENTS],
    )


def endemic_level(p_base, gamma, tol=None):
    """Infected level of the upper endemic equilibrium at ``gamma``."""
    e1 = upper_endemic(p_base.with_gamma(gamma), tol)
    return None if e1 is None else float(e1.I)


def _near(value, target, rtol=ENDEMIC_RTOL):
    return target is not None and abs(value - target) <= rtol * target


def local_maxima(samples):
    """Interior local maxima of the I column of ``(n, 4)`` samples."""
    I = samples[:, 2]
    if len(I) < 3:
        return samples[:0]
    mask = (I[1:-1] > I[:-2]) & (I[1:-1] >= I[2:])
    return samples[1:-1][mask]


def _scenario_checkpoints(p_base, trajectory, t_end, tol):
    checkpoints = []

    def at(t):
        return trajectory.state_at(t).I

    if t_end >= 199:
        I = at(199)
        checkpoints.append(Checkpoint('disease-free beginning', 199, I, I < 0.1, 'I < 0.1'))

    if t_end >= 599:
        I = at(599)
        target = endemic_level(p_base, 0.1, tol)
        checkpoints.append(Checkpoint(
            'start of pandemic', 599, I, _near(I, target),
            f'I within {ENDEMIC_RTOL:.0%} of {target!r}',
        ))

    if t_end >= 3599:
        I = at(3599)
        checkpoints.append(Checkpoint('early effort fails', 3599, I, I > 60, 'I > 60'))

    t0, t1 = CYCLE_WINDOW
    if t_end >= t1:
        lo, hi = CYCLE_BAND
        peaks = local_maxima(trajectory.window(t0, t1))
        in_band = peaks[(peaks[:, 2] >= lo) & (peaks[:, 2] <= hi)]
        last = peaks[-1] if len(peaks) else None
        checkpoints.append(Checkpoint(
            'cycle regime',
            float(last[0]) if last is not None else t1,
            float(last[2]) if last is not None else at(t1),
            len(in_band) >= 2,
            f'at least 2 maxima of I in [{lo!r}, {hi!r}] on [{t0!r}, {t1!r})',
        ))

    return checkpoints


def run_scenario(sched, init=SCENARIO_INIT, p_base=None, tol=None):
    """
    Integrate ``sched`` from ``init`` and evaluate the checkpoints falling
    inside its span.

    :returns: :class:`ScenarioReport`; its verdict holds when every
        applicable checkpoint is met
    """
    p_base = p_base or reference_params()
    trajectory = integrate_schedule(p_base, sched, init, tol=tol)
    checkpoints = _scenario_checkpoints(p_base, trajectory, sched.t_end, tol)
    for i in checkpoints:
        logger.info(f'Checkpoint {i.label!r} at t={i.t!r}: I={i.I!r}, met={i.expectation_met}')
    return ScenarioReport(
        trajectory=trajectory,
        checkpoints=checkpoints,
        hysteresis_verdict=bool(checkpoints) and all(i.expectation_met for i in checkpoints),
    )


HYSTERESIS_LEGS = (
    (0.3, 'disease-free'),
    (0.1, 'endemic'),
    (0.33, 'endemic'),
    (0.36, 'disease-free'),
)

SEEDED_LEGS = (
    (0.17, 'disease-free', LEG_DURATION),
    (0.16, 'endemic', 12000.0),
)
"""``(gamma, expected, duration)`` of the restarts seeded with :data:`DISEASE_FREE_I` infected.

Just below the transcritical point R0 barely exceeds 1, so the seed needs
several thousand time units before the outbreak takes off.
"""

SETTLE_WINDOW = 500.0
"""Final stretch of a seeded endemic leg that must stay near e1."""


def _leg_checkpoint(p_base, gamma, expected, t, I, tol, I_tail=None):
    if expected == 'disease-free':
        met = I < DISEASE_FREE_I
        expectation = f'I < {DISEASE_FREE_I!r}'
    else:
        target = endemic_level(p_base, gamma, tol)
        tail = (I,) if I_tail is None else I_tail
        met = all(_near(i, target) for i in tail)
        expectation = f'I within {ENDEMIC_RTOL:.0%} of {target!r}'
        if I_tail is not None:
            expectation += f' over the last {SETTLE_WINDOW!r} time units'
    return Checkpoint(f'gamma={gamma!r} {expected}', t, I, met, expectation)


def _check_leg_values(bifurcations):
    """Leg gammas must straddle the located points they are meant to cross."""
    ok = True
    if bifurcations.flc is not None and not HYSTERESIS_LEGS[3][0] > bifurcations.flc.gamma:
        logger.warning(f'Leg gamma {HYSTERESIS_LEGS[3][0]!r} does not exceed the cycle fold')
        ok = False
    tr = bifurcations.tr.gamma
    if not SEEDED_LEGS[1][0] < tr < SEEDED_LEGS[0][0]:
        logger.warning(f'Transcritical point {float(tr)!r} is not between the seeded leg values')
        ok = False
    return ok


def run_hysteresis_demo(p_base=None, bifurcations=None, tol=None):
    """
    Walk gamma around the hysteresis loop: 0.3, 0.1, 0.33 and 0.36 for
    :data:`LEG_DURATION` each, then restart twice from the last state with
    an importation of :data:`DISEASE_FREE_I` infected, at 0.17 and 0.16
    (see :data:`SEEDED_LEGS`).

    :returns: :class:`ScenarioReport`
    """
    tol = settings.resolve(tol)
    p_base = p_base or reference_params()

    sched = GammaSchedule(
        segments=[(i * LEG_DURATION, gamma) for i, (gamma, _) in enumerate(HYSTERESIS_LEGS)],
        t_end=len(HYSTERESIS_LEGS) * LEG_DURATION,
        labels=[f'{expected} leg' for _, expected in HYSTERESIS_LEGS],
    )
    trajectory = integrate_schedule(p_base, sched, SCENARIO_INIT, tol=tol)

    checkpoints = []
    for i, (gamma, expected) in enumerate(HYSTERESIS_LEGS):
        t = (i + 1) * LEG_DURATION
        I = trajectory.state_at(t).I
        checkpoints.append(_leg_checkpoint(p_base, gamma, expected, t, I, tol))

    last = trajectory.final_state
    seeded = State(S=last.S, I=DISEASE_FREE_I, R=last.R)
    t = sched.t_end
    for gamma, expected, duration in SEEDED_LEGS:
        t += duration
        leg = integrate(p_base.with_gamma(gamma), seeded, duration, tol=tol)
        tail = None
        if expected == 'endemic':
            tail = leg.window(duration - SETTLE_WINDOW, duration)[:, 2].tolist() + [leg.final_state.I]
        checkpoints.append(_leg_checkpoint(p_base, gamma, expected, t, leg.final_state.I, tol, tail))

    verdict = all(i.expectation_met for i in checkpoints)
    if bifurcations is not None:
        verdict = _check_leg_values(bifurcations) and verdict

    logger.info(f'Hysteresis verdict: {verdict}')
    return ScenarioReport(trajectory=trajectory, checkpoints=checkpoints, hysteresis_verdict=verdict)


def path_dependence(p_base=None, tol=None):
    """
    End infected levels after gamma 0.3 then 0.1 then 0.33 and after 0.3
    held throughout, from the same initial state.

    :returns: tuple (I after the loop, I with gamma held)
    """
    p_base = p_base or reference_params()
    looped = GammaSchedule(segments=[(0, 0.3), (LEG_DURATION, 0.1), (2 * LEG_DURATION, 0.33)],
                           t_end=3 * LEG_DURATION)
    held = GammaSchedule.constant(0.3, 3 * LEG_DURATION)
    return (
        integrate_schedule(p_base, looped, SCENARIO_INIT, tol=tol).final_state.I,
        integrate_schedule(p_base, held, SCENARIO_INIT, tol=tol).final_state.I,
    )


def local_maxima_count(trajectory, t_start, t_stop):
    return len(local_maxima(trajectory.window(t_start, t_stop)))


def window_range(trajectory, t_start, t_stop):
    window = trajectory.window(t_start, t_stop)
    return float(np.min(window[:, 2])), float(np.max(window[:, 2]))
