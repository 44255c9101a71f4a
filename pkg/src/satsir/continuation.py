"""
Branches and bifurcations in the cautiousness level gamma.

The endemic equilibrium condition is affine in gamma, so the equilibrium
branch is traced by its infected level I, with gamma = gamma(I) single valued
while I(gamma) is double valued on the backward branch.
"""

import enum
import functools
import logging
import math

import attr
import numpy as np
from scipy import optimize

from satsir import _config as settings
from satsir.analysis import (
    DegenerateCaseError, Direction, StabilityClass, basic_reproduction_number,
    classify_equilibrium, endemic_susceptible, jacobian_reduced, lower_endemic,
    pq_values, transcritical_direction, upper_endemic,
)
from satsir.model import InvalidInputError
from satsir.solver import PlanarFlow, PreconditionError, TimeDirection, detect_limit_cycle
from satsir.solver.stepper import IntegrationError
from satsir.utils import DetectionError, SatsirValueError, grid_map, is_finite_real


logger = logging.getLogger(__name__)


SINGULARITY_MARGIN = 1e-9
"""Relative distance kept from the admissibility singularity I^(s)."""

HOPF_SCAN_POINTS = 400
NODE_FOCUS_SCAN_POINTS = 2000


class SingularityError(SatsirValueError):
    pass


class OutOfRangeError(SatsirValueError):
    pass


class StructureError(SatsirValueError):
    pass


class AbsentHopfError(DetectionError):
    pass


class BifurcationKind(str, enum.Enum):
    TR = 'TR'
    HB = 'HB'
    HM = 'HM'
    FLC = 'FLC'
    SN = 'SN'
    NF = 'NF'


class Regime(str, enum.Enum):
    I = 'I'  # noqa: E741
    II = 'II'
    III = 'III'
    IV = 'IV'
    V = 'V'
    VI = 'VI'
    VII = 'VII'
    VIII = 'VIII'
    IX = 'IX'
    X = 'X'

    @property
    def info(self):
        return REGIME_TABLE[self]


@attr.s(frozen=True)
class RegimeInfo:
    gamma_range = attr.ib()
    e0 = attr.ib()
    e1 = attr.ib()
    e2 = attr.ib()
    equilibria = attr.ib()
    stable_cycles = attr.ib()
    unstable_cycles = attr.ib()
    cycles = attr.ib()

    def to_dict(self):
        return attr.asdict(self)


_CYCLE_ZONE = dict(e0='stable', e1='unstable', e2='unstable', equilibria=3)

REGIME_TABLE = {
    Regime.I: RegimeInfo('[0, TR)', 'unstable', 'stable', None, 2, 0, 0, 'none'),
    Regime.II: RegimeInfo('TR', 'semistable', 'stable', 'semistable (= e0)', 2, 0, 0, 'none'),
    Regime.III: RegimeInfo('(TR, HB]', 'stable', 'stable', 'unstable', 3, 0, 0, 'none'),
    Regime.IV: RegimeInfo('(HB, HM)', **_CYCLE_ZONE, stable_cycles=1, unstable_cycles=0,
                          cycles='1 stable'),
    Regime.V: RegimeInfo('HM', **_CYCLE_ZONE, stable_cycles=1, unstable_cycles=0,
                         cycles='1 stable, 1 homoclinic orbit'),
    Regime.VI: RegimeInfo('(HM, FLC)', **_CYCLE_ZONE, stable_cycles=1, unstable_cycles=1,
                          cycles='1 stable, 1 unstable'),
    Regime.VII: RegimeInfo('FLC', **_CYCLE_ZONE, stable_cycles=0, unstable_cycles=0,
                           cycles='1 semistable'),
    Regime.VIII: RegimeInfo('(FLC, SN)', **_CYCLE_ZONE, stable_cycles=0, unstable_cycles=0,
                            cycles='none'),
    Regime.IX: RegimeInfo('SN', 'stable', 'unstable (= e2)', 'unstable (= e1)', 2, 0, 0, 'none'),
    Regime.X: RegimeInfo('(SN, 1]', 'stable', None, None, 1, 0, 0, 'none'),
}
"""Equilibria and periodic orbits of each gamma regime."""


@attr.s(frozen=True)
class BranchPoint:
    I = attr.ib()
    gamma = attr.ib()
    S = attr.ib()
    stability = attr.ib()
    R0 = attr.ib()


@attr.s(frozen=True)
class BifurcationPoint:
    kind = attr.ib()
    gamma = attr.ib()
    I = attr.ib()
    R0 = attr.ib()
    details = attr.ib(factory=dict, eq=False, hash=False, repr=False)

    def to_dict(self):
        return {'kind': self.kind.value, 'gamma': self.gamma, 'I': self.I, 'R0': self.R0}


@attr.s(frozen=True)
class CycleBranchPoint:
    """A detected cycle; ``period`` and ``max_I`` are ``None`` when detection found nothing."""

    gamma = attr.ib()
    period = attr.ib()
    stable = attr.ib()
    max_I = attr.ib()

    @property
    def absent(self):
        return self.period is None


@attr.s(frozen=True)
class BifurcationSet:
    tr = attr.ib()
    hb = attr.ib()
    sn = attr.ib()
    hm = attr.ib(default=None)
    flc = attr.ib(default=None)

    def points(self):
        found = [i for i in (self.tr, self.hb, self.hm, self.flc, self.sn) if i is not None]
        return sorted(found, key=lambda i: i.gamma)


def _point(p_base, kind, gamma, I, **details):
    return BifurcationPoint(
        kind=kind,
        gamma=gamma,
        I=I,
        R0=basic_reproduction_number(p_base, gamma=gamma),
        details=details,
    )


# Equilibrium branch


def singular_infected(p_base):
    """
    I^(s): the infected level where S at the endemic equilibrium reaches 0,
    the positive root of ``rho (mu+mu') I^2 - (lambda rho - mu - mu' - alpha) I - lambda``.
    """
    exit_rate = float(p_base.mu + p_base.mu_prime)
    rho, lam, alpha = float(p_base.rho), float(p_base.lam), float(p_base.alpha)
    if rho == 0:
        return lam / (exit_rate + alpha)
    a = rho * exit_rate
    b = -(lam * rho - exit_rate - alpha)
    c = -lam
    return (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)


def _branch_terms(p, I):
    """h(I) = mu + mu' + alpha/(1 + rho I) and its first two derivatives."""
    occ = 1 + p.rho * I
    h = p.mu + p.mu_prime + p.alpha / occ
    dh = -p.alpha * p.rho / occ ** 2
    d2h = 2 * p.alpha * p.rho ** 2 / occ ** 3
    return h, dh, d2h


def gamma_of_I(p_base, I):
    """
    The cautiousness level at which ``I`` is the infected level of an endemic
    equilibrium: ``gamma = beta/h(I) - 1/S(I)``.

    :raises: SingularityError at or beyond I^(s), DegenerateCaseError if
        the coefficient of gamma vanishes
    """
    if not is_finite_real(I) or not I > 0:
        raise InvalidInputError(f'I must be a positive number, got {I!r}', attr_name='I', attr_value=I)

    S = endemic_susceptible(p_base, I)
    if not S > 0:
        raise SingularityError(
            f'I={I!r} is at or beyond the admissibility singularity I^(s)={singular_infected(p_base)!r}',
            attr_name='I', attr_value=I,
        )
    h, _, _ = _branch_terms(p_base, I)
    if h == 0:
        raise DegenerateCaseError('Coefficient of gamma vanishes', attr_name='I', attr_value=I)
    return p_base.beta / h - 1 / S


def dgamma_dI(p_base, I):
    h, dh, _ = _branch_terms(p_base, I)
    S = endemic_susceptible(p_base, I)
    dS = -(h + I * dh) / p_base.mu
    return -p_base.beta * dh / h ** 2 + dS / S ** 2


def _d2gamma_dI2(p_base, I):
    h, dh, d2h = _branch_terms(p_base, I)
    S = endemic_susceptible(p_base, I)
    dS = -(h + I * dh) / p_base.mu
    d2S = -(2 * dh + I * d2h) / p_base.mu
    return (
        -p_base.beta * d2h / h ** 2 + 2 * p_base.beta * dh ** 2 / h ** 3
        + d2S / S ** 2 - 2 * dS ** 2 / S ** 3
    )


def r0_of_I(p_base, I):
    """Reproduction number at which ``I`` is an endemic infected level."""
    return basic_reproduction_number(p_base, gamma=gamma_of_I(p_base, I))


def branch_point(p_base, I, tol=None):
    gamma = gamma_of_I(p_base, I)
    S = endemic_susceptible(p_base, I)
    return BranchPoint(
        I=I,
        gamma=gamma,
        S=S,
        stability=classify_equilibrium(p_base, S, I, gamma=gamma, tol=tol),
        R0=basic_reproduction_number(p_base, gamma=gamma),
    )


def equilibrium_branch(p_base, I_min, I_max, steps, tol=None, workers=None):
    """
    Endemic equilibria on a uniform grid of ``steps`` infected levels.

    :returns: list of :class:`BranchPoint`
    """
    if not isinstance(steps, int) or steps < 2:
        raise InvalidInputError(f'steps must be an integer >= 2, got {steps!r}', attr_name='steps', attr_value=steps)
    if not 0 < I_min < I_max:
        raise InvalidInputError(
            f'Need 0 < I_min < I_max, got I_min={I_min!r}, I_max={I_max!r}',
            attr_name='I_min', attr_value=I_min,
        )
    singular = singular_infected(p_base)
    if not I_max < singular:
        raise SingularityError(
            f'I_max={I_max!r} must stay below I^(s)={singular!r}', attr_name='I_max', attr_value=I_max,
        )

    grid = [float(i) for i in np.linspace(I_min, I_max, steps)]
    return grid_map(functools.partial(branch_point, p_base, tol=tol), grid, workers)


# Analytic locators


def locate_transcritical(p_base):
    """
    Gamma where R0 = 1: ``(beta lambda / (mu + mu' + alpha) - mu) / lambda``.

    :raises: OutOfRangeError if the root is outside [0, 1]
    """
    gamma = (p_base.beta * p_base.lam / p_base.k - p_base.mu) / p_base.lam
    if not 0 <= gamma <= 1:
        raise OutOfRangeError(
            f'R0 = 1 at gamma={float(gamma)!r}, outside [0, 1]', attr_name='gamma', attr_value=gamma,
        )
    logger.info(f'Transcritical point at gamma={float(gamma)!r}')
    return _point(p_base, BifurcationKind.TR, gamma, 0)


def locate_saddle_node(p_base):
    """
    Maximum of gamma(I) on (0, I^(s)): bounded Brent search (golden section
    with parabolic steps), then Newton iteration on dgamma/dI = 0.

    :raises: StructureError if the maximum is not interior
    """
    if transcritical_direction(p_base).direction != Direction.BACKWARD:
        raise StructureError('Forward bifurcation, the endemic branch has no fold')

    singular = singular_infected(p_base)
    lo, hi = SINGULARITY_MARGIN * singular, singular * (1 - SINGULARITY_MARGIN)

    result = optimize.minimize_scalar(
        lambda I: -float(gamma_of_I(p_base, I)),
        bounds=(lo, hi),
        method='bounded',
        options={'xatol': 1e-9 * singular},
    )
    I = float(result.x)
    for _ in range(50):
        step = float(dgamma_dI(p_base, I) / _d2gamma_dI2(p_base, I))
        I -= step
        if abs(step) <= 1e-14 * I:
            break

    margin = 1e-6 * singular
    if not (lo + margin < I < hi - margin) or not _d2gamma_dI2(p_base, I) < 0:
        raise StructureError(f'gamma(I) has no interior maximum (search ended at I={I!r})')

    gamma = float(gamma_of_I(p_base, I))
    logger.info(f'Saddle-node point at gamma={gamma!r}, I={I!r}')
    return _point(p_base, BifurcationKind.SN, gamma, I)


def trace_along_branch(p_base, I):
    """P = -trace J at the endemic equilibrium with infected level ``I``."""
    gamma = gamma_of_I(p_base, I)
    P, _ = pq_values(p_base, endemic_susceptible(p_base, I), I, gamma=gamma)
    return float(P)


def locate_hopf(p_base, saddle_node=None):
    """
    Zero of P along the upper branch, between I^(SN) and I^(s).

    ``details["transversal"]`` is False when the eigenvalues cross the
    imaginary axis with zero or negative speed.

    :raises: AbsentHopfError without a sign change of P or with Q <= 0
    """
    sn = saddle_node or locate_saddle_node(p_base)
    singular = singular_infected(p_base)
    grid = np.linspace(sn.I, singular * (1 - 1e-6), HOPF_SCAN_POINTS + 1)[1:]
    values = [trace_along_branch(p_base, float(I)) for I in grid]

    bracket = None
    for (I0, P0), (I1, P1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if P0 < 0 <= P1:
            bracket = (float(I0), float(I1))
            break
    if bracket is None:
        raise AbsentHopfError(
            'P does not change sign along the upper branch',
            diagnostics={'I_range': (float(grid[0]), float(grid[-1])), 'P_range': (min(values), max(values))},
        )

    I = optimize.brentq(lambda x: trace_along_branch(p_base, x), *bracket, xtol=1e-12, rtol=4e-16)
    gamma = float(gamma_of_I(p_base, I))
    S = endemic_susceptible(p_base, I)
    _, Q = pq_values(p_base, S, I, gamma=gamma)
    if not Q > 0:
        raise AbsentHopfError(f'Q={float(Q)!r} <= 0 where P vanishes', diagnostics={'I': I, 'gamma': gamma})

    delta = 1e-4
    dP_dI = (trace_along_branch(p_base, I + delta) - trace_along_branch(p_base, I - delta)) / (2 * delta)
    dg_dI = float(dgamma_dI(p_base, I))
    crossing_speed = -0.5 * dP_dI / dg_dI
    if not crossing_speed > 0:
        logger.warning(f'Hopf point at gamma={gamma!r} fails transversality: d(-P/2)/dgamma={crossing_speed!r}')

    logger.info(f'Hopf point at gamma={gamma!r}, I={I!r}')
    return _point(
        p_base, BifurcationKind.HB, gamma, I,
        Q=float(Q), dP_dI=dP_dI, dgamma_dI=dg_dI, crossing_speed=crossing_speed,
        transversal=bool(crossing_speed > 0),
    )


def _discriminant_along_branch(p_base, I):
    gamma = gamma_of_I(p_base, I)
    P, Q = pq_values(p_base, endemic_susceptible(p_base, I), I, gamma=gamma)
    return float(P * P - 4 * Q)


def locate_node_focus(p_base, saddle_node=None):
    """
    Points of the upper branch where P^2 - 4Q changes sign, i.e. where e1
    turns from a node into a focus or back.

    :returns: list of :class:`BifurcationPoint` of kind NF, by increasing I
    """
    sn = saddle_node or locate_saddle_node(p_base)
    singular = singular_infected(p_base)
    grid = np.linspace(sn.I, singular * (1 - 1e-6), NODE_FOCUS_SCAN_POINTS + 1)[1:]
    values = [_discriminant_along_branch(p_base, float(I)) for I in grid]

    found = []
    for (I0, v0), (I1, v1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if (v0 > 0) == (v1 > 0):
            continue
        I = optimize.brentq(lambda x: _discriminant_along_branch(p_base, x), float(I0), float(I1), xtol=1e-12)
        gamma = float(gamma_of_I(p_base, I))
        if 0 <= gamma <= 1:
            found.append(_point(p_base, BifurcationKind.NF, gamma, I))
    return found


# Limit cycles


def section_start(p, fraction, tol=None):
    """
    Point on the Poincare section, ``fraction`` of the e2-e1 gap below e1
    (of I(e1) when e2 does not exist).
    """
    e1 = upper_endemic(p, tol)
    if e1 is None:
        raise PreconditionError(f'No endemic equilibrium at gamma={p.gamma!r}')
    e2 = lower_endemic(p, tol)
    span = e1.I - e2.I if e2 is not None else e1.I
    return (float(e1.S), float(e1.I - fraction * span))


def stable_cycle(p, tol=None):
    """Stable cycle reached forward in time from near e1, or ``None``."""
    tol = settings.resolve(tol)
    init = section_start(p, tol.cycle_start_fraction, tol)
    return detect_limit_cycle(p, init, TimeDirection.FORWARD, tol=tol)


def unstable_cycle(p, stable, tol=None):
    """
    Unstable cycle reached in reversed time from just outside ``stable``,
    or ``None``.
    """
    tol = settings.resolve(tol)
    e1 = upper_endemic(p, tol)
    gap = float(e1.I) - stable.section_I
    init = (float(e1.S), stable.section_I - tol.reversed_start_fraction * gap)
    return detect_limit_cycle(p, init, TimeDirection.REVERSED, tol=tol)


def _cycle_pair(p_base, tol, gamma):
    p = p_base.with_gamma(gamma)
    stable = stable_cycle(p, tol)
    if stable is None:
        return [CycleBranchPoint(gamma=gamma, period=None, stable=True, max_I=None)]

    rows = [CycleBranchPoint(gamma=gamma, period=stable.period, stable=True, max_I=stable.max_I)]
    unstable = unstable_cycle(p, stable, tol)
    if unstable is not None:
        rows.append(CycleBranchPoint(gamma=gamma, period=unstable.period, stable=False, max_I=unstable.max_I))
    return rows


def trace_cycle_branch(p_base, gamma_lo, gamma_hi, steps, tol=None, workers=None):
    """
    Periods of the stable and unstable cycles on a uniform gamma grid inside
    (gamma^(HB), gamma^(SN)). A grid point without a stable cycle yields one
    absent row.

    :returns: list of :class:`CycleBranchPoint`, by grid index
    """
    tol = settings.resolve(tol)
    if not isinstance(steps, int) or steps < 1 or (steps == 1 and gamma_lo != gamma_hi):
        raise InvalidInputError(f'Invalid number of grid steps {steps!r}', attr_name='steps', attr_value=steps)
    if gamma_hi < gamma_lo:
        raise InvalidInputError('gamma_hi must not be below gamma_lo', attr_name='gamma_hi', attr_value=gamma_hi)

    sn = locate_saddle_node(p_base)
    hb = locate_hopf(p_base, sn)
    if not hb.gamma < gamma_lo <= gamma_hi < sn.gamma:
        raise OutOfRangeError(
            f'Cycle grid [{gamma_lo!r}, {gamma_hi!r}] must lie inside ({hb.gamma!r}, {sn.gamma!r})',
            attr_name='gamma_lo', attr_value=gamma_lo,
        )

    grid = [float(g) for g in np.linspace(gamma_lo, gamma_hi, steps)]
    logger.info(f'Tracing cycles on {len(grid)} gamma values in [{gamma_lo!r}, {gamma_hi!r}]')
    rows = grid_map(functools.partial(_cycle_pair, p_base, tol), grid, workers)
    return [row for pair in rows for row in pair]


def _unstable_direction(p, e2):
    J = jacobian_reduced(p, e2.S, e2.I)
    values, vectors = np.linalg.eig(J)
    v = np.real(vectors[:, int(np.argmax(values.real))])
    v = v / np.linalg.norm(v)
    return v if v[1] > 0 else -v


def homoclinic_check(p, tol=None, max_time=None):
    """
    Shoot along the branch of the unstable manifold of the saddle e2 that
    heads towards e1. The orbit is trapped when it crosses the section twice
    within ``homoclinic_trap_ratio |e1 - e2|`` of e1 and escapes when I falls
    below ``escape_I``.

    :returns: tuple (trapped, I at the first section crossing or None)
    """
    tol = settings.resolve(tol)
    max_time = tol.cycle_max_time if max_time is None else max_time
    e1, e2 = upper_endemic(p, tol), lower_endemic(p, tol)
    if e1 is None or e2 is None:
        raise PreconditionError(f'Need two endemic equilibria at gamma={p.gamma!r}')

    centre = np.array([float(e1.S), float(e1.I)])
    saddle = np.array([float(e2.S), float(e2.I)])
    reach = tol.homoclinic_trap_ratio * float(np.linalg.norm(centre - saddle))
    init = saddle + tol.homoclinic_offset * _unstable_direction(p, e2)

    flow = PlanarFlow(p, TimeDirection.FORWARD, tol)
    first_cross = None
    near_crossings = 0
    try:
        for step in flow.steps(init, 0.0, max_time):
            y = step.y1
            if y[1] < tol.escape_I:
                return False, first_cross
            g0, g1 = step.y0[0] - centre[0], y[0] - centre[0]
            if g0 < 0 <= g1 and min(step.y0[1], y[1]) < centre[1]:
                if first_cross is None:
                    first_cross = float(y[1])
                if np.linalg.norm(y - centre) < reach:
                    near_crossings += 1
                    if near_crossings >= 2:
                        return True, first_cross
    except IntegrationError as e:
        logger.warning(f'Manifold shooting stopped at gamma={p.gamma!r}: {e}')
        return False, first_cross

    logger.warning(f'Manifold shooting timed out at gamma={p.gamma!r}, counted as trapped')
    return True, first_cross


def _bisect(predicate, lo, hi, width, name):
    """
    Shrink [lo, hi] with predicate(lo) true and predicate(hi) false.

    :returns: tuple (lo, hi, value recorded at lo)
    :raises: DetectionError if the ends do not bracket a flip
    """
    ok_lo, info_lo = predicate(lo)
    ok_hi, _ = predicate(hi)
    if not ok_lo or ok_hi:
        raise DetectionError(
            f'{name}: predicate does not flip on [{lo!r}, {hi!r}]',
            diagnostics={'lo': lo, 'hi': hi, 'predicate_lo': ok_lo, 'predicate_hi': ok_hi},
        )

    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        ok, info = predicate(mid)
        logger.debug(f'{name}: predicate({mid!r}) = {ok}')
        if ok:
            lo, info_lo = mid, info
        else:
            hi = mid
    return lo, hi, info_lo


def locate_homoclinic(p_base, hopf=None, saddle_node=None, tol=None):
    """
    Bisection in gamma on the trapped/escaped outcome of the e2 manifold
    shooting, starting from (gamma^(HB), mid-way to gamma^(SN)).

    :raises: DetectionError on bracketing failure
    """
    tol = settings.resolve(tol)
    sn = saddle_node or locate_saddle_node(p_base)
    hb = hopf or locate_hopf(p_base, sn)

    def predicate(gamma):
        return homoclinic_check(p_base.with_gamma(gamma), tol)

    hi = hb.gamma + 0.5 * (sn.gamma - hb.gamma)
    lo, hi, section_I = _bisect(predicate, hb.gamma, hi, tol.homoclinic_width, 'homoclinic')
    gamma = 0.5 * (lo + hi)
    logger.info(f'Homoclinic point at gamma={gamma!r} (bracket width {hi - lo:.3g})')
    return _point(p_base, BifurcationKind.HM, gamma, section_I, bracket=(lo, hi))


def locate_cycle_fold(p_base, homoclinic=None, saddle_node=None, tol=None):
    """
    Bisection in gamma on whether a stable cycle is found forward in time
    from near e1, over (gamma^(HM), mid-way to gamma^(SN)).

    :raises: DetectionError on bracketing failure
    """
    tol = settings.resolve(tol)
    sn = saddle_node or locate_saddle_node(p_base)
    hm = homoclinic or locate_homoclinic(p_base, saddle_node=sn, tol=tol)

    def predicate(gamma):
        cycle = stable_cycle(p_base.with_gamma(gamma), tol)
        return cycle is not None, cycle.section_I if cycle is not None else None

    hi = hm.gamma + 0.5 * (sn.gamma - hm.gamma)
    lo, hi, section_I = _bisect(predicate, hm.gamma, hi, tol.fold_width, 'cycle fold')
    gamma = 0.5 * (lo + hi)
    logger.info(f'Fold of cycles at gamma={gamma!r} (bracket width {hi - lo:.3g})')
    return _point(p_base, BifurcationKind.FLC, gamma, section_I, bracket=(lo, hi))


def locate_bifurcations(p_base, with_cycles=True, tol=None):
    """
    :returns: :class:`BifurcationSet`
    """
    tr = locate_transcritical(p_base)
    sn = locate_saddle_node(p_base)
    hb = locate_hopf(p_base, sn)
    if not with_cycles:
        return BifurcationSet(tr=tr, hb=hb, sn=sn)
    hm = locate_homoclinic(p_base, hb, sn, tol)
    flc = locate_cycle_fold(p_base, hm, sn, tol)
    return BifurcationSet(tr=tr, hb=hb, sn=sn, hm=hm, flc=flc)


# Regimes


def _cycle_zone_regime(p_base, gamma, bifurcations, eq, tol):
    if bifurcations is not None and bifurcations.hm is not None and bifurcations.flc is not None:
        hm, flc = bifurcations.hm.gamma, bifurcations.flc.gamma
        if gamma < hm - eq:
            return Regime.IV
        if abs(gamma - hm) <= eq:
            return Regime.V
        if gamma < flc - eq:
            return Regime.VI
        if abs(gamma - flc) <= eq:
            return Regime.VII
        return Regime.VIII

    p = p_base.with_gamma(gamma)
    trapped, _ = homoclinic_check(p, tol)
    if trapped:
        return Regime.IV
    if stable_cycle(p, tol) is not None:
        return Regime.VI
    return Regime.VIII


def classify_regime(p_base, gamma, bifurcations=None, tol=None):
    """
    Regime (I to X) of ``gamma``. Without a located ``bifurcations`` set
    the analytic points are computed and, inside (gamma^(HB), gamma^(SN)),
    the homoclinic and fold predicates are evaluated directly at ``gamma``.

    :returns: :class:`Regime`
    :raises: InvalidInputError for gamma outside [0, 1]
    """
    tol = settings.resolve(tol)
    if not is_finite_real(gamma) or not 0 <= gamma <= 1:
        raise InvalidInputError(f'gamma must be in [0, 1], got {gamma!r}', attr_name='gamma', attr_value=gamma)

    if bifurcations is None:
        sn = locate_saddle_node(p_base)
        bifurcations = BifurcationSet(tr=locate_transcritical(p_base), hb=locate_hopf(p_base, sn), sn=sn)
        located = None
    else:
        located = bifurcations

    eq = tol.regime_equality
    tr, hb, sn = (float(i.gamma) for i in (bifurcations.tr, bifurcations.hb, bifurcations.sn))

    if abs(gamma - tr) <= eq:
        return Regime.II
    if gamma < tr:
        return Regime.I
    if gamma <= hb:
        return Regime.III
    if abs(gamma - sn) <= eq:
        return Regime.IX
    if gamma > sn:
        return Regime.X
    return _cycle_zone_regime(p_base, gamma, located, eq, tol)


def is_stable_class(stability):
    return StabilityClass(stability).is_stable
