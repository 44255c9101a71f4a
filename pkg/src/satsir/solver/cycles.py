"""
Limit cycles of the planar (S, I) system, found on the Poincare section
``{S = S(e1), I < I(e1)}`` through the upper endemic equilibrium e1. Along
this half-line ``dS/dt > 0``.

Unstable cycles are found in reversed time, where they attract; this only
works because the system is planar.
"""

import enum
import logging
import math

import attr
import numpy as np

from satsir import _config as settings
from satsir.analysis import upper_endemic
from satsir.model import in_planar_domain, vector_field
from satsir.solver.integrate import PreconditionError
from satsir.solver.stepper import DormandPrince, IntegrationError


logger = logging.getLogger(__name__)


AITKEN_MAX_RATIO = 0.98
"""Contraction ratio cap of the return-map extrapolation."""

COLLAPSE_RTOL = 1e-6
"""Returns this close to e1 (relative) mean the orbit settles on the equilibrium."""


class TimeDirection(str, enum.Enum):
    FORWARD = 'forward'
    REVERSED = 'reversed'


@attr.s(frozen=True, eq=False)
class LimitCycle:
    gamma = attr.ib()
    points = attr.ib(repr=False)
    period = attr.ib()
    stable = attr.ib()

    @property
    def section_I(self):
        """Infected level where the cycle crosses the section."""
        return float(self.points[0, 1])

    @property
    def max_I(self):
        return float(self.points[:, 1].max())

    @property
    def closure_error(self):
        first, last = self.points[0], self.points[-1]
        return float(np.linalg.norm(last - first) / max(1.0, np.linalg.norm(first)))


@attr.s(frozen=True)
class OrbitStep:
    t0 = attr.ib()
    y0 = attr.ib(repr=False)
    t1 = attr.ib()
    y1 = attr.ib(repr=False)

    @property
    def h(self):
        return self.t1 - self.t0


class PlanarFlow:
    """Accepted steps of the reduced system in forward or reversed time."""

    def __init__(self, p, direction=TimeDirection.FORWARD, tol=None):
        tol = settings.resolve(tol)
        f = vector_field(p, reduced=True)
        if direction == TimeDirection.REVERSED:
            def fun(y):
                return -f(y)
        else:
            fun = f
        self.direction = direction
        self.stepper = DormandPrince(fun, rtol=tol.rtol, atol=tol.atol, max_step=tol.max_step)

    def steps(self, init, t0=0.0, t_max=math.inf):
        """
        Yield :class:`OrbitStep` objects from ``init`` until ``t_max``.

        :raises: StiffnessError on step size underflow
        """
        y = np.asarray(init, dtype=float)
        t = t0
        h = self.stepper.initial_step(y, min(t_max - t0, 1e3))
        min_step = 1e-14 * max(1.0, abs(t_max) if math.isfinite(t_max) else 1.0)
        while t < t_max:
            t_new, y_new, h = self.stepper.step(t, y, h, t_max, min_step)
            yield OrbitStep(t0=t, y0=y, t1=t_new, y1=y_new)
            t, y = t_new, y_new

    def state_after(self, y0, dt):
        return self.stepper.attempt(y0, dt)[0]

    def locate(self, step, g, time_tol):
        """
        Bisect inside ``step`` for the zero of ``g``.

        :returns: tuple (t, y)
        """
        sign0 = g(step.y0) > 0
        lo, hi = 0.0, step.h
        y_hi = step.y1
        while hi - lo > time_tol:
            mid = 0.5 * (lo + hi)
            y_mid = self.state_after(step.y0, mid)
            if (g(y_mid) > 0) == sign0:
                lo = mid
            else:
                hi, y_hi = mid, y_mid
        return step.t0 + hi, y_hi


def _aitken(history, upper):
    """
    Extrapolate the fixed point of the return map from its last three
    iterates when they contract geometrically.
    """
    if len(history) < 3:
        return None
    x0, x1, x2 = (h[1][1] for h in history[-3:])
    d1, d2 = x1 - x0, x2 - x1
    if d1 == 0:
        return None
    q = d2 / d1
    if not 0 < q < 1:
        return None
    q = min(q, AITKEN_MAX_RATIO)
    x = x2 + d2 * q / (1 - q)
    if not 0 < x < upper:
        return None
    return x


def _escaped(p, y, tol):
    if not np.all(np.isfinite(y)):
        return True
    if y[1] < tol.escape_I:
        return True
    return not in_planar_domain(p, y[0], y[1], 1e-6 * float(p.capacity))


def detect_limit_cycle(p, init, time_direction=TimeDirection.FORWARD, max_time=None, tol=None):
    """
    Follow the orbit from ``init`` and return the limit cycle it converges
    to, or ``None`` when it escapes, settles on e1 or ``max_time`` runs out.

    The first ``tol.cycle_burn_in`` section crossings are discarded.
    Convergence is declared when two successive returns differ by less than
    ``tol.cycle_return`` relative. Geometrically contracting returns are
    extrapolated (Aitken) and the orbit is restarted from the estimate.

    :returns: :class:`LimitCycle` or None
    :raises: PreconditionError if e1 does not exist
    """
    tol = settings.resolve(tol)
    max_time = tol.cycle_max_time if max_time is None else max_time
    direction = TimeDirection(time_direction)

    e1 = upper_endemic(p, tol)
    if e1 is None:
        raise PreconditionError(f'No endemic equilibrium at gamma={p.gamma!r}, section is undefined')

    S_sec, I_top = float(e1.S), float(e1.I)
    flow = PlanarFlow(p, direction, tol)

    def section(y):
        return y[0] - S_sec

    start = np.asarray(init, dtype=float)
    t = 0.0
    crossings = 0
    history = []
    loop = [start]

    while t < max_time:
        restarted = False
        try:
            for step in flow.steps(start, t, max_time):
                y = step.y1
                if _escaped(p, y, tol):
                    logger.info(f'Orbit escaped at t={step.t1:.6g} (gamma={p.gamma!r}, {direction.value})')
                    return None

                g0, g1 = section(step.y0), section(y)
                crossed = (g0 < 0 <= g1) or (g0 > 0 >= g1)
                if not crossed or min(step.y0[1], y[1]) >= I_top:
                    loop.append(y)
                    continue

                tc, yc = flow.locate(step, section, tol.section_time)
                if yc[1] >= I_top:
                    loop.append(y)
                    continue

                crossings += 1
                if crossings <= tol.cycle_burn_in:
                    loop = [yc, y]
                    continue

                if abs(yc[1] - I_top) < COLLAPSE_RTOL * max(1.0, I_top):
                    logger.info(f'Orbit settles on e1 (gamma={p.gamma!r}, {direction.value})')
                    return None

                loop.append(yc)
                if history:
                    t_prev, y_prev = history[-1]
                    if abs(yc[1] - y_prev[1]) < tol.cycle_return * max(1.0, abs(yc[1])):
                        cycle = LimitCycle(
                            gamma=p.gamma,
                            points=np.array(loop),
                            period=tc - t_prev,
                            stable=direction == TimeDirection.FORWARD,
                        )
                        logger.info(
                            f'Found {"stable" if cycle.stable else "unstable"} cycle at gamma={p.gamma!r}: '
                            f'period={cycle.period:.10g}, max_I={cycle.max_I:.10g}'
                        )
                        return cycle

                history.append((tc, yc))
                loop = [yc, y]

                x = _aitken(history, I_top)
                if x is not None:
                    logger.debug(f'Restarting from extrapolated return I={x!r} at t={tc:.6g}')
                    start = np.array([S_sec, x])
                    t = tc
                    history = [(tc, start)]
                    loop = [start]
                    restarted = True
                    break
        except IntegrationError as e:
            logger.info(f'Cycle search stopped: {e}')
            return None

        if not restarted:
            break

    logger.info(f'No cycle within max_time={max_time!r} (gamma={p.gamma!r}, {direction.value})')
    return None
