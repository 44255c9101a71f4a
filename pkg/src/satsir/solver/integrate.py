import logging

import attr
import numpy as np

from satsir import _config as settings
from satsir.model import State, in_domain, vector_field
from satsir.solver.stepper import DormandPrince, IntegrationError
from satsir.utils import SatsirValueError, write_csv


logger = logging.getLogger(__name__)


TRAJECTORY_DOMAIN_RTOL = 1e-6
"""Allowed domain overshoot of integrated states, relative to lambda/mu."""

MIN_STEP_RTOL = 1e-14
"""Smallest step size, relative to the integration span."""


class DomainError(IntegrationError):
    def __init__(self, msg, t=None, state=None):
        super().__init__(msg)
        self.t = t
        self.state = state


class PreconditionError(SatsirValueError):
    pass


@attr.s(frozen=True, eq=False)
class Trajectory:
    """
    Samples at every accepted step, an ``(n, 4)`` array with columns
    t, S, I, R.
    """

    samples = attr.ib(repr=False)
    accepted_steps = attr.ib(default=0)
    rejected_steps = attr.ib(default=0)
    clamped = attr.ib(default=False)

    @property
    def t(self):
        return self.samples[:, 0]

    @property
    def S(self):
        return self.samples[:, 1]

    @property
    def I(self):
        return self.samples[:, 2]

    @property
    def R(self):
        return self.samples[:, 3]

    @property
    def final_state(self):
        _, S, I, R = self.samples[-1]
        return State(S=float(S), I=float(I), R=float(R))

    def state_at(self, t):
        """Linear interpolation between the two samples around ``t``."""
        return State(
            S=float(np.interp(t, self.t, self.S)),
            I=float(np.interp(t, self.t, self.I)),
            R=float(np.interp(t, self.t, self.R)),
        )

    def window(self, t_start, t_stop):
        mask = (self.t >= t_start) & (self.t < t_stop)
        return self.samples[mask]

    def to_csv(self):
        return write_csv(('t', 'S', 'I', 'R'), (tuple(float(x) for x in row) for row in self.samples))

    def to_dict(self):
        return {
            'samples': [{'t': t, 'S': S, 'I': I, 'R': R} for t, S, I, R in self.samples.tolist()],
            'accepted_steps': self.accepted_steps,
            'rejected_steps': self.rejected_steps,
            'clamped': self.clamped,
        }

    @classmethod
    def concatenate(cls, parts):
        """Join consecutive trajectories sharing their boundary sample."""
        samples = [parts[0].samples] + [part.samples[1:] for part in parts[1:]]
        return cls(
            samples=np.concatenate(samples),
            accepted_steps=sum(i.accepted_steps for i in parts),
            rejected_steps=sum(i.rejected_steps for i in parts),
            clamped=any(i.clamped for i in parts),
        )


def _check_tolerances(rtol, atol):
    for name, value in (('rtol', rtol), ('atol', atol)):
        if not value > 0:
            raise PreconditionError(f'{name} must be positive, got {value!r}', attr_name=name, attr_value=value)


def _check_init(p, init, tol):
    if not in_domain(p, init, tol.domain):
        raise PreconditionError(
            f'Initial state {init.as_tuple()!r} is outside the domain, '
            f'components must be >= 0 and 0 < N <= {float(p.capacity)!r}',
            attr_name='init', attr_value=init.as_tuple(),
        )


def _integrate_span(p, y0, t0, t1, rtol, atol, max_step):
    stepper = DormandPrince(vector_field(p), rtol=rtol, atol=atol, max_step=max_step)
    span = t1 - t0
    min_step = MIN_STEP_RTOL * max(span, abs(t1))
    domain_tol = TRAJECTORY_DOMAIN_RTOL * float(p.capacity)

    t, y = t0, y0
    h = stepper.initial_step(y, span)
    samples = [(t, *y)]
    clamped = False

    while t < t1:
        t, y, h = stepper.step(t, y, h, t1, min_step)
        if (y < 0).any():
            if (y < -atol).any():
                clamped = True
                logger.debug(f'Clamping negative undershoot {y.tolist()!r} at t={t!r}')
            y = np.maximum(y, 0.0)
        state = State(S=float(y[0]), I=float(y[1]), R=float(y[2]))
        if not in_domain(p, state, domain_tol):
            raise DomainError(f'State {state.as_tuple()!r} left the domain at t={t!r}', t=t, state=state)
        samples.append((t, *y))

    logger.debug(
        f'Integrated [{t0!r}, {t1!r}] with gamma={p.gamma!r}: '
        f'{stepper.accepted} accepted, {stepper.rejected} rejected steps'
    )
    return Trajectory(
        samples=np.array(samples, dtype=float),
        accepted_steps=stepper.accepted,
        rejected_steps=stepper.rejected,
        clamped=clamped,
    )


def integrate(p, init, t_end, rtol=None, atol=None, tol=None):
    """
    Integrate the three-compartment model on ``[0, t_end]``.

    :returns: :class:`Trajectory`
    :raises: PreconditionError for an initial state outside the domain or
        non-positive tolerances, StiffnessError on step size underflow,
        DomainError if the solution leaves the domain
    """
    tol = settings.resolve(tol)
    rtol = tol.rtol if rtol is None else rtol
    atol = tol.atol if atol is None else atol
    _check_tolerances(rtol, atol)
    _check_init(p, init, tol)
    if not t_end > 0:
        raise PreconditionError(f't_end must be positive, got {t_end!r}', attr_name='t_end', attr_value=t_end)

    y0 = np.array(init.as_tuple(), dtype=float)
    return _integrate_span(p, y0, 0.0, float(t_end), rtol, atol, tol.max_step)


def integrate_schedule(p_base, sched, init, rtol=None, atol=None, tol=None):
    """
    Integrate with a piecewise-constant gamma; the integrator restarts at
    every segment start and the state carries over unchanged.

    :returns: :class:`Trajectory`
    """
    tol = settings.resolve(tol)
    rtol = tol.rtol if rtol is None else rtol
    atol = tol.atol if atol is None else atol
    _check_tolerances(rtol, atol)
    _check_init(p_base, init, tol)

    y = np.array(init.as_tuple(), dtype=float)
    parts = []
    for t_start, t_stop, gamma in sched.intervals():
        logger.info(f'Schedule segment [{t_start!r}, {t_stop!r}) with gamma={gamma!r}')
        part = _integrate_span(p_base.with_gamma(gamma), y, float(t_start), float(t_stop),
                               rtol, atol, tol.max_step)
        parts.append(part)
        y = part.samples[-1, 1:].copy()

    return Trajectory.concatenate(parts)


def default_portrait_inits(p):
    """
    Eight initial states on the boundary of the planar domain: four on the
    line S + I = lambda/mu and four on the edge S = 0.
    """
    cap = float(p.capacity)
    inits = [State(S=cap * (1 - f), I=cap * f, R=0.0) for f in (0.02, 0.1, 0.3, 0.6)]
    inits += [State(S=0.0, I=cap * f, R=0.0) for f in (0.02, 0.07, 0.15, 0.5)]
    return inits


def phase_portrait(p, t_end, inits=None, tol=None):
    """
    :returns: list of (init, :class:`Trajectory`) pairs
    """
    inits = default_portrait_inits(p) if inits is None else inits
    return [(init, integrate(p, init, t_end, tol=tol)) for init in inits]
