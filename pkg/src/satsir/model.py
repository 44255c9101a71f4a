"""
SIR model with saturated incidence and saturated recovery.

    dS/dt = lambda - mu S - beta S I / (1 + gamma S)
    dI/dt = -(mu + mu') I + beta S I / (1 + gamma S) - alpha I / (1 + rho I)
    dR/dt = -mu R + alpha I / (1 + rho I)

The biologically meaningful region is
``Omega = {S, I, R >= 0, 0 < S + I + R <= lambda/mu}``; its projection on the
SI-plane is used by the reduced (planar) system.
"""

import json
import logging

import attr
import numpy as np

from satsir import _config as settings
from satsir.utils import SatsirValueError, is_finite_real


logger = logging.getLogger(__name__)


PARAM_KEYS = ('beta', 'lambda', 'mu', 'mu_prime', 'alpha', 'rho', 'gamma')
"""Keys of the flat JSON representation of :class:`ModelParams`."""

REFERENCE_VALUES = {
    'beta': 0.05,
    'lambda': 10,
    'mu': 0.01,
    'mu_prime': 0.1,
    'alpha': 0.2,
    'rho': 0.1,
}
"""Reference parameter set of the Indonesian COVID-19 case study, gamma excluded."""


class InvalidInputError(SatsirValueError):
    pass


def _positive(instance, attribute, value):
    if not is_finite_real(value):
        raise InvalidInputError(
            f'Parameter {attribute.name!r} must be a finite number, got {value!r}',
            attr_name=attribute.name, attr_value=value,
        )
    if not value > 0:
        raise InvalidInputError(
            f'Parameter {attribute.name!r} must be positive, got {value!r}',
            attr_name=attribute.name, attr_value=value,
        )


def _unit_interval(instance, attribute, value):
    if not is_finite_real(value):
        raise InvalidInputError(
            f'Parameter {attribute.name!r} must be a finite number, got {value!r}',
            attr_name=attribute.name, attr_value=value,
        )
    if not 0 <= value <= 1:
        raise InvalidInputError(
            f'Parameter {attribute.name!r} must be in [0, 1], got {value!r}',
            attr_name=attribute.name, attr_value=value,
        )


def _finite(instance, attribute, value):
    if not is_finite_real(value):
        raise InvalidInputError(
            f'State component {attribute.name!r} must be a finite number, got {value!r}',
            attr_name=attribute.name, attr_value=value,
        )


@attr.s(frozen=True)
class ModelParams:
    """
    Model parameters. Values may be floats or exact rationals
    (:class:`fractions.Fraction`); closed-form operations keep rationals exact.
    """

    beta = attr.ib(validator=_positive)
    lam = attr.ib(validator=_positive)
    mu = attr.ib(validator=_positive)
    mu_prime = attr.ib(validator=_positive)
    alpha = attr.ib(validator=_positive)
    rho = attr.ib(validator=_unit_interval)
    gamma = attr.ib(validator=_unit_interval)

    @property
    def capacity(self):
        """Upper bound lambda/mu of the total population."""
        return self.lam / self.mu

    @property
    def k(self):
        """Total exit rate of the infected compartment at low occupancy."""
        return self.mu + self.mu_prime + self.alpha

    def with_gamma(self, gamma):
        return attr.evolve(self, gamma=gamma)

    def to_dict(self):
        return {
            'beta': self.beta,
            'lambda': self.lam,
            'mu': self.mu,
            'mu_prime': self.mu_prime,
            'alpha': self.alpha,
            'rho': self.rho,
            'gamma': self.gamma,
        }

    @classmethod
    def from_dict(cls, data):
        """
        Create from the flat mapping with keys :data:`PARAM_KEYS`.

        :raises: InvalidInputError on unknown or missing keys
        """
        if not isinstance(data, dict):
            raise InvalidInputError(f'Parameters must be a JSON object, got {type(data).__name__}')

        unknown = sorted(set(data) - set(PARAM_KEYS))
        if unknown:
            raise InvalidInputError(
                f'Unknown parameter key(s): {", ".join(unknown)}',
                attr_name=unknown[0],
            )
        missing = [k for k in PARAM_KEYS if k not in data]
        if missing:
            raise InvalidInputError(
                f'Missing parameter key(s): {", ".join(missing)}',
                attr_name=missing[0],
            )

        return cls(
            beta=data['beta'],
            lam=data['lambda'],
            mu=data['mu'],
            mu_prime=data['mu_prime'],
            alpha=data['alpha'],
            rho=data['rho'],
            gamma=data['gamma'],
        )

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f'Invalid parameters JSON: {e}') from e
        return cls.from_dict(data)


def reference_params(gamma=0.1):
    """Reference parameter set with the given cautiousness level."""
    return ModelParams.from_dict({**REFERENCE_VALUES, 'gamma': gamma})


@attr.s(frozen=True)
class State:
    S = attr.ib(validator=_finite)
    I = attr.ib(validator=_finite)
    R = attr.ib(default=0, validator=_finite)

    @property
    def N(self):
        return self.S + self.I + self.R

    def as_tuple(self):
        return (self.S, self.I, self.R)


@attr.s(frozen=True)
class StateDerivative:
    dS = attr.ib()
    dI = attr.ib()
    dR = attr.ib()

    def as_tuple(self):
        return (self.dS, self.dI, self.dR)


def incidence(p, S, I, gamma=None):
    """Saturated incidence beta S I / (1 + gamma S)."""
    gamma = p.gamma if gamma is None else gamma
    return p.beta * S * I / (1 + gamma * S)


def recovery(p, I):
    """Saturated recovery alpha I / (1 + rho I)."""
    return p.alpha * I / (1 + p.rho * I)


def _check_scalars(**values):
    for name, value in values.items():
        if not is_finite_real(value):
            raise InvalidInputError(
                f'{name} must be a finite number, got {value!r}',
                attr_name=name, attr_value=value,
            )


def rhs_full(p, s):
    """
    Right-hand side of the three-compartment model at state ``s``.

    :raises: InvalidInputError for non-finite components
    """
    _check_scalars(S=s.S, I=s.I, R=s.R)
    inc = incidence(p, s.S, s.I)
    rec = recovery(p, s.I)
    return StateDerivative(
        dS=p.lam - p.mu * s.S - inc,
        dI=-(p.mu + p.mu_prime) * s.I + inc - rec,
        dR=-p.mu * s.R + rec,
    )


def rhs_reduced(p, S, I, gamma=None):
    """
    First two equations of the model, which do not involve R. ``gamma``
    overrides ``p.gamma`` for evaluations along an equilibrium branch.
    """
    _check_scalars(S=S, I=I)
    inc = incidence(p, S, I, gamma)
    return (
        p.lam - p.mu * S - inc,
        -(p.mu + p.mu_prime) * I + inc - recovery(p, I),
    )


def in_domain(p, s, tol=None):
    """Whether ``s`` lies in Omega, relaxed by ``tol``."""
    tol = settings.TOLERANCES.domain if tol is None else tol
    if min(s.S, s.I, s.R) < -tol:
        return False
    n = s.N
    return 0 < n <= p.capacity + tol


def in_planar_domain(p, S, I, tol=0.0):
    """Whether (S, I) lies in the projection of Omega on the SI-plane."""
    if S < -tol or I < -tol:
        return False
    return 0 < S + I <= p.capacity + tol


def vector_field(p, reduced=False):
    """
    Autonomous field ``f(y) -> dy/dt`` on numpy vectors, (S, I, R) or (S, I)
    when ``reduced``.
    """
    beta, lam, mu = float(p.beta), float(p.lam), float(p.mu)
    exit_rate = float(p.mu + p.mu_prime)
    alpha, rho, gamma = float(p.alpha), float(p.rho), float(p.gamma)

    if reduced:
        def f(y):
            S, I = y[0], y[1]
            inc = beta * S * I / (1.0 + gamma * S)
            rec = alpha * I / (1.0 + rho * I)
            return np.array([lam - mu * S - inc, -exit_rate * I + inc - rec])
    else:
        def f(y):
            S, I, R = y[0], y[1], y[2]
            inc = beta * S * I / (1.0 + gamma * S)
            rec = alpha * I / (1.0 + rho * I)
            return np.array([lam - mu * S - inc, -exit_rate * I + inc - rec, -mu * R + rec])

    return f
