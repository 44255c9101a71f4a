"""
Closed-form results for the model: basic reproduction number, equilibria
from the endemic cubic, stability, direction of the transcritical
bifurcation, the Dulac curve and the sensitivity indices of R0.
"""

import enum
import logging
import math

import attr
import numpy as np

from satsir import _config as settings
from satsir.model import InvalidInputError, rhs_reduced
from satsir.utils import SatsirValueError


logger = logging.getLogger(__name__)


LEADING_COEFF_CUTOFF = 1e-14
"""Relative size below which a leading cubic coefficient is treated as zero."""

ROOT_POLISH_RTOL = 1e-13
"""Target relative residual of Newton-polished cubic roots."""

ROOT_ACCEPT_RTOL = 1e-9
"""Largest relative residual of a real root candidate that is still accepted."""

ROOT_MERGE_RTOL = 1e-7
"""Roots closer than this (relative) are reported once, as coalesced."""

ROOT_IMAG_RTOL = 1e-7
"""Eigenvalues of the companion matrix with smaller imaginary part are real."""

EQUILIBRIUM_RESIDUAL = 1e-8
"""Residual bound, relative to max(1, lambda/mu), of an accepted equilibrium."""


class DegenerateCaseError(SatsirValueError):
    pass


class StabilityClass(str, enum.Enum):
    SADDLE = 'saddle'
    UNSTABLE_NODE = 'unstable_node'
    UNSTABLE_FOCUS = 'unstable_focus'
    DEGENERATE_UNSTABLE_NODE = 'degenerate_unstable_node'
    STABLE_NODE = 'stable_node'
    STABLE_FOCUS = 'stable_focus'
    DEGENERATE_STABLE_NODE = 'degenerate_stable_node'
    SEMISTABLE = 'semistable'
    NONHYPERBOLIC = 'nonhyperbolic'

    @property
    def is_stable(self):
        return self in (
            StabilityClass.STABLE_NODE,
            StabilityClass.STABLE_FOCUS,
            StabilityClass.DEGENERATE_STABLE_NODE,
        )

    @property
    def is_unstable(self):
        return self in (
            StabilityClass.SADDLE,
            StabilityClass.UNSTABLE_NODE,
            StabilityClass.UNSTABLE_FOCUS,
            StabilityClass.DEGENERATE_UNSTABLE_NODE,
        )


class EquilibriumKind(str, enum.Enum):
    DISEASE_FREE = 'disease_free'
    ENDEMIC = 'endemic'


class Direction(str, enum.Enum):
    FORWARD = 'forward'
    BACKWARD = 'backward'


@attr.s(frozen=True)
class CubicCoeffs:
    """Coefficients of ``a I^3 + b I^2 + c I + d = 0``, the endemic equilibrium condition."""

    a = attr.ib()
    b = attr.ib()
    c = attr.ib()
    d = attr.ib()

    @property
    def untabulated(self):
        """Zero middle coefficient, a sign pattern outside the usual Descartes table."""
        return self.b == 0 or self.c == 0

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)

    def __call__(self, I):
        return ((self.a * I + self.b) * I + self.c) * I + self.d

    def derivative(self, I):
        return (3 * self.a * I + 2 * self.b) * I + self.c

    def magnitude(self, I):
        """Sum of the absolute values of the terms, the scale of a residual."""
        I = abs(I)
        return abs(self.a) * I ** 3 + abs(self.b) * I ** 2 + abs(self.c) * I + abs(self.d)


@attr.s(frozen=True)
class EquilibriumReport:
    kind = attr.ib()
    S = attr.ib()
    I = attr.ib()
    R = attr.ib()
    eigenvalues = attr.ib()
    stability = attr.ib()
    P = attr.ib(default=None)
    Q = attr.ib(default=None)
    coalesced = attr.ib(default=False)

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'S': self.S,
            'I': self.I,
            'R': self.R,
            'P': self.P,
            'Q': self.Q,
            'eigenvalues': [{'re': z.real, 'im': z.imag} for z in self.eigenvalues],
            'stability': self.stability.value,
            'coalesced': self.coalesced,
        }


@attr.s(frozen=True)
class SensitivityIndices:
    upsilon_beta = attr.ib()
    upsilon_lambda = attr.ib()
    upsilon_gamma = attr.ib()
    upsilon_mu = attr.ib()
    upsilon_mu_prime = attr.ib()
    upsilon_alpha = attr.ib()

    def to_dict(self):
        return attr.asdict(self)


@attr.s(frozen=True)
class DulacCurve:
    """Coefficients of ``a_t I^2 + b_t S I + c_t S + d_t I + e_t = 0``."""

    a_t = attr.ib()
    b_t = attr.ib()
    c_t = attr.ib()
    d_t = attr.ib()
    e_t = attr.ib()


@attr.s(frozen=True)
class TranscriticalDirection:
    direction = attr.ib()
    slope = attr.ib()
    threshold = attr.ib()

    def to_dict(self):
        return {
            'direction': self.direction.value,
            'slope': self.slope,
            'threshold': self.threshold,
        }


def basic_reproduction_number(p, gamma=None):
    gamma = p.gamma if gamma is None else gamma
    return p.beta * p.lam / ((p.mu + gamma * p.lam) * p.k)


def _classify_from_eigenvalues(eigenvalues, scale, zero):
    l1, l2 = sorted(eigenvalues, key=lambda z: (z.real, z.imag))
    eps = zero * max(scale, 1e-300)
    is_real = abs(l1.imag) <= eps and abs(l2.imag) <= eps

    if is_real:
        r1, r2 = l1.real, l2.real
        if abs(r1) <= eps or abs(r2) <= eps:
            other = r2 if abs(r1) <= eps else r1
            if abs(other) > eps and other < 0:
                return StabilityClass.SEMISTABLE
            return StabilityClass.NONHYPERBOLIC
        if r1 < 0 < r2:
            return StabilityClass.SADDLE
        degenerate = abs(r2 - r1) <= eps
        if r2 < 0:
            return StabilityClass.DEGENERATE_STABLE_NODE if degenerate else StabilityClass.STABLE_NODE
        return StabilityClass.DEGENERATE_UNSTABLE_NODE if degenerate else StabilityClass.UNSTABLE_NODE

    re = l1.real
    if abs(re) <= eps:
        return StabilityClass.NONHYPERBOLIC
    return StabilityClass.STABLE_FOCUS if re < 0 else StabilityClass.UNSTABLE_FOCUS


def classify_eigenvalues(eigenvalues, scale=1.0, tol=None):
    """
    Stability class read directly from the two eigenvalues of a planar
    linearization; ``scale`` sets the magnitude below which a value is zero.
    """
    tol = settings.resolve(tol)
    return _classify_from_eigenvalues([complex(z) for z in eigenvalues], scale, tol.zero)


def classify_pq(P, Q, P_scale=1.0, Q_scale=1.0, tol=None):
    """
    Stability class from P = -trace J and Q = det J:

    * Q < 0: saddle
    * Q > 0, P < 0: unstable node, focus or degenerate node by the sign of P^2 - 4Q
    * Q > 0, P > 0: the stable counterparts
    * Q = 0: semistable when P > 0, nonhyperbolic otherwise
    * Q > 0, P = 0: nonhyperbolic
    """
    zero = settings.resolve(tol).zero
    P, Q = float(P), float(Q)

    if abs(Q) <= zero * Q_scale:
        if P > zero * P_scale:
            return StabilityClass.SEMISTABLE
        return StabilityClass.NONHYPERBOLIC
    if Q < 0:
        return StabilityClass.SADDLE
    if abs(P) <= zero * P_scale:
        return StabilityClass.NONHYPERBOLIC

    disc = P * P - 4 * Q
    disc_scale = P * P + 4 * abs(Q)
    if P < 0:
        if abs(disc) <= zero * disc_scale:
            return StabilityClass.DEGENERATE_UNSTABLE_NODE
        return StabilityClass.UNSTABLE_NODE if disc > 0 else StabilityClass.UNSTABLE_FOCUS
    if abs(disc) <= zero * disc_scale:
        return StabilityClass.DEGENERATE_STABLE_NODE
    return StabilityClass.STABLE_NODE if disc > 0 else StabilityClass.STABLE_FOCUS


def disease_free_equilibrium(p, tol=None):
    tol = settings.resolve(tol)
    r0 = basic_reproduction_number(p)
    growth = (p.beta * p.lam - (p.mu + p.gamma * p.lam) * p.k) / (p.mu + p.gamma * p.lam)
    eigenvalues = (complex(-float(p.mu)), complex(float(growth)))

    if abs(float(r0) - 1) <= tol.zero:
        stability = StabilityClass.SEMISTABLE
    else:
        scale = abs(float(p.mu)) + abs(float(growth))
        stability = _classify_from_eigenvalues(list(eigenvalues), scale, tol.zero)

    return EquilibriumReport(
        kind=EquilibriumKind.DISEASE_FREE,
        S=p.capacity,
        I=0,
        R=0,
        eigenvalues=eigenvalues,
        stability=stability,
    )


def cubic_coefficients(p):
    """
    Coefficients of the endemic cubic. The ``R0 - 1`` factors are expanded
    through ``(mu + gamma lambda) k (R0 - 1) = beta lambda - (mu + gamma lambda) k``
    so that no division happens and rational inputs stay exact.
    """
    mu, g, rho = p.mu, p.gamma, p.rho
    exit_rate = p.mu + p.mu_prime
    k = p.k
    m = mu + g * p.lam
    excess = p.beta * p.lam - m * k
    spread = exit_rate * g - p.beta

    a = rho ** 2 * exit_rate * spread
    b = rho ** 2 * (excess + p.alpha * m) + rho * p.alpha * p.beta + 2 * rho * k * spread
    c = 2 * rho * excess + k * spread + g * p.alpha * k + rho * p.alpha * m
    d = excess
    return CubicCoeffs(a=a, b=b, c=c, d=d)


def _sign(x):
    return (x > 0) - (x < 0)


def descartes_possible_counts(c):
    """
    Possible numbers of positive roots: the number of sign changes of the
    nonzero coefficients, then down by steps of two.

    :returns: set of int
    """
    signs = [_sign(x) for x in c.as_tuple() if x != 0]
    changes = sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)
    return set(range(changes, -1, -2))


def _polish(coeffs, x):
    poly = np.polynomial.Polynomial(coeffs[::-1])
    dpoly = poly.deriv()
    magnitude = np.polynomial.Polynomial(np.abs(coeffs[::-1]))

    for _ in range(50):
        px = poly(x)
        if abs(px) <= ROOT_POLISH_RTOL * magnitude(abs(x)):
            break
        dpx = dpoly(x)
        if dpx == 0:
            break
        step = px / dpx
        if abs(step) > 0.1 * max(1.0, abs(x)):
            break
        x -= step
        if abs(step) <= 1e-16 * abs(x):
            break

    ok = abs(poly(x)) <= ROOT_ACCEPT_RTOL * max(magnitude(abs(x)), 1e-300)
    return float(x), ok


def positive_cubic_roots(c):
    """
    Positive real roots of the cubic as ``(I, multiplicity)`` pairs, sorted
    ascending. Roots come from the eigenvalues of the companion matrix,
    polished by Newton iteration; near-coincident roots are merged.
    """
    coeffs = [float(x) for x in c.as_tuple()]
    top = max(abs(x) for x in coeffs)
    if top == 0:
        return []

    while len(coeffs) > 1 and abs(coeffs[0]) < LEADING_COEFF_CUTOFF * max(abs(x) for x in coeffs[1:]):
        coeffs.pop(0)
    # a vanishing constant term is the disease-free root I = 0
    while len(coeffs) > 1 and abs(coeffs[-1]) < LEADING_COEFF_CUTOFF * max(abs(x) for x in coeffs[:-1]):
        coeffs.pop()
    degree = len(coeffs) - 1
    if degree < 1:
        return []

    monic = np.array(coeffs[1:]) / coeffs[0]
    companion = np.zeros((degree, degree))
    companion[0, :] = -monic
    companion[1:, :-1] = np.eye(degree - 1)
    eigenvalues = np.linalg.eigvals(companion)

    candidates = []
    for z in eigenvalues:
        if abs(z.imag) > ROOT_IMAG_RTOL * max(1.0, abs(z)):
            continue
        x, ok = _polish(np.array(coeffs), z.real)
        if ok and x > 0:
            candidates.append(x)

    candidates.sort()
    roots = []
    for x in candidates:
        if roots and abs(x - roots[-1][0]) <= ROOT_MERGE_RTOL * max(abs(x), 1.0):
            prev, mult = roots[-1]
            roots[-1] = ((prev * mult + x) / (mult + 1), mult + 1)
        else:
            roots.append((x, 1))
    return roots


def endemic_susceptible(p, I):
    """S at an endemic equilibrium with infected level ``I``."""
    return (p.lam - I * (p.mu + p.mu_prime + p.alpha / (1 + p.rho * I))) / p.mu


def endemic_recovered(p, I):
    return p.alpha * I / (p.mu * (1 + p.rho * I))


def jacobian_reduced(p, S, I, gamma=None):
    """
    Jacobian of the reduced system at (S, I).

    :returns: 2x2 numpy array
    """
    g = float(p.gamma if gamma is None else gamma)
    beta, mu, mu_prime = float(p.beta), float(p.mu), float(p.mu_prime)
    alpha, rho = float(p.alpha), float(p.rho)
    S, I = float(S), float(I)

    den = 1 + g * S
    occ = 1 + rho * I
    j11 = -mu - beta * I / den + beta * g * S * I / den ** 2
    j12 = -beta * S / den
    j21 = beta * I / den - beta * g * S * I / den ** 2
    j22 = -mu - mu_prime + beta * S / den - alpha / occ + rho * alpha * I / occ ** 2
    return np.array([[j11, j12], [j21, j22]])


def pq_values(p, S, I, gamma=None):
    """
    P and Q of the characteristic polynomial ``x^2 + P x + Q`` at (S, I),
    evaluated from their closed forms.
    """
    g = p.gamma if gamma is None else gamma
    den = 1 + g * S
    occ = 1 + p.rho * I
    mu, mu_prime, alpha, beta = p.mu, p.mu_prime, p.alpha, p.beta

    P = 2 * mu + mu_prime + alpha / occ ** 2 + beta * I / den ** 2 - beta * S / den
    Q = (
        mu ** 2 + mu * mu_prime + mu * alpha / occ ** 2
        + (mu + mu_prime) * beta * I / den ** 2
        + beta * alpha * I / (den ** 2 * occ ** 2)
        - mu * beta * S / den
    )
    return P, Q


def _check_equilibrium(p, S, I, gamma):
    dS, dI = rhs_reduced(p, S, I, gamma)
    residual = math.hypot(float(dS), float(dI))
    bound = EQUILIBRIUM_RESIDUAL * max(1.0, float(p.capacity))
    if residual > bound:
        raise InvalidInputError(
            f'({S!r}, {I!r}) is not an equilibrium, residual {residual:.3g} > {bound:.3g}',
            attr_name='residual', attr_value=residual,
        )


def classify_equilibrium(p, S, I, gamma=None, tol=None):
    """
    Stability class of the equilibrium (S, I) of the reduced system.

    :raises: InvalidInputError if (S, I) is not an equilibrium
    """
    _check_equilibrium(p, S, I, gamma)
    J = jacobian_reduced(p, S, I, gamma)
    P, Q = pq_values(p, S, I, gamma)
    P_scale = abs(J[0, 0]) + abs(J[1, 1])
    Q_scale = abs(J[0, 0] * J[1, 1]) + abs(J[0, 1] * J[1, 0])
    return classify_pq(P, Q, P_scale, Q_scale, tol)


def endemic_report(p, I, gamma=None, coalesced=False, tol=None):
    g = p.gamma if gamma is None else gamma
    S = endemic_susceptible(p, I)
    P, Q = pq_values(p, S, I, g)
    eigenvalues = tuple(sorted(
        (complex(z) for z in np.linalg.eigvals(jacobian_reduced(p, S, I, g))),
        key=lambda z: (z.real, z.imag),
    ))
    return EquilibriumReport(
        kind=EquilibriumKind.ENDEMIC,
        S=S,
        I=I,
        R=endemic_recovered(p, I),
        eigenvalues=eigenvalues,
        stability=classify_equilibrium(p, S, I, g, tol),
        P=float(P),
        Q=float(Q),
        coalesced=coalesced,
    )


def endemic_equilibria(p, tol=None):
    """
    Endemic equilibria, sorted by ``I`` ascending. With two of them the
    first is the saddle ``e2`` and the last the upper equilibrium ``e1``.

    :returns: list of :class:`EquilibriumReport`
    """
    tol = settings.resolve(tol)
    reports = []
    for I, multiplicity in positive_cubic_roots(cubic_coefficients(p)):
        S = endemic_susceptible(p, I)
        if not S > tol.admissible_S:
            logger.debug(f'Dropping inadmissible cubic root I={I!r} with S={S!r}')
            continue
        reports.append(endemic_report(p, I, coalesced=multiplicity > 1, tol=tol))
    return reports


def upper_endemic(p, tol=None):
    """The endemic equilibrium with the largest ``I`` (e1), or ``None``."""
    reports = endemic_equilibria(p, tol)
    return reports[-1] if reports else None


def lower_endemic(p, tol=None):
    """The saddle ``e2`` below ``e1``, or ``None`` if there are fewer than two."""
    reports = endemic_equilibria(p, tol)
    return reports[0] if len(reports) >= 2 else None


def transcritical_direction(p):
    """
    Direction of the bifurcation of the endemic branch from the disease-free
    state at R0 = 1: backward iff beta exceeds the threshold.

    :raises: DegenerateCaseError when beta equals the threshold
    """
    k = p.k
    if p.rho == 0:
        threshold = math.inf
    else:
        threshold = p.mu * k ** 3 / (p.alpha * p.lam ** 2 * p.rho)

    if p.beta == threshold:
        raise DegenerateCaseError(
            'beta equals the backward-bifurcation threshold, direction is degenerate',
            attr_name='beta', attr_value=p.beta,
        )

    slope = p.beta * p.lam ** 2 * k / (p.mu * k ** 3 - p.alpha * p.beta * p.lam ** 2 * p.rho)
    direction = Direction.BACKWARD if p.beta > threshold else Direction.FORWARD
    return TranscriticalDirection(direction=direction, slope=slope, threshold=threshold)


def sensitivity_indices(p):
    k = p.k
    m = p.mu + p.gamma * p.lam
    return SensitivityIndices(
        upsilon_beta=1,
        upsilon_lambda=p.mu / m,
        upsilon_gamma=-p.gamma * p.lam / m,
        upsilon_mu=-p.mu * (2 * p.mu + p.mu_prime + p.alpha + p.gamma * p.lam) / (k * m),
        upsilon_mu_prime=-p.mu_prime / k,
        upsilon_alpha=-p.alpha / k,
    )


def dulac_curve(p):
    """
    Curve where the divergence of the field weighted by
    ``(1 + gamma S)(1 + rho I)`` vanishes; every periodic orbit crosses it.
    """
    beta, g, mu, mu_prime = p.beta, p.gamma, p.mu, p.mu_prime
    alpha, rho, lam = p.alpha, p.rho, p.lam
    return DulacCurve(
        a_t=-beta * rho,
        b_t=-4 * g * mu * rho - 2 * g * mu_prime * rho + 2 * beta * rho,
        c_t=-alpha * g - 3 * g * mu - g * mu_prime + beta,
        d_t=g * lam * rho - 3 * mu * rho - 2 * mu_prime * rho - beta,
        e_t=g * lam - alpha - 2 * mu - mu_prime,
    )


def dulac_value(c, S, I):
    return c.a_t * I ** 2 + c.b_t * S * I + c.c_t * S + c.d_t * I + c.e_t
