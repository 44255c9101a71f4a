"""
Dormand-Prince 5(4) embedded Runge-Kutta pair with PI step-size control.
"""

import logging
import math

import attr
import numpy as np


logger = logging.getLogger(__name__)


C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])

A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]

B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
"""Fifth-order weights, equal to the last row of A (first same as last)."""

E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
"""Difference between the fifth- and fourth-order weights."""

ORDER = 5


class IntegrationError(RuntimeError):
    pass


class StiffnessError(IntegrationError):
    def __init__(self, msg, t=None, h=None):
        super().__init__(msg)
        self.t = t
        self.h = h


def _rms(x):
    return math.sqrt(float(np.mean(x * x)))


@attr.s
class DormandPrince:
    """
    Explicit adaptive stepper for an autonomous field ``fun(y) -> dy/dt``.

    The local error estimate of the embedded fourth-order solution is
    measured in the weighted RMS norm with weights ``atol + rtol |y|`` and
    the step is accepted when that norm is at most one.
    """

    fun = attr.ib()
    rtol = attr.ib(default=1e-9)
    atol = attr.ib(default=1e-12)
    max_step = attr.ib(default=math.inf)
    safety = attr.ib(default=0.9)
    min_factor = attr.ib(default=0.2)
    max_factor = attr.ib(default=10.0)
    beta = attr.ib(default=0.04)

    def __attrs_post_init__(self):
        self.accepted = 0
        self.rejected = 0
        self._err_prev = 1e-4
        self._rejected_last = False
        self._fsal = None
        self._expo = 1 / ORDER - 0.75 * self.beta

    def _derivative(self, y):
        if self._fsal is not None and self._fsal[0] is y:
            return self._fsal[1]
        return self.fun(y)

    def attempt(self, y, h):
        """
        One step of size ``h`` from ``y`` without error control.

        :returns: tuple (y_new, error vector, derivative at y_new)
        """
        k = [self._derivative(y)]
        for i in range(1, 7):
            dy = sum(a * kj for a, kj in zip(A[i], k) if a)
            k.append(self.fun(y + h * dy))
        y_new = y + h * sum(b * kj for b, kj in zip(B, k) if b)
        err = h * sum(e * kj for e, kj in zip(E, k) if e)
        return y_new, err, k[-1]

    def error_norm(self, err, y, y_new):
        scale = self.atol + self.rtol * np.maximum(np.abs(y), np.abs(y_new))
        return _rms(err / scale)

    def initial_step(self, y, span):
        """Starting step size by the usual two-evaluation heuristic."""
        f0 = self.fun(y)
        scale = self.atol + self.rtol * np.abs(y)
        d0 = _rms(y / scale)
        d1 = _rms(f0 / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, span)

        f1 = self.fun(y + h0 * f0)
        d2 = _rms((f1 - f0) / scale) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1 / ORDER)

        return min(100 * h0, h1, self.max_step, span)

    def step(self, t, y, h, t_bound, min_step):
        """
        Advance by one accepted step, never past ``t_bound``.

        :returns: tuple (t_new, y_new, proposed next step size)
        :raises: StiffnessError if the step size underflows ``min_step``
        """
        while True:
            remaining = t_bound - t
            h_try = min(h, self.max_step, remaining)
            y_new, err_vec, f_new = self.attempt(y, h_try)
            err = self.error_norm(err_vec, y, y_new)

            if err <= 1.0:
                if err == 0:
                    factor = self.max_factor
                else:
                    factor = self.safety * err ** -self._expo * self._err_prev ** self.beta
                    factor = min(self.max_factor, max(self.min_factor, factor))
                if self._rejected_last:
                    factor = min(1.0, factor)

                self._rejected_last = False
                self._err_prev = max(err, 1e-4)
                self._fsal = (y_new, f_new)
                self.accepted += 1
                t_new = t_bound if h_try == remaining else t + h_try
                return t_new, y_new, h_try * factor

            self.rejected += 1
            self._rejected_last = True
            h = h_try * max(self.min_factor, self.safety * err ** -self._expo)
            if h < min_step:
                logger.warning(f'Step size underflow at t={t!r}, h={h!r}')
                raise StiffnessError(
                    f'Step size {h:.3g} fell below {min_step:.3g} at t={t!r}', t=t, h=h,
                )
