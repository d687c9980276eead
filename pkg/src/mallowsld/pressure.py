# -*- coding: utf-8 -*-
"""Infinite and finite volume pressure of the Mallows model."""

import functools

import numpy as np
from scipy.special import roots_legendre

from .numerics import log_expm1_ratio
from .qcomb import reduced_log_factorial_h

ERR_SMALL_N = "mallowsld: n must be at least 2, got {}"


class PressureEvaluator(object):
    """Gauss-Legendre rule on [0, 1] for
    p(beta) = int_0^1 ln((1 - exp(-beta x))/(beta x)) dx.

    For |beta| above `split_at` the interval is cut at 5/|beta|, where the
    integrand turns from its curved shoulder into a straight line.
    """

    ERR_ORDER = "mallowsld: quadrature order must be at least 2, got {}"

    def __init__(self, order=64, split_at=5.0, cache_size=4096):
        if order < 2:
            raise ValueError(self.ERR_ORDER.format(order))
        x, w = roots_legendre(order)
        self.nodes = (x + 1.0) / 2.0
        self.weights = w / 2.0
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        self.order = order
        self.split_at = float(split_at)
        self._scalar = functools.lru_cache(maxsize=cache_size)(
            self._evaluate)

    def _evaluate(self, beta):
        return float(self._integrate(np.asarray(beta, dtype=float)))

    def _integrate(self, beta):
        b = beta[..., None]
        with np.errstate(divide='ignore'):
            split = np.where(np.abs(beta) > self.split_at,
                             self.split_at / np.abs(beta), 1.0)
        s = split[..., None]
        left = log_expm1_ratio(-b * (s * self.nodes)) @ self.weights
        right = log_expm1_ratio(-b * (s + (1.0 - s) * self.nodes)) \
            @ self.weights
        out = split * left + (1.0 - split) * right
        return np.where(beta == 0, 0.0, out)

    def pressure(self, beta):
        """p(beta) for a scalar or an array of inverse temperatures."""
        if np.ndim(beta) == 0:
            return self._scalar(float(beta))
        return self._integrate(np.asarray(beta, dtype=float))

    def t_pressure(self, t, beta):
        """t*p(beta*t), equal to 0 at t = 0."""
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            t = float(t)
            return 0.0 if t == 0 else t * self.pressure(beta * t)
        return np.where(t == 0, 0.0, t * self.pressure(beta * t))

    @staticmethod
    def t_pressure_derivative(t, beta):
        """d/dt [t*p(beta*t)] = ln((1 - exp(-beta t))/(beta t))."""
        return log_expm1_ratio(-np.multiply(beta, t))


_default = PressureEvaluator()


def default_evaluator():
    return _default


def pressure(beta):
    return _default.pressure(beta)


def t_pressure(t, beta):
    return _default.t_pressure(t, beta)


def t_pressure_derivative(t, beta):
    return _default.t_pressure_derivative(t, beta)


def _check_n(n):
    if int(n) != n or n < 2:
        raise ValueError(ERR_SMALL_N.format(n))


def finite_volume_pressure(n, beta):
    """p_n(beta) = (1/n) ln([n]_q!/n!) at q = exp(-beta/(n-1))."""
    _check_n(n)
    return reduced_log_factorial_h(n, -beta / (n - 1.0)) / n


def q_stirling_remainder(n, beta, evaluator=None):
    """ln({n}!) - n p(beta) - beta/2 - (1/2) ln((1 - exp(-beta))/beta).

    {n}! is taken at q = exp(-beta/n); with that scale the three leading
    terms account for ln({n}!) up to a remainder vanishing as n grows.
    """
    _check_n(n)
    evaluator = evaluator or _default
    if beta == 0:
        return 0.0
    log_reduced = reduced_log_factorial_h(n, -beta / float(n))
    return (log_reduced - n * evaluator.pressure(beta) - beta / 2.0
            - 0.5 * float(log_expm1_ratio(-beta)))


def small_beta_pressure(beta):
    """Two-term expansion -beta/4 + beta^2/72 of p near 0."""
    return -beta / 4.0 + beta * beta / 72.0


def pressure_table(betas, n, evaluator=None):
    """Rows (beta, p, p_n, remainder) for each beta."""
    evaluator = evaluator or _default
    rows = []
    for beta in betas:
        beta = float(beta)
        rows.append((beta, evaluator.pressure(beta),
                     finite_volume_pressure(n, beta),
                     q_stirling_remainder(n, beta, evaluator)))
    return rows

