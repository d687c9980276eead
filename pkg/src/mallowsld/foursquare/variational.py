# -*- coding: utf-8 -*-
"""Four-square cost functions, their critical point and the limiting law."""

import math
from collections import namedtuple

import numpy as np

from ..measures import GridMeasure
from ..numerics import log_abs_expm1, xlogx_ratio
from ..pressure import default_evaluator

ERR_THETA_OPEN = "mallowsld: theta values must lie in (0, 1), got ({}, {})"
ERR_THETA_CLOSED = "mallowsld: theta values must lie in [0, 1], got ({}, {})"
ERR_SUM = "mallowsld: split masses must be nonnegative and sum to 1, got {}"
ERR_INTERVAL = "mallowsld: t={!r} lies outside [{!r}, {!r}]"
ERR_FORMS = "mallowsld: the two forms of Phi disagree ({!r} vs {!r})"
ERR_NOT_CONVERGED = "mallowsld: critical point search for theta=({}, {}) " \
    "beta={} did not converge in {} iterations"

# tolerance of the membership checks on t and on the split masses
SLACK = 1e-12
# below this |beta| R is taken from its first order expansion
SERIES_BETA = 1e-6


class ConvergenceError(ArithmeticError):
    pass


def _check_open(theta1, theta2):
    if not (0 < theta1 < 1 and 0 < theta2 < 1):
        raise ValueError(ERR_THETA_OPEN.format(theta1, theta2))


class FourSplit(namedtuple('FourSplit', ['theta1', 'theta2', 't11', 't12',
                                         't21', 't22'])):
    """Cut point (theta1, theta2) and the masses of the four quadrants."""
    __slots__ = ()

    def __new__(cls, theta1, theta2, t11, t12, t21, t22):
        _check_open(theta1, theta2)
        ts = (t11, t12, t21, t22)
        if min(ts) < 0 or abs(math.fsum(ts) - 1.0) > SLACK:
            raise ValueError(ERR_SUM.format(ts))
        return super(FourSplit, cls).__new__(
            cls, float(theta1), float(theta2), *(float(t) for t in ts))

    @property
    def masses(self):
        return np.array([self.t11, self.t12, self.t21, self.t22])

    @property
    def areas(self):
        a, b = self.theta1, self.theta2
        return np.array([a * b, a * (1 - b), (1 - a) * b, (1 - a) * (1 - b)])


DiagonalParam = namedtuple('DiagonalParam', ['theta1', 'theta2', 't'])


def interval_bounds(theta1, theta2):
    """End points of I = [max(0, theta1 + theta2 - 1), min(theta1, theta2)]."""
    return max(0.0, theta1 + theta2 - 1.0), min(theta1, theta2)


def induced_split(param):
    """FourSplit (t, theta1 - t, theta2 - t, 1 - theta1 - theta2 + t)."""
    theta1, theta2, t = param
    _check_open(theta1, theta2)
    lo, hi = interval_bounds(theta1, theta2)
    if not lo - SLACK <= t <= hi + SLACK:
        raise ValueError(ERR_INTERVAL.format(t, lo, hi))
    t = min(max(t, lo), hi)
    ts = [t, theta1 - t, theta2 - t, 1.0 - theta1 - theta2 + t]
    ts = [max(v, 0.0) for v in ts]
    return FourSplit(theta1, theta2, *ts)


def _masses(param):
    s = induced_split(param)
    return s.t11, s.t12, s.t21, s.t22


# ================================ #
#   Cost function and derivatives  #
# ================================ #

def phi_tilde(split, beta, evaluator=None):
    """Cost of prescribing the four quadrant masses of `split`."""
    ev = evaluator or default_evaluator()
    t11, t12, t21, t22 = split.masses
    kl = sum(float(xlogx_ratio(t, area))
             for t, area in zip(split.masses, split.areas))
    singles = sum(ev.t_pressure(t, beta) for t in split.masses)
    pairs = sum(ev.t_pressure(s, beta)
                for s in (t11 + t12, t11 + t21, t12 + t22, t21 + t22))
    return ev.pressure(beta) + kl + singles - pairs + beta * t12 * t21


def _phi_reduced(split, beta, ev):
    a, b = split.theta1, split.theta2
    kl = sum(float(xlogx_ratio(t, area))
             for t, area in zip(split.masses, split.areas))
    singles = sum(ev.t_pressure(t, beta) for t in split.masses)
    margins = (ev.t_pressure(a, beta) + ev.t_pressure(b, beta)
               + ev.t_pressure(1 - a, beta) + ev.t_pressure(1 - b, beta))
    return ev.pressure(beta) - margins + kl + singles \
        + beta * split.t12 * split.t21


def phi(param, beta, evaluator=None):
    """Phi_beta(theta1, theta2; t) on the split with uniform marginals.

    Evaluated both from the general four-mass form and from the form with
    the marginal pressures pulled out; they must agree.
    """
    ev = evaluator or default_evaluator()
    split = induced_split(param)
    general = phi_tilde(split, beta, ev)
    reduced = _phi_reduced(split, beta, ev)
    if abs(general - reduced) > 1e-10:
        raise ArithmeticError(ERR_FORMS.format(general, reduced))
    return general


def phi_dt(param, beta):
    """d Phi/dt = ln[(1-e^{-b t11})(1-e^{-b t22}) / ((e^{b t12}-1)(e^{b t21}-1))].

    Tends to -inf/+inf at the lower/upper end of the interval.
    """
    t11, t12, t21, t22 = _masses(param)
    with np.errstate(divide='ignore'):
        if beta == 0:
            return float(np.log(t11) + np.log(t22) - np.log(t12)
                         - np.log(t21))
        return float(log_abs_expm1(-beta * t11) + log_abs_expm1(-beta * t22)
                     - log_abs_expm1(beta * t12) - log_abs_expm1(beta * t21))


def phi_dtt(param, beta):
    """d^2 Phi/dt^2 = sum beta/(2 tanh(beta t_ij/2)), or sum 1/t_ij at 0."""
    ts = np.array(_masses(param))
    with np.errstate(divide='ignore'):
        if beta == 0:
            return float(np.sum(1.0 / ts))
        return float(np.sum(beta / (2.0 * np.tanh(beta * ts / 2.0))))


def solve_critical_t(theta1, theta2, beta, tol=1e-13, max_iter=200):
    """Root of phi_dt in I by Newton steps kept inside a sign bracket."""
    if not (0 <= theta1 <= 1 and 0 <= theta2 <= 1):
        raise ValueError(ERR_THETA_CLOSED.format(theta1, theta2))
    lo, hi = interval_bounds(theta1, theta2)
    if hi - lo <= 0:
        return lo
    if beta == 0:
        return theta1 * theta2
    t = min(max(theta1 * theta2, lo), hi)
    if not lo < t < hi:
        t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        param = DiagonalParam(theta1, theta2, t)
        f = phi_dt(param, beta)
        if abs(f) < tol:
            return t
        if f < 0:
            lo = t
        else:
            hi = t
        step = t - f / phi_dtt(param, beta)
        if not lo < step < hi:
            step = 0.5 * (lo + hi)
        if step == t:
            return t
        t = step
    raise ConvergenceError(ERR_NOT_CONVERGED.format(theta1, theta2, beta,
                                                    max_iter))


# =================================== #
#   Closed forms of the limiting law  #
# =================================== #

def _log_gap(x, y, beta):
    # ln|(1 - e^{-b}) - (1 - e^{-b x})(1 - e^{-b y})|
    with np.errstate(divide='ignore'):
        if beta > 0:
            return np.logaddexp(-beta * x + log_abs_expm1(-beta * y),
                                -beta * y + log_abs_expm1(-beta * (1 - y)))
        g = -beta
        return np.logaddexp(log_abs_expm1(g),
                            log_abs_expm1(g * x) + log_abs_expm1(g * y))


def closed_form_R(theta1, theta2, beta):
    """R_beta(theta1, theta2) = -(1/beta) ln(1 - A B / C), with
    A = 1 - e^{-beta theta1}, B = 1 - e^{-beta theta2}, C = 1 - e^{-beta}.

    Accepts arrays of thetas for a scalar beta.
    """
    x = np.asarray(theta1, dtype=float)
    y = np.asarray(theta2, dtype=float)
    if beta == 0:
        return (x * y)[()]
    if abs(beta) < SERIES_BETA:
        return (x * y + beta * x * y * (1 - x) * (1 - y) / 2.0)[()]
    if abs(beta) <= 1:
        ratio = np.expm1(-beta * x) * np.expm1(-beta * y) / -np.expm1(-beta)
        return (-np.log1p(-ratio) / beta)[()]
    log_c = log_abs_expm1(-beta)
    return (-(_log_gap(x, y, beta) - log_c) / beta)[()]


def density_rho(x, y, beta):
    """beta (1 - e^{-beta}) e^{-beta x} e^{-beta y} / D(x, y)^2, the mixed
    second derivative of R_beta; identically 1 at beta = 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if beta == 0:
        return np.ones(np.broadcast(x, y).shape)[()]
    log_rho = (math.log(abs(beta)) + log_abs_expm1(-beta) - beta * x
               - beta * y - 2.0 * _log_gap(x, y, beta))
    return np.exp(log_rho)[()]


def mixed_partial_r(theta1, theta2, beta):
    """dR/dtheta2 = e^{-beta theta2} (1 - e^{-beta theta1}) / D."""
    x = np.asarray(theta1, dtype=float)
    y = np.asarray(theta2, dtype=float)
    if beta == 0:
        return np.broadcast_to(x, np.broadcast(x, y).shape).copy()[()]
    with np.errstate(divide='ignore'):
        log_r = -beta * y + log_abs_expm1(-beta * x) - _log_gap(x, y, beta)
    return np.exp(log_r)[()]


def discretize_density(beta, m):
    """GridMeasure of nu*_beta with exact cell masses taken from R_beta."""
    nodes = np.linspace(0.0, 1.0, m + 1)
    cdf = closed_form_R(nodes[:, None], nodes[None, :], beta)
    cdf[0, :] = 0.0
    cdf[:, 0] = 0.0
    cdf[-1, :] = nodes
    cdf[:, -1] = nodes
    return GridMeasure.from_node_cdf(cdf)


def two_square_bound_rhs(t1, t2, theta, beta, evaluator=None):
    """-(t1+t2) ln theta + t1 p(beta t1) + t2 p(beta t2)
    - (t1+t2) p(beta (t1+t2))."""
    ev = evaluator or default_evaluator()
    return (-(t1 + t2) * math.log(theta) + ev.t_pressure(t1, beta)
            + ev.t_pressure(t2, beta) - ev.t_pressure(t1 + t2, beta))
