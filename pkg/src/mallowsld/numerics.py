# -*- coding: utf-8 -*-
"""Overflow-free logarithms of exponential differences."""

import math

import numpy as np

# below this magnitude ln((e^x - 1)/x) is taken from its Taylor series
SERIES_CUTOFF = 1e-4


def log_abs_expm1(x):
    """ln|e^x - 1| for scalars or arrays, -inf at x = 0."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    with np.errstate(divide='ignore'):
        out = np.log(-np.expm1(-a)) + np.maximum(x, 0.0)
    return out[()]


def log_expm1_ratio(x):
    """ln((e^x - 1)/x), extended by continuity to 0 at x = 0.

    The pressure integrand ln((1 - e^(-y))/y) is log_expm1_ratio(-y).
    """
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    a = np.abs(safe)
    direct = np.log(-np.expm1(-a)) + np.maximum(safe, 0.0) - np.log(a)
    x2 = x * x
    series = x / 2.0 + x2 / 24.0 - x2 * x2 / 2880.0
    return np.where(small, series, direct)[()]


def xlogx_ratio(t, area):
    """t*ln(t/area) with 0*ln(0) = 0."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        out = np.where(t > 0, t * np.log(t / area), 0.0)
    return out[()]


def fsum(values):
    """Exactly rounded sum, independent of summation order."""
    return math.fsum(np.ravel(values))
