# -*- coding: utf-8 -*-
"""Exact law of the four quadrant counts of a mu_{n,beta} configuration."""

import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import gammaln

from ..numerics import fsum
from ..qcomb import inversion_counts, permutations, reduced_log_factorial_h
from ..sampler import SplitCounts
from .variational import ERR_THETA_OPEN

logger = logging.getLogger(__name__)

ERR_COUNTS = "mallowsld: counts {} must be nonnegative and sum to n={}"
ERR_SMALL_N = "mallowsld: n must be at least 2, got {}"
ERR_ROUNDING = "mallowsld: masses {} cannot be rounded to counts of n={}"
# largest n the enumeration oracle will run S_n for
ENUMERATION_BUDGET = 9


class EnumerationBudgetError(ValueError):
    pass


def _check(counts, theta1, theta2, n):
    if n < 2:
        raise ValueError(ERR_SMALL_N.format(n))
    counts = SplitCounts(*(int(c) for c in counts))
    if min(counts) < 0 or counts.n != n:
        raise ValueError(ERR_COUNTS.format(tuple(counts), n))
    if not (0 < theta1 < 1 and 0 < theta2 < 1):
        raise ValueError(ERR_THETA_OPEN.format(theta1, theta2))
    return counts


def _areas(theta1, theta2):
    return (theta1 * theta2, theta1 * (1 - theta2), (1 - theta1) * theta2,
            (1 - theta1) * (1 - theta2))


def log_discrete_four_square_prob(counts, theta1, theta2, n, beta):
    """ln P(n11, n12, n21, n22) under mu_{n,beta}, q = exp(-beta/(n-1)).

    Multinomial with cell areas, times q^(n12 n21), times the ratio of
    reduced q-factorials {a}!{n-a}!{b}!{n-b}! / ({n11}!{n12}!{n21}!{n22}!{n}!)
    where a, b are the row and column totals.
    """
    n11, n12, n21, n22 = _check(counts, theta1, theta2, n)
    h = -beta / (n - 1.0)
    red = functools.partial(reduced_log_factorial_h, h=h)
    cells = (n11, n12, n21, n22)
    log_multinomial = float(gammaln(n + 1)) - sum(float(gammaln(c + 1))
                                                  for c in cells)
    log_cells = sum(c * math.log(area)
                    for c, area in zip(cells, _areas(theta1, theta2)) if c)
    log_ratio = (red(n11 + n12) + red(n21 + n22) + red(n11 + n21)
                 + red(n12 + n22) - sum(red(c) for c in cells) - red(n))
    return log_multinomial + log_cells + n12 * n21 * h + log_ratio


def discrete_four_square_prob(counts, theta1, theta2, n, beta):
    return math.exp(log_discrete_four_square_prob(counts, theta1, theta2, n,
                                                  beta))


def all_counts(n):
    """Every SplitCounts with total n, n11 varying slowest."""
    for n11 in range(n + 1):
        for n12 in range(n - n11 + 1):
            for n21 in range(n - n11 - n12 + 1):
                yield SplitCounts(n11, n12, n21, n - n11 - n12 - n21)


def round_counts(masses, n):
    """Nearest integer counts for n times the masses, ties rounded down,
    with n11 absorbing the difference."""
    rest = [int(math.ceil(n * t - 0.5)) for t in masses[1:]]
    n11 = n - sum(rest)
    if n11 < 0 or min(rest) < 0:
        raise ValueError(ERR_ROUNDING.format(tuple(masses), n))
    return SplitCounts(n11, *rest)


# ========================= #
#   Enumeration oracle      #
# ========================= #

def _overlap_counts(perms, n):
    # table[a, b, c, k]: permutations with inv = k and
    # #{i <= a : pi_i <= b} = c
    max_inv = n * (n - 1) // 2
    invs = inversion_counts(perms)
    onehot = np.zeros((perms.shape[0], n, n), dtype=np.int8)
    rows = np.arange(perms.shape[0])[:, None]
    onehot[rows, np.arange(n)[None, :], perms - 1] = 1
    overlap = np.cumsum(np.cumsum(onehot, axis=1, dtype=np.int16), axis=2,
                        dtype=np.int16)
    table = np.zeros((n + 1, n + 1, n + 1, max_inv + 1), dtype=np.int64)
    table[0, :, 0, :] += np.bincount(invs, minlength=max_inv + 1)
    table[1:, 0, 0, :] += np.bincount(invs, minlength=max_inv + 1)
    width = max_inv + 1
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            idx = overlap[:, a - 1, b - 1].astype(np.int64) * width + invs
            table[a, b] += np.bincount(
                idx, minlength=(n + 1) * width).reshape(n + 1, width)
    return table


@functools.lru_cache(maxsize=None)
def _count_table(n, threads=1):
    perms = permutations(n)
    # lexicographic order: each leading value owns a contiguous block
    blocks = np.split(perms, n) if n > 1 else [perms]
    logger.info("enumerating %d permutations of size %d", perms.shape[0], n)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda p: _overlap_counts(p, n), blocks))
    else:
        parts = [_overlap_counts(p, n) for p in blocks]
    return functools.reduce(np.add, parts)


@functools.lru_cache(maxsize=64)
def overlap_table(n, h, threads=1):
    """H[a, b, c] = P_{n,q}(#{i <= a : pi_i <= b} = c) with h = ln q."""
    if n > ENUMERATION_BUDGET:
        raise EnumerationBudgetError(
            "mallowsld: enumeration oracle is limited to n <= {}, got {}"
            .format(ENUMERATION_BUDGET, n))
    table = _count_table(n, threads)
    ks = np.arange(table.shape[-1], dtype=float)
    log_weights = ks * h
    log_weights -= float(gammaln(n + 1)) + reduced_log_factorial_h(n, h)
    weights = np.exp(log_weights)
    out = np.empty(table.shape[:3])
    for idx in np.ndindex(*out.shape):
        out[idx] = fsum(table[idx] * weights)
    return out


def _binomial_pmf(n, theta, k):
    return math.comb(n, k) * theta ** k * (1 - theta) ** (n - k)


def discrete_four_square_oracle(counts, theta1, theta2, n, beta, threads=1):
    """The same probability by summing P_{n,q} over all of S_n.

    The numbers a, b of x and y coordinates below theta1, theta2 are
    independent binomials; the permutation decides how many of the a
    leftmost points are among the b lowest.
    """
    if n > ENUMERATION_BUDGET:
        raise EnumerationBudgetError(
            "mallowsld: enumeration oracle is limited to n <= {}, got {}"
            .format(ENUMERATION_BUDGET, n))
    n11, n12, n21, n22 = _check(counts, theta1, theta2, n)
    a, b = n11 + n12, n11 + n21
    table = overlap_table(n, -beta / (n - 1.0), threads)
    return (_binomial_pmf(n, theta1, a) * _binomial_pmf(n, theta2, b)
            * table[a, b, n11])
