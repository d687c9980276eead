# -*- coding: utf-8 -*-
"""Exact samplers for Mallows permutations and mu_{n,beta} point clouds."""

import logging
import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .qcomb import Permutation, _check_q

logger = logging.getLogger(__name__)

ERR_SMALL_N = "mallowsld: n must be at least {}, got {}"
ERR_THETA = "mallowsld: theta values must lie in [0, 1], got ({}, {})"


class FenwickTree(object):
    """Binary indexed tree over positions 1..size with rank search."""

    def __init__(self, size, fill=0):
        self._size = size
        tree = [0] * (size + 1)
        if fill:
            for i in range(1, size + 1):
                tree[i] += fill
                parent = i + (i & -i)
                if parent <= size:
                    tree[parent] += tree[i]
        self._tree = tree
        self._top = 1 << (size.bit_length() - 1) if size else 0

    def __len__(self):
        return self._size

    def increment(self, index, delta):
        tree = self._tree
        while index <= self._size:
            tree[index] += delta
            index += index & -index

    def prefix_sum(self, index):
        total = 0
        tree = self._tree
        while index > 0:
            total += tree[index]
            index -= index & -index
        return total

    def find(self, rank):
        """Smallest index whose prefix sum reaches `rank`."""
        pos = 0
        step = self._top
        tree = self._tree
        while step:
            nxt = pos + step
            if nxt <= self._size and tree[nxt] < rank:
                pos = nxt
                rank -= tree[nxt]
            step >>= 1
        return pos + 1


# ================== #
#   Random streams   #
# ================== #

def make_stream(seed):
    return np.random.default_rng(np.random.SeedSequence(seed))


def spawn_streams(seed, count):
    """Independent generators for `count` replicas of one root seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


# ============================ #
#   Mallows permutations       #
# ============================ #

def displacements(q, u):
    """Truncated geometric draws: column k-1 of `u` gives j in {0..k-1}
    with P(j) proportional to q**j."""
    u = np.asarray(u, dtype=float)
    k = np.arange(1, u.shape[-1] + 1, dtype=float)
    if q == 1:
        j = np.floor(u * k)
    else:
        h = -abs(math.log(q))
        with np.errstate(divide='ignore', invalid='ignore'):
            j = np.floor(np.log1p(u * np.expm1(k * h)) / h)
        j = np.where(np.isfinite(j), j, k - 1)
        if q > 1:
            j = k - 1 - np.clip(j, 0, k - 1)
    return np.clip(j, 0, k - 1).astype(np.int64)


def _place(steps):
    # item k ends up in the (k - j_k)-th slot left free by items above it
    n = len(steps)
    free = FenwickTree(n, fill=1)
    image = [0] * n
    for k in range(n, 0, -1):
        slot = free.find(k - int(steps[k - 1]))
        free.increment(slot, -1)
        image[slot - 1] = k
    return image


def sample_mallows(n, q, rng):
    """One exact draw from P_{n,q}.

    Items 1..n are inserted in turn, item k landing with j_k smaller items
    to its right, so inv(pi) = sum of the j_k and q -> 0 gives the identity.
    """
    _check_q(q)
    if n < 1:
        raise ValueError(ERR_SMALL_N.format(1, n))
    steps = displacements(q, rng.random(n))
    return Permutation(_place(steps))


def sample_mallows_batch(n, q, size, rng):
    """`size` independent draws as a (size, n) array, for small n."""
    _check_q(q)
    if n < 1:
        raise ValueError(ERR_SMALL_N.format(1, n))
    steps = displacements(q, rng.random((size, n)))
    free = np.ones((size, n), dtype=bool)
    perms = np.zeros((size, n), dtype=np.int64)
    rows = np.arange(size)
    for k in range(n, 0, -1):
        target = k - steps[:, k - 1]
        slot = np.argmax(np.cumsum(free, axis=1) == target[:, None], axis=1)
        free[rows, slot] = False
        perms[rows, slot] = k
    return perms


def expected_inversions(n, q):
    """E[inv] under P_{n,q} as the sum of the truncated geometric means."""
    _check_q(q)
    total = 0.0
    for k in range(2, n + 1):
        j = np.arange(k, dtype=float)
        w = np.exp(j * math.log(q) - np.max(j * math.log(q)))
        total += float(j @ w / w.sum())
    return total


# ============================ #
#   Point configurations       #
# ============================ #

class SplitCounts(namedtuple('SplitCounts', ['n11', 'n12', 'n21', 'n22'])):
    __slots__ = ()

    @property
    def n(self):
        return self.n11 + self.n12 + self.n21 + self.n22


class PointConfiguration(object):
    """n points of [0,1]^2 with pairwise distinct x and y coordinates."""

    ERR_SHAPE = "mallowsld: points must form an (n, 2) array"
    ERR_RANGE = "mallowsld: coordinates must lie in [0, 1]"
    ERR_TIES = "mallowsld: coordinates must be pairwise distinct"

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(self.ERR_SHAPE)
        if pts.size and (pts.min() < 0 or pts.max() > 1):
            raise ValueError(self.ERR_RANGE)
        for col in (pts[:, 0], pts[:, 1]):
            if np.unique(col).size != col.size:
                raise ValueError(self.ERR_TIES)
        pts.setflags(write=False)
        self.points = pts

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def __len__(self):
        return self.points.shape[0]

    def permuted(self, order):
        return PointConfiguration(self.points[np.asarray(order)])


def _distinct_sorted_uniforms(n, rng):
    values = np.sort(rng.random(n))
    while True:
        dup = np.flatnonzero(np.diff(values) == 0)
        if not dup.size:
            return values
        logger.debug("resampling %d tied coordinates", dup.size)
        values[dup] = rng.random(dup.size)
        values.sort()


def sample_configuration(n, beta, rng):
    """One draw from mu_{n,beta}: the k-th smallest x is paired with the
    pi_k-th smallest y for pi ~ P_{n,q}, q = exp(-beta/(n-1))."""
    if n < 2:
        raise ValueError(ERR_SMALL_N.format(2, n))
    q = math.exp(-beta / (n - 1.0))
    pi = sample_mallows(n, q, rng)
    x = _distinct_sorted_uniforms(n, rng)
    y = _distinct_sorted_uniforms(n, rng)
    points = np.column_stack((x, y[pi.image - 1]))
    return PointConfiguration(points[rng.permutation(n)])


def _check_thetas(theta1, theta2):
    if not (0 <= theta1 <= 1 and 0 <= theta2 <= 1):
        raise ValueError(ERR_THETA.format(theta1, theta2))


def four_square_counts(cfg, theta1, theta2):
    """Counts in L_i(theta1) x L_j(theta2), L_1 = [0, theta], L_2 = (theta, 1]."""
    _check_thetas(theta1, theta2)
    left = cfg.x <= theta1
    low = cfg.y <= theta2
    return SplitCounts(int(np.sum(left & low)), int(np.sum(left & ~low)),
                       int(np.sum(~left & low)), int(np.sum(~left & ~low)))


def empirical_cdf_at(cfg, theta1, theta2):
    return four_square_counts(cfg, theta1, theta2).n11 / float(len(cfg))


def empirical_cdf_replicas(n, beta, theta1, theta2, seed, replicas,
                           threads=1):
    """n11/n over independent replicas, one spawned stream per replica.

    The result depends on the seed only, never on `threads`.
    """
    _check_thetas(theta1, theta2)
    streams = spawn_streams(seed, replicas)

    def run(rng):
        return empirical_cdf_at(sample_configuration(n, beta, rng),
                                theta1, theta2)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(run, streams))
    else:
        values = [run(rng) for rng in streams]
    logger.info("n=%d beta=%g: %d replicas done", n, beta, replicas)
    return np.array(values)
