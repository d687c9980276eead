# -*- coding: utf-8 -*-
"""Log-domain q-integers, q-factorials and inversion statistics of permutations."""

import itertools
import math
from collections import namedtuple

import numpy as np
from scipy.special import gammaln

from .numerics import fsum, log_expm1_ratio

ERR_Q_DOMAIN = "mallowsld: q must be strictly positive, got {}"
ERR_NEGATIVE_N = "mallowsld: n must be a nonnegative integer, got {}"
ERR_K_RANGE = "mallowsld: k must satisfy 0 <= k <= n, got k={} n={}"
# |h| = |ln q| below which the second order expansion of ln[k]_q is used
NEAR_ONE = 1e-8


class InvalidPermutation(ValueError):
    pass


class LogValue(namedtuple('LogValue', ['sign', 'logmag'])):
    """A real number kept as (sign, ln|value|); zero is (0, -inf).

    exp() returns the value to a relative error of about |logmag| * 2**-52,
    the rounding of logmag itself; see `rtol`.
    """
    __slots__ = ()

    @classmethod
    def from_float(cls, value):
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def zero(cls):
        return cls(0, -math.inf)

    def __mul__(self, other):
        if not isinstance(other, LogValue):
            return NotImplemented
        sign = self.sign * other.sign
        if sign == 0:
            return LogValue.zero()
        return LogValue(sign, self.logmag + other.logmag)

    def __truediv__(self, other):
        if not isinstance(other, LogValue):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("mallowsld: division by a zero LogValue")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.sign * other.sign, self.logmag - other.logmag)

    def __pow__(self, exponent):
        if self.sign == 0:
            return LogValue.zero() if exponent > 0 else LogValue(1, 0.0)
        if self.sign < 0 and exponent % 2:
            return LogValue(-1, self.logmag * exponent)
        return LogValue(1, self.logmag * exponent)

    @property
    def rtol(self):
        """Relative error bound of exp(): 1e-14, or the ulp of logmag
        carried through exp when that is larger."""
        if self.sign == 0:
            return 0.0
        return max(1e-14, (abs(self.logmag) + 2.0) * 2.0 ** -52)

    def exp(self):
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    def __float__(self):
        return self.exp()


class Permutation(object):
    """A bijection of {1..n}, stored as its one-line image."""

    ERR_NOT_BIJECTION = "mallowsld: {} is not a bijection of 1..{}"

    def __init__(self, image):
        arr = np.array(image, dtype=np.int64).reshape(-1)
        n = arr.size
        if not np.array_equal(np.sort(arr), np.arange(1, n + 1)):
            raise InvalidPermutation(
                self.ERR_NOT_BIJECTION.format(list(image), n))
        arr.setflags(write=False)
        self._image = arr

    @classmethod
    def identity(cls, n):
        return cls(np.arange(1, n + 1))

    @property
    def image(self):
        return self._image

    def inverse(self):
        inv_image = np.empty_like(self._image)
        inv_image[self._image - 1] = np.arange(1, len(self) + 1)
        return Permutation(inv_image)

    def __len__(self):
        return self._image.size

    def __iter__(self):
        return iter(int(v) for v in self._image)

    def __getitem__(self, i):
        return int(self._image[i])

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self._image, other._image)

    def __hash__(self):
        return hash(self._image.tobytes())

    def __repr__(self):
        return "Permutation({})".format(list(self))


# ==================== #
#   Inversion counts   #
# ==================== #

def _merge_count(seq):
    # bottom-up merge sort counting the pairs it has to cross
    src = list(seq)
    n = len(src)
    dst = [0] * n
    count = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if src[j] < src[i]:
                    dst[k] = src[j]
                    j += 1
                    count += mid - i
                else:
                    dst[k] = src[i]
                    i += 1
                k += 1
            dst[k:k + mid - i] = src[i:mid]
            k += mid - i
            dst[k:hi] = src[j:hi]
        src, dst = dst, src
        width *= 2
    return count


def inv(pi):
    """Number of pairs i < j with pi_i > pi_j, in O(n log n)."""
    return _merge_count(int(v) for v in _as_image(pi))


def inv_naive(pi):
    """Quadratic pair scan; kept as an independent check of `inv`."""
    a = _as_image(pi)
    return int(np.triu(a[:, None] > a[None, :], k=1).sum())


def inversion_counts(perms):
    """Inversion numbers of every row of an (N, n) array of permutations."""
    perms = np.asarray(perms)
    counts = np.zeros(perms.shape[0], dtype=np.int64)
    for i in range(perms.shape[1] - 1):
        counts += (perms[:, i:i + 1] > perms[:, i + 1:]).sum(axis=1)
    return counts


def permutations(n):
    """All of S_n in lexicographic order, as an (n!, n) array of images."""
    perms = np.array(list(itertools.permutations(range(1, n + 1))),
                     dtype=np.int64)
    return perms.reshape(math.factorial(n), n)


def _as_image(pi):
    if isinstance(pi, Permutation):
        return pi.image
    return Permutation(pi).image


# ================== #
#   Shuffles         #
# ================== #

ShuffleSplit = namedtuple('ShuffleSplit', ['shuffle', 'lower', 'upper'])


def shuffles(n, k):
    """Sh_{n,k}: permutations increasing on positions 1..k and k+1..n."""
    _check_k(n, k)
    values = range(1, n + 1)
    rows = []
    for head in itertools.combinations(values, k):
        chosen = set(head)
        rows.append(list(head) + [v for v in values if v not in chosen])
    return np.array(rows, dtype=np.int64).reshape(len(rows), n)


def _ranks(block):
    return np.argsort(np.argsort(block, kind='stable'), kind='stable') + 1


def shuffle_decomposition(pi, k):
    """Split pi into a shuffle of Sh_{n,k} and the relative orders of its
    two position blocks, so that inv(pi) is the sum of the three inversion
    numbers."""
    a = _as_image(pi)
    _check_k(a.size, k)
    head, tail = a[:k], a[k:]
    shuffle = Permutation(np.concatenate((np.sort(head), np.sort(tail))))
    return ShuffleSplit(shuffle, Permutation(_ranks(head)),
                        Permutation(_ranks(tail)))


# ======================= #
#   q-integer arithmetic  #
# ======================= #

def _check_q(q):
    if not q > 0:
        raise ValueError(ERR_Q_DOMAIN.format(q))


def _check_n(n):
    if int(n) != n or n < 0:
        raise ValueError(ERR_NEGATIVE_N.format(n))


def _check_k(n, k):
    _check_n(n)
    if not 0 <= k <= n:
        raise ValueError(ERR_K_RANGE.format(k, n))


def log_q_integer(k, q):
    """ln [k]_q with [k]_q = (1 - q^k)/(1 - q)."""
    _check_q(q)
    _check_n(k)
    if k == 0:
        return LogValue.zero()
    h = math.log(q)
    return LogValue(1, math.log(k) + float(log_expm1_ratio(k * h))
                    - float(log_expm1_ratio(h)))


def reduced_log_factorial_h(n, h):
    """ln({n}!) = ln([n]_q!/n!) written in h = ln q."""
    _check_n(n)
    n = int(n)
    if n <= 1 or h == 0:
        return 0.0
    if abs(h) < NEAR_ONE and n * abs(h) < 1e-3:
        # sum over k of (k-1)h/2 + (k^2-1)h^2/24
        squares = n * (n + 1) * (2 * n + 1) / 6.0 - n
        return h * n * (n - 1) / 4.0 + h * h * squares / 24.0
    k = np.arange(1, n + 1, dtype=float)
    return fsum(log_expm1_ratio(k * h)) - n * float(log_expm1_ratio(h))


def log_reduced_q_factorial(n, q):
    """ln({n}!) = ln([n]_q!) - ln(n!)."""
    _check_q(q)
    return LogValue(1, reduced_log_factorial_h(n, math.log(q)))


def log_q_factorial(n, q):
    """ln([n]_q!); reduces to ln(n!) at q = 1."""
    _check_q(q)
    _check_n(n)
    return LogValue(1, float(gammaln(n + 1))
                    + reduced_log_factorial_h(n, math.log(q)))


def log_gaussian_binomial(n, k, q):
    """ln of the Gaussian binomial [n choose k]_q."""
    _check_q(q)
    _check_k(n, k)
    lo, hi = sorted((k, n - k))
    h = math.log(q)
    log_binom = float(gammaln(n + 1) - gammaln(lo + 1) - gammaln(hi + 1))
    return LogValue(1, log_binom + reduced_log_factorial_h(n, h)
                    - reduced_log_factorial_h(lo, h)
                    - reduced_log_factorial_h(hi, h))


def mallows_pmf(pi, q):
    """P_{n,q}(pi) = q^inv(pi) / [n]_q!."""
    _check_q(q)
    a = _as_image(pi)
    weight = LogValue(1, inv(a) * math.log(q))
    return (weight / log_q_factorial(a.size, q)).exp()
