# -*- coding: utf-8 -*-
"""Probability measures on the unit square discretized on a uniform grid."""

import logging

import numpy as np

from .numerics import fsum
from .pressure import default_evaluator

logger = logging.getLogger(__name__)

ERR_GRID_MISMATCH = "mallowsld: distribution functions must share a grid, " \
    "got m={} and m={}"
ERR_NOT_STANDARD = "mallowsld: measure to renormalize must have uniform " \
    "marginals (deviation {:.3g})"
ERR_CSV_HEADER = "mallowsld: expected a `m=<int>` header, got {!r}"


class MarginalCDF(object):
    """Values F(k/m), k = 0..m, of a distribution function on [0, 1],
    interpolated linearly in between."""

    ERR_SHAPE = "mallowsld: a distribution function needs at least two nodes"
    ERR_ENDPOINTS = "mallowsld: distribution function must run from 0 to 1"
    ERR_MONOTONE = "mallowsld: distribution function is not nondecreasing"

    def __init__(self, values):
        values = np.array(values, dtype=float).reshape(-1)
        if values.size < 2:
            raise ValueError(self.ERR_SHAPE)
        if abs(values[0]) > 1e-12 or abs(values[-1] - 1) > 1e-12:
            raise ValueError(self.ERR_ENDPOINTS)
        if np.any(np.diff(values) < 0):
            raise ValueError(self.ERR_MONOTONE)
        values[0], values[-1] = 0.0, 1.0
        values.setflags(write=False)
        self.values = values

    @classmethod
    def identity(cls, m):
        return cls(np.linspace(0.0, 1.0, m + 1))

    @classmethod
    def from_masses(cls, masses):
        cdf = np.concatenate(([0.0], np.cumsum(masses)))
        cdf /= cdf[-1]
        return cls(cdf)

    @property
    def m(self):
        return self.values.size - 1

    @property
    def masses(self):
        return np.diff(self.values)

    @property
    def zero_bands(self):
        return tuple(int(i) for i in np.flatnonzero(self.masses == 0))

    def __call__(self, a):
        grid = np.linspace(0.0, 1.0, self.m + 1)
        return np.interp(a, grid, self.values)[()]


def generalized_inverse(F, x):
    """inf{a : F(a) >= x} for the piecewise linear F.

    On a flat stretch of F this returns its left end.
    """
    values = F.values
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    k = np.clip(np.searchsorted(values, x, side='left'), 1, F.m)
    lo, hi = values[k - 1], values[k]
    with np.errstate(divide='ignore', invalid='ignore'):
        frac = np.where(hi > lo, (x - lo) / (hi - lo), 0.0)
    out = (k - 1 + np.clip(frac, 0.0, 1.0)) / F.m
    return np.where(x <= values[0], 0.0, out)[()]


class GridMeasure(object):
    """Cell masses mass[i, j] of ((i)/m, (i+1)/m] x ((j)/m, (j+1)/m], the
    first index running along x, with uniform density inside each cell.

    `zero_bands` carries the (axis, band) pairs where a standardization met
    a marginal without mass.
    """

    ERR_SHAPE = "mallowsld: cell masses must form a square m x m array"
    ERR_NEGATIVE = "mallowsld: cell masses must be nonnegative"
    ERR_TOTAL = "mallowsld: cell masses must sum to 1, got {!r}"

    def __init__(self, mass, zero_bands=()):
        mass = np.array(mass, dtype=float)
        if mass.ndim != 2 or mass.shape[0] != mass.shape[1] \
                or mass.shape[0] == 0:
            raise ValueError(self.ERR_SHAPE)
        if np.any(mass < 0):
            raise ValueError(self.ERR_NEGATIVE)
        total = mass.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(self.ERR_TOTAL.format(total))
        mass.setflags(write=False)
        self.mass = mass
        self.zero_bands = tuple(zero_bands)

    @classmethod
    def uniform(cls, m):
        return cls(np.full((m, m), 1.0 / (m * m)))

    @classmethod
    def product(cls, x_masses, y_masses):
        px = np.asarray(x_masses, dtype=float)
        py = np.asarray(y_masses, dtype=float)
        return cls(np.outer(px / px.sum(), py / py.sum()))

    @classmethod
    def from_density(cls, f, m):
        """Midpoint rule masses of a density f(x, y), renormalized."""
        mid = (np.arange(m) + 0.5) / m
        mass = np.clip(f(mid[:, None], mid[None, :]), 0.0, None)
        mass = np.broadcast_to(mass, (m, m))
        return cls(mass / mass.sum())

    @classmethod
    def from_node_cdf(cls, cdf, zero_bands=()):
        """Cell masses from the (m+1) x (m+1) table of mu([0,x_k] x [0,y_l])."""
        mass = np.diff(np.diff(np.asarray(cdf, dtype=float), axis=0), axis=1)
        mass = np.clip(mass, 0.0, None)
        return cls(mass / mass.sum(), zero_bands)

    @property
    def m(self):
        return self.mass.shape[0]

    def node_cdf(self):
        cdf = np.zeros((self.m + 1, self.m + 1))
        cdf[1:, 1:] = np.cumsum(np.cumsum(self.mass, axis=0), axis=1)
        return cdf

    def joint_cdf(self, x, y):
        """mu([0,x] x [0,y]) by bilinear interpolation of the node values."""
        cdf = self.node_cdf()
        m = self.m
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0) * m
        y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0) * m
        i = np.minimum(np.floor(x).astype(int), m - 1)
        j = np.minimum(np.floor(y).astype(int), m - 1)
        fx, fy = x - i, y - j
        return ((1 - fx) * (1 - fy) * cdf[i, j] + fx * (1 - fy) * cdf[i + 1, j]
                + (1 - fx) * fy * cdf[i, j + 1]
                + fx * fy * cdf[i + 1, j + 1])[()]

    def marginal_x(self):
        return MarginalCDF(_cdf_of(self.mass.sum(axis=1)))

    def marginal_y(self):
        return MarginalCDF(_cdf_of(self.mass.sum(axis=0)))

    def total_variation(self, other):
        return 0.5 * float(np.abs(self.mass - other.mass).sum())

    def write_csv(self, stream):
        stream.write("m={}\n".format(self.m))
        for (i, j), p in np.ndenumerate(self.mass):
            stream.write("{},{},{:.17g}\n".format(i, j, p))

    @classmethod
    def read_csv(cls, stream):
        header = stream.readline().strip()
        if not header.startswith("m="):
            raise ValueError(ERR_CSV_HEADER.format(header))
        m = int(header[2:])
        mass = np.zeros((m, m))
        for line in stream:
            if line.strip():
                i, j, p = line.split(",")
                mass[int(i), int(j)] = float(p)
        return cls(mass)


def _cdf_of(masses):
    cdf = np.concatenate(([0.0], np.cumsum(masses)))
    cdf[-1] = 1.0
    return np.minimum(cdf, 1.0)


# =============================== #
#   Entropy, energy, rate         #
# =============================== #

def relative_entropy(mu):
    """S(mu | Lebesgue) = -sum p ln(p m^2), 0 ln 0 = 0; never positive."""
    p = mu.mass[mu.mass > 0]
    return -fsum(p * np.log(p * mu.m * mu.m))


def energy(mu):
    """Half the mu x mu probability of a discordant pair of points.

    Cells strictly to the lower right of one another are discordant with
    certainty; cells sharing a row or column band are discordant half of
    the time.
    """
    p = mu.mass
    beyond = np.cumsum(p[::-1], axis=0)[::-1] - p
    lower_right = np.cumsum(beyond, axis=1) - beyond
    discordant = 2.0 * fsum(p * lower_right)
    aligned = fsum(p.sum(axis=1) ** 2) + fsum(p.sum(axis=0) ** 2) \
        - fsum(p * p)
    return 0.5 * (discordant + 0.5 * aligned)


def rate_function(mu, beta, evaluator=None):
    """I_beta(mu) = -S(mu) + beta E(mu) + p(beta)."""
    evaluator = evaluator or default_evaluator()
    return -relative_entropy(mu) + beta * energy(mu) + evaluator.pressure(beta)


def marginal_x(mu):
    return mu.marginal_x()


def marginal_y(mu):
    return mu.marginal_y()


# =============================== #
#   Standardization               #
# =============================== #

def standardize(mu):
    """The measure with uniform marginals whose rectangles [0,x] x [0,y]
    carry the mass of mu on [0, FX^I(x)] x [0, FY^I(y)]."""
    fx, fy = mu.marginal_x(), mu.marginal_y()
    nodes = np.linspace(0.0, 1.0, mu.m + 1)
    gx = generalized_inverse(fx, nodes)
    gy = generalized_inverse(fy, nodes)
    cdf = mu.joint_cdf(gx[:, None], gy[None, :])
    cdf[-1, :] = nodes
    cdf[:, -1] = nodes
    bands = [('x', b) for b in fx.zero_bands] + \
        [('y', b) for b in fy.zero_bands]
    if bands:
        logger.info("standardizing across %d empty marginal bands", len(bands))
    return GridMeasure.from_node_cdf(cdf, bands)


def renormalize(nu0, GX, GY):
    """The measure nu with nu([0,x] x [0,y]) = nu0([0,GX(x)] x [0,GY(y)])."""
    GX = GX if isinstance(GX, MarginalCDF) else MarginalCDF(GX)
    GY = GY if isinstance(GY, MarginalCDF) else MarginalCDF(GY)
    if GX.m != GY.m:
        raise ValueError(ERR_GRID_MISMATCH.format(GX.m, GY.m))
    uniform = np.linspace(0.0, 1.0, nu0.m + 1)
    deviation = max(np.abs(nu0.marginal_x().values - uniform).max(),
                    np.abs(nu0.marginal_y().values - uniform).max())
    if deviation > 1e-8:
        raise ValueError(ERR_NOT_STANDARD.format(deviation))
    cdf = nu0.joint_cdf(GX.values[:, None], GY.values[None, :])
    cdf[-1, :] = GY.values
    cdf[:, -1] = GX.values
    return GridMeasure.from_node_cdf(cdf)


# =============================== #
#   One-dimensional helpers       #
# =============================== #

def line_entropy(masses):
    """S(mu | Lebesgue) of a piecewise uniform law on m equal cells."""
    p = np.asarray(masses, dtype=float)
    m = p.size
    p = p[p > 0]
    return -fsum(p * np.log(p * m))


def discordance_probability(masses, other_masses):
    """P(X2 < X1) for independent X1 ~ masses, X2 ~ other_masses."""
    p = np.asarray(masses, dtype=float)
    r = np.asarray(other_masses, dtype=float)
    below = np.cumsum(r) - r
    return fsum(p * below) + 0.5 * fsum(p * r)


def two_square_lhs(masses, other_masses, theta, beta):
    """-theta S(mu) - (1-theta) S(mu~) + beta theta (1-theta) P(X2 < X1)."""
    return (-theta * line_entropy(masses)
            - (1 - theta) * line_entropy(other_masses)
            + beta * theta * (1 - theta)
            * discordance_probability(masses, other_masses))


def two_square_lhs_scaled(masses, other_masses, t1, t2, beta):
    """-t1 S(mu1) - t2 S(mu2) + beta t1 t2 P(X2 < X1)."""
    return (-t1 * line_entropy(masses) - t2 * line_entropy(other_masses)
            + beta * t1 * t2 * discordance_probability(masses, other_masses))
