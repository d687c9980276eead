import io
import math
import unittest

import numpy as np

from mallowsld.measures import (GridMeasure, MarginalCDF,
                                discordance_probability, energy,
                                generalized_inverse, line_entropy,
                                marginal_x, marginal_y, rate_function,
                                relative_entropy, renormalize, standardize,
                                two_square_lhs, two_square_lhs_scaled)
from mallowsld.foursquare import discretize_density, two_square_bound_rhs
from mallowsld.pressure import pressure, t_pressure

_rng = None


def setUpModule():
    global _rng
    _rng = np.random.default_rng(7)


def random_measure(m):
    mass = _rng.random((m, m)) ** 3
    return GridMeasure(mass / mass.sum())


def smooth_density(x, y):
    return ((1 + 0.8 * x) * (1 + 0.5 * y * y)
            * (1 + 0.6 * np.sin(math.pi * x) * np.cos(math.pi * y)))


def random_smooth_density(rng):
    a, b = rng.uniform(0.0, 1.0, size=2)
    c = rng.uniform(-0.6, 0.6)
    k, l = rng.integers(1, 3, size=2)

    def f(x, y):
        return ((1 + a * x) * (1 + b * y * y)
                * (1 + c * np.sin(k * math.pi * x) * np.cos(l * math.pi * y)))
    return f


def sample_points(mu, size, rng):
    cells = rng.choice(mu.m * mu.m, size=size, p=mu.mass.ravel())
    i, j = np.divmod(cells, mu.m)
    return ((i + rng.random(size)) / mu.m, (j + rng.random(size)) / mu.m)


class Construction(unittest.TestCase):

    def test_rejects_bad_mass(self):
        with self.assertRaises(ValueError):
            GridMeasure(np.full((2, 3), 1 / 6.0))
        with self.assertRaises(ValueError):
            GridMeasure([[0.5, 0.6], [0.0, -0.1]])
        with self.assertRaises(ValueError):
            GridMeasure([[0.5, 0.5], [0.5, 0.5]])

    def test_total_tolerance(self):
        with self.assertRaises(ValueError):
            GridMeasure([[0.25 + 1e-11, 0.25], [0.25, 0.25]])
        mu = GridMeasure([[0.25 + 1e-13, 0.25], [0.25, 0.25]])
        self.assertEqual(mu.m, 2)

    def test_marginal_cdf_validation(self):
        with self.assertRaises(ValueError):
            MarginalCDF([0.0, 0.7, 0.6, 1.0])
        with self.assertRaises(ValueError):
            MarginalCDF([0.1, 1.0])
        F = MarginalCDF.from_masses([1, 0, 3])
        self.assertEqual(F.m, 3)
        self.assertEqual(F.zero_bands, (1,))
        self.assertAlmostEqual(F(0.5), 0.25, places=15)

    def test_node_cdf_and_interpolation(self):
        mu = GridMeasure([[0.1, 0.2], [0.3, 0.4]])
        cdf = mu.node_cdf()
        self.assertAlmostEqual(cdf[1, 1], 0.1, places=15)
        self.assertAlmostEqual(cdf[2, 1], 0.4, places=15)
        self.assertAlmostEqual(cdf[2, 2], 1.0, places=15)
        self.assertAlmostEqual(mu.joint_cdf(0.25, 0.25), 0.025, places=15)
        self.assertAlmostEqual(mu.joint_cdf(1.0, 0.5), 0.4, places=15)

    def test_csv_round_trip(self):
        mu = random_measure(5)
        buf = io.StringIO()
        mu.write_csv(buf)
        buf.seek(0)
        self.assertEqual(GridMeasure.read_csv(buf).mass.tolist(),
                         mu.mass.tolist())

    def test_csv_header(self):
        with self.assertRaises(ValueError):
            GridMeasure.read_csv(io.StringIO("0,0,1\n"))


class Entropy(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(relative_entropy(GridMeasure.uniform(16)), 0.0)
        half = GridMeasure([[0.5, 0.0], [0.0, 0.5]])
        self.assertAlmostEqual(relative_entropy(half), -math.log(2), places=15)
        mass = np.zeros((8, 8))
        mass[3, 5] = 1.0
        self.assertAlmostEqual(relative_entropy(GridMeasure(mass)),
                               -math.log(64), places=14)

    def test_never_positive(self):
        for m in (1, 3, 10):
            self.assertLessEqual(relative_entropy(random_measure(m)), 0.0)

    def test_line_entropy(self):
        self.assertEqual(line_entropy(np.full(10, 0.1)), 0.0)
        self.assertAlmostEqual(line_entropy([0.5, 0.5, 0, 0]), -math.log(2),
                               places=15)


class Energy(unittest.TestCase):

    def test_examples(self):
        self.assertAlmostEqual(energy(GridMeasure.uniform(7)), 0.25,
                               places=14)
        mass = np.zeros((5, 5))
        mass[1, 3] = 1.0
        self.assertAlmostEqual(energy(GridMeasure(mass)), 0.25, places=15)
        for m in (2, 6):
            diagonal = GridMeasure(np.eye(m) / m)
            self.assertAlmostEqual(energy(diagonal), 1 / (4.0 * m), places=15)
        anti = GridMeasure([[0.0, 0.5], [0.5, 0.0]])
        self.assertAlmostEqual(energy(anti), 0.375, places=15)

    def test_monte_carlo(self):
        rng = np.random.default_rng(11)
        mu = random_measure(4)
        size = 400000
        x1, y1 = sample_points(mu, size, rng)
        x2, y2 = sample_points(mu, size, rng)
        hits = ((x1 - x2) * (y1 - y2) < 0).astype(float)
        sigma = hits.std() / math.sqrt(size)
        self.assertLess(abs(0.5 * hits.mean() - energy(mu)), 4 * 0.5 * sigma)

    def test_discordance_probability(self):
        self.assertAlmostEqual(discordance_probability(np.full(4, 0.25),
                                                       np.full(4, 0.25)),
                               0.5, places=15)
        self.assertEqual(discordance_probability([0, 1], [1, 0]), 1.0)
        self.assertEqual(discordance_probability([1, 0], [0, 1]), 0.0)


class RateFunction(unittest.TestCase):

    def test_uniform(self):
        self.assertEqual(rate_function(GridMeasure.uniform(8), 0.0), 0.0)
        for beta in (-3.0, 1.0, 4.0):
            self.assertAlmostEqual(rate_function(GridMeasure.uniform(8), beta),
                                   beta / 4.0 + pressure(beta), places=12)

    def test_nonnegative(self):
        for m in (2, 5, 12):
            for beta in (-3.0, 0.0, 3.0):
                for _ in range(5):
                    self.assertGreaterEqual(
                        rate_function(random_measure(m), beta), -1e-12)

    def test_nonnegative_random_beta(self):
        for _ in range(1000):
            m = int(_rng.integers(1, 17))
            beta = _rng.uniform(-5.0, 5.0)
            mu = random_measure(m)
            self.assertGreaterEqual(rate_function(mu, beta), -1e-12,
                                    "m={} beta={}".format(m, beta))

    def test_bounded_below_by_marginal_entropies(self):
        for _ in range(200):
            m = int(_rng.integers(2, 17))
            beta = _rng.uniform(-5.0, 5.0)
            # skewed marginals make the bound bite
            weights = np.outer(_rng.random(m) ** 4, _rng.random(m) ** 4)
            mass = weights * _rng.random((m, m))
            mu = GridMeasure(mass / mass.sum())
            bound = (-line_entropy(mu.marginal_x().masses)
                     - line_entropy(mu.marginal_y().masses))
            self.assertGreaterEqual(rate_function(mu, beta), bound - 1e-6,
                                    "m={} beta={}".format(m, beta))

    def test_vanishes_at_limiting_density(self):
        for beta in (-2.0, 2.0):
            rates = [rate_function(discretize_density(beta, m), beta)
                     for m in (64, 128, 256)]
            self.assertTrue(all(r >= -1e-10 for r in rates))
            self.assertGreater(rates[0], rates[1])
            self.assertGreater(rates[1], rates[2])
            self.assertLess(rates[2], 5e-3)


class Marginals(unittest.TestCase):

    def test_projections(self):
        mu = GridMeasure([[0.1, 0.2], [0.3, 0.4]])
        self.assertTrue(np.allclose(marginal_x(mu).values, [0, 0.3, 1.0]))
        self.assertTrue(np.allclose(marginal_y(mu).values, [0, 0.4, 1.0]))

    def test_product(self):
        mu = GridMeasure.product([1, 2, 1], [3, 1, 0])
        self.assertTrue(np.allclose(mu.marginal_x().masses, [.25, .5, .25]))
        self.assertEqual(mu.marginal_y().zero_bands, (2,))


class GeneralizedInverse(unittest.TestCase):

    def test_identity(self):
        F = MarginalCDF.identity(10)
        x = np.linspace(0, 1, 37)
        self.assertTrue(np.allclose(generalized_inverse(F, x), x,
                                    rtol=0, atol=1e-15))

    def test_flat_band_takes_left_end(self):
        F = MarginalCDF([0.0, 0.5, 0.5, 1.0])
        self.assertAlmostEqual(generalized_inverse(F, 0.5), 1 / 3.0,
                               places=15)
        self.assertAlmostEqual(generalized_inverse(F, 0.75), 5 / 6.0,
                               places=15)
        self.assertEqual(generalized_inverse(F, 0.0), 0.0)

    def test_inverts_random_cdf(self):
        F = MarginalCDF.from_masses(_rng.random(20) + 0.01)
        x = _rng.random(200)
        self.assertLess(np.max(np.abs(F(generalized_inverse(F, x)) - x)),
                        1e-12)


class Standardization(unittest.TestCase):

    def test_uniform_marginals_are_fixed(self):
        nu = standardize(GridMeasure.uniform(9))
        self.assertLess(nu.total_variation(GridMeasure.uniform(9)), 1e-12)
        mass = _rng.random((6, 6))
        nu0 = standardize(standardize(GridMeasure(mass / mass.sum())))
        self.assertLess(standardize(nu0).total_variation(nu0), 1e-10)

    def test_product_becomes_uniform(self):
        mu = GridMeasure.product(_rng.random(12) + 0.1, _rng.random(12) + 0.1)
        nu = standardize(mu)
        self.assertLess(nu.total_variation(GridMeasure.uniform(12)), 1e-12)

    def test_marginals_uniform(self):
        nodes = np.linspace(0, 1, 21)
        for _ in range(5):
            nu = standardize(random_measure(20))
            self.assertLess(np.max(np.abs(nu.marginal_x().values - nodes)),
                            1e-10)
            self.assertLess(np.max(np.abs(nu.marginal_y().values - nodes)),
                            1e-10)

    def test_empty_band(self):
        mass = _rng.random((6, 6))
        mass[2, :] = 0.0
        nu = standardize(GridMeasure(mass / mass.sum()))
        self.assertIn(('x', 2), nu.zero_bands)
        self.assertLess(np.max(np.abs(nu.marginal_x().values
                                      - np.linspace(0, 1, 7))), 1e-10)

    def test_renormalize_identity(self):
        nu0 = standardize(random_measure(8))
        back = renormalize(nu0, MarginalCDF.identity(8),
                           np.linspace(0, 1, 9))
        self.assertLess(back.total_variation(nu0), 1e-12)

    def test_renormalize_rejects(self):
        nu0 = GridMeasure.uniform(4)
        with self.assertRaises(ValueError):
            renormalize(nu0, [0, 0.6, 0.4, 0.8, 1.0], np.linspace(0, 1, 5))
        with self.assertRaises(ValueError):
            renormalize(nu0, np.linspace(0, 1, 5), np.linspace(0, 1, 4))
        with self.assertRaises(ValueError):
            renormalize(GridMeasure.product([1, 2, 3, 4], [1, 1, 1, 1]),
                        np.linspace(0, 1, 5), np.linspace(0, 1, 5))

    def test_round_trip_product(self):
        mu = GridMeasure.product(_rng.random(10) + 0.1, _rng.random(10) + 0.1)
        back = renormalize(standardize(mu), mu.marginal_x(), mu.marginal_y())
        self.assertLess(back.total_variation(mu), 1e-12)

    def test_round_trip_smooth(self):
        errors = []
        for m in (32, 128):
            mu = GridMeasure.from_density(smooth_density, m)
            back = renormalize(standardize(mu), mu.marginal_x(),
                               mu.marginal_y())
            errors.append(back.total_variation(mu))
        self.assertGreater(errors[0], errors[1])

    def test_entropy_and_energy_factorize(self):
        entropy_gaps, energy_gaps = [], []
        for m in (64, 256):
            mu = GridMeasure.from_density(smooth_density, m)
            nu = standardize(mu)
            split = (relative_entropy(nu)
                     + line_entropy(mu.marginal_x().masses)
                     + line_entropy(mu.marginal_y().masses))
            entropy_gaps.append(abs(relative_entropy(mu) - split))
            energy_gaps.append(abs(energy(mu) - energy(nu)))
            if m == 64:
                continue
            self.assertLess(entropy_gaps[-1], 5e-3)
            self.assertLess(energy_gaps[-1], 5e-3)
        self.assertGreater(entropy_gaps[0], entropy_gaps[1])
        self.assertGreater(energy_gaps[0], energy_gaps[1])

    def test_factorization_over_random_densities(self):
        rng = np.random.default_rng(13)
        for trial in range(50):
            f = random_smooth_density(rng)
            gaps = []
            for m in (128, 256):
                mu = GridMeasure.from_density(f, m)
                nu = standardize(mu)
                split = (relative_entropy(nu)
                         + line_entropy(mu.marginal_x().masses)
                         + line_entropy(mu.marginal_y().masses))
                gaps.append((abs(relative_entropy(mu) - split),
                             abs(energy(mu) - energy(nu))))
            (s128, e128), (s256, e256) = gaps
            self.assertLess(s128, 5e-3, "density {}".format(trial))
            self.assertLess(e128, 5e-3, "density {}".format(trial))
            self.assertLessEqual(s256, s128 + 1e-13)
            self.assertLessEqual(e256, e128 + 1e-13)


class TwoSquareInequalities(unittest.TestCase):

    def test_unit_interval_bound(self):
        for beta in (-3.0, 3.0):
            for theta in (0.3, 0.5, 0.7):
                rhs = (t_pressure(theta, beta) + t_pressure(1 - theta, beta)
                       - pressure(beta))
                for _ in range(200):
                    p = _rng.random(16) ** 2
                    r = _rng.random(16) ** 2
                    lhs = two_square_lhs(p / p.sum(), r / r.sum(), theta, beta)
                    self.assertGreaterEqual(lhs, rhs - 1e-6)

    def test_uniform_pair_is_nearly_tight(self):
        uniform = np.full(32, 1 / 32.0)
        lhs = two_square_lhs(uniform, uniform, 0.5, 0.01)
        rhs = 2 * t_pressure(0.5, 0.01) - pressure(0.01)
        self.assertLess(lhs - rhs, 1e-5)
        self.assertGreaterEqual(lhs - rhs, 0.0)

    def test_short_support_bound(self):
        m, width = 50, 20
        theta = width / float(m)
        for beta in (-3.0, 3.0):
            for t1, t2 in ((0.2, 0.3), (0.4, 0.1), (0.25, 0.25)):
                rhs = two_square_bound_rhs(t1, t2, theta, beta)
                for _ in range(50):
                    start = _rng.integers(0, m - width + 1)
                    p, r = np.zeros(m), np.zeros(m)
                    p[start:start + width] = _rng.random(width) ** 2
                    r[start:start + width] = _rng.random(width) ** 2
                    lhs = two_square_lhs_scaled(p / p.sum(), r / r.sum(),
                                                t1, t2, beta)
                    self.assertGreaterEqual(lhs, rhs - 1e-6)


if __name__ == "__main__":
    unittest.main()
