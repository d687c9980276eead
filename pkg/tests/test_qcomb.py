import itertools
import math
import unittest

import numpy as np

from mallowsld.qcomb import (InvalidPermutation, LogValue, Permutation, inv,
                             inv_naive, inversion_counts, log_gaussian_binomial,
                             log_q_factorial, log_q_integer,
                             log_reduced_q_factorial, mallows_pmf,
                             permutations, shuffle_decomposition, shuffles)

_rng = None


def setUpModule():
    global _rng
    _rng = np.random.default_rng(20240611)


def brute_partition(perms, q):
    return math.fsum(q ** int(k) for k in inversion_counts(perms))


class LogValueArithmetic(unittest.TestCase):

    def test_round_trip(self):
        for value in (3.5, -7.25, 0.1, 1e-3, 42.0):
            lv = LogValue.from_float(value)
            self.assertEqual(lv.rtol, 1e-14)
            self.assertLessEqual(abs(lv.exp() - value), 1e-14 * abs(value))

    def test_round_trip_extreme_magnitudes(self):
        # logmag near 700 carries an absolute rounding of about 1e-13
        for value in (-2e-300, 1e-300, 3e-250, 7e-200, 1e-100, 1e300,
                      -5e250, 2.5e-308):
            lv = LogValue.from_float(value)
            self.assertGreater(lv.rtol, 1e-14)
            self.assertLess(lv.rtol, 2e-13)
            self.assertLessEqual(abs(lv.exp() - value), lv.rtol * abs(value))
        self.assertEqual(LogValue.zero().rtol, 0.0)

    def test_zero(self):
        z = LogValue.from_float(0.0)
        self.assertEqual(z.sign, 0)
        self.assertEqual(z.logmag, -math.inf)
        self.assertEqual(z.exp(), 0.0)
        self.assertEqual((z * LogValue.from_float(5.0)).sign, 0)

    def test_product_adds_logs(self):
        a = LogValue.from_float(-3.0)
        b = LogValue.from_float(4.0)
        prod = a * b
        self.assertEqual(prod.sign, -1)
        self.assertAlmostEqual(prod.logmag, math.log(12.0), places=14)
        self.assertAlmostEqual((prod / b).exp(), -3.0, places=13)

    def test_power_keeps_tiny_products(self):
        q = LogValue.from_float(1e-5)
        self.assertAlmostEqual((q ** 200).logmag, 200 * math.log(1e-5))


class PermutationBasics(unittest.TestCase):

    def test_rejects_non_bijection(self):
        with self.assertRaises(InvalidPermutation):
            Permutation([1, 1, 2])
        with self.assertRaises(InvalidPermutation):
            Permutation([0, 1, 2])
        self.assertTrue(issubclass(InvalidPermutation, ValueError))

    def test_inverse(self):
        pi = Permutation([2, 4, 1, 3])
        self.assertEqual(pi.inverse(), Permutation([3, 1, 4, 2]))
        self.assertEqual(list(pi.inverse().inverse()), [2, 4, 1, 3])


class InversionCounts(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(inv(Permutation.identity(9)), 0)
        self.assertEqual(inv([3, 2, 1]), 3)
        self.assertEqual(inv([2, 4, 1, 3]), 3)
        self.assertEqual(inv(list(range(50, 0, -1))), 50 * 49 // 2)

    def test_merge_count_agrees_with_pair_scan(self):
        for n in (1, 2, 5, 17, 64, 333):
            for _ in range(5):
                pi = _rng.permutation(n) + 1
                self.assertEqual(inv(pi), inv_naive(pi))

    def test_vectorized_counts(self):
        perms = permutations(5)
        expected = [inv_naive(p) for p in perms]
        self.assertEqual(list(inversion_counts(perms)), expected)


class QFactorials(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(log_q_factorial(0, 0.7).logmag, 0.0)
        self.assertAlmostEqual(log_q_factorial(3, 0.5).logmag,
                               math.log(2.625), places=14)
        self.assertAlmostEqual(log_q_factorial(5, 1.0).logmag,
                               math.log(120), places=13)

    def test_reduced_examples(self):
        self.assertEqual(log_reduced_q_factorial(7, 1.0).logmag, 0.0)
        self.assertAlmostEqual(log_reduced_q_factorial(2, 0.5).logmag,
                               math.log(0.75), places=14)
        self.assertAlmostEqual(log_reduced_q_factorial(1, 3.0).logmag, 0.0,
                               places=15)

    def test_q_integer(self):
        self.assertAlmostEqual(log_q_integer(3, 0.5).exp(), 1.75, places=14)
        self.assertEqual(log_q_integer(0, 0.5).sign, 0)

    def test_matches_inversion_sum(self):
        for n in range(8):
            perms = permutations(n)
            for q in (0.3, 0.9, 1.0, 1.2):
                brute = brute_partition(perms, q)
                value = log_q_factorial(n, q).exp()
                self.assertLessEqual(abs(value - brute), 1e-12 * brute,
                                     "n={} q={}".format(n, q))

    def test_rejects_nonpositive_q(self):
        for q in (0.0, -0.5):
            with self.assertRaises(ValueError):
                log_q_factorial(3, q)

    def test_continuity_at_one(self):
        for n in (2, 10, 50):
            for q in (1 - 1e-9, 1 + 1e-9):
                gap = abs(log_q_factorial(n, q).logmag - math.lgamma(n + 1))
                self.assertLessEqual(gap, 1e-6)
        # beyond that the gap is the first order term n(n-1)/4 * ln q
        for n in (100, 1000):
            h = math.log(1 + 1e-9)
            gap = log_q_factorial(n, 1 + 1e-9).logmag - math.lgamma(n + 1)
            self.assertAlmostEqual(gap / (h * n * (n - 1) / 4.0), 1.0,
                                   places=5)

    def test_near_one_branch_is_continuous(self):
        # both sides of the switch between the series and the direct sum
        for n in (5, 40):
            for h in (0.99e-8, 1.01e-8):
                value = log_reduced_q_factorial(n, math.exp(h)).logmag
                self.assertAlmostEqual(value / (h * n * (n - 1) / 4.0), 1.0,
                                       places=6)


class GaussianBinomials(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(log_gaussian_binomial(6, 0, 0.3).logmag, 0.0)
        self.assertAlmostEqual(log_gaussian_binomial(6, 6, 0.3).logmag, 0.0,
                               places=14)
        self.assertAlmostEqual(log_gaussian_binomial(4, 2, 0.5).logmag,
                               math.log(2.1875), places=14)
        self.assertAlmostEqual(log_gaussian_binomial(9, 4, 1.0).logmag,
                               math.log(126), places=13)

    def test_rejects_k_above_n(self):
        with self.assertRaises(ValueError):
            log_gaussian_binomial(3, 4, 0.5)

    def test_symmetry_is_exact(self):
        for n in range(10):
            for k in range(n + 1):
                self.assertEqual(log_gaussian_binomial(n, k, 0.37),
                                 log_gaussian_binomial(n, n - k, 0.37))

    def test_shuffle_identity(self):
        for n in range(9):
            for k in range(n + 1):
                sh = shuffles(n, k)
                self.assertEqual(sh.shape[0], math.comb(n, k))
                for q in (0.3, 0.9, 1.0, 1.2):
                    brute = brute_partition(sh, q)
                    value = log_gaussian_binomial(n, k, q).exp()
                    self.assertLessEqual(abs(value - brute), 1e-12 * brute)

    def test_splitting_identity(self):
        for image in itertools.permutations(range(1, 7)):
            for k in range(1, 6):
                split = shuffle_decomposition(image, k)
                self.assertEqual(inv(image), inv(split.shuffle)
                                 + inv(split.lower) + inv(split.upper))
                self.assertEqual(len(split.lower), k)
                self.assertEqual(len(split.upper), 6 - k)


class MallowsPmf(unittest.TestCase):

    def test_uniform_at_one(self):
        self.assertAlmostEqual(mallows_pmf([3, 1, 2, 4], 1.0), 1 / 24.0,
                               places=15)

    def test_identity_weight(self):
        self.assertAlmostEqual(mallows_pmf([1, 2, 3], 0.5), 1 / 2.625,
                               places=14)

    def test_normalized(self):
        for n in range(1, 8):
            for q in (0.3, 1.0, 2.5):
                total = math.fsum(mallows_pmf(p, q) for p in permutations(n))
                self.assertAlmostEqual(total, 1.0, places=12)


if __name__ == "__main__":
    unittest.main()
