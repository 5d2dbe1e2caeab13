import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from oracles import chernoff_by_minimization, kl_gaussian, scalar_ci_quadrature
from treechernoff._linalg import NotPositiveDefiniteError
from treechernoff.info_engine import (
    DiscretePmf,
    chernoff,
    discrete_chernoff,
    format_matrix_csv,
    kl,
    merge_states,
    scalar_chernoff,
    scalar_g,
    sigma_lambda,
)
from treechernoff.reduction import CanonicalPair, canonical_covariances
from treechernoff.tree_model import GaussianTree, build_covariance, random_graft, random_tree

# frozen from tests/oracles.py (Gauss-Jordan inverse + LU determinant)
KL_05_03 = 0.03075163055620389
KL_03_05 = 0.03664763684306349
# frozen from quadrature of p1^lam p2^(1-lam), minimized over lam
G_2_0823 = 0.03337564768966186
# closed form in the weights at (w1, w2) = (0.5, 0.6), evaluated independently
CI2_REF = 0.5 * math.log(1 + 0.5 * 0.36 / 0.64 * 0.5)


def two_node(w):
    return np.asarray(build_covariance(GaussianTree(2, [(1, 2, w)])))


def random_pd(rng, n):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * 0.1 * np.eye(n)


class TestKl:
    def test_identity(self):
        s = two_node(0.5)
        assert kl(s, s) == 0.0

    def test_two_node_pair(self):
        assert kl(two_node(0.5), two_node(0.3)) == pytest.approx(KL_05_03, rel=1e-12)
        assert kl(two_node(0.3), two_node(0.5)) == pytest.approx(KL_03_05, rel=1e-12)
        assert KL_05_03 != pytest.approx(KL_03_05, rel=1e-3)

    def test_matches_oracle_on_random_pd(self, rng):
        for n in (1, 2, 5, 8):
            s1, s2 = random_pd(rng, n), random_pd(rng, n)
            assert kl(s1, s2) == pytest.approx(kl_gaussian(s1, s2), rel=1e-9, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            kl(np.eye(2), np.eye(3))

    def test_not_pd(self):
        with pytest.raises(NotPositiveDefiniteError):
            kl(np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2))


class TestSigmaLambda:
    def test_endpoints(self):
        s1, s2 = canonical_covariances(CanonicalPair(0.5, 0.6))
        np.testing.assert_allclose(sigma_lambda(s1, s2, 1.0), s1, atol=1e-14)
        np.testing.assert_allclose(sigma_lambda(s1, s2, 0.0), s2, atol=1e-14)

    def test_equal_inputs(self, chain):
        s = np.asarray(build_covariance(chain))
        for lam in (0.0, 0.3, 0.5, 1.0):
            np.testing.assert_allclose(sigma_lambda(s, s, lam), s, atol=1e-14)

    def test_half_balances_kl_on_canonical_pair(self):
        s1, s2 = canonical_covariances(CanonicalPair(0.5, 0.6))
        mid = sigma_lambda(s1, s2, 0.5)
        assert kl(mid, s1) == pytest.approx(kl(mid, s2), abs=1e-14)

    @pytest.mark.parametrize("lam", [-0.1, 1.1])
    def test_out_of_range(self, lam):
        with pytest.raises(ValueError):
            sigma_lambda(np.eye(2), np.eye(2), lam)

    def test_positive_definite_along_path(self, rng):
        s1, s2 = random_pd(rng, 5), random_pd(rng, 5)
        for lam in np.linspace(0, 1, 11):
            np.linalg.cholesky(sigma_lambda(s1, s2, lam))


class TestChernoff:
    def test_equal(self):
        res = chernoff(two_node(0.4), two_node(0.4))
        assert res.value == 0.0
        assert res.lambda_star == 0.5

    def test_canonical_value(self):
        s1, s2 = canonical_covariances(CanonicalPair(0.5, 0.6))
        res = chernoff(s1, s2)
        assert res.value == pytest.approx(CI2_REF, abs=1e-12)
        assert res.lambda_star == pytest.approx(0.5, abs=1e-9)
        assert res.kl_to_1 == pytest.approx(res.kl_to_2, abs=1e-10)

    def test_symmetry(self, rng):
        for n in (2, 4, 6):
            s1, s2 = random_pd(rng, n), random_pd(rng, n)
            a, b = chernoff(s1, s2), chernoff(s2, s1)
            assert a.value == pytest.approx(b.value, abs=1e-9)
            assert a.lambda_star == pytest.approx(1 - b.lambda_star, abs=1e-9)

    def test_against_direct_minimization(self, rng):
        for n in (1, 2, 3, 5, 7):
            s1, s2 = random_pd(rng, n), random_pd(rng, n)
            expected, lam = chernoff_by_minimization(s1, s2)
            res = chernoff(s1, s2)
            assert res.value == pytest.approx(expected, rel=1e-8, abs=1e-12)
            assert res.lambda_star == pytest.approx(lam, abs=1e-5)

    def test_convergence_criteria(self, rng):
        s1, s2 = random_pd(rng, 4), random_pd(rng, 4)
        res = chernoff(s1, s2)
        assert abs(res.kl_to_1 - res.kl_to_2) <= 1e-10
        assert res.iterations <= 200
        assert 2.0 ** -res.iterations <= 1e-12

    def test_never_exceeds_either_kl(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            pair = random_graft(random_tree(int(rng.integers(3, 9)), rng), rng)
            s1, s2 = build_covariance(pair.tree1), build_covariance(pair.tree2)
            value = chernoff(s1, s2).value
            assert value <= min(kl(s1, s2), kl(s2, s1)) + 1e-12

    def test_crossing_is_unique(self, rng):
        lams = np.linspace(0.0, 1.0, 101)
        for _ in range(30):
            n = int(rng.integers(2, 7))
            s1, s2 = random_pd(rng, n), random_pd(rng, n)
            h = []
            for lam in lams:
                s = sigma_lambda(s1, s2, lam)
                h.append(kl(s, s1) - kl(s, s2))
            assert np.all(np.diff(h) < 0)

    def test_scalar_consistency(self):
        for v1, v2 in [(1.0, 2.0823), (0.3, 0.7), (5.0, 0.01), (2.0, 2.0 + 1e-3)]:
            assert chernoff([[v1]], [[v2]]).value == pytest.approx(scalar_chernoff(v1, v2), abs=1e-10)


class TestScalarG:
    def test_one(self):
        assert scalar_g(1.0) == 0.0

    @pytest.mark.parametrize("x", [1.5, 2.0, 5.0, 1 + 1e-7, 1 + 1e-5, 1e6])
    def test_symmetry(self, x):
        assert scalar_g(x) - scalar_g(1 / x) == pytest.approx(0.0, abs=1e-15 + 1e-12 * scalar_g(x))

    def test_reference_point(self):
        assert scalar_g(2.0823) == pytest.approx(G_2_0823, abs=1e-12)

    @pytest.mark.parametrize("x", [0.01, 0.5, 1.2, 3.0, 40.0])
    def test_against_quadrature(self, x):
        assert scalar_g(x) == pytest.approx(scalar_ci_quadrature(1.0, x), rel=1e-7)

    def test_matches_textbook_formula_away_from_one(self):
        for x in (1.01, 2.0, 10.0, 1e3):
            textbook = 0.5 * (math.log((x - 1) / (math.e * math.log(x))) + math.log(x) / (x - 1))
            assert scalar_g(x) == pytest.approx(textbook, rel=1e-10)

    @pytest.mark.parametrize("t", np.geomspace(1e-4, 1e-2, 25))
    def test_second_order_expansion(self, t):
        assert abs(scalar_g(1 + t) - t * t / 16) <= t**3

    def test_continuous_across_taylor_switch(self):
        below, above = scalar_g(1 + 0.999e-6), scalar_g(1 + 1.001e-6)
        assert above > below
        assert above == pytest.approx((1.001e-6) ** 2 / 16, rel=1e-5)

    def test_increasing_above_one(self):
        x = np.geomspace(1 + 1e-5, 1e6, 400)
        assert np.all(np.diff([scalar_g(v) for v in x]) > 0)

    @pytest.mark.parametrize("x", [0.0, -1.0, float("inf"), float("nan")])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            scalar_g(x)


class TestScalarChernoff:
    def test_equal(self):
        assert scalar_chernoff(3.0, 3.0) == 0.0

    def test_reference(self):
        assert scalar_chernoff(1.0, 2.0823) == pytest.approx(G_2_0823, abs=1e-12)

    @pytest.mark.parametrize("c", [0.1, 10.0])
    def test_scale_invariance(self, c):
        assert scalar_chernoff(c * 1.0, c * 2.0823) == pytest.approx(G_2_0823, rel=1e-12)

    def test_non_positive(self):
        with pytest.raises(ValueError):
            scalar_chernoff(0.0, 1.0)


def brute_discrete_ci(p, q):
    """Root of the derivative of ``ln sum p^lam q^(1-lam)``, or an endpoint if it has none."""
    both = (np.asarray(p) > 0) & (np.asarray(q) > 0)
    pa, qa = np.asarray(p)[both], np.asarray(q)[both]
    if pa.size == 0:
        return math.inf
    diff = np.log(pa) - np.log(qa)

    def energy(lam):
        return float(np.sum(pa**lam * qa ** (1 - lam)))

    def slope(lam):
        return float(np.sum(pa**lam * qa ** (1 - lam) * diff))

    if slope(0.0) >= 0.0:
        return -math.log(energy(0.0))
    if slope(1.0) <= 0.0:
        return -math.log(energy(1.0))
    return -math.log(energy(optimize.brentq(slope, 0.0, 1.0, xtol=1e-15)))


def random_pmf(rng, n, zero_prob=0.0):
    v = rng.random(n)
    v[rng.random(n) < zero_prob] = 0.0
    if v.sum() == 0:
        v[0] = 1.0
    v = v / v.sum()
    v[-1] = 1.0 - v[:-1].sum()
    return DiscretePmf(tuple(np.clip(v, 0.0, None)))


class TestDiscrete:
    def test_equal(self):
        p = DiscretePmf((0.2, 0.3, 0.5))
        assert discrete_chernoff(p, p) == 0.0

    def test_symmetric_example(self):
        p, q = DiscretePmf((0.5, 0.5)), DiscretePmf((0.9, 0.1))
        a, b = discrete_chernoff(p, q), discrete_chernoff(q, p)
        assert a > 0
        assert a == pytest.approx(b, abs=1e-14)
        assert a == pytest.approx(brute_discrete_ci(p.probs, q.probs), abs=1e-10)

    def test_against_bounded_minimization(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 9))
            p, q = random_pmf(rng, n, 0.2), random_pmf(rng, n, 0.2)
            assert discrete_chernoff(p, q) == pytest.approx(brute_discrete_ci(p.probs, q.probs), abs=1e-9)

    def test_disjoint_support(self):
        assert discrete_chernoff(DiscretePmf((1.0, 0.0)), DiscretePmf((0.0, 1.0))) == math.inf

    def test_merging_never_increases(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 9))
            p, q = random_pmf(rng, n, 0.1), random_pmf(rng, n, 0.1)
            base = discrete_chernoff(p, q)
            for i, j in itertools.combinations(range(n), 2):
                merged = discrete_chernoff(merge_states(p, i, j), merge_states(q, i, j))
                assert merged <= base + 1e-12

    def test_equality_for_proportional_states(self, rng):
        for _ in range(20):
            n = int(rng.integers(3, 8))
            p = rng.random(n)
            q = rng.random(n)
            # states 0 and 1 share the likelihood ratio p/q
            q[1] = q[0] * p[1] / p[0]
            p, q = p / p.sum(), q / q.sum()
            p_pmf, q_pmf = DiscretePmf(tuple(p)), DiscretePmf(tuple(q))
            before = discrete_chernoff(p_pmf, q_pmf)
            after = discrete_chernoff(merge_states(p_pmf, 0, 1), merge_states(q_pmf, 0, 1))
            assert after == pytest.approx(before, abs=1e-10)

    def test_pmf_validation(self):
        with pytest.raises(ValueError):
            DiscretePmf((0.5, 0.6))
        with pytest.raises(ValueError):
            DiscretePmf((1.5, -0.5))
        with pytest.raises(ValueError):
            discrete_chernoff(DiscretePmf((1.0,)), DiscretePmf((0.5, 0.5)))


class TestMergeStates:
    def test_arithmetic(self):
        assert merge_states(DiscretePmf((0.2, 0.3, 0.5)), 0, 1).probs == (0.5, 0.5)

    def test_zero_state_is_noop(self):
        p = DiscretePmf((0.2, 0.0, 0.8))
        assert merge_states(p, 0, 1).probs == (0.2, 0.8)
        assert merge_states(p, 2, 1).probs == (0.2, 0.8)

    def test_support_shrinks(self):
        assert len(merge_states(DiscretePmf((0.25,) * 4), 3, 0)) == 3

    def test_bad_index(self):
        with pytest.raises(IndexError):
            merge_states(DiscretePmf((0.5, 0.5)), 0, 2)
        with pytest.raises(ValueError):
            merge_states(DiscretePmf((0.5, 0.5)), 1, 1)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=8), st.data())
    def test_sum_preserved(self, raw, data):
        total = sum(raw)
        if total <= 0:
            return
        probs = [v / total for v in raw]
        probs[-1] = max(0.0, 1.0 - math.fsum(probs[:-1]))
        p = DiscretePmf(tuple(probs))
        i = data.draw(st.integers(0, len(probs) - 1))
        j = data.draw(st.integers(0, len(probs) - 1).filter(lambda v: v != i))
        merged = merge_states(p, i, j)
        assert math.fsum(merged.probs) == pytest.approx(1.0, abs=1e-12)


def test_format_matrix_csv():
    assert format_matrix_csv([[1.0, 0.5], [0.5, 1.0]]) == "1,0.5\n0.5,1\n"
