"""Closed-form bounds against independent oracles and frozen values."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcosync.bounds import (
    compute_s,
    delta_n,
    delta_n_coefficients,
    er_limit_probability,
    ready_probability,
    rgg_c_threshold,
    rgg_radius_for_c,
    rgg_threshold_residual,
    sf_graph_bounds,
    sf_node_bound,
    stii_degree_requirement,
    stii_graph_bound,
    stii_node_bound,
)
from pcosync.graph import Graph


def binomial_tail_below(d: int, k: int, q: Fraction) -> Fraction:
    """P(Bin(d, q) < k) in exact rational arithmetic."""
    return sum(
        Fraction(math.comb(d, j)) * q**j * (1 - q) ** (d - j)
        for j in range(k)
    )


def threshold_by_substitution(s: float, tol: float = 1e-14) -> float:
    """Independent solver for the radius-threshold constant.

    Substituting u = -2 / (c ln s) turns the relation into
    g(u) = -u ln(s)/2 - 1 + u - u ln(u) = 0, with g increasing on
    (0, s^(-1/2)) from -1 to its maximum. The larger c corresponds to the
    smaller u, so bisecting the increasing branch isolates it directly.
    """
    ls = math.log(s)

    def g(u: float) -> float:
        return -u * ls / 2.0 - 1.0 + u - u * math.log(u)

    lo, hi = 1e-12, s ** -0.5
    if g(hi) <= 0.0:
        raise RuntimeError(f"no root below the peak for s={s}")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    return -2.0 / (u * ls)


class TestComputeS:
    def test_breakpoint_dominates(self):
        assert compute_s(0.7, 0.05) == 0.7

    def test_return_window_dominates(self):
        assert compute_s(0.5, 0.1) == pytest.approx(0.7)

    def test_balanced(self):
        assert compute_s(0.55, 0.05) == pytest.approx(0.55)

    def test_validation(self):
        with pytest.raises(ValueError):
            compute_s(1.0, 0.05)
        with pytest.raises(ValueError):
            compute_s(0.55, 0.5)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.01, 0.99), st.floats(0.0, 0.49))
    def test_never_below_half(self, B, tau):
        # max(B, 1 - B + 2 tau) >= max(B, 1 - B) >= 1/2
        assert compute_s(B, tau) >= 0.5


class TestSfBounds:
    def test_zero_indegree(self):
        assert sf_node_bound(0, 0.55) == pytest.approx(0.45)

    def test_monotone_in_indegree(self):
        vals = [sf_node_bound(d, 0.55) for d in range(30)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert all(0.0 < v < 1.0 for v in vals)

    def test_vacuous_s_rejected(self):
        with pytest.raises(ValueError):
            sf_node_bound(3, 1.0)

    def test_graph_aggregation(self, er30):
        rep = sf_graph_bounds(er30, 0.55)
        assert len(rep.per_node) == 30
        assert rep.per_node == tuple(
            sf_node_bound(d, 0.55) for d in er30.indegrees())
        assert rep.params == {"s": 0.55}

    def test_json_dict_shape(self, er30):
        doc = sf_graph_bounds(er30, 0.55).to_json_dict()
        assert set(doc) >= {"union", "union_clamped", "product", "per_node",
                            "params", "s"}
        assert doc["union_clamped"] == max(0.0, doc["union"])


class TestDeltaN:
    def test_frozen_coefficients(self):
        a, b = delta_n_coefficients(0.95, 0.55)
        assert a == pytest.approx(5.010951596785767, rel=1e-15)
        assert b == pytest.approx(1.6726967362944687, rel=1e-15)

    def test_frozen_value_at_400(self):
        assert delta_n(0.95, 0.55, 400) == pytest.approx(
            15.032854790357305, rel=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.05, 0.99), st.floats(0.51, 0.99),
           st.integers(1, 10**6))
    def test_defining_identity(self, p, s, n):
        # s^delta == (1-p)/n is the relation delta_n inverts
        d = delta_n(p, s, n)
        assert s**d == pytest.approx((1.0 - p) / n, rel=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.05, 0.99), st.floats(0.51, 0.99),
           st.integers(2, 10**6))
    def test_coefficients_reproduce_delta(self, p, s, n):
        a, b = delta_n_coefficients(p, s)
        assert a + b * math.log(n) == pytest.approx(delta_n(p, s, n),
                                                    rel=1e-12)

    def test_union_bound_crosses_p_at_delta(self):
        p, s, n = 0.9, 0.6, 200
        d = math.ceil(delta_n(p, s, n))
        g_hi = _uniform_indegree_graph(n_nodes=d + 1, d=d)
        rep = sf_graph_bounds(g_hi, s)
        # per-node values are degree-driven; scale the union check by hand
        assert 1.0 - n * s ** (d + 1) >= p
        assert 1.0 - n * s ** (d - 2) < p
        assert rep.union_bound == pytest.approx(
            1.0 - (d + 1) * s ** (d + 1))

    def test_monotone_in_n_and_p(self):
        assert delta_n(0.95, 0.55, 800) > delta_n(0.95, 0.55, 400)
        assert delta_n(0.99, 0.55, 400) > delta_n(0.95, 0.55, 400)


def _uniform_indegree_graph(n_nodes: int, d: int) -> Graph:
    edges = []
    for i in range(n_nodes):
        for step in range(1, d + 1):
            edges.append(((i + step) % n_nodes, i))
    return Graph(n_nodes, tuple(edges))


class TestStiiBounds:
    def test_vacuous_region_is_zero(self):
        assert stii_node_bound(7, 0.5, 3) == 0.0  # qd = 3.5 < k + 1
        assert stii_node_bound(0, 0.5, 3) == 0.0

    def test_positive_region(self):
        v = stii_node_bound(100, 0.3, 3)
        assert v == pytest.approx(1.0 - math.exp(-(26.0**2) / 60.0))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 60), st.integers(1, 6), st.integers(1, 9))
    def test_dominated_by_exact_binomial(self, d, k, tenths):
        """Hoeffding tail never beats the exact one (oracle in rationals)."""
        q = Fraction(tenths, 10)
        if float(q) * d < k + 1:
            return
        exact_fail = binomial_tail_below(d, k, q)
        hoeffding_fail = math.exp(
            -((float(q) * d - k - 1) ** 2) / (2.0 * float(q) * d))
        assert float(exact_fail) <= hoeffding_fail * (1.0 + 1e-12)
        assert stii_node_bound(d, float(q), k) <= 1.0 - float(exact_fail) + 1e-12

    def test_graph_bound_shared_and_per_node_q(self):
        g = _uniform_indegree_graph(4, 3)
        shared = stii_graph_bound(g, 0.9, 1)
        listed = stii_graph_bound(g, [0.9] * 4, 1)
        assert shared.per_node == listed.per_node

    def test_vacuous_node_zeroes_product(self):
        g = Graph(3, ((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)))  # indegrees 0,1,2
        rep = stii_graph_bound(g, 0.95, 1)
        assert rep.per_node[0] == 0.0
        assert rep.product_bound == 0.0

    def test_ready_probability(self):
        assert ready_probability(0.55) == pytest.approx(0.45)
        assert ready_probability(0.55, eta=0.1) == pytest.approx(0.35)
        with pytest.raises(ValueError):
            ready_probability(0.55, eta=0.45)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 8), st.integers(2, 10**5), st.floats(0.05, 0.99))
    def test_degree_requirement_solves_its_quadratic(self, k, n, p):
        v = stii_degree_requirement(k, n, p)
        c_n = math.log(n) - math.log(1.0 - p)
        # the stated closed form is the greater root of
        # (v - (k-1))^2 = 2 c_n (v + (k-1))
        lhs = (v - (k - 1)) ** 2
        rhs = 2.0 * c_n * (v + (k - 1))
        assert lhs == pytest.approx(rhs, rel=1e-9)
        assert v > k - 1 + c_n  # greater root, not the smaller one


class TestWeierstrass:
    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=40))
    def test_product_dominates_union(self, bs):
        product = math.prod(bs)
        union = 1.0 - sum(1.0 - b for b in bs)
        assert product >= union - 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**9))
    def test_graph_reports_respect_it(self, seed):
        import numpy as np

        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 30))
        from pcosync.graph import generate_er

        g = generate_er(n, float(rng.uniform(0.1, 0.9)),
                        int(rng.integers(10**6)))
        rep = sf_graph_bounds(g, float(rng.uniform(0.51, 0.99)))
        assert rep.product_bound >= rep.union_bound - 1e-12


class TestRggThreshold:
    def test_frozen_value(self):
        assert rgg_c_threshold(0.55) == pytest.approx(6.637486671684517,
                                                      rel=1e-12)

    @pytest.mark.parametrize("s", [0.51, 0.55, 0.6, 0.7, 0.9])
    def test_residual_small(self, s):
        c = rgg_c_threshold(s)
        assert abs(rgg_threshold_residual(c, s)) < 1e-10

    @pytest.mark.parametrize("s", [0.55, 0.7])
    def test_matches_substitution_oracle(self, s):
        assert rgg_c_threshold(s) == pytest.approx(
            threshold_by_substitution(s), abs=1e-8)

    def test_takes_greater_root(self):
        # the u-branch below the peak maps to the larger c; any second root
        # sits strictly left of it
        s = 0.55
        c = rgg_c_threshold(s)
        u_small = -2.0 / (c * math.log(s))
        u_peak = s**-0.5
        assert u_small < u_peak


class TestRggRadius:
    def test_frozen_radius(self):
        c = rgg_c_threshold(0.55)
        assert rgg_radius_for_c(400, 2, c) == pytest.approx(
            0.1778948583303864, rel=1e-12)

    def test_dim_one_ball_volume(self):
        # unit-ball volume 2 in one dimension
        assert rgg_radius_for_c(100, 1, 3.0) == pytest.approx(
            3.0 * math.log(100) / (2 * 100))

    def test_dim_three_ball_volume(self):
        expected = (2.0 * math.log(50) / (50 * (4.0 * math.pi / 3.0))) ** (1 / 3)
        assert rgg_radius_for_c(50, 3, 2.0) == pytest.approx(expected)

    def test_warns_when_torus_saturates(self):
        with pytest.warns(UserWarning, match="complete"):
            rgg_radius_for_c(3, 2, 50.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            rgg_radius_for_c(1, 2, 2.0)
        with pytest.raises(ValueError):
            rgg_radius_for_c(10, 0, 2.0)
        with pytest.raises(ValueError):
            rgg_radius_for_c(10, 2, 0.0)


class TestErLimit:
    def test_value(self):
        assert er_limit_probability(400, 0.5) == pytest.approx(
            (1.0 - 1.0 / 400) * math.exp(1.0 / 400**0.5))

    def test_can_exceed_one_at_small_n(self):
        assert er_limit_probability(2, 0.9) > 1.0

    def test_approaches_one(self):
        assert er_limit_probability(10**9, 0.5) == pytest.approx(1.0, abs=1e-4)

    def test_validation(self):
        with pytest.raises(ValueError):
            er_limit_probability(1, 0.5)
        with pytest.raises(ValueError):
            er_limit_probability(100, 1.0)
