"""The LP oracle: polytope support and strategy search."""

from fractions import Fraction as F

import pytest

from arbscan.market import natural_filtration, strategy_values
from arbscan.measures import build_polytope
from arbscan.oracle import oracle_arbitrage, oracle_support
from arbscan.ratgeom import INFEASIBLE, OPTIMAL, lp_solve
from arbscan.splitter import backward_eliminate, universal_aggregator


def test_oracle_support_examples(svu, constant, countna):
    assert oracle_support(svu) == frozenset()
    assert oracle_support(constant) == constant.all_indices
    assert set(countna.ids(oracle_support(countna))) == {"q1", "q2"}


def _support_literal(m):
    """One maximization per scenario with no skipping."""
    poly = build_polytope(m)
    out = set()
    for i in range(m.n):
        objective = tuple(F(1) if j == i else F(0) for j in range(m.n))
        res = lp_solve(poly.lp(objective))
        if res.status == INFEASIBLE:
            return frozenset()
        assert res.status == OPTIMAL
        if res.objective_value > 0:
            out.add(i)
    return frozenset(out)


def test_oracle_support_matches_literal_loop(mini_corpus):
    for m in mini_corpus[:25]:
        assert oracle_support(m) == _support_literal(m)


def test_oracle_arbitrage_svu_model_independent(svu):
    pa = backward_eliminate(svu)
    _agg, enlarged = universal_aggregator(svu, pa)
    h = oracle_arbitrage(svu, enlarged, svu.all_indices)
    assert h is not None
    v = strategy_values(svu, h)
    assert all(x >= 1 for x in v[svu.T])
    # a natural-filtration witness exists here too (interim loss at t=1,
    # e.g. h1=1 then 5 shares on the down branch); the LP must find one
    h_nat = oracle_arbitrage(svu, natural_filtration(svu), svu.all_indices)
    assert h_nat is not None
    assert all(x >= 1 for x in strategy_values(svu, h_nat)[svu.T])


def test_oracle_arbitrage_constant_none(constant):
    f = natural_filtration(constant)
    for c in (constant.all_indices, frozenset({0})):
        assert oracle_arbitrage(constant, f, c) is None


def test_oracle_arbitrage_multi_period_restriction(multi):
    f = natural_filtration(multi)
    target = frozenset({0, 1})
    assert oracle_arbitrage(multi, f, target) is not None
    assert oracle_arbitrage(multi, f, target, only_period=1) is None
    assert oracle_arbitrage(multi, f, target, only_period=2) is None


def test_oracle_arbitrage_rejects_empty_target(svu):
    f = natural_filtration(svu)
    with pytest.raises(ValueError):
        oracle_arbitrage(svu, f, frozenset())


def test_oracle_arbitrage_aggregator_is_feasible_point(mini_corpus):
    for m in mini_corpus[:20]:
        pa = backward_eliminate(m)
        polar = m.all_indices - pa.omega_star
        if not polar:
            continue
        agg, enlarged = universal_aggregator(m, pa)
        h = oracle_arbitrage(m, enlarged, polar)
        assert h is not None
        # the aggregator satisfies the same constraint set up to scaling
        v = strategy_values(m, agg)
        assert all(x >= 0 for x in v[m.T])
        assert all(v[m.T][i] > 0 for i in polar)


def test_oracle_determinism(svu):
    pa = backward_eliminate(svu)
    _agg, enlarged = universal_aggregator(svu, pa)
    first = oracle_arbitrage(svu, enlarged, svu.all_indices)
    assert oracle_arbitrage(svu, enlarged, svu.all_indices) == first
