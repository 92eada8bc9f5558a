import json
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaplab.cf_core import ONE, Sign, certified_sign, theta_form
from gaplab.gap_engine import gap_set
from gaplab.neighbor_theory import (
    StructuralError,
    bounded_regime,
    check_assumption,
    delta_k,
    gap_chain_check,
    exchange_table,
    induced_table_qkN,
    lowerbound_check,
    phi_induction_map,
    prop42_counts,
    prop42_table,
    seven_table,
    three_gap_return,
    unbounded_witnesses,
)

SEVEN_NS = list(range(4, 29)) + [29, 50, 100, 300]


def brute_return(r, M, N):
    out = []
    for m in range(N):
        x, t = (m + r) % M, 1
        while x >= N:
            x, t = (x + r) % M, t + 1
        out.append(t)
    return out


# -- exchange -------------------------------------------------------------------

def test_exchange_level_one(bounded):
    t = exchange_table(1, 1, 9, bounded)
    assert [c.size for c in t.cases] == [38, 18, 19, 9]
    D = theta_form(bounded.alpha, 0) - theta_form(bounded.beta, 0, "beta") * 9
    assert t.cases[0].gap == D
    assert t.weighted_sum() == ONE and t.is_partition()
    g, nt = gap_set(3, 28, bounded.alpha, bounded.beta)
    assert t.neighbor_table() == nt
    assert t.multiplicities() == g.counts
    assert t.certify_gaps(bounded.alpha, bounded.beta)


def test_exchange_rejects_wrong_bprime(bounded):
    with pytest.raises(ValueError):
        exchange_table(1, 1, 8, bounded)


def test_exchange_swapped_level(bounded):
    # beta plays alpha on E_{28, q_2}: q_2 = b_2 q'_1 + 1
    t = exchange_table(1, 2, 729, bounded, swap=True)
    assert (t.q, t.qp) == (20413, 28)
    assert t.is_partition() and t.weighted_sum() == ONE
    _, nt = gap_set(20413, 28, bounded.alpha, bounded.beta)
    assert t.neighbor_table() == nt


def test_assumption(bounded, unbounded):
    assert check_assumption(1, 1, 9, bounded)
    assert check_assumption(1, 2, 729, bounded, swap=True)
    for k in (1, 2):
        assert not check_assumption(4 * k + 1, 4 * k + 1, 1, unbounded)
    assert not check_assumption(1, 1, 10 ** 6, bounded)


def test_unbounded_exchange_is_not_the_neighbour_map(unbounded):
    t = exchange_table(5, 5, 1, unbounded)
    assert t.is_partition() and t.weighted_sum() == ONE
    _, nt = gap_set(267, 268, unbounded.alpha, unbounded.beta)
    assert t.neighbor_table() != nt


# -- return times -----------------------------------------------------------------

def test_return_time_small_example():
    p = three_gap_return(1, 5, 2)
    assert p.tau.tolist() == [1, 4]
    assert (p.tau1, p.tau2, p.N1, p.N2) == (1, 4, 1, 1)
    assert all(p.identities())


def test_full_window_returns_at_once():
    p = three_gap_return(3, 7, 7)
    assert set(p.tau.tolist()) == {1}
    assert all(p.identities())


def test_return_time_rejects_common_factor():
    with pytest.raises(ValueError):
        three_gap_return(4, 10, 3)
    with pytest.raises(ValueError):
        three_gap_return(3, 10, 11)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 500).flatmap(lambda M: st.tuples(
    st.just(M), st.integers(1, M - 1).filter(lambda r: gcd(r, M) == 1), st.integers(1, M))))
def test_return_times_match_brute_force(case):
    M, r, N = case
    p = three_gap_return(r, M, N)
    assert p.tau.tolist() == brute_return(r, M, N)
    assert 0 <= p.N1 <= p.N2 <= N
    assert all(p.identities())


# -- bounded family, six and seven cases -----------------------------------------------

@pytest.mark.parametrize("N", [4, 10, 28])
def test_induced_table(bounded, N):
    t = induced_table_qkN(1, N, bounded)
    assert t.distinct <= 6 and t.is_partition() and t.weighted_sum() == ONE
    assert t.certify_gaps(bounded.alpha, bounded.beta)
    _, nt = gap_set(3, N, bounded.alpha, bounded.beta)
    assert t.neighbor_table() == nt


def test_induced_table_range(bounded):
    with pytest.raises(ValueError):
        induced_table_qkN(1, 29, bounded)


def test_regimes(bounded):
    assert bounded_regime(10, bounded) == (1, False)
    assert bounded_regime(29, bounded) == (1, True)
    assert bounded_regime(20413, bounded) == (1, True)
    assert bounded_regime(20414, bounded) == (2, False)
    with pytest.raises(ValueError):
        bounded_regime(3, bounded)


@pytest.mark.parametrize("N", SEVEN_NS)
def test_seven_table_equals_oracle(bounded, N):
    k, swapped = bounded_regime(N, bounded)
    t = seven_table(k, N, bounded)
    assert t.distinct <= 7
    assert t.is_partition() and t.weighted_sum() == ONE
    g, nt = gap_set(N, N, bounded.alpha, bounded.beta)
    assert t.neighbor_table() == nt
    assert t.multiplicities() == g.counts
    assert lowerbound_check(k, N, bounded, swapped).ok


def test_seven_table_column_gap(bounded):
    t = seven_table(1, 10, bounded)
    col = next(c for c in t.cases if c.gap == theta_form(bounded.alpha, 1))
    assert col.rects[0].n1 - col.rects[0].n0 == 10 - 3


def test_gap_chain(bounded):
    assert gap_chain_check(1, bounded).ok


def test_case_table_json(bounded):
    d = json.loads(seven_table(1, 10, bounded).to_json())
    assert d["context"]["N"] == "10"
    case = d["cases"][0]
    assert set(case) >= {"region_rects", "offset", "gap"}
    assert set(case["offset"]) == {"dn_formula", "dm_formula"}
    assert all(isinstance(x, str) for x in case["gap"])


# -- unbounded family ------------------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2])
def test_delta_chain(unbounded, k):
    d, rep = delta_k(k, unbounded)
    assert rep.ok, rep
    assert certified_sign(d, unbounded.alpha, unbounded.beta) is Sign.POSITIVE


def test_delta_one_form(unbounded):
    d, _ = delta_k(1, unbounded)
    assert d == theta_form(unbounded.beta, 3, "beta") - theta_form(unbounded.alpha, 4)


def test_prop42_counts(unbounded):
    rep = prop42_counts(1, unbounded)
    assert rep.ok, rep
    t = prop42_table(1, unbounded)
    assert next(c for c in t.cases if c.label == "case 1").size == 241 * 257 == 61937


def test_prop42_unresolved_overlaps_double_count(unbounded):
    t = prop42_table(1, unbounded, resolve_overlaps=False)
    assert t.region_total() == 267 * 268 + 2 * (26 - 14) * 11
    assert not t.is_partition()


def test_prop42_and_phi_match_oracle(unbounded):
    _, nt = gap_set(267, 268, unbounded.alpha, unbounded.beta)
    t = prop42_table(1, unbounded)
    assert t.is_partition() and t.weighted_sum() == ONE
    assert t.neighbor_table() == nt
    phi = phi_induction_map(1, unbounded)
    assert phi == nt and phi.is_single_cycle()


def test_prop42_level_two_counts(unbounded):
    assert prop42_counts(2, unbounded).ok


def test_witnesses_level_one(unbounded):
    w = unbounded_witnesses(1, unbounded)
    assert len(set(w)) == 10
    g, _ = gap_set(267, 267, unbounded.alpha, unbounded.beta)
    assert all(x in g.counts for x in w)
    assert g.distinct >= 10


def test_witnesses_level_two_distinct(unbounded):
    w = unbounded_witnesses(2, unbounded)
    assert len(w) == len(set(w)) == 19541


def test_structural_error_type():
    assert issubclass(StructuralError, RuntimeError)
