import json

import pytest

from gaplab.cf_core import Sign
from gaplab.constructions import (
    BOUNDED_LEVEL_CAP,
    PairConstruction,
    badly_approx_witness,
    bounded_family,
    q_next_poly_corrected,
    q_next_poly_printed,
    r_next_poly,
    unbounded_family,
    verify_family_invariants,
)


def test_bounded_level_values(bounded):
    assert (bounded.qk(1), bounded.qpk(1), bounded.bpk(1)) == (3, 28, 9)
    assert bounded.ak(1) == 3 and bounded.apk(1) == 28
    assert bounded.ak(2) == 3 ** 8 + 3 ** 5 == 6804
    assert bounded.qk(2) == 3 ** 9 + 3 ** 6 + 1 == 20413
    assert bounded.bk(2) == 729
    assert bounded.bpk(2) == 28 ** 6 == 481890304
    assert bounded.qpk(2) == bounded.bpk(2) * bounded.qk(2) + 1


def test_bounded_generator_matches_table(bounded):
    for k in range(1, 3):
        assert bounded.alpha.q(k) == bounded.qk(k)
        assert bounded.beta.q(k) == bounded.qpk(k)


def test_unbounded_level_values(unbounded):
    u = unbounded
    assert [u.qk(k) for k in range(3)] == [1, 2, 5]
    assert [u.qpk(k) for k in range(3)] == [1, 3, 4]
    assert [u.ak(k) for k in range(3, 7)] == [1, 3, 10, 36]
    assert [u.apk(k) for k in range(3, 7)] == [2, 23, 1, 35]
    got = [(u.qk(k), u.qpk(k)) for k in range(3, 7)]
    assert got == [(7, 11), (26, 257), (267, 268), (9638, 9637)]
    assert (u.Rk(2), u.Qk(2)) == (268, 9637)
    assert u.ak(9) == 2 * u.Qk(2) + u.Rk(2) - 1 == 19541


def test_closed_forms_at_first_level():
    assert r_next_poly(4, 3) == 268
    assert q_next_poly_printed(4, 3) == 9349
    assert q_next_poly_corrected(4, 3) == 9637


@pytest.mark.parametrize("levels", [1, 2, 3])
def test_bounded_invariants(levels):
    rep = verify_family_invariants(bounded_family(levels))
    assert rep.ok, rep
    assert not rep.flags


def test_unbounded_invariants_flag_printed_polynomial(unbounded):
    rep = verify_family_invariants(unbounded)
    assert rep.ok, rep
    assert any("9349" in c.detail and "9637" in c.detail for c in rep.flags)


def test_tampered_bprime_fails_at_level_one(bounded):
    d = json.loads(bounded.to_json())
    d["b'"][0] = "8"
    rep = verify_family_invariants(PairConstruction.from_json(json.dumps(d)))
    assert not rep.ok
    assert rep.failures[0].name.startswith("level 1: q'_k = b'_k q_k + 1")


@pytest.mark.parametrize("make", [bounded_family, unbounded_family])
def test_json_round_trip(make):
    c = make(2)
    back = PairConstruction.from_json(c.to_json())
    assert back == c
    assert back.to_json() == c.to_json()


def test_level_validation():
    with pytest.raises(ValueError):
        bounded_family(0)
    with pytest.raises(ValueError):
        bounded_family(BOUNDED_LEVEL_CAP + 1)


@pytest.mark.parametrize("k", [1, 2])
def test_not_badly_approximable(bounded, k):
    assert badly_approx_witness(bounded, k) is Sign.NEGATIVE


def test_badly_approx_rejects_unbounded(unbounded):
    with pytest.raises(ValueError):
        badly_approx_witness(unbounded, 1)
