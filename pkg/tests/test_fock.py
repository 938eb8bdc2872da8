import cmath
import math

import pytest
from hypothesis import given, strategies as st

from frustint.fock import (
    FockTerm,
    QuantumState,
    apply_creation,
    make_occupation,
    merge_terms,
    total_probability,
    vacuum,
)


def test_vacuum():
    v = vacuum()
    assert len(v) == 1
    t = v.terms[0]
    assert t.occupation == () and t.amplitude == 1 + 0j and t.pair_order == 0
    assert total_probability(v) == 1.0
    assert merge_terms(v) == v


def test_creation_factors():
    t = apply_creation(FockTerm(), "1")
    assert t.count("1") == 1 and t.amplitude == 1
    t2 = apply_creation(FockTerm.from_counts({"1": 1}), "1")
    assert t2.count("1") == 2
    assert t2.amplitude == pytest.approx(math.sqrt(2), abs=1e-15)
    twice = apply_creation(apply_creation(FockTerm(), "x"), "x")
    assert twice.amplitude == pytest.approx(math.sqrt(1) * math.sqrt(2), abs=1e-15)


@pytest.mark.parametrize("k", range(7))
def test_creation_k_times_gives_sqrt_factorial(k):
    t = FockTerm()
    for _ in range(k):
        t = apply_creation(t, "m")
    assert t.count("m") == k
    assert abs(t.amplitude) == pytest.approx(math.sqrt(math.factorial(k)), rel=1e-14)


def test_merge_two_1111_kets():
    theta, phi_p = 0.7, 0.2
    ket = {"1": 1, "2": 1, "3": 1, "4": 1}
    s = QuantumState((FockTerm.from_counts(ket, cmath.exp(1j * theta), 2),
                      FockTerm.from_counts(ket, cmath.exp(2j * phi_p), 2)))
    m = merge_terms(s)
    assert len(m) == 1
    assert m.terms[0].amplitude == pytest.approx(cmath.exp(1j * theta) + cmath.exp(2j * phi_p))


def test_merge_destructive_and_disjoint():
    ket = {"1": 1}
    s = QuantumState((FockTerm.from_counts(ket, 1.0, 1), FockTerm.from_counts(ket, -1.0, 1)))
    assert len(merge_terms(s, 1e-12)) == 0
    disjoint = QuantumState((FockTerm.from_counts({"1": 1}, 0.5, 1), FockTerm.from_counts({"2": 1}, 0.5j, 1)))
    assert set(merge_terms(disjoint).terms) == set(disjoint.terms)


def test_zero_occupations_are_dropped():
    assert make_occupation({"1": 0, "2": 3}) == (("2", 3),)
    with pytest.raises(ValueError):
        make_occupation({"1": -1})


amps = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
kets = st.sampled_from([{}, {"1": 1}, {"2": 1}, {"1": 1, "2": 1}, {"1": 2}])


@given(st.lists(st.tuples(kets, amps), max_size=12))
def test_merge_preserves_coherent_norm(items):
    terms = [FockTerm.from_counts(k, a, sum(k.values())) for k, a in items]
    s = QuantumState(tuple(terms), max_pairs=3)
    exact = {}
    for t in terms:
        exact[t.occupation] = exact.get(t.occupation, 0) + t.amplitude
    expected = sum(abs(a) ** 2 for a in exact.values())
    eps = 1e-12
    got = sum(abs(t.amplitude) ** 2 for t in merge_terms(s, eps).terms)
    assert got == pytest.approx(expected, abs=eps**2 * len(terms) + 1e-12)
    occs = [t.occupation for t in merge_terms(s, eps).terms]
    assert len(occs) == len(set(occs))
