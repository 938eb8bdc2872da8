"""Sparse Fock-state algebra.

States are kept as lists of occupation kets with complex amplitudes. The pair
generation amplitude ``p`` is never given a number: every term carries its
``pair_order`` instead, and probabilities are later reported as coefficients
of ``p**(2 * order)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

DEFAULT_EPSILON = 1e-12

Occupation = tuple[tuple[str, int], ...]


def make_occupation(counts: Mapping[str, int]) -> Occupation:
    """Canonical, hashable occupation: sorted ``(mode, n)`` pairs with n > 0."""
    for mode, n in counts.items():
        if n < 0:
            raise ValueError(f"negative occupation {n} for mode {mode!r}")
    return tuple(sorted((str(m), int(n)) for m, n in counts.items() if n))


@dataclass(frozen=True)
class FockTerm:
    occupation: Occupation = ()
    amplitude: complex = 1.0 + 0.0j
    pair_order: int = 0

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], amplitude: complex = 1.0,
                    pair_order: int = 0) -> "FockTerm":
        return cls(make_occupation(counts), complex(amplitude), pair_order)

    @property
    def counts(self) -> dict[str, int]:
        return dict(self.occupation)

    def count(self, mode: str) -> int:
        for m, n in self.occupation:
            if m == mode:
                return n
        return 0

    @property
    def total_photons(self) -> int:
        return sum(n for _, n in self.occupation)

    def with_counts(self, counts: Mapping[str, int], amplitude: complex) -> "FockTerm":
        return FockTerm(make_occupation(counts), amplitude, self.pair_order)


@dataclass(frozen=True)
class QuantumState:
    terms: tuple[FockTerm, ...] = ()
    max_pairs: int = 2

    def __post_init__(self):
        if self.max_pairs < 0:
            raise ValueError("max_pairs must be nonnegative")
        object.__setattr__(self, "terms", tuple(self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def amplitude(self, counts: Mapping[str, int]) -> complex:
        """Summed amplitude of every term with exactly this occupation."""
        key = make_occupation(counts)
        return sum((t.amplitude for t in self.terms if t.occupation == key), 0j)

    def norm_by_order(self) -> dict[int, float]:
        """``sum |amplitude|**2`` per pair order (no merging performed)."""
        out: dict[int, float] = defaultdict(float)
        for t in self.terms:
            out[t.pair_order] += abs(t.amplitude) ** 2
        return dict(out)

    def sorted(self) -> "QuantumState":
        return QuantumState(tuple(sorted(self.terms, key=term_sort_key)), self.max_pairs)


def term_sort_key(term: FockTerm):
    return (term.pair_order, term.occupation)


def vacuum(max_pairs: int = 2) -> QuantumState:
    return QuantumState((FockTerm(),), max_pairs)


def apply_creation(term: FockTerm, mode: str) -> FockTerm:
    """Bosonic creation operator on one mode: ``a^dag |n> = sqrt(n+1) |n+1>``."""
    counts = term.counts
    n = counts.get(mode, 0)
    counts[mode] = n + 1
    return FockTerm(make_occupation(counts), term.amplitude * math.sqrt(n + 1), term.pair_order)


def merge_terms(state: QuantumState, epsilon: float = DEFAULT_EPSILON) -> QuantumState:
    """Sum amplitudes of identical kets and drop those with ``|amp| <= epsilon``.

    The result is in canonical order (pair order, then occupation).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    amps: dict[Occupation, complex] = {}
    orders: dict[Occupation, int] = {}
    for t in state.terms:
        if t.occupation in amps:
            if orders[t.occupation] != t.pair_order:
                raise ValueError(f"inconsistent pair order for ket {t.occupation}")
            amps[t.occupation] += t.amplitude
        else:
            amps[t.occupation] = t.amplitude
            orders[t.occupation] = t.pair_order
    terms = [FockTerm(occ, amp, orders[occ]) for occ, amp in amps.items() if abs(amp) > epsilon]
    terms.sort(key=term_sort_key)
    return QuantumState(tuple(terms), state.max_pairs)


def total_probability(state: QuantumState) -> float:
    """``sum |amp|**2`` over distinct kets of a merged copy, all orders together."""
    return sum(abs(t.amplitude) ** 2 for t in merge_terms(state, 0.0).terms)


def state_from_terms(terms: Iterable[FockTerm], max_pairs: int = 2) -> QuantumState:
    return QuantumState(tuple(terms), max_pairs)
