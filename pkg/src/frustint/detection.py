"""Click-pattern probabilities with post-selection and marginalization.

Probabilities are returned per pair order: ``per_order[k]`` is the
coefficient of ``p**(2k)``. Environment modes and detectors outside the
pattern are summed over; amplitudes add coherently only within one full
occupation (environment included).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .fock import QuantumState, merge_terms


@dataclass(frozen=True)
class ClickPattern:
    required: frozenset[str] = frozenset()
    forbidden: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "required", frozenset(str(d) for d in self.required))
        object.__setattr__(self, "forbidden", frozenset(str(d) for d in self.forbidden))
        overlap = self.required & self.forbidden
        if overlap:
            raise ValueError(f"detectors both required and forbidden: {sorted(overlap)}")

    @classmethod
    def parse(cls, text: str) -> "ClickPattern":
        """``"1,3,4"`` requires clicks; a ``!`` prefix forbids one (``"2,3,!1,!4"``)."""
        required, forbidden = set(), set()
        for tok in text.replace(" ", "").split(","):
            if not tok:
                continue
            if tok.startswith("!"):
                forbidden.add(tok[1:])
            else:
                required.add(tok)
        return cls(frozenset(required), frozenset(forbidden))

    @property
    def detectors(self) -> frozenset[str]:
        return self.required | self.forbidden

    def __str__(self) -> str:
        toks = sorted(self.required) + ["!" + d for d in sorted(self.forbidden)]
        return ",".join(toks)


def pattern(*required: str | int, forbidden: Iterable[str | int] = ()) -> ClickPattern:
    return ClickPattern(frozenset(map(str, required)), frozenset(map(str, forbidden)))


@dataclass(frozen=True)
class OrderedProbability:
    per_order: Mapping[int, float] = field(default_factory=dict)

    def __getitem__(self, order: int) -> float:
        return self.per_order.get(order, 0.0)

    def __call__(self, p: float) -> float:
        """Evaluate ``sum_k coeff_k * p**(2k)`` for a numeric pair amplitude."""
        return sum(c * p ** (2 * k) for k, c in self.per_order.items())


def _clicks(n: int, model: str) -> bool:
    return n == 1 if model == "number_resolving" else n >= 1


def click_probability(state: QuantumState, pattern: ClickPattern, detectors: Mapping[str, str],
                      detector_model: str = "threshold") -> OrderedProbability:
    for det in pattern.detectors:
        if det not in detectors:
            raise KeyError(f"pattern references unknown detector {det!r}")
    req = [detectors[d] for d in pattern.required]
    forb = [detectors[d] for d in pattern.forbidden]
    per_order: dict[int, float] = defaultdict(float)
    for t in merge_terms(state, 0.0).terms:
        if all(_clicks(t.count(m), detector_model) for m in req) and all(t.count(m) == 0 for m in forb):
            per_order[t.pair_order] += abs(t.amplitude) ** 2
    return OrderedProbability(dict(per_order))


def single_counts(state: QuantumState, detector: str, detectors: Mapping[str, str],
                  detector_model: str = "threshold") -> OrderedProbability:
    return click_probability(state, ClickPattern(frozenset({str(detector)})), detectors, detector_model)
