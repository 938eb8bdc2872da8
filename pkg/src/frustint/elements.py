"""Optical elements acting on sparse Fock states.

Every element is an immutable dataclass; ``apply_element`` dispatches on type.
Losses are purified: lost photons go to a dedicated environment mode owned by
the Loss instance, so nothing here ever produces a mixed state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

from .fock import FockTerm, QuantumState, apply_creation, make_occupation

ENV_PREFIX = "env:"


@dataclass(frozen=True)
class PairSource:
    signal_mode: str
    idler_mode: str
    pump_phase: float = 0.0
    gain_scale: float = 1.0
    name: str | None = None

    def __post_init__(self):
        if self.signal_mode == self.idler_mode:
            raise ValueError("signal_mode and idler_mode must differ")
        if not 0.0 <= self.gain_scale <= 1.0:
            raise ValueError(f"gain_scale {self.gain_scale} outside [0, 1]")
        _check_finite(self.pump_phase, "pump_phase")

    @property
    def modes(self) -> tuple[str, ...]:
        return (self.signal_mode, self.idler_mode)


@dataclass(frozen=True)
class PhaseShift:
    mode: str
    phase: float = 0.0
    name: str | None = None

    def __post_init__(self):
        _check_finite(self.phase, "phase")

    @property
    def modes(self) -> tuple[str, ...]:
        return (self.mode,)


@dataclass(frozen=True)
class Swap:
    mode_a: str
    mode_b: str
    name: str | None = None

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ValueError("swap needs two distinct modes")

    @property
    def modes(self) -> tuple[str, ...]:
        return (self.mode_a, self.mode_b)


@dataclass(frozen=True)
class Loss:
    """Beam-splitter loss with intensity transmissivity ``transmissivity``.

    An amplitude factor ``t`` on a single photon (as used when a fringe
    visibility is written ``2t/(1+t**2)``) corresponds to ``transmissivity=t**2``.
    """

    mode: str
    transmissivity: float = 1.0
    env_mode: str = ""
    name: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.transmissivity <= 1.0:
            raise ValueError(f"transmissivity {self.transmissivity} outside [0, 1]")
        if not self.env_mode:
            object.__setattr__(self, "env_mode", f"{ENV_PREFIX}loss-{self.mode}")
        if self.env_mode == self.mode:
            raise ValueError("env_mode must differ from the lossy mode")

    @property
    def modes(self) -> tuple[str, ...]:
        return (self.mode,)


Element = Union[PairSource, PhaseShift, Swap, Loss]


def _check_finite(value: float, what: str):
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite, got {value}")


def apply_source(state: QuantumState, src: PairSource) -> QuantumState:
    """Keep every term (no emission) and add one pair where the order budget allows."""
    factor = src.gain_scale * cmath.exp(1j * src.pump_phase)
    new_terms = list(state.terms)
    if factor == 0:
        return state
    for t in state.terms:
        if t.pair_order >= state.max_pairs:
            continue
        created = apply_creation(apply_creation(t, src.signal_mode), src.idler_mode)
        new_terms.append(FockTerm(created.occupation, created.amplitude * factor, t.pair_order + 1))
    return QuantumState(tuple(new_terms), state.max_pairs)


def apply_phase(state: QuantumState, el: PhaseShift) -> QuantumState:
    terms = []
    for t in state.terms:
        n = t.count(el.mode)
        amp = t.amplitude * cmath.exp(1j * n * el.phase) if n else t.amplitude
        terms.append(FockTerm(t.occupation, amp, t.pair_order))
    return QuantumState(tuple(terms), state.max_pairs)


def apply_swap(state: QuantumState, el: Swap) -> QuantumState:
    terms = []
    for t in state.terms:
        counts = t.counts
        na, nb = counts.pop(el.mode_a, 0), counts.pop(el.mode_b, 0)
        counts[el.mode_a], counts[el.mode_b] = nb, na
        terms.append(FockTerm(make_occupation(counts), t.amplitude, t.pair_order))
    return QuantumState(tuple(terms), state.max_pairs)


def apply_loss(state: QuantumState, el: Loss) -> QuantumState:
    T = el.transmissivity
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmissivity {T} outside [0, 1]")
    terms = []
    for t in state.terms:
        n = t.count(el.mode)
        if n == 0:
            terms.append(t)
            continue
        for k in range(n + 1):
            weight = math.comb(n, k) * T**k * (1.0 - T) ** (n - k)
            if weight == 0.0:
                continue
            counts = t.counts
            counts[el.mode] = k
            counts[el.env_mode] = counts.get(el.env_mode, 0) + n - k
            terms.append(FockTerm(make_occupation(counts), t.amplitude * math.sqrt(weight), t.pair_order))
    return QuantumState(tuple(terms), state.max_pairs)


_DISPATCH = {
    PairSource: apply_source,
    PhaseShift: apply_phase,
    Swap: apply_swap,
    Loss: apply_loss,
}


def apply_element(state: QuantumState, el: Element) -> QuantumState:
    try:
        fn = _DISPATCH[type(el)]
    except KeyError:
        raise TypeError(f"not an optical element: {el!r}") from None
    return fn(state, el)
