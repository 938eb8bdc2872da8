"""Run element pipelines over the vacuum and build the standard experiments."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping, Sequence

from .elements import ENV_PREFIX, Element, Loss, PairSource, PhaseShift, Swap, apply_element
from .fock import DEFAULT_EPSILON, QuantumState, merge_terms, vacuum

DETECTOR_MODELS = ("threshold", "number_resolving")


class ExperimentError(ValueError):
    """An Experiment that references unknown modes or reuses environment modes."""


@dataclass(frozen=True)
class Experiment:
    modes: tuple[str, ...]
    pipeline: tuple[Element, ...]
    detectors: Mapping[str, str]
    max_pairs: int = 2
    named_phases: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    detector_model: str = "threshold"
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "pipeline", tuple(self.pipeline))
        object.__setattr__(self, "detectors", dict(self.detectors))
        if not self.named_phases:
            object.__setattr__(self, "named_phases", collect_named_phases(self.pipeline))
        else:
            object.__setattr__(self, "named_phases",
                               {k: tuple(v) for k, v in self.named_phases.items()})

    @property
    def env_modes(self) -> tuple[str, ...]:
        return tuple(el.env_mode for el in self.pipeline if isinstance(el, Loss))

    def validate(self) -> None:
        if self.max_pairs < 0:
            raise ExperimentError("max_pairs must be >= 0")
        if len(set(self.modes)) != len(self.modes):
            raise ExperimentError("duplicate mode labels")
        if self.detector_model not in DETECTOR_MODELS:
            raise ExperimentError(f"unknown detector_model {self.detector_model!r}")
        known = set(self.modes)
        env_seen: set[str] = set()
        for i, el in enumerate(self.pipeline):
            for m in el.modes:
                if m not in known:
                    raise ExperimentError(f"element {i} references unknown mode {m!r}")
            if isinstance(el, Loss):
                if el.env_mode in known:
                    raise ExperimentError(
                        f"element {i}: env mode {el.env_mode!r} collides with a registered mode")
                if el.env_mode in env_seen:
                    raise ExperimentError(f"element {i}: env mode {el.env_mode!r} reused")
                env_seen.add(el.env_mode)
        det_modes = list(self.detectors.values())
        if len(set(det_modes)) != len(det_modes):
            raise ExperimentError("detector modes must be distinct")
        for det, m in self.detectors.items():
            if m not in known:
                raise ExperimentError(f"detector {det!r} on unknown mode {m!r}")
        for name, idx in self.named_phases.items():
            for i in idx:
                if not 0 <= i < len(self.pipeline):
                    raise ExperimentError(f"named phase {name!r} points past the pipeline")
                if not isinstance(self.pipeline[i], (PhaseShift, PairSource)):
                    raise ExperimentError(f"named phase {name!r} targets a non-phase element")

    def with_phase(self, name: str, value: float) -> "Experiment":
        """Copy with every element registered under ``name`` set to ``value``."""
        if name not in self.named_phases:
            raise KeyError(f"unknown phase target {name!r}; have {sorted(self.named_phases)}")
        pipeline = list(self.pipeline)
        for i in self.named_phases[name]:
            el = pipeline[i]
            if isinstance(el, PairSource):
                pipeline[i] = dataclasses.replace(el, pump_phase=value)
            else:
                pipeline[i] = dataclasses.replace(el, phase=value)
        return dataclasses.replace(self, pipeline=tuple(pipeline))

    def with_phases(self, **values: float) -> "Experiment":
        exp = self
        for name, v in values.items():
            exp = exp.with_phase(name, v)
        return exp


def collect_named_phases(pipeline: Sequence[Element]) -> dict[str, tuple[int, ...]]:
    named: dict[str, list[int]] = {}
    for i, el in enumerate(pipeline):
        if el.name and isinstance(el, (PhaseShift, PairSource)):
            named.setdefault(el.name, []).append(i)
    return {k: tuple(v) for k, v in named.items()}


def run_pipeline(exp: Experiment) -> QuantumState:
    exp.validate()
    state = reduce(apply_element, exp.pipeline, vacuum(exp.max_pairs))
    return merge_terms(state, exp.epsilon)


DETECTORS_1234 = {"1": "1", "2": "2", "3": "3", "4": "4"}


def canonical_four_crystal(phi_s1: float = 0.0, phi_s2: float = 0.0, phi_i: float = 0.0,
                           phi_p: float = 0.0, q: Sequence[float] = (1.0, 1.0, 1.0, 1.0),
                           losses: Iterable[Loss] = (), max_pairs: int = 2,
                           swapped: bool = True) -> Experiment:
    """Four coherently pumped crystals, two pairs of which share path identity.

    Modes 1-4 are the detector paths. Crystals I and II first emit with their
    idlers on paths 1 and 3 respectively; the idler swap (QWP at 45 degrees)
    then exchanges those paths, so that crystal I ends up on (2, 3) and
    crystal II on (1, 4). Crystals III (1, 2) and IV (3, 4) are pumped with
    ``phi_p``. With ``swapped=False`` the swap is omitted and crystals I/III
    and II/IV form two independent two-photon interferometers.

    ``q`` are intensity weights per crystal; each becomes an amplitude gain of
    ``sqrt(q_i)``. ``losses`` are inserted after the swap, before III and IV.
    """
    if len(q) != 4:
        raise ValueError("q needs one weight per crystal")
    g = [math.sqrt(qi) for qi in q]
    pipeline: list[Element] = [
        PairSource("2", "1", 0.0, g[0], name="source_I"),
        PairSource("4", "3", 0.0, g[1], name="source_II"),
        PhaseShift("2", phi_s1, name="phi_s1"),
        PhaseShift("4", phi_s2, name="phi_s2"),
        PhaseShift("1", phi_i, name="phi_i"),
        PhaseShift("3", phi_i, name="phi_i"),
    ]
    if swapped:
        pipeline.append(Swap("1", "3", name="idler_swap"))
    pipeline.extend(losses)
    pipeline += [
        PairSource("1", "2", phi_p, g[2], name="phi_p"),
        PairSource("3", "4", phi_p, g[3], name="phi_p"),
    ]
    return Experiment(("1", "2", "3", "4"), tuple(pipeline), DETECTORS_1234, max_pairs)


def two_crystal(phi_s: float = 0.0, phi_i: float = 0.0, phi_p: float = 0.0,
                gain: float = 1.0, losses: Iterable[Loss] = (), max_pairs: int = 1) -> Experiment:
    """Crystals I and III only: one pair, signal on mode "s", idler on mode "i"."""
    pipeline: list[Element] = [
        PairSource("s", "i", 0.0, gain, name="source_I"),
        PhaseShift("s", phi_s, name="phi_s"),
        PhaseShift("i", phi_i, name="phi_i"),
        *losses,
        PairSource("s", "i", phi_p, 1.0, name="phi_p"),
    ]
    return Experiment(("s", "i"), tuple(pipeline), {"s": "s", "i": "i"}, max_pairs)


def s2_loss(amplitude_transmissivity: float) -> Loss:
    """Loss on photon s2 (mode 4) with amplitude factor ``t`` on the surviving branch."""
    return Loss("4", amplitude_transmissivity**2, f"{ENV_PREFIX}s2")
