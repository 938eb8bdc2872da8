"""Reading and writing ``.experiment.json`` documents and serialized states.

A document is a JSON object::

    {
      "modes": ["1", "2", "3", "4"],
      "max_pairs": 2,
      "detector_model": "threshold",
      "detectors": {"1": "1", ...},
      "elements": [
        {"type": "source", "signal_mode": "2", "idler_mode": "1",
         "pump_phase": 0.0, "gain_scale": 1.0, "name": "source_I"},
        {"type": "phase", "mode": "2", "phase": 0.0, "name": "phi_s1"},
        {"type": "swap", "mode_a": "1", "mode_b": "3"},
        {"type": "loss", "mode": "4", "transmissivity": 0.5, "env_mode": "env:s2"}
      ],
      "geometry": {"l_sp1": ..., ...},
      "scan": {"target": "phi_s1", "pattern": "1,2,3,4", "start": 0, "stop": 6.28,
               "steps": 32, "unit": "phase"}
    }

Elements run in file order. ``name`` on a phase or source registers it as a
scan target; several elements may share one name.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from .elements import ENV_PREFIX, Element, Loss, PairSource, PhaseShift, Swap
from .engine import DETECTOR_MODELS, Experiment, ExperimentError
from .fock import FockTerm, QuantumState, make_occupation, term_sort_key
from .timing import Geometry

ELEMENT_FIELDS = {
    "source": (PairSource, {"signal_mode": str, "idler_mode": str},
               {"pump_phase": float, "gain_scale": float, "name": str}),
    "phase": (PhaseShift, {"mode": str, "phase": float}, {"name": str}),
    "swap": (Swap, {"mode_a": str, "mode_b": str}, {"name": str}),
    "loss": (Loss, {"mode": str, "transmissivity": float}, {"env_mode": str, "name": str}),
}
TAGS = {cls: tag for tag, (cls, _, _) in ELEMENT_FIELDS.items()}
TOP_LEVEL = {"modes", "elements", "detectors", "max_pairs", "detector_model", "geometry", "scan"}
SCAN_FIELDS = {"target", "pattern", "grid", "start", "stop", "steps", "unit", "wavelength",
               "multiplicity", "order"}


class ValidationError(ValueError):
    """All problems found in a document, each as ``(path, reason)``."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{p}: {r}" for p, r in problems))

    def report(self) -> str:
        return "\n".join(f"{p}: {r}" for p, r in self.problems)


@dataclass
class ExperimentDoc:
    experiment: Experiment
    geometry: Geometry | None = None
    scan: dict[str, Any] = field(default_factory=dict)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _element(i: int, raw: Any, problems: list) -> Element | None:
    path = f"elements[{i}]"
    if not isinstance(raw, dict):
        problems.append((path, "element must be an object"))
        return None
    tag = raw.get("type")
    if tag not in ELEMENT_FIELDS:
        problems.append((f"{path}.type", f"unknown element tag {tag!r}"))
        return None
    cls, required, optional = ELEMENT_FIELDS[tag]
    kwargs: dict[str, Any] = {}
    ok = True
    for key in set(raw) - set(required) - set(optional) - {"type"}:
        problems.append((f"{path}.{key}", f"unexpected field for {tag}"))
        ok = False
    for key, typ in {**required, **optional}.items():
        if key not in raw:
            if key in required:
                problems.append((f"{path}.{key}", "missing"))
                ok = False
            continue
        v = raw[key]
        if typ is float and not _is_number(v):
            problems.append((f"{path}.{key}", f"expected a finite number, got {v!r}"))
            ok = False
        elif typ is str and not isinstance(v, str):
            problems.append((f"{path}.{key}", f"expected a string, got {v!r}"))
            ok = False
        else:
            kwargs[key] = float(v) if typ is float else v
    if not ok:
        return None
    if tag == "loss" and "env_mode" not in kwargs:
        kwargs["env_mode"] = f"{ENV_PREFIX}{kwargs.get('name', i)}"
    try:
        return cls(**kwargs)
    except ValueError as exc:
        problems.append((path, f"{tag}: {exc}"))
        return None


def parse_document(text: str) -> ExperimentDoc:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ValidationError([("$", f"syntax error: {exc}")]) from None
    if not isinstance(doc, dict):
        raise ValidationError([("$", "document must be a JSON object")])
    problems: list[tuple[str, str]] = []
    for key in set(doc) - TOP_LEVEL:
        problems.append((key, "unknown top-level field"))

    modes = doc.get("modes")
    if not isinstance(modes, list) or not all(isinstance(m, str) for m in modes):
        problems.append(("modes", "must be a list of strings"))
        modes = []
    elif len(set(modes)) != len(modes):
        problems.append(("modes", "duplicate mode labels"))
    for m in modes:
        if isinstance(m, str) and m.startswith(ENV_PREFIX):
            problems.append(("modes", f"{m!r} uses the reserved env: prefix"))

    max_pairs = doc.get("max_pairs", 2)
    if not isinstance(max_pairs, int) or isinstance(max_pairs, bool) or max_pairs < 0:
        problems.append(("max_pairs", "must be a nonnegative integer"))
        max_pairs = 2

    model = doc.get("detector_model", "threshold")
    if model not in DETECTOR_MODELS:
        problems.append(("detector_model", f"must be one of {DETECTOR_MODELS}"))

    detectors = doc.get("detectors")
    if not detectors:
        problems.append(("detectors", "no detectors declared"))
        detectors = {}
    elif not isinstance(detectors, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in detectors.items()):
        problems.append(("detectors", "must map detector ids to mode labels"))
        detectors = {}
    for det, m in detectors.items():
        if m not in modes:
            problems.append((f"detectors.{det}", f"dangling mode {m!r}"))
    if len(set(detectors.values())) != len(detectors):
        problems.append(("detectors", "detector modes must be distinct"))

    raw_elements = doc.get("elements", [])
    if not isinstance(raw_elements, list):
        problems.append(("elements", "must be a list"))
        raw_elements = []
    pipeline = []
    env_seen: dict[str, int] = {}
    for i, raw in enumerate(raw_elements):
        el = _element(i, raw, problems)
        if el is None:
            continue
        for m in el.modes:
            if m not in modes:
                problems.append((f"elements[{i}]", f"dangling mode {m!r}"))
        if isinstance(el, Loss):
            if el.env_mode in modes:
                problems.append((f"elements[{i}].env_mode", "collides with a declared mode"))
            if el.env_mode in env_seen:
                problems.append((f"elements[{i}].env_mode",
                                 f"duplicate env mode, also used by elements[{env_seen[el.env_mode]}]"))
            env_seen[el.env_mode] = i
        pipeline.append(el)

    geometry = None
    if "geometry" in doc:
        try:
            if not isinstance(doc["geometry"], dict):
                raise ValueError("must be an object")
            geometry = Geometry.from_dict(doc["geometry"])
        except (TypeError, ValueError) as exc:
            problems.append(("geometry", str(exc)))

    scan = doc.get("scan", {})
    if not isinstance(scan, dict):
        problems.append(("scan", "must be an object"))
        scan = {}
    for key in set(scan) - SCAN_FIELDS:
        problems.append((f"scan.{key}", "unknown scan field"))

    if problems:
        raise ValidationError(problems)
    exp = Experiment(tuple(modes), tuple(pipeline), detectors, max_pairs, detector_model=model)
    if scan.get("target") is not None and scan["target"] not in exp.named_phases:
        raise ValidationError([("scan.target", f"unknown phase target {scan['target']!r}")])
    try:
        exp.validate()
    except ExperimentError as exc:
        raise ValidationError([("$", str(exc))]) from None
    return ExperimentDoc(exp, geometry, scan)


def parse(text: str) -> Experiment:
    return parse_document(text).experiment


def load(path) -> ExperimentDoc:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


def bundled(name: str = "canonical.json") -> str:
    return resources.files("frustint.data").joinpath(name).read_text(encoding="utf-8")


def element_to_dict(el: Element) -> dict:
    tag = TAGS[type(el)]
    _, required, optional = ELEMENT_FIELDS[tag]
    d: dict[str, Any] = {"type": tag}
    for key in (*required, *optional):
        v = getattr(el, key)
        if v is not None:
            d[key] = v
    return d


def experiment_to_dict(exp: Experiment, geometry: Geometry | None = None,
                       scan: dict | None = None) -> dict:
    d: dict[str, Any] = {
        "modes": list(exp.modes),
        "max_pairs": exp.max_pairs,
        "detector_model": exp.detector_model,
        "detectors": dict(exp.detectors),
        "elements": [element_to_dict(el) for el in exp.pipeline],
    }
    if geometry is not None:
        d["geometry"] = {k: getattr(geometry, k) for k in Geometry.__dataclass_fields__}
    if scan:
        d["scan"] = dict(scan)
    return d


def serialize_doc(exp: Experiment, geometry: Geometry | None = None, scan: dict | None = None) -> str:
    return json.dumps(experiment_to_dict(exp, geometry, scan), indent=2) + "\n"


def _clean(x: float) -> float:
    return x + 0.0  # folds -0.0 into 0.0


def serialize_state(state: QuantumState) -> str:
    """Canonically sorted JSON list of ``{occupation, re, im, order}``."""
    rows = [
        {
            "occupation": dict(t.occupation),
            "re": _clean(t.amplitude.real),
            "im": _clean(t.amplitude.imag),
            "order": t.pair_order,
        }
        for t in sorted(state.terms, key=term_sort_key)
    ]
    return json.dumps(rows, indent=2) + "\n"


def parse_state(text: str, max_pairs: int | None = None) -> QuantumState:
    rows = json.loads(text)
    terms = tuple(
        FockTerm(make_occupation(r["occupation"]), complex(r["re"], r["im"]), int(r["order"]))
        for r in rows
    )
    if max_pairs is None:
        max_pairs = max((t.pair_order for t in terms), default=0)
    return QuantumState(terms, max_pairs)
