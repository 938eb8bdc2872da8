import json

import pytest
from hypothesis import given, settings, strategies as st

from frustint.elements import Loss, PairSource, PhaseShift, Swap
from frustint.engine import Experiment, canonical_four_crystal, run_pipeline
from frustint.experiment_io import (
    ValidationError,
    bundled,
    parse,
    parse_document,
    parse_state,
    serialize_doc,
    serialize_state,
)
from frustint.fock import vacuum


def doc(**over):
    d = json.loads(bundled())
    d.update(over)
    return d


def test_bundled_canonical_equals_builder():
    assert parse(bundled()) == canonical_four_crystal(0, 0, 0, 0, q=(1, 1, 1, 1))
    assert parse_document(bundled()).geometry is not None


def test_loss_out_of_range_names_element():
    d = doc()
    d["elements"].insert(7, {"type": "loss", "mode": "4", "transmissivity": 1.2})
    with pytest.raises(ValidationError) as err:
        parse(json.dumps(d))
    assert any(path == "elements[7]" for path, _ in err.value.problems)


def test_missing_detectors():
    d = doc()
    del d["detectors"]
    with pytest.raises(ValidationError, match="no detectors declared"):
        parse(json.dumps(d))


@pytest.mark.parametrize("mutate, needle", [
    (lambda d: d["elements"].append({"type": "mirror"}), "unknown element tag"),
    (lambda d: d["elements"].append({"type": "phase", "mode": "9", "phase": 0}), "dangling mode"),
    (lambda d: d["elements"].extend([{"type": "loss", "mode": "1", "transmissivity": 0.5, "env_mode": "env:a"},
                                     {"type": "loss", "mode": "2", "transmissivity": 0.5, "env_mode": "env:a"}]),
     "duplicate env mode"),
    (lambda d: d["elements"].append({"type": "swap", "mode_a": "1", "mode_b": "2", "phase": 1}), "unexpected field"),
    (lambda d: d.update(max_pairs=-1), "max_pairs"),
    (lambda d: d.update(detector_model="pnr"), "detector_model"),
    (lambda d: d["detectors"].update({"5": "7"}), "dangling mode"),
])
def test_structured_errors(mutate, needle):
    d = doc()
    mutate(d)
    with pytest.raises(ValidationError, match=needle):
        parse(json.dumps(d))


def test_syntax_error():
    with pytest.raises(ValidationError, match="syntax error"):
        parse("{not json")


junk = st.recursive(st.none() | st.booleans() | st.floats() | st.integers() | st.text(max_size=5),
                    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=8), inner, max_size=4),
                    max_leaves=20)


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(st.sampled_from(["modes", "elements", "detectors", "max_pairs", "geometry", "scan",
                                        "detector_model", "x"]), junk, max_size=7))
def test_validation_is_total(d):
    try:
        parse(json.dumps(d))
    except ValidationError:
        pass


@settings(max_examples=200, deadline=None)
@given(st.lists(st.dictionaries(st.sampled_from(["type", "mode", "signal_mode", "idler_mode", "phase",
                                                 "transmissivity", "mode_a", "mode_b", "env_mode", "gain_scale"]),
                                st.sampled_from(["1", "2", "source", "loss", "phase", "swap", 0.5, -3, 2.0, None]),
                                max_size=6), max_size=5))
def test_element_validation_is_total(elements):
    d = doc(elements=elements)
    try:
        parse(json.dumps(d))
    except ValidationError:
        pass


MODES = ["a", "b", "c"]
mode = st.sampled_from(MODES)
phase = st.floats(-10, 10, allow_nan=False)
element = st.one_of(
    st.builds(lambda s, i, p, g, n: PairSource(s, i if i != s else ("a" if s != "a" else "b"), p, g, n),
              mode, mode, phase, st.floats(0, 1), st.sampled_from([None, "x", "y"])),
    st.builds(PhaseShift, mode, phase, st.sampled_from([None, "x", "z"])),
    st.builds(lambda a: Swap(a, "c" if a != "c" else "a"), mode),
)


@settings(max_examples=100, deadline=None)
@given(st.lists(element, max_size=6), st.integers(0, 3), st.lists(st.floats(0, 1), max_size=3))
def test_doc_round_trip(elements, max_pairs, Ts):
    losses = [Loss(m, T, f"env:{k}") for k, (m, T) in enumerate(zip(MODES, Ts))]
    exp = Experiment(tuple(MODES), tuple(elements) + tuple(losses), {"A": "a", "B": "b"}, max_pairs)
    assert parse(serialize_doc(exp)) == exp


def test_state_serialization():
    v = serialize_state(vacuum())
    assert json.loads(v) == [{"occupation": {}, "re": 1.0, "im": 0.0, "order": 0}]
    s = run_pipeline(canonical_four_crystal(0.3, 0.1, 0.2, 0.9))
    text = serialize_state(s)
    assert serialize_state(parse_state(text)) == text
    other = serialize_state(run_pipeline(canonical_four_crystal(0.3, 0.1, 0.2, 0.91)))
    assert other != text
