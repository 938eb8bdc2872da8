"""Perturbative Fock-space simulation of multiphoton frustrated interference."""

from .analysis import (
    ScanCurve,
    SourceImbalanceTable,
    entangled_reference,
    estimate_alpha,
    fit_sinusoid,
    invert_visibility_to_T,
    position_to_phase,
    predicted_visibility_fourfold,
    predicted_visibility_threefold,
    sample_counts,
    scan,
    scan_positions,
)
from .detection import ClickPattern, OrderedProbability, click_probability, pattern, single_counts
from .elements import Loss, PairSource, PhaseShift, Swap, apply_element
from .engine import Experiment, canonical_four_crystal, run_pipeline, two_crystal
from .experiment_io import ValidationError, parse, serialize_state
from .fitting import DegenerateFitError, FitResult
from .fock import FockTerm, QuantumState, apply_creation, merge_terms, vacuum
from .timing import Geometry, arrival_times, check_alignment

__version__ = "0.1.0"
