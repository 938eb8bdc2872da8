"""Phase scans, fringe fits and the closed-form visibility laws."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .detection import ClickPattern, click_probability
from .engine import Experiment, canonical_four_crystal, run_pipeline, s2_loss
from .fitting import FitResult, fit_sinusoid_xy

X_KINDS = ("position", "phase")
WORKERS_ENV = "FRUSTINT_WORKERS"
SOURCE_LABELS = ("I", "II", "III", "IV")


@dataclass(frozen=True)
class ScanCurve:
    x: np.ndarray
    y: np.ndarray
    x_kind: str = "phase"
    pattern: str = ""

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1 or x.size == 0:
            raise ValueError("x and y must be nonempty 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x must be strictly increasing")
        if self.x_kind not in X_KINDS:
            raise ValueError(f"x_kind must be one of {X_KINDS}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "pattern", str(self.pattern))

    def __len__(self) -> int:
        return self.x.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "x_kind", "y", "pattern"])
        for xi, yi in zip(self.x, self.y):
            w.writerow([repr(float(xi)), self.x_kind, repr(float(yi)), self.pattern])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ScanCurve":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("curve CSV has no data rows")
        missing = {"x", "x_kind", "y", "pattern"} - set(rows[0])
        if missing:
            raise ValueError(f"curve CSV lacks columns {sorted(missing)}")
        kinds = {r["x_kind"] for r in rows}
        patterns = {r["pattern"] for r in rows}
        if len(kinds) != 1 or len(patterns) != 1:
            raise ValueError("x_kind and pattern must be constant within one curve")
        return cls(np.array([float(r["x"]) for r in rows]), np.array([float(r["y"]) for r in rows]),
                   kinds.pop(), patterns.pop())


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def _coefficient(exp: Experiment, pattern: ClickPattern, order: int) -> float:
    state = run_pipeline(exp)
    return click_probability(state, pattern, exp.detectors, exp.detector_model)[order]


def scan(exp: Experiment, target: str, grid: Sequence[float], pattern: ClickPattern,
         order: int = 2, workers: int | None = None) -> ScanCurve:
    """Re-run the pipeline with ``target`` set to each grid value (radians)."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty scan grid")
    if target not in exp.named_phases:
        raise KeyError(f"unknown phase target {target!r}; have {sorted(exp.named_phases)}")
    return _scan_phases(exp, target, grid, grid, "phase", pattern, order, workers)


def scan_positions(exp: Experiment, target: str, positions: Sequence[float], wavelength: float,
                   pattern: ClickPattern, multiplicity: int = 1, passes: int = 2,
                   order: int = 2, workers: int | None = None) -> ScanCurve:
    """Scan a mirror in nanometres; the phase handed to ``target`` is per photon.

    Keep ``multiplicity=1`` when the target element already sits on every
    photon the mirror touches (as ``phi_i`` does on both idlers).
    """
    positions = np.asarray(positions, dtype=float)
    phases = np.array([position_to_phase(d, wavelength, passes, multiplicity) for d in positions])
    if target not in exp.named_phases:
        raise KeyError(f"unknown phase target {target!r}; have {sorted(exp.named_phases)}")
    return _scan_phases(exp, target, positions, phases, "position", pattern, order, workers)


def _scan_phases(exp, target, xs, phases, x_kind, pattern, order, workers) -> ScanCurve:
    workers = default_workers() if workers is None else workers
    jobs = [exp.with_phase(target, float(ph)) for ph in phases]

    def one(e):
        return _coefficient(e, pattern, order)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ys = list(pool.map(one, jobs))
    else:
        ys = [one(e) for e in jobs]
    return ScanCurve(xs, np.array(ys), x_kind, str(pattern))


def position_to_phase(delta_x: float, wavelength: float, passes: int = 2,
                      multiplicity: int = 1) -> float:
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    if passes < 1 or multiplicity < 1:
        raise ValueError("passes and multiplicity must be >= 1")
    return 2.0 * math.pi * passes * multiplicity * delta_x / wavelength


def fit_sinusoid(curve: ScanCurve, period_bounds: tuple[float, float] | None = None) -> FitResult:
    return fit_sinusoid_xy(curve.x, curve.y, period_bounds)


def predicted_visibility_fourfold(alpha: float, T: float) -> float:
    aT = alpha * T
    return 2.0 * aT / (1.0 + aT**2)


def predicted_visibility_threefold(alpha: float, T: float) -> float:
    """Detectors 1, 2, 3 with photon s2 attenuated; linear in ``T``."""
    return 2.0 * alpha * T / (alpha**2 + 3.0)


def predicted_visibility_twophoton(T: float) -> float:
    return 2.0 * T / (1.0 + T**2)


def invert_visibility_to_T(V: float) -> float:
    """The root in (0, 1] of ``V = 2T/(1+T**2)``."""
    if not 0.0 < V <= 1.0:
        raise ValueError(f"visibility {V} outside (0, 1]")
    # same root as (1 - sqrt(1 - V**2)) / V without the cancellation at small V
    return V / (1.0 + math.sqrt((1.0 - V) * (1.0 + V)))


@dataclass(frozen=True)
class SourceCounts:
    N1: float
    N2: float
    q: float | None = None

    def __post_init__(self):
        if self.q is None:
            if self.N1 == 0:
                raise ValueError("N1 must be nonzero when q is not given")
            object.__setattr__(self, "q", self.N2 / self.N1)
        if self.q <= 0:
            raise ValueError(f"q must be positive, got {self.q}")


@dataclass(frozen=True)
class SourceImbalanceTable:
    """Pair rates per crystal before (N1) and after (N2) the idler swap.

    ``q`` may be given explicitly (e.g. as printed, rounded) or is taken as N2/N1.
    """

    sources: Mapping[str, SourceCounts]
    T1: float = 1.0
    T2: float = 1.0

    def __post_init__(self):
        missing = set(SOURCE_LABELS) - set(self.sources)
        if missing:
            raise ValueError(f"table lacks sources {sorted(missing)}")
        for name in ("T1", "T2"):
            T = getattr(self, name)
            if not 0.0 < T <= 1.0:
                raise ValueError(f"{name}={T} outside (0, 1]")

    @property
    def q(self) -> tuple[float, ...]:
        return tuple(self.sources[s].q for s in SOURCE_LABELS)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "SourceImbalanceTable":
        srcs = {k: SourceCounts(**v) for k, v in doc["sources"].items()}
        return cls(srcs, doc.get("T1", 1.0), doc.get("T2", 1.0))

    def to_dict(self) -> dict:
        return {
            "sources": {k: {"N1": v.N1, "N2": v.N2, "q": v.q} for k, v in self.sources.items()},
            "T1": self.T1,
            "T2": self.T2,
        }


def estimate_alpha(table: SourceImbalanceTable) -> tuple[float, float]:
    q1, q2, q3, q4 = table.q
    if q3 * q4 == 0:
        raise ValueError("q3*q4 must be nonzero")
    alpha = math.sqrt(q1 * q2 / (q3 * q4)) * table.T1 * table.T2
    return alpha, predicted_visibility_fourfold(alpha, 1.0)


def sample_counts(curve: ScanCurve, counts_scale: float, seed: int) -> ScanCurve:
    """Poisson draws with mean ``y * counts_scale``; numpy PCG64 seeded by ``seed``."""
    if counts_scale <= 0:
        raise ValueError("counts_scale must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    lam = np.clip(curve.y * counts_scale, 0.0, None)
    return ScanCurve(curve.x, rng.poisson(lam).astype(float), curve.x_kind, curve.pattern)


def entangled_reference(alpha_angle: float, beta_angle: float) -> tuple[float, float]:
    """Polarization-entangled pair: coincidence and (flat) single-detector probability."""
    return 0.5 * math.sin(alpha_angle + beta_angle) ** 2, 0.5


def frustrated_reference(alpha_angle: float, beta_angle: float) -> tuple[float, float]:
    """Two-crystal frustrated interference: coincidence and single counts both oscillate."""
    p = 0.5 + 0.5 * math.cos(alpha_angle + beta_angle)
    return p, p


def undetected_reference(beta_angle: float) -> float:
    """Three-fold rate controlled by the phase of the undetected fourth photon."""
    return 0.5 + 0.25 * math.cos(beta_angle)


@dataclass(frozen=True)
class VTRow:
    T: float
    engine: float
    formula: float


def fourfold_vt_experiment(alpha: float, T: float, phi_s1: float = 0.0) -> Experiment:
    """Canonical experiment with the I+II history scaled by ``alpha`` and s2 attenuated.

    ``alpha`` goes on crystal II's gain so that the I+III noise term keeps unit
    weight, which is the normalization the three-fold law assumes.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1] to be carried by a gain scale")
    return canonical_four_crystal(phi_s1=phi_s1, q=(1.0, alpha**2, 1.0, 1.0), losses=[s2_loss(T)])


VT_FORMULAS = {
    "1,2,3,4": predicted_visibility_fourfold,
    "1,2,3": predicted_visibility_threefold,
}


def visibility_vs_transmissivity(alpha: float, T_grid: Sequence[float], pattern: ClickPattern,
                                 exp_factory=fourfold_vt_experiment, n_phase: int = 16,
                                 workers: int | None = None) -> list[VTRow]:
    """Engine-fitted visibility of a ``phi_s1`` scan next to the closed-form law."""
    formula = VT_FORMULAS.get(str(pattern))
    grid = np.linspace(0.0, 2.0 * math.pi, n_phase, endpoint=False)
    rows = []
    for T in T_grid:
        curve = scan(exp_factory(alpha, T), "phi_s1", grid, pattern, workers=workers)
        V = fit_sinusoid(curve).visibility
        rows.append(VTRow(float(T), V, formula(alpha, T) if formula else math.nan))
    return rows
