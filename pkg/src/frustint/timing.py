"""Arrival-time bookkeeping for the back-reflecting four-crystal interferometer.

Times are measured from the pump splitting at the first beam displacer. Only
differences matter; absolute values are a convention. Lengths are in mm.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

SPEED_OF_LIGHT = 299_792_458.0  # m/s
MM = 1e-3
DEFAULT_TOLERANCE_UM = 1.0


@dataclass(frozen=True)
class Geometry:
    l_sp1: float = 0.0
    l_sp2: float = 0.0
    l_cp: float = 0.0
    l_si: float = 0.0
    l_ci: float = 0.0
    l_ss: float = 0.0
    l_ss1: float = 0.0
    l_ss2: float = 0.0
    l_BD: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{f.name}={v} must be a finite nonnegative length")

    @classmethod
    def from_dict(cls, doc: dict) -> "Geometry":
        unknown = set(doc) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown geometry fields {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in doc.items()})

    @classmethod
    def aligned(cls, l_sp1: float, l_sp2: float, l_cp: float, l_si: float, l_ss: float,
                l_BD: float) -> "Geometry":
        """Choose the mirror arms l_ci, l_ss1, l_ss2 so that every condition holds."""
        ref = l_sp2 + l_cp
        return cls(l_sp1=l_sp1, l_sp2=l_sp2, l_cp=l_cp, l_si=l_si, l_ci=ref - l_si, l_ss=l_ss,
                   l_ss1=ref - l_ss, l_ss2=ref - l_ss, l_BD=l_BD)


def _time(*lengths_mm: float) -> float:
    return math.fsum(lengths_mm) * MM / SPEED_OF_LIGHT


@dataclass
class ArrivalReport:
    swapped: bool
    times: dict[str, float] = field(default_factory=dict)
    conditions: dict[str, bool] = field(default_factory=dict)
    condition_residuals_mm: dict[str, float] = field(default_factory=dict)
    path_matches: dict[str, bool] = field(default_factory=dict)
    path_mismatch_s: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.conditions.values()) and all(self.path_matches.values())

    @property
    def failures(self) -> list[str]:
        return ([k for k, ok in self.conditions.items() if not ok]
                + [k for k, ok in self.path_matches.items() if not ok])

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["failures"] = self.failures
        return d


def arrival_times(geom: Geometry, swapped: bool = True) -> ArrivalReport:
    g = geom
    if not swapped:
        times = {
            "t_i1": _time(g.l_sp1, 2 * g.l_si, 2 * g.l_ci, 2 * g.l_BD),
            "t_s1": _time(g.l_sp1, 2 * g.l_ss, 2 * g.l_ss1, 2 * g.l_BD),
            "t_P3": _time(g.l_sp1, 2 * g.l_sp2, 2 * g.l_cp, 2 * g.l_BD),
        }
    else:
        # After the swap each idler crosses the displacer once or twice.
        times = {
            "t'_i1": _time(g.l_sp1, 2 * g.l_si, 2 * g.l_ci, g.l_BD),
            "t_s1": _time(g.l_sp1, 2 * g.l_ss, 2 * g.l_ss1, 2 * g.l_BD),
            "t'_i2": _time(g.l_sp1, 2 * g.l_si, 2 * g.l_ci, 2 * g.l_BD),
            "t_s2": _time(g.l_sp1, 2 * g.l_ss, 2 * g.l_ss2, g.l_BD),
            "t_P3": _time(g.l_sp1, 2 * g.l_sp2, 2 * g.l_cp, 2 * g.l_BD),
            "t_P4": _time(g.l_sp1, 2 * g.l_sp2, 2 * g.l_cp, g.l_BD),
        }
    return ArrivalReport(swapped=swapped, times=times)


# residual (mm) of "arm = l_sp2 + l_cp - partner arm"; zero when aligned
CONDITIONS = {
    "idler_I_III": lambda g: math.fsum([g.l_ci, -g.l_sp2, -g.l_cp, g.l_si]),
    "signal_I_III": lambda g: math.fsum([g.l_ss1, -g.l_sp2, -g.l_cp, g.l_ss]),
    "idler_II_IV": lambda g: math.fsum([g.l_ci, -g.l_sp2, -g.l_cp, g.l_si]),
    "signal_II_IV": lambda g: math.fsum([g.l_ss2, -g.l_sp2, -g.l_cp, g.l_ss]),
}

PATHS = {
    "path1": ("t'_i2", "t_P3"),
    "path2": ("t_s1", "t_P3"),
    "path3": ("t'_i1", "t_P4"),
    "path4": ("t_s2", "t_P4"),
}


def check_alignment(geom: Geometry, tolerance_um: float = DEFAULT_TOLERANCE_UM) -> ArrivalReport:
    """Evaluate the four arm-length conditions and the four swapped path matches."""
    tol_mm = tolerance_um * 1e-3
    report = arrival_times(geom, swapped=True)
    for name, resid in CONDITIONS.items():
        r = resid(geom)
        report.condition_residuals_mm[name] = r
        report.conditions[name] = abs(r) <= tol_mm
    tol_s = tol_mm * MM / SPEED_OF_LIGHT
    for name, (a, b) in PATHS.items():
        dt = report.times[a] - report.times[b]
        report.path_mismatch_s[name] = dt
        report.path_matches[name] = abs(dt) <= tol_s
    return report
