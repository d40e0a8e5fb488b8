"""
Resource and loss model for spatially and temporally multiplexed walks.

A spatially multiplexed walk needs ``2n + 1`` optical modes for ``n`` steps,
while a time-multiplexed fiber loop needs ``2ⁿ`` time bins.  For the loop, a
photon that is detected at step ``n`` survived ``n`` round trips (probability
``ηⁿ``), stayed in the loop ``n - 1`` times (``(1 - o)ⁿ⁻¹``) and was coupled
out once (``o``).  For this count ``η`` already includes the coupling losses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "TemporalLoopParams",
    "SpatialCascadeParams",
    "FeasibilityRow",
    "mode_count",
    "expected_click_rate",
    "spatial_click_rate",
    "multiphoton_fraction",
    "feasibility_report",
]


@dataclass(frozen=True)
class TemporalLoopParams:
    """
    Fiber-loop parameters.

    eta : round-trip survival probability
    outcoupling : probability of coupling out to the detectors at each step
    rep_rate : pulse repetition rate in Hz
    mean_photon : mean photon number per pulse
    outcouple_first : apply the outcoupling before the round-trip loss, which
        gives ``η^(n-1)`` instead of ``ηⁿ`` for a photon detected at step ``n``
    """

    eta: float = 0.50
    outcoupling: float = 0.05
    rep_rate: float = 111e3
    mean_photon: float = 0.003
    outcouple_first: bool = False

    def __post_init__(self):
        for name in ("eta", "outcoupling", "mean_photon"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 < v <= 1.0):
                raise InvalidArgumentError(f"{name} must lie in (0, 1], got {v!r}")
        if not (np.isfinite(self.rep_rate) and self.rep_rate > 0):
            raise InvalidArgumentError("rep_rate must be positive")


@dataclass(frozen=True)
class SpatialCascadeParams:
    per_step_transmission: float = 1.0
    rep_rate: float = 111e3
    mean_photon: float = 0.003
    max_steps_reference: int = 10

    def __post_init__(self):
        if not 0.0 < self.per_step_transmission <= 1.0:
            raise InvalidArgumentError("per-step transmission must lie in (0, 1]")
        if not 0.0 < self.mean_photon <= 1.0 or self.rep_rate <= 0:
            raise InvalidArgumentError("mean_photon must lie in (0, 1] and rep_rate be positive")


def _steps(n, minimum: int = 0) -> int:
    if int(n) != n or n < minimum:
        raise InvalidArgumentError(f"step count must be an integer >= {minimum}, got {n!r}")
    return int(n)


def mode_count(arch: str, n: int) -> int:
    """``2n + 1`` for ``"spatial"``, ``2ⁿ`` for ``"temporal"``."""
    n = _steps(n)
    if arch == "spatial":
        return 2 * n + 1
    if arch == "temporal":
        return 2 ** n
    raise InvalidArgumentError(f"architecture must be 'spatial' or 'temporal', got {arch!r}")


def expected_click_rate(p: TemporalLoopParams, n: int) -> float:
    """Detection events per second for photons coupled out at step ``n ≥ 1``."""
    n = _steps(n, 1)
    loops = n - 1 if p.outcouple_first else n
    return p.rep_rate * p.mean_photon * p.eta ** loops * p.outcoupling * (1 - p.outcoupling) ** (n - 1)


def spatial_click_rate(p: SpatialCascadeParams, n: int) -> float:
    """``RR · μ · Tⁿ`` for a cascade of ``n`` stages of transmission ``T``."""
    n = _steps(n)
    return p.rep_rate * p.mean_photon * p.per_step_transmission ** n


def multiphoton_fraction(mean_photon: float) -> float:
    """Poisson ``P(≥2) / P(≥1)`` for mean photon number ``μ``."""
    mu = float(mean_photon)
    if not (np.isfinite(mu) and mu > 0):
        raise InvalidArgumentError("mean photon number must be positive")
    # expm1 keeps precision for small μ
    p_ge1 = -np.expm1(-mu)
    return float((p_ge1 - mu * np.exp(-mu)) / p_ge1)


@dataclass(frozen=True)
class FeasibilityRow:
    n: int
    spatial_modes: int
    temporal_modes: int
    spatial_rate: float
    temporal_rate: float
    spatial_feasible: bool
    temporal_feasible: bool

    @staticmethod
    def columns() -> list[str]:
        return ["n", "spatial_modes", "temporal_modes", "spatial_rate", "temporal_rate",
                "spatial_feasible", "temporal_feasible"]

    def as_tuple(self) -> tuple:
        return (self.n, self.spatial_modes, self.temporal_modes, self.spatial_rate,
                self.temporal_rate, int(self.spatial_feasible), int(self.temporal_feasible))


def feasibility_report(temporal: TemporalLoopParams | None = None,
                       spatial: SpatialCascadeParams | None = None,
                       target_n: int = 20, min_rate: float = 1e-3) -> list[FeasibilityRow]:
    """
    One row per step ``n = 1 .. target_n``.  A step is feasible when its
    expected click rate reaches ``min_rate`` (events per second).
    """
    temporal = temporal or TemporalLoopParams()
    spatial = spatial or SpatialCascadeParams()
    target_n = _steps(target_n, 1)
    if not min_rate >= 0:
        raise InvalidArgumentError("min_rate must be non-negative")
    rows = []
    for n in range(1, target_n + 1):
        rs, rt = spatial_click_rate(spatial, n), expected_click_rate(temporal, n)
        rows.append(FeasibilityRow(n, mode_count("spatial", n), mode_count("temporal", n),
                                   rs, rt, rs >= min_rate, rt >= min_rate))
    return rows
