"""
Simulated preparation of walker-coin states with a phase-only SLM.

Pipeline
--------
1. :func:`rotation_schedule_for` splits a target walker-coin state into a
   slit superposition ``Σ β_j |j>`` (polarization ``|H>``) and per-site
   polarization rotations ``ϑ_j``.
2. :func:`synthesize_mask` writes one blazed grating per occupied mode.  The
   grating depth ``m_j`` sets the first-order amplitude and a constant phase
   sets its argument.
3. :func:`far_field` is the 2D discrete Fourier transform of the modulated
   uniform field.
4. :func:`extract_order` keeps a window around the ``+1`` order and projects
   the filtered field back onto the slit modes.
5. :func:`conditional_rotation` applies ``R(ϑ_j)`` site by site.

Layout: the ``2n + 1`` sites ``-n .. n`` get equal slots of ``P = rows // (2n + 1)``
pixel rows stacked along the row axis.  Each occupied mode fills the top
``max(1, P // 2)`` rows of its slot and the rest are guard rows.  Gratings run
along the columns.

Depth calibration: the ``+1``-order amplitude of an ideal blaze with depth ``m``
is ``|sinc(1 - m/2π)|``.  A ramp sampled on ``P`` whole pixels instead follows the
Dirichlet kernel ``|sin(x/2) / (P sin(x/2P))|`` with ``x = m - 2π``.  Integer
periods use the sampled curve by default (``calibration="sampled"``), which makes
the noiseless pipeline exact.  ``calibration="ideal"`` keeps the sinc curve and
leaves a residual error that shrinks as the period grows.  The grating with the
largest ``|β_j|`` gets ``m = 2π``.  A depth-dependent piston cancels the
``+1``-order phase of a partial-depth blaze, so the prepared argument is the
requested offset ``δ_j = arg β_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from .core import WalkerCoinState, fidelity, rotation_y
from .errors import (
    AliasingError,
    DomainError,
    EmptySuperpositionError,
    InvalidArgumentError,
    ResolutionExceededError,
    ScheduleIncompleteError,
)
from .walk import HADAMARD, InitialCondition, Protocol, prepare_step_state

__all__ = [
    "Slit",
    "PhaseMask",
    "SlitSuperposition",
    "RotationSchedule",
    "SLMReport",
    "first_order_amplitude",
    "depth_for_amplitude",
    "max_step_for_resolution",
    "synthesize_mask",
    "far_field",
    "order_energy_fraction",
    "extract_order",
    "rotation_matrix",
    "conditional_rotation",
    "rotation_schedule_for",
    "prepare_via_slm",
]

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class Slit:
    mode: int
    row_start: int
    row_stop: int
    depth: float
    offset: float

    def as_dict(self) -> dict:
        return {"mode": self.mode, "rows": [self.row_start, self.row_stop],
                "depth": self.depth, "offset": self.offset}


@dataclass(frozen=True, eq=False)
class PhaseMask:
    """Phase pixels in ``[0, 2π)``, shape ``(rows, cols)``, plus the slit layout."""

    pixels: NDArray[np.float64]
    period: float
    slit_layout: tuple[Slit, ...]
    n_sites: int

    def __post_init__(self):
        px = np.array(self.pixels, dtype=float)
        if px.ndim != 2:
            raise InvalidArgumentError("mask pixels must be a 2D array")
        if np.any(px < 0) or np.any(px >= TWO_PI):
            raise InvalidArgumentError("mask phases must lie in [0, 2π)")
        spans = sorted((s.row_start, s.row_stop) for s in self.slit_layout)
        for (a0, a1), (b0, _) in zip(spans, spans[1:]):
            if a1 > b0:
                raise InvalidArgumentError("slit row spans overlap")
        for s in self.slit_layout:
            if not 0.0 <= s.depth <= TWO_PI or not 0 <= s.row_start < s.row_stop <= px.shape[0]:
                raise InvalidArgumentError(f"invalid slit {s}")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "slit_layout", tuple(self.slit_layout))

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]

    def layout_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "period": self.period,
                "n_sites": self.n_sites, "slits": [s.as_dict() for s in self.slit_layout]}


@dataclass(frozen=True, eq=False)
class SlitSuperposition:
    coefficients: Mapping[int, complex]

    def __post_init__(self):
        coeffs = {int(j): complex(b) for j, b in sorted(self.coefficients.items())}
        if not all(np.isfinite(b) for b in coeffs.values()):
            raise InvalidArgumentError("coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def norm(self) -> float:
        return float(np.sqrt(sum(abs(b) ** 2 for b in self.coefficients.values())))

    def normalized(self) -> "SlitSuperposition":
        nrm = self.norm
        if nrm < 1e-300:
            raise EmptySuperpositionError("superposition has no weight")
        return SlitSuperposition({j: b / nrm for j, b in self.coefficients.items()})

    def as_state(self, coin=(1.0, 0.0)) -> WalkerCoinState:
        """``Σ β_j |j> ⊗ coin``."""
        coin = np.asarray(coin, dtype=np.complex128)
        return WalkerCoinState.from_dict({j: b * coin for j, b in self.coefficients.items()})


@dataclass(frozen=True, eq=False)
class RotationSchedule:
    angles: Mapping[int, float]

    def __post_init__(self):
        angles = {int(j): float(a) for j, a in sorted(self.angles.items())}
        if not all(np.isfinite(a) for a in angles.values()):
            raise InvalidArgumentError("rotation angles must be finite")
        object.__setattr__(self, "angles", angles)

    def __getitem__(self, j: int) -> float:
        return self.angles[j]


# ---------------------------------------------------------------------------
# resolution and calibration

def max_step_for_resolution(pixel_rows: int) -> int:
    """Largest step preparable on ``2N`` pixel rows: ``⌊N/2⌋``."""
    if int(pixel_rows) != pixel_rows or pixel_rows < 2:
        raise InvalidArgumentError("need at least 2 pixel rows")
    return (int(pixel_rows) // 2) // 2


def first_order_amplitude(depth, period: int | None = None) -> NDArray[np.float64]:
    """
    ``+1``-order amplitude of a blaze of phase depth ``m``.

    Without ``period`` this is the ideal continuous blaze ``|sinc(1 - m/2π)|``.
    With an integer ``period`` the ramp is sampled on ``period`` pixels and the
    amplitude is the Dirichlet kernel ``|sin(x/2) / (P sin(x/2P))|``, ``x = m - 2π``,
    which tends to the sinc as ``P`` grows.
    """
    m = np.asarray(depth, dtype=float)
    if period is None:
        return np.abs(np.sinc(1.0 - m / TWO_PI))
    P = int(period)
    x = m - TWO_PI
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.sin(x / 2) / (P * np.sin(x / (2 * P)))
    return np.abs(np.where(np.abs(x) < 1e-12, 1.0, val))


def first_order_phase(depth, period: int | None = None) -> NDArray[np.float64]:
    """Phase of the ``+1`` order relative to the ramp start: ``x/2`` or ``x(P-1)/2P``."""
    x = np.asarray(depth, dtype=float) - TWO_PI
    if period is None:
        return x / 2
    P = int(period)
    return x * (P - 1) / (2 * P)


def depth_for_amplitude(ratio: float, period: int | None = None) -> float:
    """Invert :func:`first_order_amplitude` on ``[0, 2π]``."""
    if not 0.0 <= ratio <= 1.0 + 1e-12:
        raise InvalidArgumentError(f"amplitude ratio must lie in [0, 1], got {ratio!r}")
    if ratio <= 0.0:
        return 0.0
    if ratio >= 1.0:
        return TWO_PI
    return float(brentq(lambda m: float(first_order_amplitude(m, period)) - ratio, 0.0, TWO_PI,
                        xtol=1e-14, rtol=1e-14))


# ---------------------------------------------------------------------------
# mask synthesis and diffraction

def _slot_geometry(rows: int, n_sites: int) -> tuple[int, int]:
    pitch = rows // n_sites
    if pitch < 1:
        raise ResolutionExceededError(f"{n_sites} sites do not fit in {rows} rows")
    return pitch, max(1, pitch // 2)


def synthesize_mask(target: SlitSuperposition, rows: int = 1920, cols: int = 128,
                    grating_period: float = 8, n: int | None = None,
                    calibration: str = "sampled") -> PhaseMask:
    """
    Blazed-grating mask whose ``+1`` order carries ``target``.

    Parameters
    ----------
    target : SlitSuperposition
        Mode amplitudes; normalized internally.
    rows, cols : int
        SLM pixel grid.  Modes are stacked along the rows.
    grating_period : float
        Blaze period in pixels along the columns, at least 2.
    n : int, optional
        Largest site index of the layout; defaults to ``max |j|`` of the target.
    calibration : {"sampled", "ideal"}
        Depth and piston curve.  ``"sampled"`` only applies to integer periods;
        other periods fall back to the ideal blaze.

    Raises
    ------
    ResolutionExceededError
        If ``n`` exceeds :func:`max_step_for_resolution` for ``rows``.
    """
    if grating_period < 2:
        raise InvalidArgumentError("grating period must be at least 2 pixels")
    if cols < 1:
        raise InvalidArgumentError("cols must be positive")
    if calibration not in ("sampled", "ideal"):
        raise InvalidArgumentError(f"unknown calibration {calibration!r}")
    beta = target.normalized().coefficients
    n = max(abs(j) for j in beta) if n is None else int(n)
    if any(abs(j) > n for j in beta):
        raise InvalidArgumentError("target has modes outside -n..n")
    if n > max_step_for_resolution(rows):
        raise ResolutionExceededError(
            f"n={n} exceeds the largest step {max_step_for_resolution(rows)} for {rows} rows")
    n_sites = 2 * n + 1
    pitch, height = _slot_geometry(rows, n_sites)
    top = max(abs(b) for b in beta.values())
    ramp = np.mod(np.arange(cols), grating_period) / grating_period
    # integer periods are calibrated on the sampled ramp, others on the ideal blaze
    sampled = (int(grating_period)
               if calibration == "sampled" and float(grating_period).is_integer() else None)
    pixels = np.zeros((rows, cols))
    layout = []
    for j, b in beta.items():
        if abs(b) == 0.0:
            continue
        depth = depth_for_amplitude(min(abs(b) / top, 1.0), sampled)
        offset = float(np.mod(np.angle(b), TWO_PI))
        start = (j + n) * pitch
        piston = -float(first_order_phase(depth, sampled))
        pixels[start:start + height] = np.mod(depth * ramp + piston + offset, TWO_PI)
        layout.append(Slit(j, start, start + height, depth, offset))
    # float rounding in mod can land exactly on 2π
    pixels[pixels >= TWO_PI] = 0.0
    return PhaseMask(pixels, float(grating_period), tuple(layout), n_sites)


def far_field(mask: PhaseMask, envelope: NDArray | None = None) -> NDArray[np.complex128]:
    """
    Unitary 2D DFT of ``envelope · exp(i mask)``.

    The default envelope is uniform with unit total energy, so the far field
    also carries unit energy.
    """
    if envelope is None:
        envelope = np.full(mask.pixels.shape, 1.0 / np.sqrt(mask.pixels.size))
    return np.fft.fft2(envelope * np.exp(1j * mask.pixels), norm="ortho")


def _order_window(cols: int, period: float, order: int):
    if period < 3:
        raise AliasingError(f"period {period} puts the +1 and -1 orders on the same bins")
    spacing = cols / period
    centre = order * spacing
    half = spacing / 2
    bins = np.arange(cols)
    # signed frequency index of every column bin
    freq = np.where(bins < cols / 2, bins, bins - cols)
    window = (freq >= centre - half) & (freq < centre + half)
    return window, centre


def order_energy_fraction(field: NDArray[np.complex128], period: float, order: int = 1) -> float:
    """Share of the far-field energy inside the window of the given order."""
    window, _ = _order_window(field.shape[1], period, order)
    total = np.sum(np.abs(field) ** 2)
    return float(np.sum(np.abs(field[:, window]) ** 2) / total)


def extract_order(field: NDArray[np.complex128], mask: PhaseMask, order: int = 1) -> SlitSuperposition:
    """
    Filter one diffraction order and read out the slit amplitudes.

    The diaphragm passes column frequencies within half an order spacing
    (``cols / (2 P)`` bins) of the chosen order.  The filtered field is
    transformed back to the mask plane and projected onto each slit's tilted
    plane wave.  The result is renormalized.

    Raises
    ------
    AliasingError
        If the period is below 3 pixels, where the ``±1`` windows overlap.
    EmptySuperpositionError
        If no light reaches the order.
    """
    rows, cols = field.shape
    window, centre = _order_window(cols, mask.period, order)
    filtered = np.fft.ifft2(np.where(window[None, :], field, 0.0), norm="ortho")
    tilt = np.exp(2j * np.pi * centre * np.arange(cols) / cols)
    coeffs = {}
    for s in mask.slit_layout:
        profile = tilt / np.sqrt((s.row_stop - s.row_start) * cols)
        coeffs[s.mode] = complex(np.sum(filtered[s.row_start:s.row_stop] * profile.conj()))
    total = sum(abs(c) ** 2 for c in coeffs.values())
    if total < 1e-24:
        raise EmptySuperpositionError("no light reaches the selected diffraction order")
    return SlitSuperposition(coeffs).normalized()


# ---------------------------------------------------------------------------
# polarization rotations

def rotation_matrix(angle: float) -> NDArray[np.complex128]:
    """``[[cos ϑ, -sin ϑ], [sin ϑ, cos ϑ]]``; takes ``|H>`` to ``(cos ϑ, sin ϑ)``."""
    return rotation_y(angle)


def conditional_rotation(state: WalkerCoinState, sched: RotationSchedule) -> WalkerCoinState:
    """Multiply the spinor at every occupied site ``j`` by ``R(ϑ_j)``."""
    missing = [j for j in state.support if j not in sched.angles]
    if missing:
        raise ScheduleIncompleteError(f"no rotation angle for sites {missing}")
    amps = np.array(state.amplitudes)
    for r, j in enumerate(state.sites):
        if int(j) in sched.angles:
            amps[r] = rotation_matrix(sched.angles[int(j)]) @ amps[r]
    return WalkerCoinState(state.origin, amps)


def rotation_schedule_for(target: WalkerCoinState, tol: float = 1e-9):
    """
    Split ``target`` into slit amplitudes and per-site rotations.

    Each site spinor must be a complex multiple of a real vector (a linear
    polarization): ``s = β (cos ϑ, sin ϑ)``.

    Returns
    -------
    (SlitSuperposition, RotationSchedule)

    Raises
    ------
    DomainError
        If some site carries a non-linear (e.g. circular) polarization.
    """
    coeffs, angles = {}, {}
    for j, s in target.as_dict().items():
        alpha = 0.5 * np.angle(s[0] ** 2 + s[1] ** 2)
        real = s * np.exp(-1j * alpha)
        if np.max(np.abs(real.imag)) > tol * max(np.linalg.norm(s), 1e-300):
            raise DomainError(f"site {j} is not linearly polarized; R(ϑ)|H> cannot reach it")
        angles[j] = float(np.arctan2(real[1].real, real[0].real))
        coeffs[j] = complex(np.linalg.norm(s) * np.exp(1j * alpha))
    return SlitSuperposition(coeffs), RotationSchedule(angles)


@dataclass(frozen=True, eq=False)
class SLMReport:
    n: int
    rows: int
    cols: int
    period: float
    fidelity: float
    order_efficiency: float
    mask: PhaseMask
    schedule: RotationSchedule
    prepared: WalkerCoinState
    superposition: SlitSuperposition

    def summary(self) -> dict:
        return {"n": self.n, "rows": self.rows, "cols": self.cols, "period": self.period,
                "fidelity": self.fidelity, "order_efficiency": self.order_efficiency,
                "schedule": {str(j): a for j, a in self.schedule.angles.items()},
                "superposition": {str(j): [b.real, b.imag]
                                  for j, b in self.superposition.coefficients.items()}}


def prepare_via_slm(n: int, rows: int = 1920, cols: int = 128, period: float = 8,
                    protocol: Protocol = HADAMARD,
                    init: InitialCondition | None = None,
                    calibration: str = "sampled") -> SLMReport:
    """End-to-end simulated preparation of ``prepare_step_state(n)`` and its fidelity."""
    target = prepare_step_state(n, init, protocol)
    superposition, schedule = rotation_schedule_for(target)
    mask = synthesize_mask(superposition, rows, cols, period, n=max(n, 0), calibration=calibration)
    field = far_field(mask)
    extracted = extract_order(field, mask)
    prepared = conditional_rotation(extracted.as_state(), schedule)
    return SLMReport(n, rows, cols, float(period), fidelity(prepared, target),
                     order_energy_fraction(field, period), mask, schedule, prepared, extracted)
