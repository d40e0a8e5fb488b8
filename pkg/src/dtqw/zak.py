"""
Zak (Berry) phases of the two quasi-energy bands.

The primary route is the discrete Wilson loop
``Z = -arg prod_m <V(k_m)|V(k_{m+1})>``, which equals
``i ∮ dk <V|∂_k V>`` in the continuum limit and is unchanged by any
k-dependent phase redefinition of the eigenvectors.  Over a full Brillouin
zone the loop closes on itself; over a shorter window the path is open and
the result depends on the gauge chosen at its two ends (the closed-form gauge
of :func:`dtqw.bands.band_eigenvectors` is used there).

Secondary routes, kept as cross-checks:

- :func:`berry_connection`: central-difference connection in the closed-form gauge;
- :func:`zak_integrand_noncommuting`: the published integrand ``(a² + b²)/D±²``;
- :func:`zak_split_step_analytic`: the published ratio ``tan θ2 / tan θ1``.

For walks ``T C`` with a single coin ``U(k + π) = -U(k)`` forces
``n(k + π) = -n(k)``; a centrally symmetric loop bounds half the sphere, so
the full-zone Wilson phase of those walks is ``π`` whenever the bands are
gapped.  For the split-step walk the loop is a great circle and the phase is
``π`` times the winding number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import quad

from ._parallel import parallel_map
from .bands import (
    Family,
    _family,
    angular_functions,
    band_eigenvectors,
    bloch_vectors,
    brillouin_zone,
    k_grid,
)
from .errors import (
    ConvergenceError,
    DivisionDomainError,
    DomainError,
    GaplessPointError,
    InvalidArgumentError,
)
from .walk import Protocol

__all__ = [
    "ZakResult",
    "ZakLandscape",
    "wilson_phase",
    "band_vectors",
    "zak_phase_wilson",
    "berry_connection",
    "integrate_connection",
    "zak_integrand_noncommuting",
    "integrate_zak_integrand",
    "zak_split_step_analytic",
    "zak_difference",
    "zak_landscape",
    "wrap_phase",
]

TWO_PI = 2 * np.pi


def wrap_phase(x):
    """Map onto ``(-π, π]``."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), TWO_PI)


def _band_sign(band) -> int:
    if band in ("+", 1, +1.0):
        return 0
    if band in ("-", -1, -1.0):
        return 1
    raise InvalidArgumentError(f"band must be '+' or '-', got {band!r}")


@dataclass(frozen=True)
class ZakResult:
    band: str
    phase: float
    k_window: tuple[float, float]
    samples: int
    converged: bool
    delta: float = 0.0


def wilson_phase(vectors: NDArray[np.complex128], closed: bool = True) -> float:
    """
    ``-arg prod <V_m|V_{m+1}>`` in ``[0, 2π)`` for a stack of spinors ``(N, 2)``.

    With ``closed=True`` the last vector is linked back to the first.
    """
    v = np.asarray(vectors)
    nxt = np.roll(v, -1, axis=0) if closed else v[1:]
    cur = v if closed else v[:-1]
    overlaps = np.sum(cur.conj() * nxt, axis=-1)
    # sum of angles avoids under/overflow of the raw product
    z = float(np.mod(-np.sum(np.angle(overlaps)), TWO_PI))
    return 0.0 if TWO_PI - z < 1e-12 else z


def _is_full_zone(p: Protocol, window: tuple[float, float]) -> bool:
    lo, hi = brillouin_zone(p)
    period = hi - lo
    length = window[1] - window[0]
    cycles = length / period
    return abs(cycles - round(cycles)) < 1e-12 and round(cycles) >= 1


def band_vectors(p: Protocol, band, ks, *, stable: bool = True) -> NDArray[np.complex128]:
    n, _ = bloch_vectors(p, ks)
    return band_eigenvectors(n, stable=stable)[_band_sign(band)]


def _wilson_once(p: Protocol, band, window: tuple[float, float], samples: int) -> float:
    if _is_full_zone(p, window):
        ks = k_grid(window, samples)
        return wilson_phase(band_vectors(p, band, ks), closed=True)
    ks = np.linspace(window[0], window[1], samples + 1)
    return wilson_phase(band_vectors(p, band, ks, stable=False), closed=False)


def zak_phase_wilson(p: Protocol, band="+", k_window: tuple[float, float] | None = None,
                     samples: int = 512, *, tol: float = 1e-8,
                     max_samples: int = 2 ** 16, strict: bool = False) -> ZakResult:
    """
    Wilson-loop Zak phase of one band.

    The sample count is doubled, starting from ``samples``, until the error
    estimate falls below ``tol`` or ``max_samples`` is reached; ``converged``
    reports which.  The discretization error of the Wilson loop is
    ``O(1/N²)``, so the error of the finer of two estimates is about a third
    of their difference; that is the ``delta`` reported.  ``k_window`` defaults to the
    protocol's Brillouin zone, which makes the loop closed.

    Raises
    ------
    GaplessPointError
        If the gap closes at a sampled momentum.
    ConvergenceError
        With ``strict=True``, if ``tol`` is not reached by ``max_samples``.
    """
    if samples < 16:
        raise InvalidArgumentError("need at least 16 samples")
    window = tuple(map(float, k_window)) if k_window is not None else brillouin_zone(p)
    name = "+" if _band_sign(band) == 0 else "-"
    n = samples
    z = _wilson_once(p, band, window, n)
    delta = np.inf
    while n * 2 <= max_samples:
        z2 = _wilson_once(p, band, window, 2 * n)
        delta = abs(float(wrap_phase(z2 - z))) / 3.0
        z, n = z2, 2 * n
        if delta < tol:
            break
    if strict and not delta < tol:
        raise ConvergenceError(f"Zak phase changed by {delta:.3g} at {n} samples (tol {tol:g})")
    return ZakResult(name, z, window, n, bool(delta < tol), float(delta))


def berry_connection(p: Protocol, band, k: float, h: float = 1e-4) -> float:
    """
    ``i <V|∂_k V>`` by central differences in the closed-form gauge.

    The gauge ``V± = (n_x - i n_y, ±1 - n_z)/D±`` depends on ``k`` only
    through ``n(k)``, so it is smooth and periodic wherever ``n`` stays away
    from the pole at which it is singular.
    """
    ks = np.array([k - h, k, k + h])
    v = band_vectors(p, band, ks, stable=False)
    dv = (v[2] - v[0]) / (2 * h)
    return float(np.real(1j * np.vdot(v[1], dv)))


def integrate_connection(p: Protocol, band="+", k_window: tuple[float, float] | None = None,
                         samples: int = 512, h: float = 1e-4) -> float:
    """Integral of :func:`berry_connection` over the window (trapezoid rule)."""
    window = tuple(map(float, k_window)) if k_window is not None else brillouin_zone(p)
    if _is_full_zone(p, window):
        ks = k_grid(window, samples)
        weights = np.full(samples, (window[1] - window[0]) / samples)
    else:
        ks = np.linspace(window[0], window[1], samples + 1)
        weights = np.full(samples + 1, (window[1] - window[0]) / samples)
        weights[[0, -1]] *= 0.5
    lo = band_vectors(p, band, ks - h, stable=False)
    mid = band_vectors(p, band, ks, stable=False)
    hi = band_vectors(p, band, ks + h, stable=False)
    conn = np.real(1j * np.sum(mid.conj() * (hi - lo), axis=-1) / (2 * h))
    return float(np.sum(weights * conn))


# ---------------------------------------------------------------------------
# published closed forms

def _nc_terms(theta: float, phi: float, k):
    a, b, c, d = angular_functions(theta, phi)
    k = np.asarray(k, dtype=float)
    norm2 = a * a + b * b + c * c * np.cos(k) ** 2 + d * d * np.sin(k) ** 2 - np.sin(2 * k) * c * d
    nz = np.cos(k) * c - np.sin(k) * d
    return a, b, np.sqrt(np.maximum(norm2, 0.0)), nz


def zak_integrand_noncommuting(theta: float, phi: float, band, k) -> NDArray[np.float64]:
    """
    ``(a² + b²) / D±²`` with ``D±² = 2|n|² ∓ 2 n_z |n|`` in terms of
    ``a = sinφ cosθ, b = cosφ sinθ, c = sinφ sinθ, d = cosφ cosθ``.

    ``|n|² = a² + b² + c² cos² k + d² sin² k - sin 2k · c d`` and
    ``n_z = c cos k - d sin k``.
    """
    sign = 1.0 if _band_sign(band) == 0 else -1.0
    a, b, r, nz = _nc_terms(theta, phi, k)
    d2 = 2 * r * r - sign * 2 * nz * r
    if np.any(np.sqrt(np.maximum(d2, 0.0)) < 1e-9):
        raise GaplessPointError("D vanishes: integrand undefined at this momentum")
    return (a * a + b * b) / d2


def integrate_zak_integrand(theta: float, phi: float, band="+",
                            k_window: tuple[float, float] = (-np.pi, np.pi)) -> float:
    """Numerical integral of :func:`zak_integrand_noncommuting` over ``k_window``."""
    val, _ = quad(lambda k: float(zak_integrand_noncommuting(theta, phi, band, k)),
                  k_window[0], k_window[1], limit=200, epsabs=1e-12, epsrel=1e-12)
    return float(val)


def zak_split_step_analytic(theta1: float, theta2: float) -> float:
    """The ratio ``tan θ2 / tan θ1``, returned as is."""
    if abs(np.sin(theta1)) < 1e-12:
        raise DivisionDomainError("tan θ1 vanishes (θ1 ≡ 0 mod π)")
    return float(np.tan(theta2) / np.tan(theta1))


# ---------------------------------------------------------------------------
# differences and landscapes

def zak_difference(pA: Protocol, pB: Protocol, band="+",
                   k_window: tuple[float, float] | None = None,
                   samples: int = 512, k_origin: float = 0.0) -> float:
    """
    ``|Z(pA) - Z(pB)|`` folded into ``[0, π]``.

    Both phases use the same momentum grid, shifted together by ``k_origin``.
    Without a window, the longer of the two Brillouin zones is used.
    """
    if k_window is None:
        za, zb = brillouin_zone(pA), brillouin_zone(pB)
        k_window = za if (za[1] - za[0]) >= (zb[1] - zb[0]) else zb
    window = (k_window[0] + k_origin, k_window[1] + k_origin)
    a = zak_phase_wilson(pA, band, window, samples).phase
    b = zak_phase_wilson(pB, band, window, samples).phase
    return abs(float(wrap_phase(a - b)))


@dataclass(frozen=True, eq=False)
class ZakLandscape:
    """
    Zak phases on the closed grid ``a × b``; ``defined[i, j]`` is False where
    the phase is undefined (the gap closes on the window).  ``analytic`` holds
    ``tan θ2 / tan θ1`` for the split-step family, with its own mask.
    """

    family: str
    method: str
    axes: tuple[str, str]
    a: NDArray[np.float64]
    b: NDArray[np.float64]
    z_plus: NDArray[np.float64]
    z_minus: NDArray[np.float64]
    defined: NDArray[np.bool_]
    converged: NDArray[np.bool_]
    analytic: NDArray[np.float64] | None = None
    analytic_defined: NDArray[np.bool_] | None = None

    def rows(self):
        for i, x in enumerate(self.a):
            for j, y in enumerate(self.b):
                row = [float(x), float(y), float(self.z_plus[i, j]),
                       float(self.z_minus[i, j]), int(self.defined[i, j]),
                       int(self.converged[i, j])]
                if self.analytic is not None:
                    row += [float(self.analytic[i, j]), int(self.analytic_defined[i, j])]
                yield tuple(row)

    @property
    def columns(self) -> list[str]:
        cols = [self.axes[0], self.axes[1], "Z_plus", "Z_minus", "defined", "converged"]
        if self.analytic is not None:
            cols += ["Z_analytic", "analytic_defined"]
        return cols


METHODS = ("wilson", "connection", "integrand", "analytic")


def _min_gap(fam: Family, a: float, b: float, ks) -> float:
    e = np.arccos(np.clip(fam.cos_e(a, b, ks), -1.0, 1.0))
    return float(np.min(np.minimum(e, np.pi - e)))


def zak_landscape(family: str | Family = "noncommuting", resolution: int = 64,
                  band="+", method: str = "wilson", samples: int = 256,
                  k_window: tuple[float, float] | None = None, gap_tol: float = 1e-9,
                  threads: int = 1) -> ZakLandscape:
    """
    Zak phases over ``[-π, π]²`` on ``resolution`` points per axis (both ends included).

    Cells at which the gap closes anywhere on the sampled window are marked
    undefined rather than given a number.  ``converged`` flags Wilson-loop
    cells that met the refinement tolerance within four times ``samples``.  ``method`` selects the Wilson loop,
    the connection integral, the published non-commuting integrand, or the
    published split-step ratio.  For the split-step family the ratio is always
    added as a separate channel.
    """
    fam = _family(family)
    if method not in METHODS:
        raise InvalidArgumentError(f"method must be one of {METHODS}")
    if method == "integrand" and fam.name != "noncommuting":
        raise InvalidArgumentError("the published integrand exists for the non-commuting family only")
    if method == "analytic" and fam.name != "splitstep":
        raise InvalidArgumentError("the analytic ratio exists for the split-step family only")
    _band_sign(band)
    grid = np.linspace(-np.pi, np.pi, resolution)
    zone = brillouin_zone(fam.make(0.1, 0.2))
    window = tuple(k_window) if k_window is not None else zone
    check_ks = np.linspace(window[0], window[1], 4 * samples + 1)

    def cell(a: float, b: float):
        if method == "analytic":
            try:
                z = zak_split_step_analytic(a, b)
            except DomainError:
                return np.nan, np.nan, False, False
            return z, z, True, True
        if _min_gap(fam, a, b, check_ks) < gap_tol:
            return np.nan, np.nan, False, False
        p = fam.make(a, b)
        conv = True
        try:
            if method == "wilson":
                rp = zak_phase_wilson(p, "+", window, samples, max_samples=4 * samples)
                rm = zak_phase_wilson(p, "-", window, samples, max_samples=4 * samples)
                zp, zm, conv = rp.phase, rm.phase, rp.converged and rm.converged
            elif method == "connection":
                zp = integrate_connection(p, "+", window, samples)
                zm = integrate_connection(p, "-", window, samples)
            else:
                zp = integrate_zak_integrand(a, b, "+", window)
                zm = integrate_zak_integrand(a, b, "-", window)
        except DomainError:
            return np.nan, np.nan, False, False
        return zp, zm, True, conv

    def row(a: float):
        return [cell(a, b) for b in grid]

    rows = parallel_map(row, grid, threads)
    z_plus = np.array([[c[0] for c in r] for r in rows])
    z_minus = np.array([[c[1] for c in r] for r in rows])
    defined = np.array([[c[2] for c in r] for r in rows], dtype=bool)
    converged = np.array([[c[3] for c in r] for r in rows], dtype=bool)
    analytic = analytic_ok = None
    if fam.name == "splitstep":
        analytic = np.full((resolution, resolution), np.nan)
        analytic_ok = np.zeros((resolution, resolution), dtype=bool)
        for i, a in enumerate(grid):
            for j, b in enumerate(grid):
                try:
                    analytic[i, j] = zak_split_step_analytic(a, b)
                    analytic_ok[i, j] = True
                except DomainError:
                    pass
    return ZakLandscape(fam.name, method, fam.axes, grid, grid.copy(), z_plus, z_minus,
                        defined, converged, analytic, analytic_ok)

