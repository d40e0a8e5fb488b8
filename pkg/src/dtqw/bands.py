"""
Momentum-space analysis of the step unitaries.

With ``|k> = sum_j exp(ikj) |j>`` the conditional translation becomes
``T(k) = diag(exp(-ik), exp(ik))``, so a protocol ``U = T C_1 ... T C_m``
turns into the 2x2 matrix ``U(k) = T(k) C_1 ... T(k) C_m``.  Writing
``U(k) = cos E - i sin E n.σ`` (after removing any global phase) defines the
quasi-energy ``E ∈ [0, π]`` and the unit Bloch vector ``n(k)``.

Because ``T(k + π) = -T(k)``, protocols with an even number of coins are
π-periodic in ``k``; their Brillouin zone is ``(-π/2, π/2]``.  The split-step
walk is one of them, and its closed-form dispersion is written in the doubled
momentum ``κ = 2k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import least_squares

from .errors import (
    ChiralSymmetryError,
    GaplessPointError,
    InvalidArgumentError,
    NumericalDomainError,
)
from .walk import CoinSequence, NonCommuting, Protocol, SplitStep, Standard

__all__ = [
    "PAULI",
    "MomentumUnitary",
    "BlochVector",
    "GapMap",
    "DiracPoint",
    "FAMILIES",
    "brillouin_zone",
    "momentum_unitary",
    "momentum_unitaries",
    "dispersion_rhs",
    "quasienergy",
    "bloch_vector",
    "bloch_vectors",
    "mirrored_frame_bloch_vector",
    "band_eigenvectors",
    "gap",
    "find_dirac_points",
    "count_dirac_points",
    "phase_diagram",
    "winding_number",
    "chiral_axis",
]

PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128
)
GAPLESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MomentumUnitary:
    k: float
    u: NDArray[np.complex128]


@dataclass(frozen=True, eq=False)
class BlochVector:
    k: float
    n: NDArray[np.float64]
    E: float


def brillouin_zone(p: Protocol) -> tuple[float, float]:
    """Smallest k-interval over which ``U(k)`` is periodic (as a matrix)."""
    if len(p.coins()) % 2 == 0:
        return (-np.pi / 2, np.pi / 2)
    return (-np.pi, np.pi)


def _translation(ks: NDArray[np.float64]) -> NDArray[np.complex128]:
    t = np.zeros(ks.shape + (2, 2), dtype=np.complex128)
    t[..., 0, 0] = np.exp(-1j * ks)
    t[..., 1, 1] = np.exp(1j * ks)
    return t


def momentum_unitaries(p: Protocol, ks: ArrayLike) -> NDArray[np.complex128]:
    """Stack of ``U(k)`` for every ``k`` in ``ks``; shape ``ks.shape + (2, 2)``."""
    ks = np.asarray(ks, dtype=float)
    t = _translation(ks)
    u = np.broadcast_to(np.eye(2, dtype=np.complex128), ks.shape + (2, 2))
    for c in p.coins():
        u = u @ t @ c
    return u


def momentum_unitary(p: Protocol, k: float) -> MomentumUnitary:
    return MomentumUnitary(float(k), momentum_unitaries(p, np.array(k)))


def _su2_parts(u: NDArray[np.complex128]):
    """Split ``u`` into ``cos E`` and the real vector ``sin E · n``."""
    det = u[..., 0, 0] * u[..., 1, 1] - u[..., 0, 1] * u[..., 1, 0]
    su = u / np.sqrt(det)[..., None, None]
    cos_e = 0.5 * np.real(su[..., 0, 0] + su[..., 1, 1])
    # tr(su σ_i) = -2i sinE n_i
    sn = np.real(0.5j * np.einsum("...ab,iba->...i", su, PAULI))
    return cos_e, sn


# ---------------------------------------------------------------------------
# closed-form dispersions

def dispersion_rhs(p: Protocol, k: ArrayLike) -> NDArray[np.float64]:
    """
    Closed-form ``cos E(k)`` for the protocol.

    Standard walks use ``cos k cos θ - n_z sin θ sin k`` (the y-axis case is
    ``cos k cos θ``); the split-step walk ``cos 2k cos θ1 cos θ2 - sin θ1 sin θ2``;
    the non-commuting walk ``cos k cos θ cos φ + sin k sin θ sin φ``.  Other
    coin sequences fall back to half the trace of the SU(2) part.
    """
    k = np.asarray(k, dtype=float)
    if isinstance(p, Standard):
        nz = p.axis[2]
        return np.cos(k) * np.cos(p.theta) - nz * np.sin(p.theta) * np.sin(k)
    if isinstance(p, SplitStep):
        t1, t2 = p.theta1, p.theta2
        return np.cos(2 * k) * np.cos(t1) * np.cos(t2) - np.sin(t1) * np.sin(t2)
    if isinstance(p, NonCommuting):
        th, ph = p.theta, p.phi
        return np.cos(k) * np.cos(th) * np.cos(ph) + np.sin(k) * np.sin(th) * np.sin(ph)
    cos_e, _ = _su2_parts(momentum_unitaries(p, k))
    return cos_e


def quasienergy(p: Protocol, k: float) -> tuple[float, float]:
    """``(E+, E-)`` with ``E+ = arccos(cos E) ∈ [0, π]`` and ``E- = -E+``."""
    if not np.isfinite(k):
        raise InvalidArgumentError(f"k must be finite, got {k!r}")
    rhs = float(dispersion_rhs(p, k))
    if abs(rhs) > 1.0 + 1e-12:
        raise NumericalDomainError(f"|cos E| = {abs(rhs)!r} exceeds 1")
    e = float(np.arccos(np.clip(rhs, -1.0, 1.0)))
    return e, -e


def gap(p: Protocol, k: float) -> tuple[float, float]:
    """Distances of the quasi-energy bands to 0 and to π."""
    e, _ = quasienergy(p, k)
    return e, np.pi - e


# ---------------------------------------------------------------------------
# Bloch vectors and eigenvectors

def bloch_vectors(p: Protocol, ks: ArrayLike, *, check_gap: bool = True):
    """
    Vectorized Bloch decomposition of ``U(k)``.

    Returns
    -------
    n : ndarray, shape ks.shape + (3,)
        Unit Bloch vectors, so that ``U(k) ∝ exp(-i E n.σ)``.
    E : ndarray
        Quasi-energies in ``[0, π]``.
    """
    cos_e, sn = _su2_parts(momentum_unitaries(p, ks))
    sin_e = np.linalg.norm(sn, axis=-1)
    if check_gap and np.any(sin_e < GAPLESS_TOL):
        raise GaplessPointError("Bloch vector undefined where the gap closes (sin E = 0)")
    e = np.arctan2(sin_e, cos_e)
    with np.errstate(invalid="ignore", divide="ignore"):
        n = sn / sin_e[..., None]
    return n, e


def bloch_vector(p: Protocol, k: float) -> BlochVector:
    n, e = bloch_vectors(p, np.array(float(k)))
    return BlochVector(float(k), n, float(e))


def mirrored_frame_bloch_vector(p: SplitStep | NonCommuting, k: float, *,
                             normalize: bool = True) -> BlochVector:
    """
    Published closed-form Bloch components, evaluated at lattice momentum ``k``.

    These formulas describe the same spectra in a mirrored frame: the
    non-commuting components equal the unitary-derived vector of
    ``T(-k) R_y(θ) R_x(φ)``, and the split-step components (written in
    ``κ = 2k``) that of ``SplitStep(θ2, θ1)`` at ``-k``.  They therefore agree
    with :func:`bloch_vector` only up to that change of frame.

    With ``normalize=False`` the raw numerators are returned (their norm is
    ``sin E``), e.g. ``n_x + i n_y = -exp(-ik)(a - ib)`` for the
    non-commuting walk.
    """
    if isinstance(p, NonCommuting):
        a, b, c, d = angular_functions(p.theta, p.phi)
        raw = np.array([
            -np.cos(k) * a + np.sin(k) * b,
            np.cos(k) * b + np.sin(k) * a,
            np.cos(k) * c - np.sin(k) * d,
        ])
    elif isinstance(p, SplitStep):
        t1, t2, kap = p.theta1, p.theta2, 2 * k
        raw = np.array([
            np.sin(kap) * np.sin(t1) * np.cos(t2),
            np.cos(kap) * np.sin(t1) * np.cos(t2) + np.sin(t2) * np.cos(t1),
            -np.sin(kap) * np.cos(t2) * np.cos(t1),
        ])
    else:
        raise InvalidArgumentError("closed-form components exist for SplitStep and NonCommuting only")
    e, _ = quasienergy(p, k)
    sin_e = np.linalg.norm(raw)
    if normalize:
        if sin_e < GAPLESS_TOL:
            raise GaplessPointError("Bloch vector undefined where the gap closes")
        raw = raw / sin_e
    return BlochVector(float(k), raw, e)


def angular_functions(theta: float, phi: float) -> tuple[float, float, float, float]:
    """``a = sinφ cosθ, b = cosφ sinθ, c = sinφ sinθ, d = cosφ cosθ``."""
    return (np.sin(phi) * np.cos(theta), np.cos(phi) * np.sin(theta),
            np.sin(phi) * np.sin(theta), np.cos(phi) * np.cos(theta))


def band_eigenvectors(n: BlochVector | ArrayLike, *, stable: bool = True):
    """
    Eigenvectors ``V±`` of ``n.σ`` with eigenvalues ``±|n|``.

    The closed form ``V± = (n_x - i n_y, ±|n| - n_z) / D±`` with
    ``D± = sqrt(2|n|² ∓ 2 n_z |n|)`` degenerates when ``n`` points along
    ``±z``.  With ``stable=True`` (default) each band switches to the
    equivalent column ``(n_z ± |n|, n_x + i n_y)`` whenever that one has the
    larger norm; only the gauge differs.  ``stable=False`` keeps the single
    smooth closed-form gauge, which is what a finite-difference connection
    needs.

    Accepts a :class:`BlochVector`, a single 3-vector or a stack ``(..., 3)``.
    Returns two arrays of shape ``(..., 2)``.
    """
    vec = np.asarray(n.n if isinstance(n, BlochVector) else n, dtype=float)
    nx, ny, nz = vec[..., 0], vec[..., 1], vec[..., 2]
    r = np.linalg.norm(vec, axis=-1)
    if np.any(r < GAPLESS_TOL):
        raise GaplessPointError("eigenvectors undefined for a vanishing Bloch vector")
    rho2 = nx * nx + ny * ny

    def gap(s):
        # r - s n_z without cancellation: (n_x² + n_y²) / (r + s n_z) when s n_z > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(s * nz > 0, rho2 / (r + s * nz), r - s * nz)

    out = []
    for sign in (1.0, -1.0):
        minus, plus = gap(sign), gap(-sign)
        first = np.stack([nx - 1j * ny, sign * minus + 0j], axis=-1)
        w_first = 2 * r * minus
        if stable:
            second = np.stack([sign * plus + 0j, nx + 1j * ny], axis=-1)
            w_second = 2 * r * plus
            use_second = (w_second > w_first)[..., None]
            vecs = np.where(use_second, second, first)
            norm = np.sqrt(np.where(use_second[..., 0], w_second, w_first))
        else:
            if np.any(w_first < 1e-24):
                raise GaplessPointError("closed-form gauge is singular at this Bloch vector")
            vecs, norm = first, np.sqrt(w_first)
        out.append(vecs / norm[..., None])
    return out[0], out[1]


def printed_eigenvectors(n: ArrayLike):
    """
    The eigenvector expression ``(n_x + i n_y, n_z ∓ |n|) / D±`` as printed.

    It is the complex conjugate (up to σ_z) of :func:`band_eigenvectors`'
    closed-form gauge, i.e. a true eigenvector of the mirrored matrix with
    ``n_x → -n_x``.  Kept for checking the published Zak integrand.
    """
    vec = np.asarray(n, dtype=float)
    nx, ny, nz = vec[..., 0], vec[..., 1], vec[..., 2]
    r = np.linalg.norm(vec, axis=-1)
    out = []
    for sign in (1.0, -1.0):
        d = np.sqrt(2 * r * r - sign * 2 * nz * r)
        out.append(np.stack([nx + 1j * ny, (nz - sign * r) + 0j], axis=-1) / d[..., None])
    return out[0], out[1]


# ---------------------------------------------------------------------------
# two-parameter families and their gap maps

@dataclass(frozen=True)
class Family:
    name: str
    axes: tuple[str, str]
    make: Callable[[float, float], Protocol]
    cos_e: Callable[[NDArray, NDArray, NDArray], NDArray]


def _nc_cos(th, ph, k):
    return np.cos(k) * np.cos(th) * np.cos(ph) + np.sin(k) * np.sin(th) * np.sin(ph)


def _ss_cos(t1, t2, k):
    return np.cos(2 * k) * np.cos(t1) * np.cos(t2) - np.sin(t1) * np.sin(t2)


FAMILIES = {
    "noncommuting": Family("noncommuting", ("theta", "phi"), NonCommuting, _nc_cos),
    "splitstep": Family("splitstep", ("theta1", "theta2"), SplitStep, _ss_cos),
}


def _family(family: str | Family) -> Family:
    if isinstance(family, Family):
        return family
    try:
        return FAMILIES[family]
    except KeyError:
        raise InvalidArgumentError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")


@dataclass(frozen=True, eq=False)
class GapMap:
    """Minimum-over-k gaps on a parameter grid; ``gap0[i, j]`` belongs to ``(a[i], b[j])``."""

    family: str
    axes: tuple[str, str]
    a: NDArray[np.float64]
    b: NDArray[np.float64]
    gap0: NDArray[np.float64]
    gap_pi: NDArray[np.float64]
    k_at_min: NDArray[np.float64]

    def rows(self):
        for i, x in enumerate(self.a):
            for j, y in enumerate(self.b):
                yield (float(x), float(y), float(self.k_at_min[i, j]),
                       float(self.gap0[i, j]), float(self.gap_pi[i, j]))


def k_grid(zone: tuple[float, float], samples: int) -> NDArray[np.float64]:
    """``samples`` equally spaced momenta on the half-open zone ``[lo, hi)``."""
    lo, hi = zone
    return lo + (hi - lo) * np.arange(samples) / samples


def phase_diagram(family: str | Family = "noncommuting", resolution: int = 256,
                  k_samples: int = 128) -> GapMap:
    """
    Gap map on the closed square ``[-π, π]²`` with ``resolution`` points per axis.

    For each parameter point the gaps at 0 and π are minimized over
    ``k_samples`` momenta spanning the family's Brillouin zone.  Grids with
    ``k_samples`` divisible by 4 contain ``k = 0, ±π/2, π`` (where the
    non-commuting walk closes its gaps), and parameter grids with
    ``resolution - 1`` divisible by 4 contain all its Dirac points.
    """
    fam = _family(family)
    if resolution < 2:
        raise InvalidArgumentError("resolution must be at least 2")
    grid = np.linspace(-np.pi, np.pi, resolution)
    zone = brillouin_zone(fam.make(0.1, 0.2))
    ks = k_grid(zone, k_samples)
    A, B = np.meshgrid(grid, grid, indexing="ij")
    gap0 = np.full(A.shape, np.inf)
    gap_pi = np.full(A.shape, np.inf)
    k_at = np.zeros(A.shape)
    for k in ks:
        e = np.arccos(np.clip(fam.cos_e(A, B, k), -1.0, 1.0))
        g = np.minimum(e, np.pi - e)
        better = g < np.minimum(gap0, gap_pi)
        k_at[better] = k
        gap0 = np.minimum(gap0, e)
        gap_pi = np.minimum(gap_pi, np.pi - e)
    return GapMap(fam.name, fam.axes, grid, grid.copy(), gap0, gap_pi, k_at)


# ---------------------------------------------------------------------------
# Dirac points

DIRAC_LABELS = {0.0: "square", np.pi / 2: "romboid", -np.pi / 2: "circle", np.pi: "pentagon"}


@dataclass(frozen=True)
class DiracPoint:
    theta: float
    phi: float
    k: float
    label: str
    residual: float


def _wrap_pi(x):
    """Map angles onto ``(-π, π]``."""
    y = np.mod(np.asarray(x) + np.pi, 2 * np.pi) - np.pi
    return np.where(np.isclose(y, -np.pi, rtol=0.0, atol=1e-12), np.pi, y)


def _label(k: float) -> str:
    for ref, name in DIRAC_LABELS.items():
        if abs(float(_wrap_pi(k - ref))) < 1e-9:
            return name
    return "other"


def find_dirac_points(resolution: int = 256,
                      k_list: Sequence[float] = (0.0, np.pi / 2, -np.pi / 2, np.pi),
                      *, identify_boundary: bool = False,
                      family: str | Family = "noncommuting",
                      tol: float = 1e-10) -> list[DiracPoint]:
    """
    Parameter points where the quasi-energy gap at ``E = 0`` closes.

    A closing at ``E = 0`` means ``U(k) = 1``.  For odd-coin protocols
    ``U(k + π) = -U(k)``, so every zero-gap closing at ``k`` is accompanied by
    a π-gap closing at ``k + π``; counting only ``E = 0`` closings lists each
    degeneracy once.

    The square ``[-π, π]²`` is scanned on a ``(resolution + 1)²`` grid for
    local minima of ``1 - cos E``, each candidate is refined by solving
    ``U(θ, φ, k) = 1`` in least squares, and results closer than 1e-6 are
    merged.  With ``identify_boundary=True`` the parameters are first mapped
    onto the torus ``(-π, π]²`` so that ``θ = -π`` and ``θ = π`` coincide.
    """
    fam = _family(family)
    if resolution < 64:
        raise InvalidArgumentError("resolution must be at least 64 per axis")
    grid = np.linspace(-np.pi, np.pi, resolution + 1)
    h = grid[1] - grid[0]
    A, B = np.meshgrid(grid, grid, indexing="ij")
    found: list[DiracPoint] = []
    seen_k = []
    for k in k_list:
        k = float(_wrap_pi(k))
        if any(abs(k - s) < 1e-12 for s in seen_k):
            continue
        seen_k.append(k)
        f = 1.0 - fam.cos_e(A, B, k)
        for i, j in _local_minima(f, threshold=2.0 * h * h):
            pt = _refine(fam, grid[i], grid[j], k, tol)
            if pt is not None:
                found.append(pt)
    return _dedupe(found, identify_boundary)


def _local_minima(f: NDArray, threshold: float):
    padded = np.pad(f, 1, constant_values=np.inf)
    core = padded[1:-1, 1:-1]
    is_min = core <= threshold
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= core <= padded[1 + di:padded.shape[0] - 1 + di,
                                         1 + dj:padded.shape[1] - 1 + dj]
    return list(zip(*np.nonzero(is_min)))


def _refine(fam: Family, a0: float, b0: float, k: float, tol: float) -> DiracPoint | None:
    eye = np.eye(2)

    def residual(x):
        d = momentum_unitaries(fam.make(x[0], x[1]), np.array(k)) - eye
        return np.concatenate([d.real.ravel(), d.imag.ravel()])

    sol = least_squares(residual, x0=[a0, b0], bounds=([-np.pi - 1e-9] * 2, [np.pi + 1e-9] * 2),
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    res = float(np.max(np.abs(residual(sol.x))))
    if res > tol:
        return None
    a, b = np.clip(sol.x, -np.pi, np.pi)
    return DiracPoint(float(a), float(b), k, _label(k), res)


def _dedupe(points: list[DiracPoint], identify_boundary: bool) -> list[DiracPoint]:
    merged: list[DiracPoint] = []
    for p in points:
        if identify_boundary:
            p = DiracPoint(float(_wrap_pi(p.theta)), float(_wrap_pi(p.phi)), p.k, p.label, p.residual)
        if not any(abs(p.theta - q.theta) < 1e-6 and abs(p.phi - q.phi) < 1e-6
                   and abs(p.k - q.k) < 1e-6 for q in merged):
            merged.append(p)
    merged.sort(key=lambda q: (q.k, q.theta, q.phi))
    return merged


def count_dirac_points(resolution: int = 256, **kwargs) -> dict[str, int]:
    """Number of Dirac points with and without boundary identification."""
    return {
        "without_identification": len(find_dirac_points(resolution, identify_boundary=False, **kwargs)),
        "with_identification": len(find_dirac_points(resolution, identify_boundary=True, **kwargs)),
    }


# ---------------------------------------------------------------------------
# winding number

def chiral_axis(n: NDArray[np.float64], tol: float = 1e-6) -> NDArray[np.float64]:
    """
    Unit axis orthogonal to every sampled Bloch vector.

    Found as the least-squares null direction of the stacked samples and
    oriented to have a non-negative z component (then x, then y, for ties).
    """
    _, _, vt = np.linalg.svd(n, full_matrices=False)
    axis = vt[-1]
    if np.max(np.abs(n @ axis)) > tol:
        raise ChiralSymmetryError("Bloch vectors do not share an orthogonal axis")
    for comp in (2, 0, 1):
        if abs(axis[comp]) > 1e-12:
            return axis if axis[comp] > 0 else -axis
    return axis


def winding_number(p: SplitStep, k_samples: int = 512, gap_tol: float = 1e-6) -> int:
    """
    Winding of ``n(k)`` around the chiral axis over one Brillouin zone.

    Raises
    ------
    GaplessPointError
        If either gap closes at a sampled momentum.
    ChiralSymmetryError
        If no common orthogonal axis exists within 1e-6.
    """
    ks = k_grid(brillouin_zone(p), k_samples)
    n, e = bloch_vectors(p, ks, check_gap=False)
    if np.min(np.minimum(e, np.pi - e)) < gap_tol:
        raise GaplessPointError("winding number undefined: the gap closes on the loop")
    axis = chiral_axis(n)
    e1 = n[0] - axis * (n[0] @ axis)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    ang = np.arctan2(n @ e2, n @ e1)
    steps = np.diff(np.append(ang, ang[0]))
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    total = steps.sum() / (2 * np.pi)
    w = int(round(total))
    if abs(total - w) > 1e-6:
        raise GaplessPointError(f"non-integer winding {total!r}; increase k_samples")
    return w
