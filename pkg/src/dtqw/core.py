"""
Walker-coin states and the single-substep operators of a 1D quantum walk.

The coin basis is ``H = (1, 0)`` and ``V = (0, 1)``.  Coin operators are
plain ``(2, 2)`` complex arrays; a coin spinor is a ``(2,)`` complex array.

A :class:`WalkerCoinState` stores the amplitudes on the contiguous window of
sites between its lowest and highest occupied site, so memory grows with the
spread of the walker rather than with any fixed lattice size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidArgumentError

__all__ = [
    "H",
    "V",
    "PRUNE_TOL",
    "WalkerCoinState",
    "rotation_y",
    "rotation_x",
    "rotation_axis",
    "hadamard_coin",
    "is_unitary",
    "apply_coin",
    "translate",
    "probability_distribution",
    "fidelity",
]

H = np.array([1.0, 0.0], dtype=np.complex128)
V = np.array([0.0, 1.0], dtype=np.complex128)

# amplitudes smaller than this are dropped after every substep
PRUNE_TOL = 1e-15


def _finite_angle(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
    return value


def rotation_y(theta: float) -> NDArray[np.complex128]:
    """Rotation ``[[cos θ, -sin θ], [sin θ, cos θ]]``."""
    theta = _finite_angle("theta", theta)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rotation_x(phi: float) -> NDArray[np.complex128]:
    """Rotation ``[[cos φ, i sin φ], [i sin φ, cos φ]]``."""
    phi = _finite_angle("phi", phi)
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=np.complex128)


def rotation_axis(n: ArrayLike, theta: float) -> NDArray[np.complex128]:
    """
    Rotation by ``theta`` about the unit axis ``n = (nx, ny, nz)``.

    Parameters
    ----------
    n : array_like, shape (3,)
        Rotation axis; must have unit length within 1e-9.
    theta : float
        Rotation angle in radians.

    Returns
    -------
    ndarray, shape (2, 2)
        ``[[cos θ - i nz sin θ, (i nx - ny) sin θ],
        [(i nx + ny) sin θ, cos θ + i nz sin θ]]``

    Raises
    ------
    InvalidArgumentError
        If ``n`` is not a finite unit 3-vector or ``theta`` is not finite.
    """
    axis = np.asarray(n, dtype=float)
    if axis.shape != (3,) or not np.all(np.isfinite(axis)):
        raise InvalidArgumentError(f"axis must be a finite 3-vector, got {n!r}")
    if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
        raise InvalidArgumentError(f"axis must have unit norm, got |n|={np.linalg.norm(axis)}")
    theta = _finite_angle("theta", theta)
    nx, ny, nz = axis
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [[c - 1j * nz * s, (1j * nx - ny) * s],
         [(1j * nx + ny) * s, c + 1j * nz * s]],
        dtype=np.complex128,
    )


def hadamard_coin() -> NDArray[np.complex128]:
    """The unbiased coin ``(1/√2) [[1, 1], [1, -1]]``."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


def is_unitary(u: ArrayLike, atol: float = 1e-12) -> bool:
    u = np.asarray(u)
    return u.shape == (2, 2) and np.allclose(u.conj().T @ u, np.eye(2), rtol=0.0, atol=atol)


@dataclass(frozen=True, eq=False)
class WalkerCoinState:
    """
    Amplitudes ``a[j] = (aH(j), aV(j))`` on the site window ``origin .. origin + len - 1``.

    Row ``r`` of :attr:`amplitudes` belongs to site ``origin + r``.  Instances
    are immutable: the amplitude array is flagged read-only.
    """

    origin: int
    amplitudes: NDArray[np.complex128]

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True).reshape(-1, 2)
        if not np.all(np.isfinite(amps)):
            raise InvalidArgumentError("amplitudes must be finite")
        amps, origin = _trim(amps, int(self.origin))
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def localized(cls, site: int = 0, coin: ArrayLike = H) -> "WalkerCoinState":
        return cls(site, np.asarray(coin, dtype=np.complex128).reshape(1, 2))

    @classmethod
    def from_dict(cls, amplitudes: Mapping[int, ArrayLike]) -> "WalkerCoinState":
        if not amplitudes:
            return cls(0, np.zeros((0, 2)))
        lo, hi = min(amplitudes), max(amplitudes)
        amps = np.zeros((hi - lo + 1, 2), dtype=np.complex128)
        for j, spinor in amplitudes.items():
            amps[j - lo] = spinor
        return cls(lo, amps)

    @property
    def sites(self) -> NDArray[np.int64]:
        """All sites of the stored window, occupied or not."""
        return np.arange(self.origin, self.origin + len(self.amplitudes))

    @property
    def support(self) -> list[int]:
        occupied = np.any(self.amplitudes != 0, axis=1)
        return [int(j) for j in self.sites[occupied]]

    def __getitem__(self, site: int) -> NDArray[np.complex128]:
        r = site - self.origin
        if 0 <= r < len(self.amplitudes):
            return self.amplitudes[r].copy()
        return np.zeros(2, dtype=np.complex128)

    def as_dict(self) -> dict[int, NDArray[np.complex128]]:
        return {j: self[j] for j in self.support}

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def vector(self, sites: Iterable[int]) -> NDArray[np.complex128]:
        """Flatten onto ``sites`` as ``[aH(s0), aV(s0), aH(s1), ...]``."""
        return np.concatenate([self[j] for j in sites])

    def __repr__(self) -> str:
        return f"WalkerCoinState(support={self.support}, norm={self.norm():.12g})"


def _trim(amps: NDArray[np.complex128], origin: int):
    amps[np.abs(amps) < PRUNE_TOL] = 0.0
    occupied = np.flatnonzero(np.any(amps != 0, axis=1))
    if occupied.size == 0:
        return np.zeros((0, 2), dtype=np.complex128), 0
    lo, hi = occupied[0], occupied[-1]
    return np.ascontiguousarray(amps[lo:hi + 1]), origin + int(lo)


def apply_coin(state: WalkerCoinState, c: ArrayLike) -> WalkerCoinState:
    """Left-multiply every site's spinor by the coin ``c``."""
    c = np.asarray(c, dtype=np.complex128)
    return WalkerCoinState(state.origin, state.amplitudes @ c.T)


def translate(state: WalkerCoinState) -> WalkerCoinState:
    """Conditional shift: ``aH(j) -> j + 1`` and ``aV(j) -> j - 1``."""
    amps = state.amplitudes
    out = np.zeros((len(amps) + 2, 2), dtype=np.complex128)
    # window grows by one site on each side; new origin = origin - 1
    out[2:, 0] = amps[:, 0]
    out[:-2, 1] = amps[:, 1]
    return WalkerCoinState(state.origin - 1, out)


def probability_distribution(state: WalkerCoinState) -> dict[int, float]:
    """``P(j) = |aH(j)|² + |aV(j)|²`` over the occupied sites, ascending in ``j``."""
    probs = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
    return {int(j): float(p) for j, p in zip(state.sites, probs) if p > 0.0}


def fidelity(a: WalkerCoinState, b: WalkerCoinState) -> float:
    """``|<a|b>|`` for two normalized states; insensitive to a global phase."""
    lo = min(a.origin, b.origin)
    hi = max(a.origin + len(a.amplitudes), b.origin + len(b.amplitudes))
    return float(abs(np.vdot(_padded(a, lo, hi), _padded(b, lo, hi))))


def _padded(state: WalkerCoinState, lo: int, hi: int) -> NDArray[np.complex128]:
    out = np.zeros((max(hi - lo, 0), 2), dtype=np.complex128)
    r = state.origin - lo
    out[r:r + len(state.amplitudes)] = state.amplitudes
    return out
