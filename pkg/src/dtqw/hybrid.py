"""
Two-photon walker-coin states with a non-local coin.

Photon 1 carries the coin in its polarization and photon 2 carries the walker
in its transverse mode.  A :class:`HybridState` stores amplitudes
``c(pol, j)`` for ``pol ∈ {"H", "V"}`` and integer modes ``j``.

Source model
------------
A polarization Bell pair ``(|H>_1|H>_2 + |V>_1|V>_2)/√2`` enters a
polarization Mach-Zehnder interferometer on photon 2.  Each arm's SLM
prepares the normalized spatial state of its branch, ``φ̂`` in the H arm and
``ξ̂`` in the V arm.  The arm transmissions ``t_H ∝ ||φ||`` and ``t_V ∝ ||ξ||``
(the larger set to 1) give the branches their relative weights.  A polarizer
at 45° then projects photon 2 onto ``|+>``, which halves the norm squared.  The
polarization of photon 2 is dropped after the projection.

Imperfect sources (``visibility < 1``) scale the coherence between the ``HH``
and ``VV`` branches.  The result is then a :class:`HybridEnsemble`.  It mixes
the ideal state with weight ``v`` and the two dephased branches with
weight ``1 - v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .core import probability_distribution
from .errors import InvalidArgumentError
from .walk import HADAMARD, InitialCondition, Protocol, evolve

__all__ = [
    "POLARIZATIONS",
    "SourceConfig",
    "HybridState",
    "HybridEnsemble",
    "SourceReport",
    "make_hybrid_state",
    "prepare_hybrid_source",
    "nonlocal_step",
    "coincidence_distribution",
    "entanglement_entropy",
    "schmidt_coefficients",
    "schmidt_rank",
    "equivalence_check",
    "EquivalenceReport",
]

POLARIZATIONS = ("H", "V")
_POL_INDEX = {"H": 0, "V": 1}


@dataclass(frozen=True)
class SourceConfig:
    coin: tuple[complex, complex] = (1.0, 0.0)
    n: int = 0
    protocol: Protocol = HADAMARD
    visibility: float = 1.0

    def __post_init__(self):
        coin = tuple(complex(c) for c in self.coin)
        if len(coin) != 2 or abs(abs(coin[0]) ** 2 + abs(coin[1]) ** 2 - 1.0) > 1e-12:
            raise InvalidArgumentError(f"initial coin must be normalized, got {self.coin!r}")
        if int(self.n) != self.n or self.n < 0:
            raise InvalidArgumentError("n must be a non-negative integer")
        if not 0.0 <= self.visibility <= 1.0:
            raise InvalidArgumentError("visibility must lie in [0, 1]")
        object.__setattr__(self, "coin", coin)
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True, eq=False)
class HybridState:
    """Amplitudes keyed by ``(photon-1 polarization, photon-2 mode)``."""

    amplitudes: Mapping[tuple[str, int], complex] = field(default_factory=dict)

    def __post_init__(self):
        amps = {}
        for (pol, j), c in self.amplitudes.items():
            if pol not in _POL_INDEX:
                raise InvalidArgumentError(f"polarization must be 'H' or 'V', got {pol!r}")
            c = complex(c)
            if c != 0:
                amps[(pol, int(j))] = c
        object.__setattr__(self, "amplitudes", dict(sorted(amps.items(), key=lambda kv: (kv[0][1], kv[0][0]))))

    @property
    def modes(self) -> list[int]:
        return sorted({j for _, j in self.amplitudes})

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.amplitudes.values())))

    def matrix(self, modes: list[int] | None = None) -> np.ndarray:
        """Amplitude matrix ``M[pol, j]``, rows H and V, columns ``modes``."""
        modes = self.modes if modes is None else modes
        m = np.zeros((2, len(modes)), dtype=np.complex128)
        col = {j: i for i, j in enumerate(modes)}
        for (pol, j), c in self.amplitudes.items():
            m[_POL_INDEX[pol], col[j]] = c
        return m

    def branch(self, pol: str) -> dict[int, complex]:
        """The unnormalized photon-2 state paired with ``pol`` on photon 1."""
        return {j: c for (p, j), c in self.amplitudes.items() if p == pol}

    def scaled(self, factor: complex) -> "HybridState":
        return HybridState({k: factor * c for k, c in self.amplitudes.items()})

    def fidelity(self, other: "HybridState") -> float:
        return float(abs(sum(np.conj(c) * other.amplitudes.get(k, 0.0)
                             for k, c in self.amplitudes.items())))


@dataclass(frozen=True, eq=False)
class HybridEnsemble:
    """Convex mixture ``Σ w_i |s_i><s_i|`` of normalized hybrid states."""

    components: tuple[tuple[float, HybridState], ...]

    def __post_init__(self):
        total = sum(w for w, _ in self.components)
        if abs(total - 1.0) > 1e-10 or any(w < 0 for w, _ in self.components):
            raise InvalidArgumentError("ensemble weights must be non-negative and sum to 1")


@dataclass(frozen=True, eq=False)
class SourceReport:
    state: HybridState | HybridEnsemble
    arm_transmissions: tuple[float, float]
    norm2_before_polarizer: float
    norm2_after_polarizer: float
    polarizer_probability: float


def _walk_branches(cfg: SourceConfig) -> dict[str, dict[int, complex]]:
    psi = evolve(InitialCondition(0, cfg.coin), cfg.protocol, cfg.n)
    out = {"H": {}, "V": {}}
    for j, spinor in psi.as_dict().items():
        for pol, c in zip(POLARIZATIONS, spinor):
            if c != 0:
                out[pol][j] = complex(c)
    return out


def prepare_hybrid_source(cfg: SourceConfig) -> SourceReport:
    """
    Run the source model and keep the loss bookkeeping.

    The walker-coin state of the single-photon walk supplies the target
    branches ``φ`` (coin H) and ``ξ`` (coin V).
    """
    branches = _walk_branches(cfg)
    norms = {p: np.sqrt(sum(abs(c) ** 2 for c in b.values())) for p, b in branches.items()}
    top = max(norms.values())
    trans = {p: norms[p] / top for p in POLARIZATIONS}
    # after the MZ: (1/√2) Σ_p t_p |p>_1 |p>_2 |branch_p / ||branch_p||>
    three = {}
    for p in POLARIZATIONS:
        if norms[p] == 0:
            continue
        for j, c in branches[p].items():
            three[(p, p, j)] = trans[p] * c / norms[p] / np.sqrt(2.0)
    before = sum(abs(c) ** 2 for c in three.values())
    # polarizer at 45°: <+|H> = <+|V> = 1/√2, photon-2 polarization then dropped
    projected = {(p1, j): c / np.sqrt(2.0) for (p1, _, j), c in three.items()}
    after = sum(abs(c) ** 2 for c in projected.values())
    pure = HybridState({k: c / np.sqrt(after) for k, c in projected.items()})
    v = cfg.visibility
    if v >= 1.0:
        state: HybridState | HybridEnsemble = pure
    else:
        parts = [(v, pure)]
        for p in POLARIZATIONS:
            w = sum(abs(c) ** 2 for (q, _), c in pure.amplitudes.items() if q == p)
            if w > 0:
                br = HybridState({k: c for k, c in pure.amplitudes.items() if k[0] == p})
                parts.append(((1 - v) * w, br.scaled(1 / np.sqrt(w))))
        state = HybridEnsemble(tuple(parts))
    return SourceReport(state, (trans["H"], trans["V"]), float(before), float(after),
                        float(after / before))


def make_hybrid_state(cfg: SourceConfig) -> HybridState | HybridEnsemble:
    """The walker-coin state with the coin on photon 1 and the walker on photon 2."""
    return prepare_hybrid_source(cfg).state


def _coin_on_photon1(amps: dict, c: np.ndarray) -> dict:
    out: dict = {}
    for (pol, j), a in amps.items():
        col = _POL_INDEX[pol]
        for row, new_pol in enumerate(POLARIZATIONS):
            if c[row, col] != 0:
                key = (new_pol, j)
                out[key] = out.get(key, 0.0) + c[row, col] * a
    return out


def _translate_photon2(amps: dict) -> dict:
    return {(pol, j + (1 if pol == "H" else -1)): a for (pol, j), a in amps.items()}


def nonlocal_step(s: HybridState | HybridEnsemble, protocol: Protocol = HADAMARD):
    """
    One protocol step with the coins on photon 1 and, conditioned on photon
    1's polarization, the translations of photon 2's mode.
    """
    if isinstance(s, HybridEnsemble):
        return HybridEnsemble(tuple((w, nonlocal_step(c, protocol)) for w, c in s.components))
    amps = dict(s.amplitudes)
    for c in reversed(protocol.coins()):
        amps = _translate_photon2(_coin_on_photon1(amps, np.asarray(c)))
    return HybridState(amps)


def coincidence_distribution(s: HybridState | HybridEnsemble):
    """
    Coincidence statistics of polarization (detector D1) and mode (detector D2).

    Returns
    -------
    marginal : dict
        ``j -> P(j)``, summed over photon 1's polarization.
    conditional : dict
        ``(pol, j) -> P(pol, j)``.
    """
    parts = s.components if isinstance(s, HybridEnsemble) else ((1.0, s),)
    cond: dict[tuple[str, int], float] = {}
    for w, comp in parts:
        for k, c in comp.amplitudes.items():
            cond[k] = cond.get(k, 0.0) + w * abs(c) ** 2
    cond = dict(sorted(cond.items(), key=lambda kv: (kv[0][1], kv[0][0])))
    marginal: dict[int, float] = {}
    for (_, j), p in cond.items():
        marginal[j] = marginal.get(j, 0.0) + p
    return dict(sorted(marginal.items())), cond


def schmidt_coefficients(s: HybridState):
    """Normalized Schmidt weights ``λ_i`` (squared singular values), descending."""
    if isinstance(s, HybridEnsemble):
        raise InvalidArgumentError("Schmidt decomposition needs a pure state")
    if not s.amplitudes:
        return np.zeros(0)
    sv = np.linalg.svd(s.matrix(), compute_uv=False)
    w = sv ** 2
    return w / np.sum(w)


def schmidt_rank(s: HybridState, cutoff: float = 1e-10) -> int:
    sv = np.linalg.svd(s.matrix(), compute_uv=False)
    return int(np.sum(sv > cutoff * max(sv[0], 1e-300)))


def entanglement_entropy(s: HybridState, cutoff: float = 1e-10) -> float:
    """Von Neumann entropy (bits) of photon 1's reduced state; 0 for rank-1 states."""
    if schmidt_rank(s, cutoff) <= 1:
        return 0.0
    lam = schmidt_coefficients(s)
    lam = lam[lam > 0]
    return float(min(max(-np.sum(lam * np.log2(lam)), 0.0), 1.0))


@dataclass(frozen=True)
class EquivalenceReport:
    n: int
    max_abs_diff: float
    fidelity_deficit: float
    passed: bool


def equivalence_check(cfg: SourceConfig, tol: float = 1e-12) -> EquivalenceReport:
    """
    Compare the non-local step on the ``n``-th hybrid state with the
    single-photon walk at step ``n + 1``.
    """
    stepped = nonlocal_step(make_hybrid_state(cfg), cfg.protocol)
    marginal, _ = coincidence_distribution(stepped)
    walk = evolve(InitialCondition(0, cfg.coin), cfg.protocol, cfg.n + 1)
    ref = probability_distribution(walk)
    keys = set(marginal) | set(ref)
    diff = max(abs(marginal.get(j, 0.0) - ref.get(j, 0.0)) for j in keys)
    if isinstance(stepped, HybridEnsemble):
        deficit = float("nan")
    else:
        nxt = make_hybrid_state(SourceConfig(cfg.coin, cfg.n + 1, cfg.protocol))
        deficit = 1.0 - stepped.fidelity(nxt)
    ok = diff <= tol and (np.isnan(deficit) or abs(deficit) <= tol)
    return EquivalenceReport(cfg.n, float(diff), float(deficit), bool(ok))
