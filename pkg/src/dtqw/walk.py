"""
Step protocols and n-step evolution.

Every protocol is a product ``U = T C_1 T C_2 ... T C_m`` of coin matrices
``C_i`` interleaved with the conditional translation ``T``.  Products are read
right to left: the rightmost operator acts first, so a step applies ``C_m``,
then ``T``, then ``C_{m-1}``, ..., and finishes with ``C_1`` followed by ``T``.

- ``Standard(axis, θ)``:        ``U = T R_axis(θ)``
- ``SplitStep(θ1, θ2)``:        ``U = T R_y(θ1) T R_y(θ2)``
- ``NonCommuting(θ, φ)``:       ``U = T R_x(φ) R_y(θ)``
- ``CoinSequence(coins)``:      ``U = T coins[0] T coins[1] ...``, any unitaries

``Standard((0, 1, 0), π/4)`` and ``CoinSequence((hadamard_coin(),))`` produce
the same position distribution from ``|0>|H>`` but different coin states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.typing import NDArray

from .core import (
    WalkerCoinState,
    apply_coin,
    fidelity,
    hadamard_coin,
    is_unitary,
    rotation_axis,
    rotation_x,
    rotation_y,
    translate,
)
from .errors import InvalidArgumentError

__all__ = [
    "Standard",
    "SplitStep",
    "NonCommuting",
    "CoinSequence",
    "Protocol",
    "HADAMARD",
    "InitialCondition",
    "coins_of",
    "step",
    "evolve",
    "prepare_step_state",
    "one_step_equivalence",
    "OneStepReport",
]

Y_AXIS = (0.0, 1.0, 0.0)


def _check_finite(**angles: float) -> None:
    for name, value in angles.items():
        if not np.isfinite(value):
            raise InvalidArgumentError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Standard:
    axis: tuple[float, float, float] = Y_AXIS
    theta: float = np.pi / 4

    def __post_init__(self):
        object.__setattr__(self, "axis", tuple(float(x) for x in self.axis))
        _check_finite(theta=self.theta)
        rotation_axis(self.axis, self.theta)  # validates the axis

    def coins(self) -> tuple[NDArray[np.complex128], ...]:
        return (rotation_axis(self.axis, self.theta),)


@dataclass(frozen=True)
class SplitStep:
    theta1: float
    theta2: float

    def __post_init__(self):
        _check_finite(theta1=self.theta1, theta2=self.theta2)

    def coins(self) -> tuple[NDArray[np.complex128], ...]:
        return (rotation_y(self.theta1), rotation_y(self.theta2))


@dataclass(frozen=True)
class NonCommuting:
    theta: float
    phi: float

    def __post_init__(self):
        _check_finite(theta=self.theta, phi=self.phi)

    def coins(self) -> tuple[NDArray[np.complex128], ...]:
        return (rotation_x(self.phi) @ rotation_y(self.theta),)


@dataclass(frozen=True, eq=False)
class CoinSequence:
    """Arbitrary coins; ``U = T coins[0] T coins[1] ... T coins[-1]``."""

    matrices: tuple = field(default=())

    def __post_init__(self):
        mats = tuple(np.array(m, dtype=np.complex128) for m in self.matrices)
        if not mats:
            raise InvalidArgumentError("CoinSequence needs at least one coin")
        for m in mats:
            if not is_unitary(m):
                raise InvalidArgumentError("every coin must be a 2x2 unitary")
            m.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    def coins(self) -> tuple[NDArray[np.complex128], ...]:
        return self.matrices


Protocol = Union[Standard, SplitStep, NonCommuting, CoinSequence]

# the unbiased coin of the SLM proposal, as a protocol
HADAMARD = CoinSequence((hadamard_coin(),))


def coins_of(p: Protocol) -> tuple[NDArray[np.complex128], ...]:
    return p.coins()


@dataclass(frozen=True)
class InitialCondition:
    site: int = 0
    coin: tuple[complex, complex] = (1.0, 0.0)

    def __post_init__(self):
        coin = tuple(complex(c) for c in self.coin)
        if len(coin) != 2 or abs(np.hypot(abs(coin[0]), abs(coin[1])) - 1.0) > 1e-12:
            raise InvalidArgumentError(f"coin must be a unit 2-vector, got {self.coin!r}")
        object.__setattr__(self, "coin", coin)
        object.__setattr__(self, "site", int(self.site))

    def state(self) -> WalkerCoinState:
        return WalkerCoinState.localized(self.site, self.coin)


def step(state: WalkerCoinState, p: Protocol) -> WalkerCoinState:
    """Apply one full protocol step."""
    for c in reversed(p.coins()):
        state = translate(apply_coin(state, c))
    return state


def evolve(init: InitialCondition, p: Protocol, n: int) -> WalkerCoinState:
    """``U^n`` applied to the localized initial state."""
    if int(n) != n or n < 0:
        raise InvalidArgumentError(f"number of steps must be a non-negative integer, got {n!r}")
    state = init.state()
    for _ in range(int(n)):
        state = step(state, p)
    return state


def prepare_step_state(n: int, init: InitialCondition | None = None,
                       p: Protocol = HADAMARD) -> WalkerCoinState:
    """Walker-coin state after ``n`` steps; the target for state preparation."""
    return evolve(init if init is not None else InitialCondition(), p, n)


@dataclass(frozen=True)
class OneStepReport:
    n: int
    fidelity_deficit: float
    passed: bool


def one_step_equivalence(n: int, p: Protocol = HADAMARD,
                         init: InitialCondition | None = None,
                         tol: float = 1e-12) -> OneStepReport:
    """Check that one step on the prepared ``n``-th state gives the ``n+1``-th state."""
    if n < 0:
        raise InvalidArgumentError("n must be non-negative")
    stepped = step(prepare_step_state(n, init, p), p)
    deficit = 1.0 - fidelity(stepped, prepare_step_state(n + 1, init, p))
    return OneStepReport(n, deficit, abs(deficit) <= tol)

