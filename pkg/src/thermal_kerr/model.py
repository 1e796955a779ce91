"""Domain types shared by the analytic engine and both oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "P_FLOOR",
    "DEFAULT_TAIL_EPS",
    "InvalidParameterError",
    "DegeneratePostselectionError",
    "NumericRangeError",
    "InternalConsistencyError",
    "ThermalPointer",
    "InteractionConfig",
    "Truncation",
    "NumberDistribution",
    "PostselectionOutcome",
    "MonteCarloConfig",
    "z_from_boltzmann_ratio",
]

P_FLOOR = 1e-300
DEFAULT_TAIL_EPS = 1e-16
TWO_PI = 2.0 * math.pi


class InvalidParameterError(ValueError):
    """A parameter lies outside its physical domain."""


class DegeneratePostselectionError(ArithmeticError):
    """Dark-port probability is at or below ``P_FLOOR``; conditional state undefined."""


class NumericRangeError(ArithmeticError):
    """A recurrence or weight left the representable floating-point range."""


class InternalConsistencyError(ArithmeticError):
    """A quantity that is real by construction came out with an imaginary part."""


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ThermalPointer:
    """Thermal probe field, parametrised by the Boltzmann factor ``z``."""

    z: float

    def __post_init__(self):
        z = float(self.z)
        if not (0.0 <= z < 1.0):  # also rejects NaN
            raise InvalidParameterError(f"z must be in [0,1), got {self.z!r}")
        object.__setattr__(self, "z", z)

    @property
    def n_bar(self) -> float:
        return self.z / (1.0 - self.z)

    @classmethod
    def from_mean_photon(cls, n_bar: float) -> "ThermalPointer":
        n_bar = _finite("n_bar", n_bar)
        if n_bar < 0:
            raise InvalidParameterError(f"n_bar must be >= 0, got {n_bar!r}")
        return cls(n_bar / (1.0 + n_bar))


def _wrap_angle(x: float) -> float:
    """Map an angle into (-pi, pi]."""
    r = math.remainder(x, TWO_PI)
    return math.pi if r == -math.pi else r


@dataclass(frozen=True)
class InteractionConfig:
    """Cross-phase per photon ``phi0`` and phase-shifter angle ``theta`` (radians).

    Both angles are reduced modulo 2*pi. A negative ``phi0`` is folded onto
    ``[0, pi]`` by flipping the sign of both angles, which leaves every
    photon-number-diagonal quantity unchanged because they depend only on
    ``sin^2((theta + n*phi0)/2)``.
    """

    phi0: float
    theta: float = 0.0

    def __post_init__(self):
        phi0 = _wrap_angle(_finite("phi0", self.phi0))
        theta = _wrap_angle(_finite("theta", self.theta))
        if phi0 < 0:
            phi0, theta = -phi0, _wrap_angle(-theta)
        object.__setattr__(self, "phi0", phi0)
        object.__setattr__(self, "theta", theta)

    def require_kerr(self) -> None:
        if self.phi0 == 0.0:
            raise InvalidParameterError("phi0 must be > 0 for this operation")


@dataclass(frozen=True)
class Truncation:
    """Fock-space cutoff, given either directly or as a geometric tail bound."""

    n_max: int | None = None
    tail_eps: float | None = None

    def __post_init__(self):
        if self.n_max is not None and self.tail_eps is not None:
            raise InvalidParameterError("give exactly one of n_max and tail_eps")
        if self.n_max is not None:
            if int(self.n_max) != self.n_max or self.n_max < 0:
                raise InvalidParameterError(f"n_max must be a nonnegative integer, got {self.n_max!r}")
            object.__setattr__(self, "n_max", int(self.n_max))
        if self.tail_eps is not None:
            eps = float(self.tail_eps)
            if not (0.0 < eps < 1.0):
                raise InvalidParameterError(f"tail_eps must be in (0,1), got {self.tail_eps!r}")
            object.__setattr__(self, "tail_eps", eps)

    @property
    def eps(self) -> float:
        return DEFAULT_TAIL_EPS if self.tail_eps is None else self.tail_eps

    def resolve(self, z: float) -> int:
        """Smallest ``n_max`` with ``z**(n_max + 1) <= eps`` (or the fixed cutoff)."""
        if self.n_max is not None:
            return self.n_max
        if z == 0.0:
            return 0
        eps = self.eps
        n = max(int(math.ceil(math.log(eps) / math.log(z))) - 1, 0)
        # guard against log rounding in either direction
        while z ** (n + 1) > eps:
            n += 1
        while n > 0 and z**n <= eps:
            n -= 1
        return n


@dataclass(frozen=True)
class NumberDistribution:
    """Photon-number probabilities for ``n = 0..n_max`` plus the mass beyond."""

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidParameterError("probs must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InvalidParameterError("probs must be finite and nonnegative")
        tail = float(self.tail_mass)
        if not (tail >= 0.0):
            raise InvalidParameterError(f"tail_mass must be >= 0, got {tail!r}")
        total = float(np.sum(probs)) + tail
        if abs(total - 1.0) > 1e-12:
            raise InvalidParameterError(f"probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail_mass", tail)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    def mean(self) -> float:
        return float(np.dot(np.arange(self.probs.size, dtype=float), self.probs))

    def __len__(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class PostselectionOutcome:
    """Dark-port success probability with the conditional pointer distribution.

    ``mean_photon`` is the truncated mean ``sum(n * probs[n])``;
    ``tail_mean_bound`` bounds the contribution of the levels beyond ``n_max``.
    """

    probability: float
    distribution: NumberDistribution
    mean_photon: float
    tail_mean_bound: float = 0.0

    def __post_init__(self):
        p = float(self.probability)
        if not (0.0 <= p <= 1.0):
            raise InvalidParameterError(f"probability must be in [0,1], got {p!r}")
        if not (self.mean_photon >= 0.0):
            raise InvalidParameterError("mean_photon must be >= 0")
        expected = self.distribution.mean()
        if abs(self.mean_photon - expected) > 1e-10 * max(expected, 1e-300) + self.tail_mean_bound:
            raise InvalidParameterError("mean_photon disagrees with the distribution")
        object.__setattr__(self, "probability", p)


@dataclass(frozen=True)
class MonteCarloConfig:
    samples: int = 1_000_000
    seed: int = 0
    # samples per independently-seeded block; fixed so worker count cannot change results
    block_size: int = field(default=1 << 16, repr=False)

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise InvalidParameterError(f"samples must be a positive integer, got {self.samples!r}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.block_size < 2 or self.block_size % 2:
            raise InvalidParameterError("block_size must be an even integer >= 2")
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "seed", int(self.seed))


def z_from_boltzmann_ratio(ratio: float) -> float:
    """Return ``exp(-ratio)`` for ``ratio = hbar*omega / (k_B*T)``."""
    ratio = _finite("ratio", ratio)
    if ratio <= 0:
        raise InvalidParameterError(f"ratio must be > 0, got {ratio!r}")
    return math.exp(-ratio)
