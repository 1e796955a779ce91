"""Brute-force check path: explicit interferometer per Fock level.

Nothing here calls the closed forms.  Each pointer level ``n`` is pushed
through the two-path interferometer as a 2x2 matrix product and the
dark-port amplitude is read off directly.

Conventions: both beam splitters are the real symmetric matrix
``[[1, 1], [1, -1]] / sqrt(2)``; the photon enters port 0, the bright port is
output 0 and the dark port output 1.  The phase shifter applies
``exp(-i*theta)`` to arm a, so that the dark-port transmission is
``sin^2((theta + n*phi0)/2)``, matching the sign with which ``theta`` enters
the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    P_FLOOR,
    DegeneratePostselectionError,
    InteractionConfig,
    InvalidParameterError,
    NumberDistribution,
    NumericRangeError,
    PostselectionOutcome,
    ThermalPointer,
    Truncation,
)

__all__ = [
    "BEAM_SPLITTER",
    "SystemAmplitudes",
    "interferometer_chain",
    "arm_amplitudes",
    "dark_port_amplitude",
    "oracle_postselect",
    "wigner_series",
    "laguerre_scaled",
]

BEAM_SPLITTER = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
_INPUT = np.array([1.0, 0.0], dtype=complex)
_DARK = 1
_BLOCK = 1 << 18


@dataclass(frozen=True)
class SystemAmplitudes:
    """Single-photon amplitudes in arms a and b."""

    amp_a: complex
    amp_b: complex

    def __post_init__(self):
        norm = abs(self.amp_a) ** 2 + abs(self.amp_b) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise InvalidParameterError(f"arm amplitudes not normalised: |a|^2+|b|^2 = {norm!r}")


def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


def _two_product(a, b):
    """``a*b`` as an unevaluated sum ``hi + lo`` with no rounding loss (Dekker)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _kerr_phase(n: np.ndarray, phi0: float) -> np.ndarray:
    """``exp(i*n*phi0)`` without rounding the product ``n*phi0`` first."""
    hi, lo = _two_product(n, phi0)
    return np.exp(1j * hi) * (np.cos(lo) + 1j * np.sin(lo))


def _phase_stage(cfg: InteractionConfig, n: np.ndarray) -> np.ndarray:
    out = np.zeros(n.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-1j * cfg.theta)
    out[..., 1, 1] = _kerr_phase(n, cfg.phi0)
    return out


def interferometer_chain(n, cfg: InteractionConfig) -> np.ndarray:
    """Composed 2x2 unitary ``BS @ phases(n) @ BS``; broadcasts over ``n``."""
    n = np.asarray(n, dtype=float)
    return BEAM_SPLITTER @ _phase_stage(cfg, n) @ BEAM_SPLITTER


def arm_amplitudes(n: int, cfg: InteractionConfig) -> SystemAmplitudes:
    """Photon state inside the interferometer just before the second splitter."""
    a, b = _apply(BEAM_SPLITTER, _INPUT[0], _INPUT[1])
    phases = _phase_stage(cfg, np.asarray(float(n)))
    return SystemAmplitudes(complex(phases[0, 0] * a), complex(phases[1, 1] * b))


def _apply(m: np.ndarray, v0, v1):
    """``m @ (v0, v1)`` written out row by row; no fused multiply-add, so exact zeros survive."""
    return m[..., 0, 0] * v0 + m[..., 0, 1] * v1, m[..., 1, 0] * v0 + m[..., 1, 1] * v1


def _dark_amplitudes(n: np.ndarray, cfg: InteractionConfig) -> np.ndarray:
    a, b = _apply(BEAM_SPLITTER, _INPUT[0], _INPUT[1])
    phases = _phase_stage(cfg, n)
    a, b = phases[..., 0, 0] * a, phases[..., 1, 1] * b
    return _apply(BEAM_SPLITTER, a, b)[_DARK]


def dark_port_amplitude(n: int, cfg: InteractionConfig) -> complex:
    if n < 0:
        raise InvalidParameterError(f"n must be >= 0, got {n!r}")
    return complex(_dark_amplitudes(np.asarray(float(n)), cfg))


def oracle_postselect(
    pointer: ThermalPointer, cfg: InteractionConfig, trunc: Truncation | None = None
) -> PostselectionOutcome:
    """Accumulate ``(1-z) z^n |dark amplitude(n)|^2`` level by level.

    The returned probability is the truncated sum; the neglected thermal mass
    ``z**(n_max+1)`` bounds what is missing from it.
    """
    z = pointer.z
    n_max = (trunc or Truncation()).resolve(z)
    chunks = []
    for start in range(0, n_max + 1, _BLOCK):
        n = np.arange(start, min(start + _BLOCK, n_max + 1), dtype=float)
        amp = _dark_amplitudes(n, cfg)
        thermal = (1.0 - z) * np.power(z, n)
        chunks.append(thermal * (amp.real**2 + amp.imag**2))
    weights = np.concatenate(chunks)
    total = math.fsum(weights)
    if total <= P_FLOOR:
        raise DegeneratePostselectionError(f"oracle dark-port probability {total!r} is degenerate")
    probs = weights / total
    dist = NumberDistribution(probs, tail_mass=max(0.0, 1.0 - math.fsum(probs)))
    tail_bound = z ** (n_max + 1) * ((n_max + 1) + pointer.n_bar) / total
    return PostselectionOutcome(min(total, 1.0), dist, dist.mean(), tail_bound)


def laguerre_scaled(n_max: int, u):
    """Rows ``exp(-u/2) * L_k(u)`` for ``k = 0..n_max`` by upward recurrence.

    Scaling the seed by ``exp(-u/2)`` keeps every row bounded by 1 in magnitude
    (the recurrence is linear), so nothing overflows for moderate ``u``.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty((n_max + 1,) + u.shape)
    out[0] = np.exp(-0.5 * u)
    with np.errstate(invalid="ignore", over="ignore"):
        for k in range(n_max):
            prev = out[k - 1] if k else 0.0
            out[k + 1] = ((2 * k + 1 - u) * out[k] - k * prev) / (k + 1)
            if not np.all(np.isfinite(out[k + 1])):
                raise NumericRangeError(f"Laguerre recurrence left the float range at n={k + 1}")
    return out


def wigner_series(dist: NumberDistribution, x, p):
    """Wigner function of a Fock-diagonal state, ``sum_n P(n) W_n(x, p)``.

    ``W_n = (2/pi) (-1)^n exp(-2 r^2) L_n(4 r^2)``.
    """
    n_max = dist.n_max
    if n_max > 1_000_000:
        raise InvalidParameterError(f"n_max={n_max} too large for the series evaluator")
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    u = 4.0 * (x * x + p * p)
    acc = np.zeros(u.shape)
    prev = np.zeros(u.shape)
    cur = np.exp(-0.5 * u)
    sign = 1.0
    probs = dist.probs
    for k in range(n_max + 1):
        if probs[k] != 0.0:
            acc += sign * probs[k] * cur
        if k < n_max:
            with np.errstate(invalid="ignore", over="ignore"):
                prev, cur = cur, ((2 * k + 1 - u) * cur - k * prev) / (k + 1)
            if not np.all(np.isfinite(cur)):
                raise NumericRangeError(f"Laguerre recurrence left the float range at n={k + 1}")
        sign = -sign
    w = (2.0 / math.pi) * acc
    return float(w) if w.ndim == 0 else w
