"""Monte Carlo over the coherent-state (P-function) decomposition of the thermal pointer.

A thermal state is an exponential mixture of coherent states.  Each sampled
coherent amplitude is pushed through the dark port exactly (Poisson weights
times the level transmission); averaging over the samples must reproduce the
Fock-diagonal result, because the cross terms between the two arms vanish on
average.

Randomness is counter-addressed: sample ``i`` consumes words ``2i`` and
``2i+1`` of a Philox stream keyed by the seed, so any partition of the sample
range (blocks, threads) draws identical numbers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (
    P_FLOOR,
    DegeneratePostselectionError,
    InteractionConfig,
    InvalidParameterError,
    MonteCarloConfig,
    NumberDistribution,
    NumericRangeError,
    PostselectionOutcome,
    ThermalPointer,
    Truncation,
)

__all__ = [
    "CoherentSample",
    "MonteCarloStats",
    "sample_thermal_alpha",
    "sample_thermal_alphas",
    "coherent_pair_number_weights",
    "coherent_total_weight",
    "mc_accumulate",
    "mc_postselect",
    "worker_count",
]

_WORDS_PER_SAMPLE = 2
_WORDS_PER_COUNTER = 4  # Philox4x64 emits four 64-bit words per counter step


@dataclass(frozen=True)
class CoherentSample:
    alpha: complex

    @property
    def intensity(self) -> float:
        return abs(self.alpha) ** 2


@dataclass(frozen=True)
class MonteCarloStats:
    probability: float
    std_error: float
    level_means: np.ndarray
    level_std_errors: np.ndarray
    samples: int


def worker_count() -> int:
    """Worker cap from ``TLK_THREADS`` (default 1); never changes results."""
    raw = os.environ.get("TLK_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParameterError(f"TLK_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform pairs for samples ``start .. start+count-1``, shape ``(count, 2)``."""
    word0 = start * _WORDS_PER_SAMPLE
    skip = word0 % _WORDS_PER_COUNTER
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(word0 // _WORDS_PER_COUNTER)
    u = np.random.Generator(bitgen).random(skip + count * _WORDS_PER_SAMPLE)
    return u[skip:].reshape(count, _WORDS_PER_SAMPLE)


def sample_thermal_alphas(n_bar: float, seed: int, start: int, count: int) -> np.ndarray:
    """Coherent amplitudes with ``|alpha|^2 ~ Exponential(n_bar)`` and uniform phase."""
    if not (n_bar >= 0.0) or not math.isfinite(n_bar):
        raise InvalidParameterError(f"n_bar must be finite and >= 0, got {n_bar!r}")
    u = _uniforms(seed, start, count)
    intensity = -n_bar * np.log1p(-u[:, 0])
    return np.sqrt(intensity) * np.exp(2j * math.pi * u[:, 1])


def sample_thermal_alpha(n_bar: float, mc: MonteCarloConfig, index: int) -> CoherentSample:
    if not (0 <= index < mc.samples):
        raise InvalidParameterError(f"sample index {index} outside [0, {mc.samples})")
    return CoherentSample(complex(sample_thermal_alphas(n_bar, mc.seed, index, 1)[0]))


def _poisson_cutoff(intensity: float, eps: float) -> int:
    """Smallest n past the Poisson mode whose remaining tail is below ``eps``."""
    if intensity == 0.0:
        return 0
    n = int(math.floor(intensity))
    logq = -intensity + n * math.log(intensity) - math.lgamma(n + 1)
    while True:
        ratio = intensity / (n + 1)
        if ratio < 1 and logq + math.log(ratio / (1 - ratio)) <= math.log(eps):
            return n
        n += 1
        logq += math.log(ratio)


def _weights(intensity: np.ndarray, cfg: InteractionConfig, n_max: int) -> np.ndarray:
    """Rows of ``exp(-a) a^n / n! * sin^2((theta + n phi0)/2)`` for intensities ``a``."""
    n = np.arange(1, n_max + 1, dtype=float)
    with np.errstate(divide="ignore"):
        loga = np.log(intensity)[:, None]
    logq = np.empty((intensity.size, n_max + 1))
    logq[:, 0] = -intensity
    # log q_n = log q_{n-1} + log a - log n
    steps = loga - np.log(n)[None, :]
    np.cumsum(steps, axis=1, out=logq[:, 1:])
    logq[:, 1:] += -intensity[:, None]
    levels = np.sin(0.5 * (cfg.theta + np.arange(n_max + 1) * cfg.phi0)) ** 2
    w = np.exp(logq) * levels[None, :]
    if not np.all(np.isfinite(w)):
        raise NumericRangeError("non-finite coherent-state weight")
    return w


def coherent_pair_number_weights(alpha: complex, cfg: InteractionConfig, trunc: Truncation | None = None) -> np.ndarray:
    """Unnormalised dark-port weights per photon number for a coherent pointer."""
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise NumericRangeError(f"alpha must be finite, got {alpha!r}")
    a = abs(alpha) ** 2
    trunc = trunc or Truncation()
    n_max = trunc.n_max if trunc.n_max is not None else _poisson_cutoff(a, trunc.eps)
    return _weights(np.array([a]), cfg, n_max)[0]


def coherent_total_weight(alpha: complex, cfg: InteractionConfig) -> float:
    """Resummed dark-port probability of a coherent pointer ``|alpha>``."""
    a = abs(complex(alpha)) ** 2
    return 0.5 * (1.0 - math.exp(-a * (1.0 - math.cos(cfg.phi0))) * math.cos(cfg.theta + a * math.sin(cfg.phi0)))


def _block_partials(n_bar, cfg, mc, n_max, block):
    start = block * mc.block_size
    count = min(mc.block_size, mc.samples - start)
    alpha = sample_thermal_alphas(n_bar, mc.seed, start, count)
    w = _weights(alpha.real**2 + alpha.imag**2, cfg, n_max)
    totals = w.sum(axis=1)
    return w.sum(axis=0), (w * w).sum(axis=0), float(np.sum(totals)), float(np.sum(totals * totals))


def mc_accumulate(
    pointer: ThermalPointer,
    cfg: InteractionConfig,
    mc: MonteCarloConfig | None = None,
    trunc: Truncation | None = None,
    workers: int | None = None,
) -> MonteCarloStats:
    """Sample means and standard errors of the total and per-level dark-port weights."""
    mc = mc or MonteCarloConfig()
    n_max = (trunc or Truncation()).resolve(pointer.z)
    blocks = range(-(-mc.samples // mc.block_size))
    workers = worker_count() if workers is None else max(1, int(workers))
    args = (pointer.n_bar, cfg, mc, n_max)
    if workers == 1:
        parts = [_block_partials(*args, b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block_partials(*args, b), blocks))

    n = mc.samples
    # fsum is correctly rounded, so the combination is independent of order
    s_w = np.array([math.fsum(col) for col in zip(*(p[0] for p in parts))])
    s_w2 = np.array([math.fsum(col) for col in zip(*(p[1] for p in parts))])
    s_t = math.fsum(p[2] for p in parts)
    s_t2 = math.fsum(p[3] for p in parts)

    mean = s_t / n
    level_means = s_w / n
    if n > 1:
        var = max(s_t2 - n * mean * mean, 0.0) / (n - 1)
        level_var = np.maximum(s_w2 - n * level_means**2, 0.0) / (n - 1)
    else:
        var, level_var = 0.0, np.zeros_like(level_means)
    return MonteCarloStats(mean, math.sqrt(var / n), level_means, np.sqrt(level_var / n), n)


def mc_postselect(
    pointer: ThermalPointer,
    cfg: InteractionConfig,
    mc: MonteCarloConfig | None = None,
    trunc: Truncation | None = None,
    workers: int | None = None,
) -> tuple[PostselectionOutcome, float]:
    """Monte Carlo dark-port outcome and the standard error of its probability."""
    stats = mc_accumulate(pointer, cfg, mc, trunc, workers)
    p = stats.probability
    if p <= P_FLOOR:
        raise DegeneratePostselectionError(f"Monte Carlo dark-port probability {p!r} is degenerate")
    probs = stats.level_means / p
    dist = NumberDistribution(probs, tail_mass=max(0.0, 1.0 - math.fsum(probs)))
    n_max = dist.n_max
    tail_bound = pointer.z ** (n_max + 1) * ((n_max + 1) + pointer.n_bar) / p
    return PostselectionOutcome(min(p, 1.0), dist, dist.mean(), tail_bound), stats.std_error
