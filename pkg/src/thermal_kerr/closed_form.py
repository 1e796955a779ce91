"""Analytic engine for the postselected thermal pointer.

Every closed form here has the shape ``X(z) - exp(i*theta) * X(z*exp(i*phi0))``
plus its conjugate.  At the weak couplings of interest the two terms agree to
~10 significant digits, so each is rewritten as ``X(z) * Re(1 - exp(delta))``
with ``delta`` assembled from ``log1p`` of a small, accurately computed
increment.  The literal conjugate-pair sums are kept as ``*_direct``
diagnostics.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .model import (
    P_FLOOR,
    DEFAULT_TAIL_EPS,
    DegeneratePostselectionError,
    InteractionConfig,
    InternalConsistencyError,
    InvalidParameterError,
    NumberDistribution,
    PostselectionOutcome,
    ThermalPointer,
    Truncation,
)

__all__ = [
    "thermal_distribution",
    "postselect_probability",
    "final_distribution",
    "eliminated_levels",
    "mean_photon_final",
    "mean_photon_small_phase",
    "wigner_closed",
    "wigner_origin",
    "postselect_probability_direct",
    "mean_photon_direct",
    "wigner_direct",
    "WIGNER_PEAK",
]

WIGNER_PEAK = 2.0 / math.pi
_CLAMP_SLACK = 1e-14
_RESIDUE_TOL = 1e-12


def _re_one_minus_exp(a, b):
    """``Re(1 - exp(a + i*b))`` without cancellation for small ``a``, ``b``."""
    return 2.0 * np.sin(0.5 * b) ** 2 - np.expm1(a) * np.cos(b)


def _log1p_complex(re: float, im: float) -> tuple[float, float]:
    """``log(1 + (re + i*im))`` split into real and imaginary parts."""
    return 0.5 * math.log1p(2.0 * re + re * re + im * im), math.atan2(im, 1.0 + re)


def _kerr_shift(z: float, phi0: float) -> complex:
    """``z - z*exp(i*phi0)`` computed from half-angle terms."""
    s = math.sin(0.5 * phi0)
    return complex(2.0 * z * s * s, -z * math.sin(phi0))


def _level_factor(cfg: InteractionConfig, n: np.ndarray) -> np.ndarray:
    """``sin^2((theta + n*phi0)/2)``, the dark-port transmission of level n."""
    return np.sin(0.5 * (cfg.theta + n * cfg.phi0)) ** 2


def _check_probability(p: float) -> float:
    if -_CLAMP_SLACK <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + _CLAMP_SLACK:
        return 1.0
    if not (0.0 <= p <= 1.0):
        raise InternalConsistencyError(f"postselection probability {p!r} outside [0,1]")
    return float(p)


def _require_postselection(pointer, cfg) -> float:
    p = postselect_probability(pointer, cfg)
    if p <= P_FLOOR:
        raise DegeneratePostselectionError(
            f"conditional state undefined: P={p!r} at z={pointer.z}, phi0={cfg.phi0}, theta={cfg.theta}"
        )
    return p


def thermal_distribution(pointer: ThermalPointer, trunc: Truncation | None = None) -> NumberDistribution:
    z = pointer.z
    n_max = (trunc or Truncation()).resolve(z)
    n = np.arange(n_max + 1, dtype=float)
    probs = (1.0 - z) * np.power(z, n)
    return NumberDistribution(probs, tail_mass=z ** (n_max + 1))


def postselect_probability(pointer: ThermalPointer, cfg: InteractionConfig) -> float:
    """Probability that the photon exits the dark port.

    Equals ``sum_n (1-z) z^n sin^2((theta + n*phi0)/2)``; ``phi0 = 0`` is allowed.
    """
    z = pointer.z
    d = _kerr_shift(z, cfg.phi0)
    # (1 - z e^{i phi0}) / (1 - z) = 1 + d / (1 - z)
    lre, lim = _log1p_complex(d.real / (1.0 - z), d.imag / (1.0 - z))
    p = 0.5 * float(_re_one_minus_exp(-lre, cfg.theta - lim))
    return _check_probability(p)


def final_distribution(
    pointer: ThermalPointer, cfg: InteractionConfig, trunc: Truncation | None = None
) -> PostselectionOutcome:
    """Conditional photon-number distribution after a dark-port click.

    Without an explicit truncation the geometric tail bound is scaled by the
    success probability, so the *conditional* tail stays below 1e-16.
    """
    z = pointer.z
    p = _require_postselection(pointer, cfg)
    if trunc is None:
        trunc = Truncation(tail_eps=max(DEFAULT_TAIL_EPS * min(p, 1.0), 1e-300))
    n_max = trunc.resolve(z)
    n = np.arange(n_max + 1, dtype=float)
    probs = (1.0 - z) * np.power(z, n) * _level_factor(cfg, n) / p
    tail = max(0.0, 1.0 - math.fsum(probs))
    dist = NumberDistribution(probs, tail_mass=tail)
    tail_bound = z ** (n_max + 1) * ((n_max + 1) + pointer.n_bar) / p
    return PostselectionOutcome(p, dist, dist.mean(), tail_bound)


def eliminated_levels(cfg: InteractionConfig, n_max: int) -> list[int]:
    """Photon numbers ``n <= n_max`` with ``theta + n*phi0`` a multiple of 2*pi."""
    cfg.require_kerr()
    if n_max < 0:
        return []
    n = np.arange(int(n_max) + 1, dtype=float)
    turns = cfg.theta / (2.0 * math.pi) + n * (cfg.phi0 / (2.0 * math.pi))
    hits = np.abs(turns - np.rint(turns)) <= 1e-9
    return [int(k) for k in np.flatnonzero(hits)]


def mean_photon_final(pointer: ThermalPointer, cfg: InteractionConfig) -> tuple[float, float]:
    """Mean photon number of the postselected pointer and its ratio to ``n_bar``."""
    z = pointer.z
    if z == 0.0:
        raise InvalidParameterError("z = 0 has n_bar = 0; the amplification ratio is undefined")
    p = _require_postselection(pointer, cfg)
    d = _kerr_shift(z, cfg.phi0)
    lre, lim = _log1p_complex(d.real / (1.0 - z), d.imag / (1.0 - z))
    # f(w) = w/(1-w)^2 ;  log f(z~) - log f(z) = i*phi0 - 2*log((1-z~)/(1-z))
    e = float(_re_one_minus_exp(-2.0 * lre, cfg.theta + cfg.phi0 - 2.0 * lim))
    ratio = 0.5 * e / p
    return pointer.n_bar * ratio, ratio


def mean_photon_small_phase(z: float) -> float:
    """Weak-coupling limit of the postselected mean at ``theta = 0``.

    Valid only for ``n_bar * phi0 << 1``; it is badly off at z = 0.99999
    at phi0 = 2*pi*1e-5, where ``n_bar * phi0`` is about 2*pi.
    """
    return (1.0 + 4.0 * z + z * z) / ((1.0 + z) * (1.0 - z))


def wigner_closed(pointer: ThermalPointer, cfg: InteractionConfig, x, p):
    """Wigner function of the postselected state; vacuum peaks at ``2/pi``.

    ``x`` and ``p`` broadcast against each other; scalars give a float.
    """
    z = pointer.z
    prob = _require_postselection(pointer, cfg)
    x = np.asarray(x, dtype=float)
    p_ = np.asarray(p, dtype=float)
    r2 = x * x + p_ * p_
    d = _kerr_shift(z, cfg.phi0)
    onep = 1.0 + z
    # log H(z~) - log H(z), H(w) = exp(-2 r^2 (1-w)/(1+w)) / (1+w)
    k = -4.0 * d / (onep * (onep - d))
    lre, lim = _log1p_complex(-d.real / onep, -d.imag / onep)
    a = k.real * r2 - lre
    b = cfg.theta + k.imag * r2 - lim
    h = np.exp(-2.0 * (1.0 - z) * r2 / onep) / onep
    w = (1.0 - z) / (math.pi * prob) * h * _re_one_minus_exp(a, b)
    return float(w) if w.ndim == 0 else w


def wigner_origin(pointer: ThermalPointer, cfg: InteractionConfig) -> float:
    """``W(0, 0)`` at ``theta = 0``; strictly negative whenever it is defined."""
    if cfg.theta != 0.0:
        raise InvalidParameterError("wigner_origin is defined for theta = 0 only")
    z = pointer.z
    if z == 0.0 or cfg.phi0 == 0.0:
        raise DegeneratePostselectionError("P = 0: vacuum pointer or no Kerr phase")
    prob = _require_postselection(pointer, cfg)
    s2 = math.sin(0.5 * cfg.phi0) ** 2
    # 1 - cos(phi0) = 2 s2 ;  1 + z^2 + 2 z cos(phi0) = (1+z)^2 - 4 z s2
    den = math.pi * prob * (1.0 + z) * ((1.0 + z) ** 2 - 4.0 * z * s2)
    return -z * (1.0 - z) ** 2 * 2.0 * s2 / den


# literal conjugate-pair forms, kept as cross-checks


def _pair_real(plus: complex, minus: complex, scale: float) -> float:
    total = plus + minus
    if abs(total.imag) > _RESIDUE_TOL * max(abs(plus), abs(minus), scale):
        raise InternalConsistencyError(f"imaginary residue {total.imag!r} in a real quantity")
    return total.real


def postselect_probability_direct(pointer: ThermalPointer, cfg: InteractionConfig) -> float:
    z, th, ph = pointer.z, cfg.theta, cfg.phi0
    plus = (1 - z) * cmath.exp(1j * th) / (1 - z * cmath.exp(1j * ph))
    minus = (1 - z) * cmath.exp(-1j * th) / (1 - z * cmath.exp(-1j * ph))
    return 0.25 * (2.0 - _pair_real(plus, minus, 1.0))


def mean_photon_direct(pointer: ThermalPointer, cfg: InteractionConfig) -> float:
    z, th, ph = pointer.z, cfg.theta, cfg.phi0
    prob = postselect_probability_direct(pointer, cfg)
    zt, ztc = z * cmath.exp(1j * ph), z * cmath.exp(-1j * ph)
    plus = cmath.exp(1j * th) * zt / (1 - zt) ** 2
    minus = cmath.exp(-1j * th) * ztc / (1 - ztc) ** 2
    central = 2 * z / (1 - z) ** 2
    return (1 - z) / (4 * prob) * (central - _pair_real(plus, minus, central))


def wigner_direct(pointer: ThermalPointer, cfg: InteractionConfig, x: float, p: float) -> float:
    z, th, ph = pointer.z, cfg.theta, cfg.phi0
    prob = postselect_probability_direct(pointer, cfg)
    r2 = x * x + p * p

    def g(w):
        return cmath.exp(-2 * (1 - w) * r2 / (1 + w)) / (1 + w)

    zt, ztc = z * cmath.exp(1j * ph), z * cmath.exp(-1j * ph)
    central = 2 * g(z).real
    cross = _pair_real(cmath.exp(1j * th) * g(zt), cmath.exp(-1j * th) * g(ztc), central)
    return (1 - z) / (2 * math.pi * prob) * (central - cross)
