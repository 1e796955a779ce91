"""Self-check suite: closed forms against both oracles and the quoted operating points.

Each check reports its worst deviation next to the tolerance it is held to.
Output contains no timings or addresses, so repeated runs print identical text.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import closed_form, coherent_oracle, fock_oracle, sweeps
from .model import InteractionConfig, MonteCarloConfig, ThermalPointer, Truncation

__all__ = ["Check", "VerifyConfig", "run_checks", "format_report", "QUOTED_TARGETS", "ORACLE_GRID"]

# (z, quantity, quoted value, relative tolerance)
QUOTED_TARGETS = [
    (0.001, "P", 9.9e-13, 0.01),
    (0.5, "P", 2.96e-9, 0.01),
    (0.99999, "P", 0.4876, 0.005),
    (0.001, "n_bar_f", 1.004, 0.005),
    (0.5, "n_bar_f", 4.33, 0.005),
    (0.99999, "n_bar_f", 1.05e5, 0.01),
    (0.001, "R", 1003.0, 0.01),
    (0.5, "R", 4.33, 0.005),
    (0.99999, "R", 1.05, 0.01),
]

ORACLE_GRID = [
    (z, phi0, theta)
    for z in (0.1, 0.5, 0.9, 0.99)
    for phi0 in (1e-4, 0.1, math.pi / 2, math.pi)
    for theta in (0.0, 0.3, math.pi / 2)
]

MC_TRIPLES = [(0.3, 0.5, 0.0), (0.5, math.pi / 2, 0.0), (0.7, 1.0, 0.4)]
WIGNER_SETS = [(0.5, math.pi, 0.0), (0.5, math.pi / 2, 0.0), (0.9, 0.1, 0.3)]
MONOTONE_Z = (0.001, 0.01, 0.1, 0.5, 0.9, 0.99, 0.99999)


@dataclass(frozen=True)
class Check:
    name: str
    deviation: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class VerifyConfig:
    samples: int = 1_000_000
    seed: int = 0
    workers: int = 1


def _check(name, deviation, tolerance, passed=None):
    if passed is None:
        passed = deviation <= tolerance
    return Check(name, float(deviation), float(tolerance), bool(passed))


def _quoted_points(cfg):
    phi = InteractionConfig(sweeps.WEAK_PHI0)
    out = []
    for z, what, target, tol in QUOTED_TARGETS:
        pointer = ThermalPointer(z)
        if what == "P":
            value = closed_form.postselect_probability(pointer, phi)
        else:
            nf, r = closed_form.mean_photon_final(pointer, phi)
            value = nf if what == "n_bar_f" else r
        out.append(_check(f"quoted {what} z={z:g}", abs(value / target - 1.0), tol))
    return out


def _thermal_series(z, phi0, theta):
    n = np.arange(Truncation().resolve(z) + 1, dtype=float)
    return math.fsum((1.0 - z) * z**n * np.sin(0.5 * (theta + n * phi0)) ** 2)


def _fock_equivalence(cfg):
    p_dev = d_dev = s_dev = 0.0
    for z, phi0, theta in ORACLE_GRID:
        pointer, ic = ThermalPointer(z), InteractionConfig(phi0, theta)
        closed = closed_form.final_distribution(pointer, ic, Truncation())
        oracle = fock_oracle.oracle_postselect(pointer, ic, Truncation())
        p_dev = max(p_dev, abs(oracle.probability / closed.probability - 1.0))
        d_dev = max(d_dev, float(np.max(np.abs(oracle.distribution.probs - closed.distribution.probs))))
        s_dev = max(s_dev, abs(_thermal_series(z, phi0, theta) / closed.probability - 1.0))
    return [
        _check("fock oracle probability (rel)", p_dev, 1e-12),
        _check("fock oracle distribution (abs)", d_dev, 1e-12),
        _check("series vs closed-form probability (rel)", s_dev, 1e-12),
    ]


def _mean_consistency(cfg):
    dev = 0.0
    for z, phi0, theta in ORACLE_GRID:
        pointer, ic = ThermalPointer(z), InteractionConfig(phi0, theta)
        nf, _ = closed_form.mean_photon_final(pointer, ic)
        out = closed_form.final_distribution(pointer, ic)
        dev = max(dev, abs(out.mean_photon / nf - 1.0))
    return [_check("mean vs distribution (rel)", dev, 1e-9)]


def _wigner_checks(cfg):
    axis = np.linspace(-4.0, 4.0, 21)
    x, p = np.meshgrid(axis, axis, indexing="ij")
    series_dev = 0.0
    for z, phi0, theta in WIGNER_SETS:
        pointer, ic = ThermalPointer(z), InteractionConfig(phi0, theta)
        dist = closed_form.final_distribution(pointer, ic).distribution
        diff = fock_oracle.wigner_series(dist, x, p) - closed_form.wigner_closed(pointer, ic, x, p)
        series_dev = max(series_dev, float(np.max(np.abs(diff))))

    norm_dev = 0.0
    for z in (0.1, 0.5):
        for phi0 in (0.5, math.pi):
            pointer = ThermalPointer(z)
            half = 6.0 * max(1.0, math.sqrt(pointer.n_bar))
            grid = np.linspace(-half, half, 801)
            gx, gp = np.meshgrid(grid, grid, indexing="ij")
            w = closed_form.wigner_closed(pointer, InteractionConfig(phi0), gx, gp)
            total = np.trapezoid(np.trapezoid(w, grid, axis=1), grid)
            norm_dev = max(norm_dev, abs(total - 1.0))

    zs = np.linspace(0.05, 0.95, 20)
    phis = np.linspace(0.01, 3.1, 20)
    worst = -math.inf
    for z in zs:
        for phi0 in phis:
            worst = max(worst, closed_form.wigner_origin(ThermalPointer(z), InteractionConfig(phi0)))

    rng = np.random.default_rng(cfg.seed)
    origin_dev = 0.0
    for z, phi0 in zip(rng.uniform(0.01, 0.99, 10), rng.uniform(0.01, math.pi, 10)):
        pointer, ic = ThermalPointer(z), InteractionConfig(phi0)
        a = closed_form.wigner_origin(pointer, ic)
        b = closed_form.wigner_closed(pointer, ic, 0.0, 0.0)
        origin_dev = max(origin_dev, abs(a / b - 1.0))

    spot = closed_form.wigner_closed(ThermalPointer(0.5), InteractionConfig(math.pi), 0.0, 0.0)
    return [
        _check("wigner closed vs laguerre series (abs)", series_dev, 1e-8),
        _check("wigner normalisation", norm_dev, 1e-4),
        _check("wigner origin max over 20x20 grid < 0", worst, 0.0, passed=worst < 0.0),
        _check("wigner origin formula vs closed form (rel)", origin_dev, 1e-12),
        _check("wigner origin z=0.5 phi0=pi equals -2/pi", abs(spot + 2.0 / math.pi), 1e-10),
    ]


def _elimination(cfg):
    worst = 0.0
    ok_levels = True
    for z, phi0, theta, n_max in [
        (0.5, sweeps.WEAK_PHI0, 0.0, 250_000),
        (0.99999, sweeps.WEAK_PHI0, 0.0, 250_000),
        (0.9, math.pi, math.pi, 400),
        (0.7, math.pi / 3, 2 * math.pi / 3, 300),
    ]:
        ic = InteractionConfig(phi0, theta)
        levels = closed_form.eliminated_levels(ic, n_max)
        if z == 0.5 and phi0 == sweeps.WEAK_PHI0:
            ok_levels = levels == [0, 100_000, 200_000]
        probs = closed_form.final_distribution(ThermalPointer(z), ic, Truncation(n_max=n_max)).distribution.probs
        if levels:
            worst = max(worst, float(np.max(probs[levels])))
    return [
        _check("eliminated levels at phi0=2pi*1e-5", 0.0 if ok_levels else 1.0, 0.0),
        _check("weight on eliminated levels", worst, 1e-18),
    ]


def _monotonicity(cfg):
    table = sweeps.sweep_z(sweeps.WEAK_PHI0, 0.0, MONOTONE_Z)
    p = np.array(table.columns["P"])
    r = np.array(table.columns["R"])
    # deviation: most negative step of P (resp. R reversed); pass iff strictly monotone
    dp = float(np.min(np.diff(p)))
    dr = float(np.min(-np.diff(r)))
    return [
        _check("P strictly increasing in z", -dp, 0.0, passed=dp > 0),
        _check("R strictly decreasing in z", -dr, 0.0, passed=dr > 0),
    ]


def _separation(cfg):
    t_low, _ = sweeps.theta_star(0.5)
    t_high, _ = sweeps.theta_star(0.99999)
    gap = abs(t_high) - abs(t_low)
    return [_check("argmax R(theta) farther from 0 at z=0.99999", -gap, 0.0, passed=gap > 0)]


def _monte_carlo(cfg):
    mc = MonteCarloConfig(samples=cfg.samples, seed=cfg.seed)
    out = []
    for z, phi0, theta in MC_TRIPLES:
        pointer, ic = ThermalPointer(z), InteractionConfig(phi0, theta)
        est, se = coherent_oracle.mc_postselect(pointer, ic, mc, workers=cfg.workers)
        exact = closed_form.postselect_probability(pointer, ic)
        out.append(_check(f"coherent MC z={z:g} phi0={phi0:.4g} theta={theta:g} (4 sigma)",
                          abs(est.probability - exact), 4.0 * se))

    pointer, ic = ThermalPointer(0.5), InteractionConfig(math.pi)
    stats = coherent_oracle.mc_accumulate(pointer, ic, mc, workers=cfg.workers)
    exact = closed_form.final_distribution(pointer, ic, Truncation()).distribution.probs
    tv = 0.5 * float(np.sum(np.abs(stats.level_means / stats.probability - exact)))
    agg = 0.5 * float(np.sum(stats.level_std_errors)) / stats.probability
    out.append(_check("coherent MC total variation (5x aggregate se)", tv, 5.0 * agg))

    big = MonteCarloConfig(samples=4 * cfg.samples, seed=cfg.seed)
    _, se1 = coherent_oracle.mc_postselect(pointer, InteractionConfig(math.pi / 2), mc, workers=cfg.workers)
    _, se4 = coherent_oracle.mc_postselect(pointer, InteractionConfig(math.pi / 2), big, workers=cfg.workers)
    out.append(_check("coherent MC std error halves at 4x samples", abs(se4 / se1 / 0.5 - 1.0), 0.2))
    return out


SUITES: list[Callable[[VerifyConfig], list[Check]]] = [
    _quoted_points,
    _fock_equivalence,
    _mean_consistency,
    _wigner_checks,
    _elimination,
    _monotonicity,
    _separation,
    _monte_carlo,
]


def run_checks(cfg: VerifyConfig | None = None) -> list[Check]:
    cfg = cfg or VerifyConfig()
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda suite: suite(cfg), SUITES))
    else:
        results = [suite(cfg) for suite in SUITES]
    return [c for group in results for c in group]


def format_report(checks: list[Check]) -> str:
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{status}  {c.name}  max_dev={c.deviation:.6e}  tol={c.tolerance:.6e}")
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
