import math

import mpmath as mp
import numpy as np
import pytest

from thermal_kerr import closed_form as cf
from thermal_kerr import fock_oracle as fo
from thermal_kerr.model import (
    DegeneratePostselectionError,
    InteractionConfig,
    InvalidParameterError,
    NumberDistribution,
    NumericRangeError,
    ThermalPointer,
    Truncation,
)

from conftest import WEAK_PHI0

GRID = [(z, phi0, theta) for z in (0.1, 0.5, 0.9, 0.99) for phi0 in (1e-4, 0.1, math.pi / 2, math.pi)
        for theta in (0.0, 0.3, math.pi / 2)]


def test_dark_port_examples():
    assert fo.dark_port_amplitude(0, InteractionConfig(0.3)) == 0
    for n in (0, 4, 17):
        assert abs(fo.dark_port_amplitude(n, InteractionConfig(0.0, math.pi))) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InvalidParameterError):
        fo.dark_port_amplitude(-1, InteractionConfig(0.3))


def test_dark_port_modulus_identity():
    rng = np.random.default_rng(11)
    for n, theta, phi0 in zip(rng.integers(0, 1000, 100), rng.uniform(-math.pi, math.pi, 100), rng.uniform(0, math.pi, 100)):
        cfg = InteractionConfig(phi0, theta)
        amp = fo.dark_port_amplitude(int(n), cfg)
        # exact reference: forming theta + n*phi0 in doubles would itself cost ~1e-13
        with mp.workdps(40):
            ref = float(mp.sin((mp.mpf(cfg.theta) + int(n) * mp.mpf(cfg.phi0)) / 2) ** 2)
        assert abs(amp) ** 2 == pytest.approx(ref, abs=1e-14)


def test_arm_amplitudes_normalised():
    arms = fo.arm_amplitudes(5, InteractionConfig(0.4, 1.1))
    assert abs(arms.amp_a) == pytest.approx(abs(arms.amp_b))
    with pytest.raises(InvalidParameterError):
        fo.SystemAmplitudes(1.0, 1.0)


def test_chain_unitary():
    rng = np.random.default_rng(5)
    for _ in range(50):
        cfg = InteractionConfig(rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi))
        u = fo.interferometer_chain(rng.integers(0, 10_000), cfg)
        assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-14


def test_oracle_examples():
    out = fo.oracle_postselect(ThermalPointer(0.5), InteractionConfig(math.pi / 2))
    assert out.probability == pytest.approx(0.3, rel=1e-12)
    with pytest.raises(DegeneratePostselectionError):
        fo.oracle_postselect(ThermalPointer(0.0), InteractionConfig(1.3))


@pytest.mark.parametrize("z,phi0,theta", GRID)
def test_oracle_matches_closed_form(z, phi0, theta):
    pointer, cfg = ThermalPointer(z), InteractionConfig(phi0, theta)
    oracle = fo.oracle_postselect(pointer, cfg, Truncation(tail_eps=1e-16))
    closed = cf.final_distribution(pointer, cfg, Truncation(tail_eps=1e-16))
    assert oracle.probability == pytest.approx(cf.postselect_probability(pointer, cfg), rel=1e-12)
    assert np.max(np.abs(oracle.distribution.probs - closed.distribution.probs)) <= 1e-12


def test_oracle_extreme_temperature():
    pointer, cfg = ThermalPointer(0.99999), InteractionConfig(WEAK_PHI0)
    out = fo.oracle_postselect(pointer, cfg, Truncation(n_max=5_000_000))
    assert out.probability == pytest.approx(cf.postselect_probability(pointer, cfg), rel=1e-6)
    assert out.mean_photon == pytest.approx(cf.mean_photon_final(pointer, cfg)[0], rel=1e-6)


def test_wigner_series_anchors():
    assert fo.wigner_series(NumberDistribution([1.0]), 0, 0) == pytest.approx(2 / math.pi, rel=1e-15)
    assert fo.wigner_series(NumberDistribution([0.0, 1.0]), 0, 0) == pytest.approx(-2 / math.pi, rel=1e-15)
    thermal = cf.thermal_distribution(ThermalPointer(0.5))
    assert fo.wigner_series(thermal, 0, 0) == pytest.approx(2 / (3 * math.pi), rel=1e-14)


def test_laguerre_matches_explicit_polynomials():
    u = np.linspace(0, 20, 41)
    rows = fo.laguerre_scaled(3, u) * np.exp(0.5 * u)
    np.testing.assert_allclose(rows[2], 1 - 2 * u + u**2 / 2, atol=1e-9)
    np.testing.assert_allclose(rows[3], 1 - 3 * u + 1.5 * u**2 - u**3 / 6, atol=1e-8)


def test_laguerre_range_error_names_level():
    with pytest.raises(NumericRangeError, match="n=1"):
        fo.laguerre_scaled(5, np.array([math.inf]))
    with pytest.raises(NumericRangeError, match="n=1"):
        fo.wigner_series(NumberDistribution([0.5, 0.5]), math.inf, 0.0)


def test_laguerre_bounded_far_out():
    rows = fo.laguerre_scaled(400, np.array([0.0, 50.0, 500.0, 5000.0]))
    assert np.all(np.isfinite(rows)) and np.max(np.abs(rows)) <= 1.0 + 1e-12


@pytest.mark.parametrize("z,phi0,theta", [(0.5, math.pi, 0.0), (0.5, math.pi / 2, 0.0), (0.9, 0.1, 0.3)])
def test_wigner_series_matches_closed_form(z, phi0, theta):
    axis = np.linspace(-4, 4, 21)
    x, p = np.meshgrid(axis, axis, indexing="ij")
    pointer, cfg = ThermalPointer(z), InteractionConfig(phi0, theta)
    dist = cf.final_distribution(pointer, cfg).distribution
    assert np.max(np.abs(fo.wigner_series(dist, x, p) - cf.wigner_closed(pointer, cfg, x, p))) <= 1e-8
