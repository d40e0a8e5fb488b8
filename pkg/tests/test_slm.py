import numpy as np
import pytest

from dtqw.core import WalkerCoinState, fidelity, probability_distribution
from dtqw.errors import (
    AliasingError,
    DomainError,
    EmptySuperpositionError,
    InvalidArgumentError,
    ResolutionExceededError,
    ScheduleIncompleteError,
)
from dtqw.slm import (
    PhaseMask,
    RotationSchedule,
    SlitSuperposition,
    conditional_rotation,
    depth_for_amplitude,
    extract_order,
    far_field,
    first_order_amplitude,
    first_order_phase,
    max_step_for_resolution,
    order_energy_fraction,
    prepare_via_slm,
    rotation_schedule_for,
    synthesize_mask,
)
from dtqw.walk import prepare_step_state


def sawtooth_first_order(depth, period):
    """Oracle: +1 Fourier coefficient of the sampled blaze exp(i m q / P), q = 0..P-1."""
    q = np.arange(period)
    return np.mean(np.exp(1j * depth * q / period) * np.exp(-2j * np.pi * q / period))


@pytest.mark.parametrize("rows,n", [(1920, 480), (4, 1), (1080, 270), (2, 0), (7, 1)])
def test_max_step_for_resolution(rows, n):
    assert max_step_for_resolution(rows) == n


def test_max_step_rejects_tiny():
    with pytest.raises(InvalidArgumentError):
        max_step_for_resolution(1)


@pytest.mark.parametrize("m,expected", [(2 * np.pi, 1.0), (0.0, 0.0), (np.pi, 2 / np.pi)])
def test_first_order_amplitude_curve(m, expected):
    assert float(first_order_amplitude(m)) == pytest.approx(expected, abs=1e-12)


def test_first_order_amplitude_matches_continuum_blaze():
    # continuum oracle: (1/2π) ∫ exp(i(m - 2π)x/2π) dx over one period
    for m in np.linspace(0.1, 2 * np.pi, 9):
        x = np.linspace(0, 1, 200001)
        f = np.exp(1j * (m - 2 * np.pi) * x)
        integral = np.mean(0.5 * (f[1:] + f[:-1]))
        assert abs(integral) == pytest.approx(float(first_order_amplitude(m)), abs=1e-8)


def test_depth_calibration_is_monotone_inverse():
    ratios = np.linspace(0, 1, 21)
    depths = [depth_for_amplitude(r) for r in ratios]
    assert np.all(np.diff(depths) > 0)
    assert np.allclose(first_order_amplitude(depths), ratios, atol=1e-12)


def test_single_mode_mask_full_depth():
    mask = synthesize_mask(SlitSuperposition({0: 1.0}), rows=64, cols=64, grating_period=8)
    assert len(mask.slit_layout) == 1
    assert mask.slit_layout[0].depth == pytest.approx(2 * np.pi)


def test_uniform_chi4_mask():
    signs = {4: 1, 2: 1, 0: -1, -2: 1, -4: -1}
    target = SlitSuperposition({j: s / np.sqrt(5) for j, s in signs.items()})
    mask = synthesize_mask(target, rows=1920, cols=64, grating_period=8)
    assert len(mask.slit_layout) == 5
    assert np.allclose([s.depth for s in mask.slit_layout], 2 * np.pi)
    offsets = {s.mode: s.offset for s in mask.slit_layout}
    assert all(np.isclose(offsets[j], 0.0 if signs[j] > 0 else np.pi) for j in signs)


def test_odd_layout_leaves_even_modes_empty():
    target = SlitSuperposition({j: 1.0 for j in (-5, -3, -1, 1, 3, 5)})
    mask = synthesize_mask(target, rows=1920, cols=64, grating_period=8)
    assert sorted(s.mode for s in mask.slit_layout) == [-5, -3, -1, 1, 3, 5]
    spans = sorted((s.row_start, s.row_stop) for s in mask.slit_layout)
    pitch = 1920 // 11
    for (a0, _), (b0, _) in zip(spans, spans[1:]):
        assert b0 - a0 == 2 * pitch  # an empty slot between neighbours
    for s in mask.slit_layout:
        flat = np.ones(1920, dtype=bool)
        flat[s.row_start:s.row_stop] = False
    # rows outside every slit are unmodulated
    used = np.zeros(1920, dtype=bool)
    for s in mask.slit_layout:
        used[s.row_start:s.row_stop] = True
    assert np.all(mask.pixels[~used] == 0)


def test_resolution_exceeded():
    with pytest.raises(ResolutionExceededError):
        synthesize_mask(SlitSuperposition({481: 1.0}), rows=1920)


def test_period_floor():
    with pytest.raises(InvalidArgumentError):
        synthesize_mask(SlitSuperposition({0: 1.0}), grating_period=1)


def test_mask_invariants():
    with pytest.raises(InvalidArgumentError):
        PhaseMask(np.full((4, 4), 7.0), 4, (), 1)


def test_zero_mask_sends_everything_to_zeroth_order():
    mask = PhaseMask(np.zeros((32, 32)), 8, (), 1)
    f = far_field(mask)
    assert abs(f[0, 0]) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_parseval_on_random_masks(rng):
    for _ in range(5):
        mask = PhaseMask(rng.uniform(0, 2 * np.pi, size=(48, 40)), 8, (), 1)
        f = far_field(mask)
        assert np.sum(np.abs(f) ** 2) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("period", [8, 16, 32])
def test_full_depth_grating_first_order_share(period):
    mask = synthesize_mask(SlitSuperposition({0: 1.0}), rows=16, cols=8 * period, grating_period=period)
    f = far_field(mask)
    share = order_energy_fraction(f, period)
    slit_rows = mask.slit_layout[0].row_stop - mask.slit_layout[0].row_start
    assert share / (slit_rows / mask.rows) >= 0.99


@pytest.mark.parametrize("period", [8, 16])
def test_uniform_full_depth_mask_efficiency(period):
    cols = 16 * period
    ramp = np.mod(2 * np.pi * (np.arange(cols) % period) / period, 2 * np.pi)
    mask = PhaseMask(np.tile(ramp, (8, 1)), period, (), 1)
    assert order_energy_fraction(far_field(mask), period) >= 0.95


@pytest.mark.parametrize("m", [1.0, 3.0, 5.5, 2 * np.pi])
@pytest.mark.parametrize("period", [4, 8, 12])
def test_partial_depth_grating_amplitude(m, period):
    # measured +1 amplitude equals the sampled-sawtooth Fourier coefficient
    cols = 6 * period
    ramp = m * (np.arange(cols) % period) / period
    mask = PhaseMask(np.mod(np.tile(ramp, (2, 1)), 2 * np.pi), period, (), 1)
    f = far_field(mask)
    b1 = cols // period
    coef = f[0, b1]  # unit-energy envelope: the bin is the mean over pixels
    assert coef == pytest.approx(sawtooth_first_order(m, period), abs=1e-12)


def test_extract_rejects_aliasing():
    mask = synthesize_mask(SlitSuperposition({0: 1.0}), rows=8, cols=16, grating_period=2)
    with pytest.raises(AliasingError):
        extract_order(far_field(mask), mask)


def test_zero_depth_mask_is_empty():
    mask = synthesize_mask(SlitSuperposition({0: 1.0}), rows=8, cols=32, grating_period=8)
    flat = PhaseMask(np.zeros_like(mask.pixels), mask.period, mask.slit_layout, mask.n_sites)
    with pytest.raises(EmptySuperpositionError):
        extract_order(far_field(flat), flat)


def test_relative_phase_survives_round_trip():
    target = SlitSuperposition({0: 0.6, 2: 0.8 * np.exp(1.1j)})
    mask = synthesize_mask(target, rows=64, cols=128, grating_period=8)
    out = extract_order(far_field(mask), mask)
    rel = np.angle(out.coefficients[2] / out.coefficients[0])
    assert abs(rel - 1.1) < 1e-2


def test_superposition_norms():
    s = SlitSuperposition({0: 3.0, 1: 4.0j}).normalized()
    assert s.norm == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(EmptySuperpositionError):
        SlitSuperposition({0: 0.0}).normalized()


def test_zero_schedule_is_identity(rng):
    amps = rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2))
    s = WalkerCoinState(-2, amps / np.linalg.norm(amps))
    out = conditional_rotation(s, RotationSchedule({j: 0.0 for j in range(-2, 3)}))
    assert np.allclose(out.amplitudes, s.amplitudes)


def test_random_schedule_preserves_norm(rng):
    amps = rng.normal(size=(7, 2))
    s = WalkerCoinState(-3, amps / np.linalg.norm(amps))
    sched = RotationSchedule({j: rng.uniform(-np.pi, np.pi) for j in range(-3, 4)})
    assert conditional_rotation(s, sched).norm() == pytest.approx(1.0, abs=1e-12)


def test_incomplete_schedule():
    s = WalkerCoinState.from_dict({0: (1, 0), 2: (0, 1)})
    with pytest.raises(ScheduleIncompleteError):
        conditional_rotation(s, RotationSchedule({0: 0.1}))


def test_schedule_for_hadamard_four():
    target = prepare_step_state(4)
    sup, sched = rotation_schedule_for(target)
    assert sched[4] == pytest.approx(0.0, abs=1e-12)
    assert sched[2] == pytest.approx(np.arctan(1 / 3), abs=1e-12)
    assert sched[0] == pytest.approx(3 * np.pi / 4, abs=1e-12)
    rebuilt = conditional_rotation(sup.as_state(), sched)
    assert fidelity(rebuilt, target) == pytest.approx(1.0, abs=1e-12)
    # slit moduli carry the non-uniform position distribution
    probs = {j: abs(b) ** 2 for j, b in sup.coefficients.items()}
    assert probs == pytest.approx(probability_distribution(target), abs=1e-12)


def test_schedule_rejects_circular_polarization():
    s = WalkerCoinState.from_dict({0: (1 / np.sqrt(2), 1j / np.sqrt(2))})
    with pytest.raises(DomainError):
        rotation_schedule_for(s)


@pytest.mark.parametrize("n", range(1, 9))
def test_end_to_end_preparation(n):
    assert prepare_via_slm(n, rows=1920, period=8).fidelity >= 0.99


def test_fidelity_monotone_in_period_with_ideal_calibration():
    # the sinc curve ignores pixel sampling, so the residual error shrinks with the period
    errs = [1 - prepare_via_slm(5, period=p, calibration="ideal").fidelity for p in (4, 8, 16, 32)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[1] < 0.01


@pytest.mark.parametrize("period", [4, 8, 16, 32])  # divisors of the 128 columns
def test_sampled_calibration_is_exact(period):
    assert prepare_via_slm(6, period=period).fidelity == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("period", [4, 8])
def test_sampled_calibration_matches_measured_grating(period):
    q = np.arange(period)
    for m in (0.5, 2.0, 4.5):
        coef = np.mean(np.exp(1j * m * q / period) * np.exp(-2j * np.pi * q / period))
        assert abs(coef) == pytest.approx(float(first_order_amplitude(m, period)), abs=1e-14)
        assert np.angle(coef) == pytest.approx(float(first_order_phase(m, period)), abs=1e-12)


def test_sampled_curve_tends_to_sinc():
    m = np.linspace(0.2, 2 * np.pi, 7)
    assert np.allclose(first_order_amplitude(m, 4096), first_order_amplitude(m), atol=1e-6)


def test_unknown_calibration():
    with pytest.raises(InvalidArgumentError):
        synthesize_mask(SlitSuperposition({0: 1.0}), rows=8, calibration="guess")


def test_trivial_preparation_is_exact():
    assert prepare_via_slm(0).fidelity == pytest.approx(1.0, abs=1e-12)
