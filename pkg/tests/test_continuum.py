"""Reconstruction, spectra, step stability and the continuum brackets."""

import math
import random

import numpy as np
import pytest

from hamca.automaton import AutomatonSpec, Slice, StatePair, evolve
from hamca.continuum import (
    GuardBandError,
    HermiticityError,
    LapseError,
    ModeWave,
    SampledWave,
    continuum_conservation_residual,
    gaussian_to_ndarray,
    reconstruct,
    sinh_residual,
    spectrum,
    step_eigenphase,
    two_time,
)
from hamca.exactmath import (
    FloatConversionError,
    GaussianInteger,
    GaussianMatrix,
    HamiltonianParts,
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def period4_wave(steps=398, scale_l=1.0):
    parts = HamiltonianParts(((1,),), ((0,),))
    spec = AutomatonSpec(dim=1, parts=parts, lapse_c=2)
    init = StatePair(Slice(0, (1,), (0,), 0, 0), Slice(1, (0,), (-1,), 1, 0))
    traj = evolve(spec, init, steps)
    return SampledWave.from_trajectory(traj, scale_l, recenter=True)


def two_mode_pauli_wave():
    # equal superposition of the eps = +-1 modes of pauli-x, E = +-pi/2
    vp = np.array([1.0, 1.0]) / np.sqrt(2)
    vm = np.array([1.0, -1.0]) / np.sqrt(2)
    return ModeWave(1.0, [np.pi / 2, -np.pi / 2],
                    np.vstack([vp, vm]) / np.sqrt(2))


# ------------------------------------------------------------- reconstruct

def test_grid_point_interpolation_is_exact():
    rng = np.random.default_rng(8)
    vals = rng.normal(size=(21, 3)) + 1j * rng.normal(size=(21, 3))
    for l in (1.0, 0.5):
        wave = SampledWave(l, -10, vals)
        for n in (-10, -3, 0, 7, 10):
            got = reconstruct(wave, n * l)
            assert np.array_equal(got, vals[n + 10])


def test_single_sample_halfway_value():
    # one sample psi_0 = 1 evaluated at l/2: sin(pi/2)/(pi/2) = 2/pi
    wave = SampledWave(1.0, 0, [[1.0]])
    got = reconstruct(wave, 0.5)[0]
    assert got == pytest.approx(2 / math.pi, abs=1e-15)


def test_all_ones_truncated_sum_near_one():
    wave = SampledWave(1.0, -200, np.ones((401, 1)))
    got = reconstruct(wave, 0.37)[0]
    assert abs(got - 1.0) <= 5e-3


def test_all_ones_truncation_decays_with_window():
    errs = []
    for half in (50, 100, 200, 400):
        wave = SampledWave(1.0, -half, np.ones((2 * half + 1, 1)))
        errs.append(abs(reconstruct(wave, 0.37)[0] - 1.0))
    for a, b in zip(errs, errs[1:]):
        assert b <= 1.1 * a  # monotone within 10 percent jitter


def test_reconstruct_rejects_non_finite_times():
    wave = SampledWave(1.0, 0, [[1.0]])
    with pytest.raises(ValueError):
        reconstruct(wave, float("nan"))


def test_empty_window_is_rejected():
    with pytest.raises(ValueError):
        SampledWave(1.0, 0, np.zeros((0, 1)))


def test_from_mapping_requires_contiguous_indices():
    wave = SampledWave.from_mapping(2.0, {1: [1.0], 2: [2.0], 0: [0.0]})
    assert wave.window == (0, 2)
    assert reconstruct(wave, 2 * 2.0)[0] == 2.0
    with pytest.raises(ValueError):
        SampledWave.from_mapping(1.0, {0: [1.0], 2: [2.0]})


# ---------------------------------------------------------- trajectory I/O

def test_from_trajectory_requires_lapse_two():
    parts = HamiltonianParts(((1,),), ((0,),))
    spec = AutomatonSpec(dim=1, parts=parts, lapse_c=1)
    init = StatePair(Slice(0, (1,), (0,), 0, 0), Slice(1, (0,), (-1,), 0, 0))
    traj = evolve(spec, init, 4)
    with pytest.raises(LapseError):
        SampledWave.from_trajectory(traj, 1.0)


def test_from_trajectory_refuses_unrepresentable_integers():
    parts = HamiltonianParts(((0,),), ((0,),))
    spec = AutomatonSpec(dim=1, parts=parts, lapse_c=2)
    big = 2**53 + 1
    init = StatePair(Slice(0, (big,), (0,), 0, 0), Slice(1, (big,), (0,), 1, 0))
    traj = evolve(spec, init, 2)
    with pytest.raises(FloatConversionError):
        SampledWave.from_trajectory(traj, 1.0)


def test_from_trajectory_amplitude_scale_and_recenter():
    parts = HamiltonianParts(((0,),), ((0,),))
    spec = AutomatonSpec(dim=1, parts=parts, lapse_c=2)
    init = StatePair(Slice(0, (10,), (20,), 0, 0), Slice(1, (10,), (20,), 1, 0))
    traj = evolve(spec, init, 2)
    wave = SampledWave.from_trajectory(traj, 1.0, amplitude_scale=10, recenter=True)
    assert wave.window == (-1, 2)
    assert wave.values[0, 0] == pytest.approx(1 + 2j)


def test_gaussian_to_ndarray():
    M = GaussianMatrix.from_rows([[1, GaussianInteger(0, -2)], [GaussianInteger(0, 2), 3]])
    arr = gaussian_to_ndarray(M)
    assert arr.dtype == complex
    assert np.array_equal(arr, np.array([[1, -2j], [2j, 3]]))


# ----------------------------------------------------------- sinh residual

def test_sinh_residual_analytic_in_band_eigenmode():
    # eps = 0.6 mode sampled on a quarter-million-sample window; the residual
    # is pure boundary truncation, decaying like 1/window
    eps = 0.6
    mode = ModeWave(1.0, [math.asin(eps)], [[1.0]])
    wave = mode.sample(-250_000, 250_000)
    H = np.array([[eps]])
    assert sinh_residual(wave, H, 0.5) <= 1e-6


def test_sinh_residual_zero_hamiltonian_constant_wave():
    # at a grid point the interpolation is exact, so the residual vanishes
    wave = SampledWave(1.0, -50, np.ones((101, 1)))
    assert sinh_residual(wave, np.array([[0.0]]), 0.0) == 0.0
    # at the window centre (off-grid for an even window) the shifted
    # evaluations cancel by symmetry down to rounding level
    even = SampledWave(1.0, -50, np.ones((100, 1)))
    assert sinh_residual(even, np.array([[0.0]]), -0.5) <= 1e-12


def test_sinh_residual_period4_orbit_400_samples_truncation_floor():
    # frozen from the independent oracle: with 400 samples the truncation
    # floor at t = 0.3 l is 1.82e-3; it scales like 1/window (see the
    # 1600-sample case below)
    wave = period4_wave(398)
    H = np.array([[1.0]])
    r = sinh_residual(wave, H, 0.3)
    assert r == pytest.approx(1.821e-3, abs=2e-4)


def test_sinh_residual_period4_orbit_shrinks_below_1e3_with_window():
    wave = period4_wave(1598)
    H = np.array([[1.0]])
    for frac in np.linspace(0.1, 0.9, 9):
        assert sinh_residual(wave, H, float(frac)) <= 1e-3


def test_sinh_residual_guard_band():
    wave = period4_wave(58)  # window [-29, 30]
    H = np.array([[1.0]])
    with pytest.raises(GuardBandError):
        sinh_residual(wave, H, -25.0)  # t - l lands inside the guard band
    with pytest.raises(GuardBandError):
        sinh_residual(wave, H, 29.5)


def test_sinh_residual_scale_l_dependence():
    # the same orbit at l = 0.5 keeps its residual scale-free in t/l
    wave = period4_wave(1598, scale_l=0.5)
    H = np.array([[1.0]])
    assert sinh_residual(wave, H, 0.5 * 0.3) <= 1e-3


# ---------------------------------------------------------------- spectrum

def test_spectrum_single_mode_at_band_edge():
    spec = spectrum(np.array([[1.0]]), 1.0)
    (mode,) = spec.modes
    assert mode.epsilon == pytest.approx(1.0, abs=1e-12)
    assert mode.energy == pytest.approx(math.pi / 2, abs=1e-12)
    assert spec.in_band_indices == (0,)


def test_spectrum_pauli_x():
    spec = spectrum(PAULI_X, 2.0)
    assert [m.epsilon for m in spec.modes] == pytest.approx([-1.0, 1.0], abs=1e-12)
    assert [m.energy for m in spec.modes] == pytest.approx(
        [-math.pi / 4, math.pi / 4], abs=1e-12
    )


def test_spectrum_out_of_band_modes():
    H = np.array([[1.0, 1.0], [1.0, -1.0]])
    spec = spectrum(H, 1.0)
    assert [m.epsilon for m in spec.modes] == pytest.approx(
        [-math.sqrt(2), math.sqrt(2)], abs=1e-12
    )
    assert all(m.energy is None for m in spec.modes)
    assert spec.out_of_band_indices == (0, 1)


def test_spectrum_rejects_non_hermitian():
    with pytest.raises(HermiticityError):
        spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_dispersion_series_matches_arcsin():
    # E l = arcsin(eps) = eps (1 + eps^2/6) + O(eps^5)
    for eps in (0.1, 0.3, 0.5):
        assert abs(math.asin(eps) - eps * (1 + eps * eps / 6)) <= eps**5


# ----------------------------------------------------------- step stability

def test_step_eigenphase_zero_epsilon():
    ph = step_eigenphase(0.0, 2)
    assert ph.stability == "stable"
    assert sorted(ph.roots, key=lambda z: z.real) == [(-1 + 0j), (1 + 0j)]


def test_step_eigenphase_marginal_double_root():
    ph = step_eigenphase(1.0, 2)
    assert ph.stability == "marginal"
    assert ph.roots[0] == pytest.approx(-1j)
    assert ph.roots[1] == pytest.approx(-1j)
    assert ph.growth_rate == pytest.approx(1.0)


def test_step_eigenphase_unstable_growth():
    ph = step_eigenphase(math.sqrt(2), 2)
    assert ph.stability == "unstable"
    assert ph.growth_rate == pytest.approx(math.sqrt(2) + 1, abs=1e-12)


def test_step_eigenphase_root_product_is_minus_one():
    rng = random.Random(17)
    for _ in range(100):
        eps = rng.uniform(-3, 3)
        c = rng.randint(-3, 3)
        ph = step_eigenphase(eps, c)
        assert ph.roots[0] * ph.roots[1] == pytest.approx(-1.0, abs=1e-12)


def test_stable_root_phase_matches_arcsin():
    rng = random.Random(19)
    eps_values = [0.0, 0.5, -0.5, 1.0, -1.0] + [rng.uniform(-1, 1) for _ in range(50)]
    for eps in eps_values:
        ph = step_eigenphase(eps, 2)
        assert math.atan2(ph.stable_root.imag, ph.stable_root.real) == pytest.approx(
            -math.asin(eps), abs=1e-9
        )


def test_step_eigenphase_in_band_roots_unimodular():
    for eps in (0.0, 0.3, -0.7, 0.99):
        ph = step_eigenphase(eps, 2)
        assert abs(ph.roots[0]) == pytest.approx(1.0, abs=1e-12)
        assert abs(ph.roots[1]) == pytest.approx(1.0, abs=1e-12)
        assert ph.roots[0] != ph.roots[1]


# -------------------------------------------------- continuum conservation

def test_continuum_residual_single_mode_identity():
    eps = 0.5
    mode = ModeWave(1.0, [math.asin(eps)], [[1.0, 0.0]])
    assert abs(continuum_conservation_residual(mode, np.eye(2), 3.7)) <= 1e-12


def test_continuum_residual_two_mode_analytic_path():
    wave = two_mode_pauli_wave()
    for t in np.linspace(-3, 3, 20):
        assert abs(continuum_conservation_residual(wave, PAULI_X, t)) <= 1e-9
        assert abs(continuum_conservation_residual(wave, np.eye(2), t)) <= 1e-9


def test_continuum_residual_two_mode_reconstruction_path():
    samples = two_mode_pauli_wave().sample(-200, 199)
    for t in np.linspace(-2, 2, 9):
        assert abs(continuum_conservation_residual(samples, PAULI_X, t)) <= 1e-3


def test_continuum_residual_reconstructed_period4_orbit():
    wave = period4_wave(1598)
    G = np.eye(1)
    for t in np.linspace(0.1, 0.9, 9):
        assert abs(continuum_conservation_residual(wave, G, float(t))) <= 1e-3


def test_continuum_residual_guard_band():
    wave = period4_wave(58)
    with pytest.raises(GuardBandError):
        continuum_conservation_residual(wave, np.eye(1), 28.0)


# ----------------------------------------------------------------- two-time

def test_two_time_coincidence_is_norm_squared():
    wave = two_mode_pauli_wave()
    for t in (0.0, 0.4, 1.7):
        v = wave.value_at(t)
        assert two_time(wave, np.eye(2), t, t) == pytest.approx(
            float(np.linalg.norm(v) ** 2)
        )
        assert two_time(wave, np.eye(2), t, t) >= 0


def test_two_time_single_mode_is_cos_energy_gap():
    eps = 0.5
    E = math.asin(eps)
    vec = np.array([0.6, 0.8j])
    mode = ModeWave(1.0, [E], [vec])
    for t in np.linspace(-2, 2, 11):
        c = two_time(mode, np.eye(2), t, t + 1.0)
        assert c == pytest.approx(math.cos(E) * float(np.linalg.norm(vec) ** 2), abs=1e-9)


def test_two_time_translation_invariance():
    wave = two_mode_pauli_wave()
    for t in np.linspace(-2, 2, 20):
        left = two_time(wave, PAULI_X, t - 1.0, t)
        right = two_time(wave, PAULI_X, t, t + 1.0)
        assert abs(left - right) <= 1e-6


def test_two_time_normalization_limit():
    # |C_1(t, t+l) - 1| = 1 - cos(E l) ~ (E l)^2 / 2 shrinks ~4x per halving
    errs = []
    for eps in (0.5, 0.25, 0.125):
        mode = ModeWave(1.0, [math.asin(eps)], [[1.0]])
        errs.append(abs(two_time(mode, np.eye(1), 0.3, 1.3) - 1.0))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.15)


def test_two_time_guard_band():
    wave = period4_wave(58)
    with pytest.raises(GuardBandError):
        two_time(wave, np.eye(1), -29.0, 0.0)


# ----------------------------------------------------------------- ModeWave

def test_mode_wave_sampling_matches_values():
    wave = two_mode_pauli_wave()
    samples = wave.sample(-5, 5)
    for n in range(-5, 6):
        assert np.allclose(samples.values[n + 5], wave.value_at(float(n)), atol=1e-15)


def test_mode_wave_validation():
    with pytest.raises(ValueError):
        ModeWave(0.0, [1.0], [[1.0]])
    with pytest.raises(ValueError):
        ModeWave(1.0, [1.0, 2.0], [[1.0]])
