"""Sampling-theory bridge from integer trajectories to bandlimited waves.

A trajectory sampled at t_n = n*l with bandwidth pi/l reconstructs through a
truncated sinc series; the reconstructed wave obeys a central-difference form
of the Schroedinger equation whose residuals these routines measure.  The
bridge is hard-wired to lapse c = 2 (the identification of one recursion step
with one sample spacing only closes then) and refuses anything else.

All evaluations are pure; waves are immutable after construction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .automaton import Trajectory
from .exactmath import FLOAT_EXACT_MAX, FloatConversionError, GaussianMatrix

DEFAULT_GUARD = 10
BAND_TOLERANCE = 1e-12
HERMITICITY_TOLERANCE = 1e-12


class GuardBandError(ValueError):
    """Evaluation too close to the sample-window edges."""


class LapseError(ValueError):
    """The continuum bridge requires runs with lapse c = 2."""


class HermiticityError(ValueError):
    """Matrix is not Hermitian within tolerance."""


def _sinc(u: np.ndarray) -> np.ndarray:
    """sin(pi u)/(pi u) that is exactly 1 at 0 and exactly 0 at other integers.

    Computed through the fractional part so grid-point interpolation suffers
    no sin(pi*k) rounding leakage.
    """
    u = np.asarray(u, dtype=float)
    k = np.round(u)
    frac = u - k
    sign = np.where(np.mod(k, 2.0) == 0.0, 1.0, -1.0)
    num = sign * np.sin(np.pi * frac)
    denom = np.where(u == 0.0, 1.0, np.pi * u)
    return np.where(u == 0.0, 1.0, num / denom)


def _check_hermitian(H: np.ndarray, what: str = "matrix") -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise HermiticityError(f"{what} must be square, got shape {H.shape}")
    gap = float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0
    if gap > HERMITICITY_TOLERANCE:
        raise HermiticityError(f"{what} is not Hermitian: max deviation {gap:.3e}")
    return H


def gaussian_to_ndarray(M: GaussianMatrix) -> np.ndarray:
    """Convert an exact matrix to complex floats; errors beyond 2**53."""
    out = np.empty((M.rows, M.cols), dtype=complex)
    for i in range(M.rows):
        for j in range(M.cols):
            out[i, j] = M.entry(i, j).to_complex()
    return out


class SampledWave:
    """Complex samples psi(n*l) on a contiguous index window."""

    __slots__ = ("scale_l", "n_min", "values")

    def __init__(self, scale_l: float, n_min: int, values):
        scale_l = float(scale_l)
        if not (scale_l > 0 and math.isfinite(scale_l)):
            raise ValueError(f"scale_l must be a positive finite real, got {scale_l}")
        values = np.array(values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"samples must form a non-empty (window, dim) array")
        values.setflags(write=False)
        object.__setattr__(self, "scale_l", scale_l)
        object.__setattr__(self, "n_min", int(n_min))
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("SampledWave is immutable")

    @classmethod
    def from_mapping(cls, scale_l: float, samples: Mapping[int, Sequence[complex]]) -> SampledWave:
        if not samples:
            raise ValueError("empty sample window")
        indices = sorted(samples)
        if indices != list(range(indices[0], indices[-1] + 1)):
            raise ValueError("sample indices must be contiguous")
        return cls(scale_l, indices[0], [samples[n] for n in indices])

    @classmethod
    def from_trajectory(
        cls,
        traj: Trajectory,
        scale_l: float,
        *,
        amplitude_scale: int = 1,
        recenter: bool = False,
    ) -> SampledWave:
        """Map slice n to sample psi_n = (x_n + i p_n) / amplitude_scale.

        Requires lapse c = 2; integer components beyond 2**53 are refused
        rather than silently losing precision.  With recenter=True the index
        window is shifted so its middle slice sits at sample index 0.
        """
        if traj.spec.lapse_c != 2:
            raise LapseError(
                f"continuum bridge requires lapse c = 2, run has c = {traj.spec.lapse_c}"
            )
        q = int(amplitude_scale)
        if q < 1:
            raise ValueError(f"amplitude_scale must be a positive integer, got {q}")
        rows = []
        for s in traj.slices:
            for v in s.x + s.p:
                if abs(v) > FLOAT_EXACT_MAX:
                    raise FloatConversionError(
                        f"slice n={s.n} has a component beyond 2**53; "
                        "reconstruction floats would silently lose precision"
                    )
            rows.append([complex(a, b) / q for a, b in zip(s.x, s.p)])
        n0 = traj.slices[0].n
        if recenter:
            n0 -= traj.slices[0].n + (len(traj.slices) - 1) // 2
        return cls(scale_l, n0, rows)

    @property
    def window(self) -> tuple[int, int]:
        return (self.n_min, self.n_min + self.values.shape[0] - 1)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def value_at(self, t: float) -> np.ndarray:
        return reconstruct(self, t)


class ModeWave:
    """Analytic superposition sum_k exp(-i E_k t) a_k; no truncation error.

    The closed-form evaluation path used to separate truncation effects from
    the discrete-to-continuum mapping itself.
    """

    __slots__ = ("scale_l", "energies", "amplitudes")

    def __init__(self, scale_l: float, energies, amplitudes):
        scale_l = float(scale_l)
        if not (scale_l > 0 and math.isfinite(scale_l)):
            raise ValueError(f"scale_l must be a positive finite real, got {scale_l}")
        energies = np.atleast_1d(np.asarray(energies, dtype=float))
        amplitudes = np.atleast_2d(np.asarray(amplitudes, dtype=complex))
        if amplitudes.shape[0] != energies.shape[0]:
            raise ValueError(
                f"{energies.shape[0]} energies but {amplitudes.shape[0]} amplitude rows"
            )
        energies.setflags(write=False)
        amplitudes.setflags(write=False)
        object.__setattr__(self, "scale_l", scale_l)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "amplitudes", amplitudes)

    def __setattr__(self, name, value):
        raise AttributeError("ModeWave is immutable")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[1]

    def value_at(self, t: float) -> np.ndarray:
        return np.exp(-1j * self.energies * t) @ self.amplitudes

    def sample(self, n_min: int, n_max: int) -> SampledWave:
        ns = np.arange(n_min, n_max + 1)
        phases = np.exp(-1j * np.outer(ns * self.scale_l, self.energies))
        return SampledWave(self.scale_l, n_min, phases @ self.amplitudes)


def reconstruct(wave: SampledWave, t: float) -> np.ndarray:
    """Truncated sinc series sum_n psi_n sinc((t - n l)/l) over the window.

    At sample points inside the window this returns the stored sample exactly
    (the kernel is exactly 1 at zero argument and 0 at the other integers).
    """
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    lo, hi = wave.window
    u = t / wave.scale_l - np.arange(lo, hi + 1)
    return _sinc(u) @ wave.values


def _guard_check(wave, times: Sequence[float], guard: int):
    if not isinstance(wave, SampledWave):
        return  # analytic waves have no truncation edges
    lo, hi = wave.window
    t_lo = (lo + guard) * wave.scale_l
    t_hi = (hi - guard) * wave.scale_l
    for t in times:
        if not (t_lo <= t <= t_hi):
            raise GuardBandError(
                f"t={t} is within {guard} samples of the window edges "
                f"[{lo}, {hi}] (scale {wave.scale_l})"
            )


def sinh_residual(wave, H, t: float, *, guard: int = DEFAULT_GUARD) -> float:
    """Norm of (psi(t+l) - psi(t-l))/2 + i H psi(t) on the reconstructed wave.

    Small (truncation-limited) for waves sampled from runs that satisfy the
    update rules with lapse 2; the evaluation points must respect the guard
    band.
    """
    H = np.asarray(H, dtype=complex)
    l = wave.scale_l
    _guard_check(wave, (t - l, t, t + l), guard)
    psi_t = wave.value_at(t)
    psi_p = wave.value_at(t + l)
    psi_m = wave.value_at(t - l)
    r = 0.5 * (psi_p - psi_m) + 1j * (H @ psi_t)
    return float(np.linalg.norm(r))


@dataclass(frozen=True)
class Mode:
    """One eigenmode: eigenvalue epsilon, energy (None when out of band)."""

    epsilon: float
    energy: float | None
    eigvec: np.ndarray

    @property
    def in_band(self) -> bool:
        return self.energy is not None


@dataclass(frozen=True)
class Spectrum:
    scale_l: float
    modes: tuple[Mode, ...]

    @property
    def epsilons(self) -> tuple[float, ...]:
        return tuple(m.epsilon for m in self.modes)

    @property
    def in_band_indices(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.modes) if m.in_band)

    @property
    def out_of_band_indices(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.modes) if not m.in_band)


def spectrum(H, scale_l: float) -> Spectrum:
    """Eigenvalues epsilon of a Hermitian matrix and energies arcsin(eps)/l.

    Modes with |epsilon| beyond 1 (plus a 1e-12 clamp) carry no real energy
    and are marked out of band: the energy axis stops at half the bandwidth,
    |E| <= pi/(2 l).
    """
    H = _check_hermitian(H)
    scale_l = float(scale_l)
    if not (scale_l > 0 and math.isfinite(scale_l)):
        raise ValueError(f"scale_l must be a positive finite real, got {scale_l}")
    evals, evecs = np.linalg.eigh(H)
    modes = []
    for i, eps in enumerate(evals):
        eps = float(eps)
        vec = evecs[:, i].copy()
        vec.setflags(write=False)
        if abs(eps) <= 1.0 + BAND_TOLERANCE:
            energy = math.asin(max(-1.0, min(1.0, eps))) / scale_l
        else:
            energy = None
        modes.append(Mode(epsilon=eps, energy=energy, eigvec=vec))
    return Spectrum(scale_l=scale_l, modes=tuple(modes))


@dataclass(frozen=True)
class StepEigenphase:
    """Per-mode one-step multipliers lambda of the three-term recursion.

    roots solve lambda^2 + i c eps lambda - 1 = 0; roots[0] is the branch
    continuous with +1 at eps -> 0 (the e^{-i arcsin(c eps / 2)} phase while
    in band), roots[1] its companion.  Their product is exactly -1.
    """

    epsilon: float
    lapse_c: int
    roots: tuple[complex, complex]
    stability: str

    @property
    def growth_rate(self) -> float:
        return max(abs(self.roots[0]), abs(self.roots[1]))

    @property
    def stable_root(self) -> complex:
        return self.roots[0]


def step_eigenphase(epsilon: float, lapse_c: int) -> StepEigenphase:
    """Solve the one-step characteristic equation and classify stability.

    stable   |c eps| < 2   both roots on the unit circle, distinct
    marginal |c eps| = 2   double root (within 1e-12)
    unstable |c eps| > 2   one root strictly outside the unit circle
    """
    epsilon = float(epsilon)
    lapse_c = int(lapse_c)
    d = lapse_c * epsilon
    root_disc = cmath.sqrt(complex(4.0 - d * d))
    lam_plus = (root_disc - 1j * d) / 2.0
    lam_minus = (-root_disc - 1j * d) / 2.0
    if abs(abs(d) - 2.0) <= BAND_TOLERANCE:
        stability = "marginal"
    elif abs(d) < 2.0:
        stability = "stable"
    else:
        stability = "unstable"
    return StepEigenphase(
        epsilon=epsilon, lapse_c=lapse_c, roots=(lam_plus, lam_minus), stability=stability
    )


def continuum_conservation_residual(
    wave, G, t: float, *, guard: int = DEFAULT_GUARD
) -> float:
    """psi(t)^dag G s + s^dag G psi(t) with s = (psi(t+l) - psi(t-l))/2.

    Real for Hermitian G; bounded by the truncation tolerance for matrices
    commuting with the generator of the wave.
    """
    G = np.asarray(G, dtype=complex)
    l = wave.scale_l
    _guard_check(wave, (t - l, t, t + l), guard)
    psi_t = wave.value_at(t)
    s = 0.5 * (wave.value_at(t + l) - wave.value_at(t - l))
    val = psi_t.conj() @ (G @ s) + s.conj() @ (G @ psi_t)
    return float(val.real)


def two_time(wave, G, t1: float, t2: float, *, guard: int = DEFAULT_GUARD) -> float:
    """The real symmetric two-time bracket C_G(t1, t2) = Re(psi(t1)^dag G psi(t2)).

    For Hermitian G commuting with the generator it depends only on t2 - t1,
    hence is invariant under the discrete translation (t-l, t) -> (t, t+l).
    """
    G = np.asarray(G, dtype=complex)
    _guard_check(wave, (t1, t2), guard)
    val = wave.value_at(t1).conj() @ (G @ wave.value_at(t2))
    return float(val.real)
