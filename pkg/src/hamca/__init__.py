"""Exact integer Hamiltonian cellular automata and their bandlimited bridge.

The package has four layers:

- exactmath: Gaussian-integer scalars and dense matrices (never rounds)
- automaton: the reversible three-term integer recursion, action, variation
  and conservation brackets
- continuum: sinc reconstruction of sampled runs, the central-difference wave
  equation residuals, spectra and step stability
- qmbridge: rounding a physical Hermitian matrix to an integer automaton and
  comparing the exact integer evolution against the eigendecomposition oracle

plus a batch CLI (``hamca``) with deterministic CSV outputs.
"""

from .automaton import (
    AutomatonSpec,
    BudgetExceededError,
    Slice,
    StatePair,
    Trajectory,
    action,
    conservation_residual,
    conservation_sweep,
    discrete_variation,
    evolve,
    hamiltonian_doubled,
    leibniz_residual,
    psi,
    step_backward,
    step_forward,
)
from .continuum import (
    GuardBandError,
    LapseError,
    Mode,
    ModeWave,
    SampledWave,
    Spectrum,
    StepEigenphase,
    continuum_conservation_residual,
    reconstruct,
    sinh_residual,
    spectrum,
    step_eigenphase,
    two_time,
)
from .exactmath import (
    FloatConversionError,
    GaussianInteger,
    GaussianMatrix,
    HamiltonianParts,
    ShapeError,
    SymmetryError,
    build_hamiltonian,
    commutes,
    matvec,
)
from .qmbridge import (
    AllModesOutOfBandError,
    BandReport,
    ComparisonReport,
    PhysicalProblem,
    QuantizationReport,
    band_report,
    convergence_study,
    quantize,
    simulate_vs_exact,
)

__version__ = "0.1.0"
