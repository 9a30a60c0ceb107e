"""Bound-state energy ladders of Coulomb few-body systems in hyperspherical harmonics."""

from hhladder.errors import (
    BasisError,
    CacheCorruptError,
    ConfigError,
    HHLadderError,
    NoBoundStateError,
    OracleError,
    QuadratureError,
    UnsupportedTermError,
)
from hhladder.hyperbasis import (
    BasisSet,
    Explicit,
    FullToKmax,
    HHIndex,
    MainOnly,
    TermLabel,
    enumerate_basis,
    gram_matrix,
    hh_evaluate,
    lambda2_check,
    reduced_measure,
)
from hhladder.ladder import (
    LadderMatrices,
    build_a,
    build_alpha,
    build_beta,
    build_ladder,
    scalar_ladder_oracle,
    verify_factorization_identities,
)
from hhladder.potential import PotentialMatrix, QuadratureSpec, assemble_W, legendre_triple
from hhladder.spectral import (
    BoundState,
    RadialWavefunction,
    SpectralMatrix,
    SpectrumResult,
    build_spectral_matrix,
    energy_ladder,
    lowest_eigenvalue,
    orthogonalize_states,
    radial_wavefunction,
    variational_oracle,
)

__version__ = "0.1.0"
