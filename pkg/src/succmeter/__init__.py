"""Successive von Neumann measurements with arbitrary meter coupling."""

from .errors import (
    DimensionMismatch,
    GridTooSmall,
    IllConditioned,
    InvalidState,
    NotComplementary,
    NotHermitian,
    SuccMeterError,
    ZeroOverlap,
    ZeroProbability,
)
from .operators import (
    ComplementarityReport,
    OrthonormalBasis,
    SpectralDecomposition,
    check_complementary,
    computational_basis,
    fourier_basis,
    ket_projector,
    pauli,
    projector_observable,
    random_density,
    spectral_decompose,
    validate_density,
)
from .single import (
    GaussianMeter,
    PointerDensity,
    decoherence_factor,
    luders_reduce,
    pointer_density,
    pointer_mean,
    reduced_state_after,
    selective_collapse,
)
from .successive import (
    CorrelationResult,
    QuasiProbTable,
    corr_p1q2,
    corr_q1q2,
    kirkwood,
    margenau_hill,
    marginal_check,
    quasi_probability,
    scan_epsilon,
    wigner_joint,
    wigner_table,
)
from .reconstruction import (
    W11Record,
    g_matrix,
    operator_transform_expectation,
    projector_pair_quasiprob,
    reconstruct_density,
    simulate_records,
    w11_from_correlations,
)

__version__ = "0.1.0"
