"""Entanglement generated by bilinear two-mode devices, computed in a truncated Fock basis."""
from .analysis import (
    InequalityReport,
    WignerGrid,
    check_inequality,
    eigen_residual,
    fit_eta,
    symmetry_scan,
    wigner,
)
from .devices import BeamSplitter, GeneralBilinear, TwoModeSqueezer, device_from_dict, evolve
from .entanglement import (
    EntropyComparison,
    compare,
    exact_H,
    extremal_values,
    linear_entropy,
    predict_H_beamsplitter,
    predict_H_general,
    predict_H_two_mode_squeezer,
    reduced_density,
)
from .errors import (
    DegenerateStateError,
    DivergentSeriesError,
    FockError,
    NormalizationError,
    TruncationError,
)
from .fock import FockVector, TruncationReport, TwoModeVector, tensor_product
from .search import SearchConfig, SearchResult, maximize_generated_entropy, minimize_generated_entropy
from .states import (
    Coherent,
    Fock,
    GeneralizedKL,
    HigherCat,
    SqueezedVacuum,
    make_coherent,
    make_fock,
    make_generalized_kl,
    make_higher_cat,
    make_squeezed_vacuum,
    state_from_dict,
)

__all__ = [name for name in dir() if not name.startswith("_")]
