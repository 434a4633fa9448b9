"""Truncated Fock-space simulation of phase-operator eigenstates.

The package covers three strands: phase-space analysis (Wigner
functions, negativity volumes, effective radii), heralded optical
generation of the eigenstates under imperfect detection, and estimation
of phases and superposition coefficients from beam-splitter
interference statistics. Hot numerical kernels are compiled with numba
when available; set PBSIM_NO_NUMBA=1 to force the pure-numpy fallback.
"""

from ._kernels import backend, wigner_batch
from .errors import (ConfigMismatchError, CutoffError, DegenerateHeraldError,
                     LeakageWarning, LowInformationError, NumericalError,
                     PbsimError, ProbeError, QuadratureError,
                     RankDeficiencyWarning, RootQualityError, ValidationError,
                     WindowExhaustedError)
from .fock import (FockDensity, FockVector, TruncationConfig,
                   conditional_density, fidelity_pure, inner_product,
                   number_state, pad_to_cutoff, project_pattern,
                   tensor_product, vacuum_state)
from .herald import (HeraldConfig, HeraldResult, HeraldSweepRow,
                     alpha_polynomial, build_state, click_probability,
                     conditional_negativity, herald_alphas, herald_fidelity,
                     herald_point, solve_alphas, sweep, symmetric_factors)
from .ops import (DetectorPovm, TwoModeUnitary, apply_single_mode_op,
                  apply_two_mode_unitary, beam_splitter_5050,
                  beam_splitter_pb, detector_povm, displacement_op,
                  phase_plate, tmsv)
from .phase_est import (CountTable, OutcomeDistribution, PhaseEstimate,
                        SuperpositionCoeffs, estimate_coefficients,
                        estimate_phase, gauge_fixed, interference_probs,
                        load_count_table, sample_outcomes, save_count_table,
                        superposition_probs, superposition_state)
from .phase_states import (pb_eigenstate, pb_phase_operator, phase_state,
                           phase_value)
from .wigner import (DEFAULT_QUADRATURE, NegativityResult, QuadratureSpec,
                     WignerGrid, effective_radius, hermite_wavefunction,
                     kernel_matrix, negativity_volume,
                     negativity_volume_detailed, wigner_grid, wigner_point,
                     wigner_point_integral, wigner_plane_integral)

__version__ = "0.1.0"

__all__ = [
    "backend", "wigner_batch",
    "PbsimError", "ValidationError", "ConfigMismatchError", "CutoffError",
    "NumericalError", "QuadratureError", "WindowExhaustedError",
    "DegenerateHeraldError", "ProbeError", "RootQualityError",
    "LowInformationError", "LeakageWarning", "RankDeficiencyWarning",
    "TruncationConfig", "FockVector", "FockDensity", "tensor_product",
    "inner_product", "fidelity_pure", "project_pattern",
    "conditional_density", "vacuum_state", "number_state", "pad_to_cutoff",
    "TwoModeUnitary", "DetectorPovm", "beam_splitter_pb",
    "beam_splitter_5050", "apply_two_mode_unitary", "apply_single_mode_op",
    "tmsv", "displacement_op", "phase_plate", "detector_povm",
    "phase_value", "phase_state", "pb_eigenstate", "pb_phase_operator",
    "hermite_wavefunction", "kernel_matrix", "wigner_point",
    "wigner_point_integral", "WignerGrid", "wigner_grid", "QuadratureSpec",
    "DEFAULT_QUADRATURE", "NegativityResult", "negativity_volume",
    "negativity_volume_detailed", "wigner_plane_integral",
    "effective_radius",
    "HeraldConfig", "HeraldResult", "HeraldSweepRow", "symmetric_factors",
    "alpha_polynomial", "solve_alphas", "herald_alphas", "build_state",
    "click_probability", "herald_fidelity", "conditional_negativity",
    "herald_point", "sweep",
    "OutcomeDistribution", "CountTable", "SuperpositionCoeffs",
    "PhaseEstimate", "gauge_fixed", "interference_probs",
    "superposition_state", "superposition_probs", "sample_outcomes",
    "estimate_phase", "estimate_coefficients", "save_count_table",
    "load_count_table",
    "__version__",
]
