"""Continuous-variable entanglement distillation in truncated Fock space.

Malting prepares a photon-subtracted resource from a two-mode squeezed
vacuum; mashing folds fresh resources into a held state with
vacuum-heralded 50:50 interference.  The subpackages cover states
(:mod:`~distillery.fock`), entanglement, the mashing map, malting
probabilities, dephasing, and time-bandwidth budgeting.
"""
from .budget import BudgetReport, MuConvention, RamanParams, max_iterations, p_s_infinity, raman_mapping
from .decoherence import DephasingParams, dephase, embed_pure
from .entanglement import (
    NegativityMethod,
    NegativityResult,
    logneg_mixed,
    logneg_partial_transpose_oracle,
    logneg_pure,
    subtracted_logneg,
    tmss_logneg,
)
from .errors import (
    CapacityError,
    DegenerateResourceError,
    DistilleryError,
    DivergentStateError,
    DomainError,
    InvalidDensityError,
    InvalidStateError,
    OverCoupledError,
    TruncationMismatchError,
)
from .fock import (
    BeamsplitterSpec,
    SchmidtCorrelatedDensity,
    SchmidtPureState,
    beamsplitter_vacuum_projection_oracle,
    load_state,
    normalize,
    save_state,
    subtracted_state,
    tmss,
)
from .malting import (
    MaltingOutcome,
    MaltingParams,
    averaged_gain,
    cumulative_prob,
    kraus_trajectory_prob,
    malt,
    max_attempts,
    subtraction_prob,
    tmss_generation_prob,
)
from .mashing import IterationTrace, MashingOperator, build_operator, iterate, limiting_state, mash_mixed, mash_pure

__version__ = "0.1.0"
