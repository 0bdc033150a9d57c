"""Gaussian-state toolkit for the three-mode optomechanical teleportation network."""

__version__ = "0.1.0"

from .dynamics import (
    CmCoefficients,
    CouplingParams,
    SymplecticTransform,
    coefficients,
    coupling_ratio,
    evolve,
    generator,
    transfer_matrix,
)
from .gaussian import (
    EprReport,
    GaussianState,
    InvalidStateError,
    epr_variances,
    heterodyne_condition,
    make_initial_state,
    partial_trace,
    ppt_separable,
    symplectic_eigenvalues,
    symplectic_form,
)
from .mc import McConfig, McResult, run_protocol
from .network import (
    DistillConfig,
    DistillMethod,
    FidelityCurve,
    Milestones,
    TelecloneFidelities,
    TelecloningInterval,
    default_grid,
    distill,
    distill_heterodyne,
    distill_trace,
    fidelity_curve,
    milestones,
    telecloning_interval,
    teleclone,
    trace_pair_separable,
)
from .teleportation import (
    Channel,
    ChannelClass,
    EprSign,
    FidelityResult,
    StandardForm,
    classify_channel,
    fidelity_coherent_standard,
    fidelity_general,
    optimal_displacement,
)

__all__ = [
    "__version__",
    "GaussianState",
    "EprReport",
    "InvalidStateError",
    "symplectic_form",
    "make_initial_state",
    "partial_trace",
    "heterodyne_condition",
    "epr_variances",
    "ppt_separable",
    "symplectic_eigenvalues",
    "CouplingParams",
    "CmCoefficients",
    "SymplecticTransform",
    "coupling_ratio",
    "generator",
    "transfer_matrix",
    "evolve",
    "coefficients",
    "EprSign",
    "ChannelClass",
    "StandardForm",
    "Channel",
    "FidelityResult",
    "optimal_displacement",
    "fidelity_general",
    "fidelity_coherent_standard",
    "classify_channel",
    "DistillMethod",
    "DistillConfig",
    "FidelityCurve",
    "Milestones",
    "TelecloningInterval",
    "TelecloneFidelities",
    "distill",
    "distill_trace",
    "distill_heterodyne",
    "fidelity_curve",
    "default_grid",
    "milestones",
    "telecloning_interval",
    "teleclone",
    "trace_pair_separable",
    "McConfig",
    "McResult",
    "run_protocol",
]
