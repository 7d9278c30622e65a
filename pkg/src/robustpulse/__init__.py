"""Robust piecewise-constant pulse synthesis for quantum gates.

Train pulse tables by gradient ascent of the average gate fidelity over a
deterministic grid of multiplicatively scaled Hamiltonians, then evaluate the
learned pulses on randomized uncertainty ensembles.
"""

from .errors import (
    BadSliceIndex,
    DimMismatch,
    Diverged,
    NotHermitian,
    NotUnitary,
    SchemeMismatch,
    ShapeMismatch,
    UnknownPreset,
)
from .linalg import (
    expm_neg_i,
    gate_fidelity,
    hs_inner,
    is_hermitian,
    is_unitary,
    kron,
    phi_objective,
)
from .model import (
    ControlChannel,
    ControlField,
    ControlProblem,
    Group,
    Half,
    InitialProfile,
    Scheme,
    UncertaintySample,
    UncertaintyWiring,
    effective_hamiltonian,
    propagate,
    robustness_scan,
)
from .optimize import (
    TestReport,
    TrainConfig,
    TrainResult,
    amplitude_stats,
    averaged_gradient,
    forward_backward,
    sample_gradient,
    test,
    train,
)
from .sampling import (
    RNG_ALGORITHM,
    Distribution,
    UncertaintyParam,
    UncertaintySpec,
    mc_samples,
    mc_truncated_gaussian,
    mc_uniform,
    training_grid,
)
from .presets import preset, preset_names

__version__ = "0.1.0"
