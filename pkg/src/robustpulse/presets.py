"""Ready-made control problems: gates, operators and full experiment setups.

Each preset returns a fully wired (problem, uncertainty spec, train config)
triple.  Values that are package defaults rather than part of the published
problem setup are flagged in :data:`NOTES` and surfaced by the CLI listing.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UnknownPreset
from .model import (
    ControlChannel,
    ControlProblem,
    Group,
    InitialProfile,
    Scheme,
    UncertaintyWiring,
)
from .optimize import TrainConfig
from .sampling import Distribution, UncertaintyParam, UncertaintySpec

# ---------------------------------------------------------------------------
# operator and gate catalog

IDENTITY_2 = np.eye(2, dtype=complex)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# spin-1/2 operators
SPIN_X = PAULI_X / 2
SPIN_Y = PAULI_Y / 2
SPIN_Z = PAULI_Z / 2

# the four Gell-Mann matrices used by the three-level system
GELLMANN_1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
GELLMANN_3 = np.array([[1, 0, 0], [0, -1, 0], [0, 0, 0]], dtype=complex)
GELLMANN_4 = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex)
GELLMANN_6 = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

# a fixed, generically chosen 3x3 target unitary
U3X3 = np.array([
    [-1 / math.sqrt(3), 1 / math.sqrt(2), 1 / math.sqrt(6)],
    [-1 / math.sqrt(3), 0, -2 / math.sqrt(6)],
    [-1 / math.sqrt(3), -1 / math.sqrt(2), 1 / math.sqrt(6)],
], dtype=complex)

SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
CPHASE = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
CHADAMARD = np.block([
    [np.eye(2), np.zeros((2, 2))],
    [np.zeros((2, 2)), HADAMARD],
]).astype(complex)

# flips qubit 3 iff qubits 1 and 2 are both |1>
CCNOT = np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]]

# qubit level counts entering the coupler's zz admixture: 1/(6 sqrt(Nq1 Nq2))
N_Q1 = 5
N_Q2 = 5
ZZ_ADMIXTURE = 1.0 / (6.0 * math.sqrt(N_Q1 * N_Q2))  # = 1/30


def qubit_op(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a single-qubit operator at ``site`` (0-based) in an n-qubit chain."""
    out = np.array([[1.0 + 0j]])
    for k in range(n_sites):
        out = np.kron(out, op if k == site else IDENTITY_2)
    return out


def heisenberg_chain(n_sites: int, coupling: float = 1.0) -> np.ndarray:
    """Isotropic nearest-neighbor spin-1/2 exchange Hamiltonian."""
    dim = 2 ** n_sites
    h = np.zeros((dim, dim), dtype=complex)
    for n in range(n_sites - 1):
        for s in (SPIN_X, SPIN_Y, SPIN_Z):
            h += qubit_op(s, n, n_sites) @ qubit_op(s, n + 1, n_sites)
    return coupling * h


# ---------------------------------------------------------------------------
# presets


def _two_level_hadamard():
    # The wide seed pulse steers the nominal-only optimizer to a strongly
    # driven optimum whose robustness scan shows a clear falloff.
    problem = ControlProblem(
        name="two_level_hadamard",
        drift=PAULI_Z,
        drift_coeff=1.0,
        controls=(ControlChannel(PAULI_X, bounds=(-5.0, 5.0),
                                 profile=InitialProfile("sin", 3.0)),),
        horizon=2.0,
        slices=20,
        target=HADAMARD,
        uncertainty=UncertaintyWiring(n_params=2, drift=0, channels=(1,), fixed_terms=()),
    )
    spec = UncertaintySpec(
        params=(UncertaintyParam(0.2, 5), UncertaintyParam(0.2, 5)),
        test_distribution=Distribution.UNIFORM,
    )
    cfg = TrainConfig(step_size=0.1, max_iters=50_000, log_stride=10)
    return problem, spec, cfg


def _three_level_u33():
    sin = InitialProfile("sin", 1.0)
    problem = ControlProblem(
        name="three_level_u33",
        drift=GELLMANN_3,
        drift_coeff=1.0,
        controls=tuple(ControlChannel(op, bounds=(-5.0, 5.0), profile=sin)
                       for op in (GELLMANN_1, GELLMANN_4, GELLMANN_6)),
        horizon=8.0,
        slices=40,
        target=U3X3,
        uncertainty=UncertaintyWiring(n_params=2, drift=0, channels=(1, 1, 1), fixed_terms=()),
    )
    spec = UncertaintySpec(
        params=(UncertaintyParam(0.2, 5), UncertaintyParam(0.2, 5)),
        test_distribution=Distribution.UNIFORM,
    )
    cfg = TrainConfig(step_size=0.1, max_iters=1_000_000, log_stride=100)
    return problem, spec, cfg


def _superconducting(target: np.ndarray, name: str):
    # Two coupled phase qubits: tunable z rotations on each qubit, a tunable
    # xx+zz coupler, and fixed 1 GHz x terms; times in ns, amplitudes in GHz.
    sz1 = qubit_op(PAULI_Z, 0, 2)
    sz2 = qubit_op(PAULI_Z, 1, 2)
    sx1 = qubit_op(PAULI_X, 0, 2)
    sx2 = qubit_op(PAULI_X, 1, 2)
    coupler = 0.5 * (sx1 @ sx2 + ZZ_ADMIXTURE * sz1 @ sz2)
    problem = ControlProblem(
        name=name,
        drift=np.zeros((4, 4), dtype=complex),
        controls=(
            ControlChannel(0.5 * sz1, bounds=(-5.0, 5.0), profile=InitialProfile("sin", 1.0)),
            ControlChannel(0.5 * sz2, bounds=(-5.0, 5.0), profile=InitialProfile("sin", 1.0)),
            ControlChannel(coupler, bounds=(-0.8, 0.8), profile=InitialProfile("sin", 0.05)),
        ),
        fixed_terms=((0.5, sx1), (0.5, sx2)),
        horizon=8.0,
        slices=40,
        target=target,
        uncertainty=UncertaintyWiring(n_params=3, drift=None, channels=(0, 1, 2),
                                      fixed_terms=(None, None)),
    )
    spec = UncertaintySpec(
        params=tuple(UncertaintyParam(0.1, 5) for _ in range(3)),
        test_distribution=Distribution.UNIFORM,
    )
    cfg = TrainConfig(step_size=0.1, max_iters=200_000, log_stride=100)
    return problem, spec, cfg


def _spin_ccnot(n_controls: int):
    if n_controls == 4:
        driven = (0, 1)
    else:
        driven = (0, 1, 2)
    channels = []
    wiring = []
    for site in driven:
        channels.append(ControlChannel(qubit_op(SPIN_X, site, 3), bounds=(-20.0, 20.0),
                                       group=Group.X, profile=InitialProfile("sin", 1.0)))
        channels.append(ControlChannel(qubit_op(SPIN_Y, site, 3), bounds=(-20.0, 20.0),
                                       group=Group.Y, profile=InitialProfile("sin", 1.0)))
        wiring.extend([1, 1])
    problem = ControlProblem(
        name=f"spin_ccnot_{n_controls}",
        drift=heisenberg_chain(3),
        drift_coeff=1.0,
        controls=tuple(channels),
        horizon=20.0,
        slices=40,
        target=CCNOT,
        scheme=Scheme.ALTERNATING_XY,
        uncertainty=UncertaintyWiring(n_params=2, drift=0, channels=tuple(wiring), fixed_terms=()),
    )
    spec = UncertaintySpec(
        params=(UncertaintyParam(0.2, 5), UncertaintyParam(0.2, 5)),
        test_distribution=Distribution.TRUNCATED_GAUSSIAN,
    )
    cfg = TrainConfig(step_size=0.01, max_iters=200_000, log_stride=100)
    return problem, spec, cfg


_BUILDERS = {
    "two_level_hadamard": _two_level_hadamard,
    "three_level_u33": _three_level_u33,
    "sc_swap": lambda: _superconducting(SWAP, "sc_swap"),
    "sc_cphase": lambda: _superconducting(CPHASE, "sc_cphase"),
    "sc_chadamard": lambda: _superconducting(CHADAMARD, "sc_chadamard"),
    "spin_ccnot_4": lambda: _spin_ccnot(4),
    "spin_ccnot_6": lambda: _spin_ccnot(6),
}

NOTES = {
    "two_level_hadamard": (
        "demo system for the robustness scan; T=2, N=20 and the 3*sin(t) seed "
        "are package choices (seed picked so the nominal optimum is visibly "
        "non-robust)"
    ),
    "three_level_u33": "reference setup (T=8, N=40, E=0.2, bounds [-5,5]); no assumed values",
    "sc_swap": "reference setup (T=8 ns, N=40, E=0.1); iteration budget is a package default",
    "sc_cphase": "reference setup (T=8 ns, N=40, E=0.1); iteration budget is a package default",
    "sc_chadamard": "reference setup (T=8 ns, N=40, E=0.1); iteration budget is a package default",
    "spin_ccnot_4": (
        "N=40, bounds [-20,20] and E=0.2 are assumed package defaults; "
        "T=20 and step size 0.01 from the reference setup"
    ),
    "spin_ccnot_6": (
        "N=40, bounds [-20,20] and E=0.2 are assumed package defaults; "
        "T=20 and step size 0.01 from the reference setup"
    ),
}


def preset_names() -> list[str]:
    return list(_BUILDERS)


def preset(name: str):
    """Build a named preset: (ControlProblem, UncertaintySpec, TrainConfig)."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(_BUILDERS)}") from None
    return builder()
