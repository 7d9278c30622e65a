"""Control problems and piecewise-constant propagation.

A :class:`ControlProblem` bundles the drift and control operators, the
multiplicative-uncertainty wiring, the time grid, per-channel bounds and the
target gate.  Propagation slices the horizon into N constant-control
intervals; each interval contributes exp(-i H_j dt).  Under the alternating
x/y scheme every interval is split into two half-slices, the x-group channels
acting in the first half and the y-group in the second.

Uncertainties are multiplicative: each wired term is scaled by one entry of
the sample vector, drawn from [1-E, 1+E].  An all-ones sample reproduces the
nominal system exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import BadSliceIndex, DimMismatch, NotHermitian, NotUnitary, SchemeMismatch, ShapeMismatch
from .linalg import TOL_HERM, TOL_UNIT, as_operator, expm_neg_i_stack, gate_fidelity, is_hermitian, is_unitary


class Scheme(enum.Enum):
    """How channels act within one time slice."""

    SIMULTANEOUS = "simultaneous"
    ALTERNATING_XY = "alternating_xy"


class Group(enum.Enum):
    """Half-interval assignment of a channel under the alternating scheme."""

    X = "x"
    Y = "y"
    NONE = "none"


class Half(enum.Enum):
    """Which portion of a slice an effective Hamiltonian describes."""

    FULL = "full"
    X = "x"
    Y = "y"


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class InitialProfile:
    """Named seed pulse: amplitude(t) = scale*sin(t) or a constant value."""

    shape: str = "sin"  # "sin" | "constant"
    scale: float = 1.0

    def __call__(self, t: np.ndarray) -> np.ndarray:
        if self.shape == "sin":
            return self.scale * np.sin(t)
        if self.shape == "constant":
            return np.full_like(np.asarray(t, dtype=float), self.scale)
        raise ValueError(f"unknown profile shape {self.shape!r}")


@dataclass(frozen=True)
class ControlChannel:
    """One tunable term u_m(t) * operator, with amplitude bounds."""

    operator: np.ndarray
    bounds: tuple[float, float] = (-5.0, 5.0)
    group: Group = Group.NONE
    profile: InitialProfile = field(default_factory=InitialProfile)

    def __post_init__(self):
        op = as_operator(self.operator)
        if not is_hermitian(op, TOL_HERM):
            raise NotHermitian("channel operator must be Hermitian")
        object.__setattr__(self, "operator", _frozen(op))
        lo, hi = self.bounds
        if not lo < hi:
            raise ValueError(f"bounds must satisfy lo < hi, got {self.bounds}")


@dataclass(frozen=True)
class UncertaintyWiring:
    """Which sample entry scales the drift, each channel and each fixed term.

    ``None`` means the term carries no uncertainty (factor exactly 1).
    Indices refer to positions in the sample vector; ``n_params`` is its
    length.
    """

    n_params: int
    drift: int | None = None
    channels: tuple[int | None, ...] = ()
    fixed_terms: tuple[int | None, ...] = ()

    def __post_init__(self):
        for idx in (self.drift, *self.channels, *self.fixed_terms):
            if idx is not None and not 0 <= idx < self.n_params:
                raise ValueError(f"uncertainty index {idx} out of range for {self.n_params} parameters")


@dataclass(frozen=True)
class UncertaintySample:
    """One realization of the multiplicative uncertainty vector."""

    eps: tuple[float, ...]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.eps, dtype=float)


def samples_matrix(samples, n_params: int) -> np.ndarray:
    """Stack samples into an (X, n_params) float matrix."""
    rows = []
    for s in samples:
        row = np.asarray(s.eps if isinstance(s, UncertaintySample) else s, dtype=float)
        if row.shape != (n_params,):
            raise ShapeMismatch(f"sample has {row.shape} entries, expected ({n_params},)")
        rows.append(row)
    if not rows:
        return np.empty((0, n_params))
    return np.stack(rows)


@dataclass(frozen=True)
class ControlProblem:
    """Full definition of a pulse-synthesis problem."""

    drift: np.ndarray
    controls: tuple[ControlChannel, ...]
    horizon: float
    slices: int
    target: np.ndarray
    uncertainty: UncertaintyWiring
    drift_coeff: float = 1.0
    fixed_terms: tuple[tuple[float, np.ndarray], ...] = ()
    scheme: Scheme = Scheme.SIMULTANEOUS
    name: str = ""

    def __post_init__(self):
        drift = as_operator(self.drift)
        target = as_operator(self.target)
        d = drift.shape[0]
        if not is_hermitian(drift, TOL_HERM):
            raise NotHermitian("drift must be Hermitian")
        if target.shape != drift.shape:
            raise DimMismatch("target dimension differs from drift")
        if not is_unitary(target, TOL_UNIT):
            raise NotUnitary("target must be unitary")
        for ch in self.controls:
            if ch.operator.shape != (d, d):
                raise DimMismatch("channel operator dimension differs from drift")
        fixed = []
        for coeff, op in self.fixed_terms:
            op = as_operator(op)
            if op.shape != (d, d):
                raise DimMismatch("fixed-term operator dimension differs from drift")
            if not is_hermitian(op, TOL_HERM):
                raise NotHermitian("fixed-term operator must be Hermitian")
            fixed.append((float(coeff), _frozen(op)))
        if self.slices < 1:
            raise ValueError("slices must be >= 1")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if len(self.uncertainty.channels) != len(self.controls):
            raise ValueError("wiring must list one entry per channel")
        if len(self.uncertainty.fixed_terms) != len(self.fixed_terms):
            raise ValueError("wiring must list one entry per fixed term")
        if self.scheme is Scheme.ALTERNATING_XY:
            if any(ch.group not in (Group.X, Group.Y) for ch in self.controls):
                raise SchemeMismatch("alternating scheme needs every channel in the x- or y-group")
        object.__setattr__(self, "drift", _frozen(drift))
        object.__setattr__(self, "target", _frozen(target))
        object.__setattr__(self, "controls", tuple(self.controls))
        object.__setattr__(self, "fixed_terms", tuple(fixed))

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    @property
    def n_controls(self) -> int:
        return len(self.controls)

    @property
    def dt(self) -> float:
        return self.horizon / self.slices

    def midpoints(self) -> np.ndarray:
        """Slice midpoints t_j = (j - 1/2) dt, where seed profiles are sampled."""
        return (np.arange(self.slices) + 0.5) * self.dt

    def bounds_lo_hi(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([ch.bounds[0] for ch in self.controls])
        hi = np.array([ch.bounds[1] for ch in self.controls])
        return lo, hi

    def clamp(self, amplitudes: np.ndarray) -> np.ndarray:
        lo, hi = self.bounds_lo_hi()
        return np.clip(amplitudes, lo[:, None], hi[:, None])

    def initial_field(self) -> "ControlField":
        """Seed pulse table from each channel's profile, clamped into bounds."""
        t = self.midpoints()
        amps = np.stack([ch.profile(t) for ch in self.controls]) if self.controls \
            else np.empty((0, self.slices))
        return ControlField(self.clamp(amps), self)

    def nominal_sample(self) -> UncertaintySample:
        return UncertaintySample((1.0,) * self.uncertainty.n_params)


@dataclass(frozen=True)
class ControlField:
    """M x N pulse-amplitude table bound to its problem."""

    amplitudes: np.ndarray
    problem: ControlProblem

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        m, n = self.problem.n_controls, self.problem.slices
        if amps.shape != (m, n):
            raise ShapeMismatch(f"amplitude table is {amps.shape}, problem needs ({m}, {n})")
        lo, hi = self.problem.bounds_lo_hi()
        if amps.size and (np.any(amps < lo[:, None] - 1e-12) or np.any(amps > hi[:, None] + 1e-12)):
            raise ValueError("amplitudes violate channel bounds")
        object.__setattr__(self, "amplitudes", _frozen(amps))


def _eps_columns(p: ControlProblem, eps_mat: np.ndarray):
    """Per-term multiplicative factors, shape (X,) each; 1 where unwired."""
    x = eps_mat.shape[0]
    ones = np.ones(x)

    def col(idx):
        return ones if idx is None else eps_mat[:, idx]

    drift_col = col(p.uncertainty.drift)
    chan_cols = [col(i) for i in p.uncertainty.channels]
    fixed_cols = [col(i) for i in p.uncertainty.fixed_terms]
    return drift_col, chan_cols, fixed_cols


def slice_hamiltonians(p: ControlProblem, amplitudes: np.ndarray, eps_mat: np.ndarray) -> np.ndarray:
    """Hamiltonian of every slice for a batch of samples.

    Returns an (X, L, D, D) stack where L = N for the simultaneous scheme and
    L = 2N (x-half, y-half interleaved) for the alternating scheme.
    """
    x = eps_mat.shape[0]
    n, d = p.slices, p.dim
    drift_col, chan_cols, fixed_cols = _eps_columns(p, eps_mat)
    base = drift_col[:, None, None] * (p.drift_coeff * p.drift)
    for (coeff, op), fc in zip(p.fixed_terms, fixed_cols):
        base = base + fc[:, None, None] * (coeff * op)

    def add_channels(h, members):
        for m in members:
            h += chan_cols[m][:, None, None, None] * amplitudes[m][None, :, None, None] * p.controls[m].operator
        return h

    if p.scheme is Scheme.SIMULTANEOUS:
        h = np.broadcast_to(base[:, None], (x, n, d, d)).copy()
        return add_channels(h, range(p.n_controls))

    hx = np.broadcast_to(base[:, None], (x, n, d, d)).copy()
    hy = hx.copy()
    add_channels(hx, [m for m, ch in enumerate(p.controls) if ch.group is Group.X])
    add_channels(hy, [m for m, ch in enumerate(p.controls) if ch.group is Group.Y])
    h = np.empty((x, 2 * n, d, d), dtype=np.complex128)
    h[:, 0::2] = hx
    h[:, 1::2] = hy
    return h


def slice_dt(p: ControlProblem) -> float:
    """Duration of one propagator slice (half the interval when alternating)."""
    return p.dt if p.scheme is Scheme.SIMULTANEOUS else p.dt / 2.0


def channel_slice_positions(p: ControlProblem, m: int) -> slice:
    """Positions within the L-slice chain where channel m is active."""
    if p.scheme is Scheme.SIMULTANEOUS:
        return slice(None)
    return slice(0, None, 2) if p.controls[m].group is Group.X else slice(1, None, 2)


def effective_hamiltonian(p: ControlProblem, u: ControlField, s: UncertaintySample,
                          j: int, half: Half = Half.FULL) -> np.ndarray:
    """Hamiltonian governing slice j (1-based) for one uncertainty sample.

    ``half`` must be FULL exactly when the scheme is simultaneous; under the
    alternating scheme it selects the x- or y-half of the interval.
    """
    if not 1 <= j <= p.slices:
        raise BadSliceIndex(f"slice index {j} outside 1..{p.slices}")
    if (half is Half.FULL) != (p.scheme is Scheme.SIMULTANEOUS):
        raise SchemeMismatch(f"half={half.value} invalid for scheme={p.scheme.value}")
    eps_mat = samples_matrix([s], p.uncertainty.n_params)
    h = slice_hamiltonians(p, u.amplitudes, eps_mat)
    if p.scheme is Scheme.SIMULTANEOUS:
        return h[0, j - 1]
    return h[0, 2 * (j - 1) + (0 if half is Half.X else 1)]


def propagate_batch(p: ControlProblem, amplitudes: np.ndarray, eps_mat: np.ndarray):
    """Slice propagators and final unitaries for a batch of samples.

    Returns ``(finals, slice_unitaries)`` with shapes (X, D, D) and
    (X, L, D, D); ``slice_unitaries[:, l]`` is applied after
    ``slice_unitaries[:, l-1]``.
    """
    h = slice_hamiltonians(p, amplitudes, eps_mat)
    units = expm_neg_i_stack(h, slice_dt(p))
    finals = units[:, 0]
    for l in range(1, units.shape[1]):
        finals = np.matmul(units[:, l], finals)
    return finals, units


def propagate(p: ControlProblem, u: ControlField, s: UncertaintySample):
    """Evolve U(0)=I under the pulse table for one uncertainty sample.

    Returns ``(final, slices)`` where ``slices`` is the list of per-slice
    unitaries in application order (length N, or 2N when alternating) and
    ``final`` is their ordered product.
    """
    if u.amplitudes.shape != (p.n_controls, p.slices):
        raise ShapeMismatch("field shape does not match problem")
    eps_mat = samples_matrix([s], p.uncertainty.n_params)
    finals, units = propagate_batch(p, u.amplitudes, eps_mat)
    return finals[0], [units[0, l] for l in range(units.shape[1])]


def robustness_scan(p: ControlProblem, u: ControlField, grid) -> list[tuple[UncertaintySample, float]]:
    """Gate fidelity of the pulse at each uncertainty sample, order preserved."""
    grid = list(grid)
    eps_mat = samples_matrix(grid, p.uncertainty.n_params)
    if eps_mat.shape[0] == 0:
        return []
    finals, _ = propagate_batch(p, u.amplitudes, eps_mat)
    out = []
    for s, f in zip(grid, finals):
        sample = s if isinstance(s, UncertaintySample) else UncertaintySample(tuple(np.asarray(s, dtype=float)))
        out.append((sample, gate_fidelity(p.target, f)))
    return out
