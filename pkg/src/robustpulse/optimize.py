"""Gradient-flow pulse training over sampled uncertainties, and testing.

The training objective per sample is the squared trace overlap
Phi = |tr(U_F^dag U(T))|^2.  With the forward chain A_j = U_j ... U_1 and the
backward chain B_j = U_{j+1}^dag ... U_L^dag U_F, the first-order gradient of
Phi in the amplitude of channel m during slice j is

    -2 Re{ tr(B_j^dag (i dt eps_m H_m) A_j) * tr(A_j^dag B_j) },

where eps_m is the sample's multiplicative factor on that channel and dt the
slice duration (half the interval under the alternating scheme, in which a
channel contributes only during its own half).  Training ascends the mean of
this gradient over a fixed sample list, hard-clamping into channel bounds
after every step; reported fidelities use |tr|/D.

Everything reduces in fixed order over samples, so a given (problem, samples,
config) triple yields bitwise-identical results on every run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, Diverged
from .linalg import expm_neg_i_stack
from .model import (
    ControlField,
    ControlProblem,
    UncertaintySample,
    channel_slice_positions,
    propagate_batch,
    samples_matrix,
    slice_dt,
    slice_hamiltonians,
)


@dataclass(frozen=True)
class TrainConfig:
    """Gradient-ascent settings.

    ``plateau_tol``/``plateau_window`` stop a run early when the best logged
    training fidelity improved by less than the tolerance over the last
    ``plateau_window`` logged points; set ``plateau_tol=0`` to disable.
    ``max_iters=0`` evaluates the seed field without updating it.
    """

    step_size: float = 0.1
    max_iters: int = 10_000
    log_stride: int = 1
    plateau_tol: float = 1e-7
    plateau_window: int = 10_000

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.log_stride < 1:
            raise ValueError("log_stride must be >= 1")
        if self.plateau_tol < 0:
            raise ValueError("plateau_tol must be >= 0")


@dataclass(frozen=True)
class TrainResult:
    learned: ControlField
    fidelity_trace: tuple[tuple[int, float], ...]
    per_sample_final: tuple[float, ...]
    iterations_run: int
    wall_time: float
    stopped_by: str = "max_iters"  # or "plateau"


@dataclass(frozen=True)
class TestReport:
    fidelities: tuple[float, ...]
    mean: float
    min: float
    max: float
    std: float
    histogram_counts: tuple[int, ...]
    histogram_edges: tuple[float, ...]


def forward_backward(slices, final: np.ndarray, target: np.ndarray):
    """Forward/backward propagator chains for one slice sequence.

    ``A[j] = slices[j] ... slices[0]`` and
    ``B[j] = slices[j+1]^dag ... slices[-1]^dag target`` (0-based lists), so
    ``A[-1] = final`` and ``tr(B[j]^dag A[j])`` is j-independent.
    """
    slices = list(slices)
    if not slices:
        raise DimMismatch("need at least one slice")
    d = target.shape[0]
    for s in slices:
        if s.shape != (d, d):
            raise DimMismatch("slice dimension differs from target")
    if final.shape != (d, d):
        raise DimMismatch("final dimension differs from target")
    a = [slices[0]]
    for s in slices[1:]:
        a.append(s @ a[-1])
    b = [target]
    for s in reversed(slices[1:]):
        b.append(s.conj().T @ b[-1])
    b.reverse()
    return a, b


def _chains(units: np.ndarray, target: np.ndarray):
    """Batched A/B chains over an (X, L, D, D) propagator stack."""
    x, l = units.shape[:2]
    a = np.empty_like(units)
    a[:, 0] = units[:, 0]
    for i in range(1, l):
        a[:, i] = np.matmul(units[:, i], a[:, i - 1])
    b = np.empty_like(units)
    b[:, l - 1] = target
    for i in range(l - 1, 0, -1):
        b[:, i - 1] = np.matmul(units[:, i].conj().swapaxes(-1, -2), b[:, i])
    return a, b


def _eps_channel_columns(p: ControlProblem, eps_mat: np.ndarray) -> list[np.ndarray]:
    ones = np.ones(eps_mat.shape[0])
    return [ones if i is None else eps_mat[:, i] for i in p.uncertainty.channels]


def _gradient_tables(p: ControlProblem, amplitudes: np.ndarray, eps_mat: np.ndarray):
    """Per-sample gradient tables (X, M, N), fidelities (X,), finals."""
    h = slice_hamiltonians(p, amplitudes, eps_mat)
    units = expm_neg_i_stack(h, slice_dt(p))
    a, b = _chains(units, p.target)
    final = a[:, -1]
    overlap = np.einsum('ab,xab->x', p.target.conj(), final)  # tr(U_F^dag U(T))
    fidelities = np.abs(overlap) / p.dim
    dt_eff = slice_dt(p)
    chan_cols = _eps_channel_columns(p, eps_mat)
    x = eps_mat.shape[0]
    grads = np.empty((x, p.n_controls, p.slices))
    trailing = overlap.conj()[:, None]  # tr(A_j^dag B_j), j-independent
    for m, ch in enumerate(p.controls):
        pos = channel_slice_positions(p, m)
        ha = np.matmul(ch.operator, a[:, pos])
        t1 = np.einsum('xlab,xlab->xl', b[:, pos].conj(), ha)  # tr(B^dag H_m A)
        grads[:, m] = -2.0 * np.real(1j * dt_eff * chan_cols[m][:, None] * t1 * trailing)
    return grads, fidelities, final


def sample_gradient(p: ControlProblem, u: ControlField, s: UncertaintySample) -> np.ndarray:
    """First-order gradient of Phi for a single uncertainty sample (M x N)."""
    eps_mat = samples_matrix([s], p.uncertainty.n_params)
    grads, _, _ = _gradient_tables(p, u.amplitudes, eps_mat)
    return grads[0]


def averaged_gradient(p: ControlProblem, u: ControlField, samples) -> np.ndarray:
    """Mean of sample gradients over a nonempty sample list, fixed order."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    eps_mat = samples_matrix(samples, p.uncertainty.n_params)
    grads, _, _ = _gradient_tables(p, u.amplitudes, eps_mat)
    return grads.mean(axis=0)


def train(p: ControlProblem, samples, cfg: TrainConfig,
          initial: ControlField | None = None) -> TrainResult:
    """Clamped gradient ascent of the average fidelity over the sample list.

    The seed field comes from the channel profiles unless ``initial`` is
    given (e.g. to resume a previous run).  The fidelity trace records
    iteration 0, every ``log_stride``-th iteration and the final one; the
    last entry always describes the returned field.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one training sample")
    eps_mat = samples_matrix(samples, p.uncertainty.n_params)
    u = p.clamp((initial if initial is not None else p.initial_field()).amplitudes)

    trace: list[tuple[int, float]] = []
    best_log: list[float] = []  # best-so-far at each logged point
    stopped_by = "max_iters"
    fidelities = None
    t0 = time.perf_counter()
    k = 0
    while True:
        grads, fidelities, _ = _gradient_tables(p, u, eps_mat)
        avg = float(np.mean(fidelities))
        if not np.isfinite(avg):
            raise Diverged(f"average fidelity became non-finite at iteration {k}")
        logged = k % cfg.log_stride == 0 or k == cfg.max_iters
        if logged:
            trace.append((k, avg))
            best_log.append(max(best_log[-1], avg) if best_log else avg)
            if (cfg.plateau_tol > 0 and len(best_log) > cfg.plateau_window
                    and best_log[-1] - best_log[-1 - cfg.plateau_window] < cfg.plateau_tol):
                stopped_by = "plateau"
                break
        if k == cfg.max_iters:
            break
        u = p.clamp(u + cfg.step_size * grads.mean(axis=0))
        k += 1

    return TrainResult(
        learned=ControlField(u, p),
        fidelity_trace=tuple(trace),
        per_sample_final=tuple(float(f) for f in fidelities),
        iterations_run=k,
        wall_time=time.perf_counter() - t0,
        stopped_by=stopped_by,
    )


def test(p: ControlProblem, u: ControlField, samples, bins: int = 50) -> TestReport:
    """Per-sample fidelities of a pulse over a testing ensemble.

    The histogram uses ``bins`` uniform bins over [min fidelity, 1].
    """
    samples = list(samples)
    eps_mat = samples_matrix(samples, p.uncertainty.n_params)
    finals, _ = propagate_batch(p, u.amplitudes, eps_mat)
    overlap = np.einsum('ab,xab->x', p.target.conj(), finals)
    fids = np.abs(overlap) / p.dim
    counts, edges = np.histogram(fids, bins=bins, range=(float(fids.min()), 1.0))
    return TestReport(
        fidelities=tuple(float(f) for f in fids),
        mean=float(fids.mean()),
        min=float(fids.min()),
        max=float(fids.max()),
        std=float(fids.std()),
        histogram_counts=tuple(int(c) for c in counts),
        histogram_edges=tuple(float(e) for e in edges),
    )


def amplitude_stats(u: ControlField | np.ndarray) -> tuple[float, float]:
    """(max |u|, mean |u|) over all channels and slices."""
    amps = u.amplitudes if isinstance(u, ControlField) else np.asarray(u, dtype=float)
    if amps.size == 0:
        return 0.0, 0.0
    mags = np.abs(amps)
    return float(mags.max()), float(mags.mean())
