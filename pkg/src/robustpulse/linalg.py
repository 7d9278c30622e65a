"""Dense complex linear algebra used throughout the package.

Operators, propagators and target gates are plain ``numpy.ndarray`` of
``complex128``.  Everything here is a pure function; matrices are small
(dimension 8 at most in the shipped presets), so dense O(D^3) routines are
used without apology.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, NotHermitian, NotUnitary

TOL_HERM = 1e-10
TOL_UNIT = 1e-9


def as_operator(a) -> np.ndarray:
    """Coerce to a square complex128 matrix."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> bool:
    """True if max|A - A^dag| <= tol."""
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_unitary(u: np.ndarray, tol: float = TOL_UNIT) -> bool:
    """True if ||U^dag U - I||_F <= tol."""
    u = np.asarray(u)
    d = u.shape[0]
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(d)) <= tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the left factor indexes the coarse blocks."""
    return np.kron(as_operator(a), as_operator(b))


def expm_neg_i(h: np.ndarray, dt: float, tol_herm: float = TOL_HERM) -> np.ndarray:
    """exp(-i*h*dt) for Hermitian h, via eigendecomposition.

    h = V diag(w) V^dag gives exp(-i h dt) = V diag(exp(-i w dt)) V^dag,
    which is unitary up to rounding.  Raises NotHermitian if h is not
    Hermitian within ``tol_herm``.
    """
    h = as_operator(h)
    if not is_hermitian(h, tol_herm):
        raise NotHermitian("generator is not Hermitian within tolerance")
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * dt)
    return (v * phases) @ v.conj().T


def expm_neg_i_stack(h: np.ndarray, dt: float) -> np.ndarray:
    """Batched exp(-i*h*dt) over a (..., D, D) stack of Hermitian matrices.

    No hermiticity check; callers are responsible for the precondition.
    """
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * dt)
    return np.matmul(v * phases[..., None, :], v.conj().swapaxes(-1, -2))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a^dag b)."""
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise DimMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")
    # tr(a^dag b) = sum_ij conj(a_ij) b_ij
    return complex(np.sum(a.conj() * b))


def gate_fidelity(target: np.ndarray, achieved: np.ndarray,
                  tol_unit: float = TOL_UNIT) -> float:
    """Global-phase-invariant gate fidelity (1/D)|tr(target^dag achieved)|.

    Both arguments must be unitary within ``tol_unit``.  The value lies in
    [0, 1] by Cauchy-Schwarz.
    """
    target = as_operator(target)
    achieved = as_operator(achieved)
    if target.shape != achieved.shape:
        raise DimMismatch(f"dimension mismatch: {target.shape} vs {achieved.shape}")
    if not is_unitary(target, tol_unit):
        raise NotUnitary("target is not unitary within tolerance")
    if not is_unitary(achieved, tol_unit):
        raise NotUnitary("achieved operator is not unitary within tolerance")
    d = target.shape[0]
    return float(abs(hs_inner(target, achieved)) / d)


def phi_objective(target: np.ndarray, achieved: np.ndarray) -> float:
    """Squared trace overlap |tr(target^dag achieved)|^2.

    The quantity whose gradient drives the pulse updates; equals
    (D * gate_fidelity)^2 for unitary arguments, but is defined for any
    pair of equal-dimension matrices.
    """
    return float(abs(hs_inner(target, achieved)) ** 2)
