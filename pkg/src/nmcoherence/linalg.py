"""Small complex Hermitian linear algebra.

All routines accept a single ``(d, d)`` matrix or a stack ``(..., d, d)`` and
broadcast over the leading axes. Qubits go through closed-form expressions;
larger dimensions fall back to LAPACK.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidExponent,
    NonHermitian,
    StateInvariantViolated,
)

HERMITIAN_TOL = 1e-10
STATE_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class EigenSystem(NamedTuple):
    """Descending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionMismatch(f"expected (..., d, d) matrix, got shape {m.shape}")
    return m


def hermiticity_defect(m) -> float:
    m = _as_square(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2)))))


def _fix_phase(vecs: np.ndarray) -> np.ndarray:
    # Rotate each column so its first non-negligible component is real positive.
    mags = np.abs(vecs)
    tol = 1e-12 * np.max(mags, axis=-2, keepdims=True)
    first = np.argmax(mags > tol, axis=-2)[..., None, :]
    lead = np.take_along_axis(vecs, first, axis=-2)
    phase = np.where(np.abs(lead) > 0, np.conj(lead) / np.where(lead == 0, 1, np.abs(lead)), 1.0)
    return vecs * phase


def _eig2(m: np.ndarray) -> EigenSystem:
    p = m[..., 0, 0].real
    r = m[..., 1, 1].real
    q = m[..., 0, 1]
    mean = 0.5 * (p + r)
    diff = 0.5 * (p - r)
    disc = np.hypot(diff, np.abs(q))
    vals = np.stack([mean + disc, mean - disc], axis=-1)

    # Pick the branch free of cancellation in the second component.
    upper = diff >= 0
    v0 = np.where(upper, disc + diff, q)
    v1 = np.where(upper, np.conj(q), disc - diff)
    norm = np.sqrt(np.abs(v0) ** 2 + np.abs(v1) ** 2)
    degenerate = norm == 0
    safe = np.where(degenerate, 1.0, norm)
    v0 = np.where(degenerate, 1.0, v0 / safe)
    v1 = np.where(degenerate, 0.0, v1 / safe)

    vecs = np.empty(m.shape, dtype=complex)
    vecs[..., 0, 0] = v0
    vecs[..., 1, 0] = v1
    vecs[..., 0, 1] = -np.conj(v1)
    vecs[..., 1, 1] = np.conj(v0)
    return EigenSystem(vals, _fix_phase(vecs))


def eig_hermitian(m, check: bool = True) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix (or stack of them).

    Eigenvalues come back in descending order. Each eigenvector column is
    normalised and phased so that its first nonzero component is real and
    positive.
    """
    m = _as_square(m)
    if check and hermiticity_defect(m) > HERMITIAN_TOL:
        raise NonHermitian(f"matrix not Hermitian (defect {hermiticity_defect(m):.3g})")
    if m.shape[-1] == 2:
        return _eig2(m)
    vals, vecs = np.linalg.eigh(m)
    return EigenSystem(vals[..., ::-1].copy(), _fix_phase(vecs[..., ::-1]))


def reconstruct(es: EigenSystem) -> np.ndarray:
    v = es.eigenvectors
    return (v * es.eigenvalues[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def spectral_power(m, exponent: float, check: bool = True) -> np.ndarray:
    """``sum_k max(lambda_k, 0)**exponent |v_k><v_k|`` with ``0**exponent = 0``."""
    es = eig_hermitian(m, check=check)
    lam = np.clip(es.eigenvalues, 0.0, None)
    powered = np.where(lam > 0, lam, 1.0) ** exponent
    powered = np.where(lam > 0, powered, 0.0)
    v = es.eigenvectors
    return (v * powered[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def mat_func(rho, exponent: float) -> np.ndarray:
    """Fractional power of a density matrix, ``exponent`` in (0, 2]."""
    if not (0.0 < exponent <= 2.0):
        raise InvalidExponent(f"exponent must lie in (0, 2], got {exponent!r}")
    return spectral_power(rho, exponent)


def trace_distance(rho1, rho2) -> np.ndarray | float:
    """Half the trace norm of ``rho1 - rho2``; broadcasts over stacks."""
    a = _as_square(rho1)
    b = _as_square(rho2)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatch(f"dimensions differ: {a.shape[-1]} vs {b.shape[-1]}")
    vals = eig_hermitian(a - b, check=False).eigenvalues
    out = 0.5 * np.sum(np.abs(vals), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def validate_state(m, tol: float = STATE_TOL) -> None:
    """Raise unless every matrix in the stack is a density matrix within ``tol``."""
    m = _as_square(m)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitian(f"state not Hermitian (defect {defect:.3g})")
    tr = np.trace(m, axis1=-2, axis2=-1)
    if np.any(np.abs(tr - 1) > tol):
        raise StateInvariantViolated(f"trace deviates from 1 by {np.max(np.abs(tr - 1)):.3g}")
    lam_min = eig_hermitian(m, check=False).eigenvalues[..., -1]
    if np.any(lam_min < -tol):
        raise StateInvariantViolated(f"negative eigenvalue {np.min(lam_min):.3g}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated Hermitian, unit-trace, positive semidefinite matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2:
            raise DimensionMismatch(f"DensityMatrix needs a single (d, d) matrix, got {m.shape}")
        validate_state(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def eig(self) -> EigenSystem:
        return eig_hermitian(self.matrix)

    @classmethod
    def from_pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def from_bloch(cls, r1: float, r2: float, r3: float) -> "DensityMatrix":
        return cls(0.5 * (IDENTITY2 + r1 * SIGMA_X + r2 * SIGMA_Y + r3 * SIGMA_Z))
