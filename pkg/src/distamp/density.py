"""Density matrices over a truncated Fock basis, and state metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import DomainError, InvariantViolation
from .fock import FockVector

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace matrix ``rho[n, n']``.

    Construction checks Hermiticity and trace. Positivity costs an
    eigendecomposition and is checked on demand with :meth:`validate`.
    """

    elements: np.ndarray

    def __post_init__(self):
        m = np.array(self.elements, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("density matrix must be square")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.conj().T).max() > HERMITIAN_TOL * scale:
            raise InvariantViolation("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"trace {np.trace(m).real!r} differs from 1")
        m.setflags(write=False)
        object.__setattr__(self, "elements", m)

    @classmethod
    def from_pure(cls, state: FockVector) -> "DensityMatrix":
        a = state.amplitudes
        return cls(np.outer(a, a.conj()))

    @classmethod
    def normalized(cls, m: np.ndarray) -> "DensityMatrix":
        """Symmetrize and rescale to unit trace."""
        m = np.asarray(m, dtype=np.complex128)
        m = 0.5 * (m + m.conj().T)
        return cls(m / np.trace(m).real)

    @property
    def n_max(self) -> int:
        return self.elements.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def diagonal(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()

    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def purity(self) -> float:
        m = self.elements
        return float(np.vdot(m, m).real)

    def min_eigenvalue(self) -> float:
        return float(eigh(self.elements, eigvals_only=True)[0])

    def validate(self) -> "DensityMatrix":
        lo = self.min_eigenvalue()
        if lo < -PSD_TOL:
            raise InvariantViolation(f"negative eigenvalue {lo:.3g}")
        return self

    def number_moments(self) -> tuple[float, float]:
        p = self.diagonal()
        n = np.arange(p.size)
        mean = float(p @ n)
        return mean, float(p @ (n - mean) ** 2)

    def top_population(self) -> float:
        return float(self.elements[-1, -1].real)

    def resized(self, n_max: int) -> "DensityMatrix":
        """Zero-pad to a larger cutoff."""
        if n_max < self.n_max:
            raise DomainError("can only enlarge the basis")
        m = np.zeros((n_max + 1, n_max + 1), np.complex128)
        m[:self.dim, :self.dim] = self.elements
        return DensityMatrix(m)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    if rho.dim != sigma.dim:
        raise DomainError("dimension mismatch")
    s = _psd_sqrt(rho.elements)
    w = eigh(s @ sigma.elements @ s, eigvals_only=True)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


def fidelity_pure(state: FockVector, rho: DensityMatrix) -> float:
    """``<psi|rho|psi>``."""
    a = state.amplitudes
    if a.size != rho.dim:
        raise DomainError("dimension mismatch")
    return float(np.vdot(a, rho.elements @ a).real)
