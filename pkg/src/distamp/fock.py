"""Single-mode field states in the photon-number basis.

Coherent, Gaussian-approximated coherent and number-squeezed states, plus
their wavefunctions on a quadrature grid. Units are dimensionless
(hbar = omega = 1) and ``x`` is the dimensionless field quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, GridTooNarrow, TruncationTooSmall

NORM_TOL = 1e-12
TAIL_TOL = 1e-8
TAIL_WIDTH = 5


class ValidityWarning(UserWarning):
    """An approximation is being used outside its validity window."""


def default_n_max(n0: float) -> int:
    return int(math.ceil(n0 + 10.0 * math.sqrt(n0 + 1.0)))


@dataclass(frozen=True)
class CoherentSpec:
    """Coherent state with ``|alpha|^2 = n0``.

    With ``homodyne_convention`` the amplitude is ``i * sqrt(n0) * e^{i phi}``,
    i.e. the phase is offset by pi/2 so that ``phi = 0`` puts the
    wavefunction peak at ``x = 0``.
    """

    n0: float
    phi: float = 0.0
    homodyne_convention: bool = False

    def __post_init__(self):
        if not self.n0 >= 0:
            raise DomainError(f"n0 must be non-negative, got {self.n0}")

    @property
    def phase(self) -> float:
        return self.phi + (math.pi / 2 if self.homodyne_convention else 0.0)

    @property
    def alpha(self) -> complex:
        return math.sqrt(self.n0) * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class SqueezedNumberSpec:
    n_bar: float
    sigma_n_tilde: float
    phi: float = 0.0
    homodyne_convention: bool = False

    def __post_init__(self):
        if not self.sigma_n_tilde > 0:
            raise DomainError(f"sigma_n_tilde must be positive, got {self.sigma_n_tilde}")
        if self.n_bar < 0:
            raise DomainError(f"n_bar must be non-negative, got {self.n_bar}")
        if self.sigma_n_tilde > math.sqrt(2.0 * self.n_bar) + 1e-9:
            raise DomainError("sigma_n_tilde exceeds the coherent width sqrt(2 n_bar)")

    @property
    def phase(self) -> float:
        return self.phi + (math.pi / 2 if self.homodyne_convention else 0.0)


@dataclass(frozen=True)
class QuadratureGrid:
    x_min: float
    x_max: float
    count: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise DomainError("x_min must be below x_max")
        if self.count < 2:
            raise DomainError("grid needs at least two points")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.count - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.count)

    @classmethod
    def symmetric(cls, half_width: float, count: int) -> "QuadratureGrid":
        return cls(-half_width, half_width, count)


@dataclass(frozen=True, eq=False)
class FockVector:
    """Normalized amplitudes over photon numbers ``0..n_max``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.ndim != 1 or a.size == 0:
            raise DomainError("amplitudes must be a non-empty vector")
        if abs(np.vdot(a, a).real - 1.0) > 1e-10:
            raise DomainError("FockVector amplitudes must be normalized")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tail_mass(self, width: int = TAIL_WIDTH) -> float:
        return float(self.probabilities()[max(self.n_max - width + 1, 0):].sum())

    def inner(self, other: "FockVector") -> complex:
        """``<self|other>``; dimensions must match."""
        if other.dim != self.dim:
            raise DomainError("dimension mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def resized(self, n_max: int) -> "FockVector":
        """Zero-pad, or drop a negligible tail, to a new cutoff."""
        a = np.zeros(n_max + 1, np.complex128)
        k = min(n_max, self.n_max) + 1
        a[:k] = self.amplitudes[:k]
        return _finish(a, check_tail=n_max < self.n_max)

    @classmethod
    def number_state(cls, n: int, n_max: int) -> "FockVector":
        if not 0 <= n <= n_max:
            raise DomainError("photon number outside the basis")
        a = np.zeros(n_max + 1, np.complex128)
        a[n] = 1.0
        return cls(a)

    @classmethod
    def from_array(cls, amplitudes, normalize: bool = True) -> "FockVector":
        a = np.asarray(amplitudes, dtype=np.complex128)
        if normalize:
            a = a / np.linalg.norm(a)
        return cls(a)


def _finish(a: np.ndarray, check_tail: bool = True) -> FockVector:
    norm = np.linalg.norm(a)
    if norm == 0:
        raise TruncationTooSmall("no amplitude inside the truncated basis")
    a = a / norm
    if check_tail:
        tail = float(np.sum(np.abs(a[max(a.size - TAIL_WIDTH, 0):]) ** 2))
        if tail >= TAIL_TOL:
            raise TruncationTooSmall(
                f"tail mass {tail:.3g} above {TAIL_TOL:g} at n_max={a.size - 1}")
    return FockVector(a)


def _phase_factors(n: np.ndarray, phase: float) -> np.ndarray:
    return np.exp(1j * phase * n)


def coherent_exact(spec: CoherentSpec, n_max: int | None = None) -> FockVector:
    """Poissonian amplitudes ``e^{-n0/2} alpha^n / sqrt(n!)`` in log space."""
    if n_max is None:
        n_max = default_n_max(spec.n0)
    n = np.arange(n_max + 1)
    if spec.n0 == 0:
        a = np.zeros(n_max + 1, np.complex128)
        a[0] = 1.0
        return _finish(a)
    log_mod = -0.5 * spec.n0 + n * 0.5 * math.log(spec.n0) - 0.5 * gammaln(n + 1)
    return _finish(np.exp(log_mod) * _phase_factors(n, spec.phase))


def coherent_gaussian(spec: CoherentSpec, n_max: int | None = None) -> FockVector:
    """Large-amplitude Gaussian form of a coherent state, width ``sqrt(2 n0)``."""
    if spec.n0 < 10:
        raise DomainError("Gaussian coherent form needs n0 >= 10")
    sigma = math.sqrt(2.0 * spec.n0)
    return squeezed_number_state(
        SqueezedNumberSpec(spec.n0, sigma, spec.phi, spec.homodyne_convention), n_max)


def gaussian_amplitudes(n_bar: float, sigma: float, phase: float, n_max: int) -> np.ndarray:
    """Unnormalized ``e^{i n phase} e^{-(n - n_bar)^2 / 2 sigma^2}`` on ``0..n_max``.

    No validation: used for mixture components whose centers may sit close
    to the vacuum.
    """
    n = np.arange(n_max + 1)
    return (np.pi ** -0.25 / math.sqrt(sigma)) * np.exp(
        -((n - n_bar) ** 2) / (2.0 * sigma * sigma)) * _phase_factors(n, phase)


def squeezed_number_state(spec: SqueezedNumberSpec, n_max: int | None = None) -> FockVector:
    """Gaussian-in-n state with amplitude width ``sigma_n_tilde``, renormalized."""
    if spec.n_bar < 10:
        raise DomainError("number-squeezed form needs n_bar >= 10")
    if n_max is None:
        n_max = default_n_max(spec.n_bar)
    return _finish(gaussian_amplitudes(spec.n_bar, spec.sigma_n_tilde, spec.phase, n_max))


def number_distribution(state: FockVector) -> np.ndarray:
    return state.probabilities()


def number_moments(p: np.ndarray) -> tuple[float, float]:
    """Mean and variance of a photon-number distribution."""
    n = np.arange(p.size)
    mean = float(p @ n)
    return mean, float(p @ (n - mean) ** 2)


def hermite_functions(x, n_max: int) -> np.ndarray:
    """Normalized oscillator eigenfunctions ``h_0..h_{n_max}`` at ``x``.

    Uses the upward three-term recurrence on the normalized functions. The
    Gaussian factor is carried as a separate exponent and the running values
    are rescaled when they grow large, so nothing under- or overflows for
    large ``|x|``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty((n_max + 1, x.size))
    expo = -0.5 * x * x
    prev = np.zeros_like(x)
    cur = np.full_like(x, np.pi ** -0.25)
    out[0] = cur * np.exp(expo)
    for n in range(n_max):
        nxt = math.sqrt(2.0 / (n + 1)) * x * cur - math.sqrt(n / (n + 1.0)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if big.any():
            scale = np.where(big, np.abs(cur), 1.0)
            cur = cur / scale
            prev = prev / scale
            expo = expo + np.log(scale)
        out[n + 1] = cur * np.exp(expo)
    return out


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """Complex samples of psi(x) on a uniform grid."""

    grid: QuadratureGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.count,):
            raise DomainError("values do not match the grid")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def abs2(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        """Trapezoidal estimate of the integral of ``|psi|^2``."""
        return float(np.trapezoid(self.abs2, dx=self.grid.spacing))

    def normalized(self) -> "Wavefunction":
        return Wavefunction(self.grid, self.values / math.sqrt(self.norm()))

    def inner(self, other: "Wavefunction") -> complex:
        """Trapezoidal ``integral conj(self) * other``."""
        if other.grid != self.grid:
            raise DomainError("grids differ")
        return complex(np.trapezoid(np.conj(self.values) * other.values, dx=self.grid.spacing))

    def l2_distance(self, other: "Wavefunction", window: float | None = None) -> float:
        mask = np.ones(self.grid.count, bool) if window is None else np.abs(self.x) <= window
        diff = np.abs(self.values - other.values) ** 2
        return float(math.sqrt(np.trapezoid(diff[mask], self.x[mask])))


def coordinate_wavefunction(state: FockVector, grid: QuadratureGrid) -> Wavefunction:
    """``psi(x) = sum_n a_n h_n(x)``."""
    h = hermite_functions(grid.x, state.n_max)
    wf = Wavefunction(grid, state.amplitudes @ h)
    if abs(wf.norm() - 1.0) > 1e-4:
        raise GridTooNarrow(f"quadrature norm {wf.norm():.6f} on [{grid.x_min}, {grid.x_max}]")
    return wf


def coherent_wavefunction_closed(alpha0: float, phi: float, grid: QuadratureGrid,
                                 variant: str = "full") -> Wavefunction:
    """Closed-form wavefunction of the coherent state ``alpha = i alpha0 e^{i phi}``.

    ``variant="full"`` is exact. ``variant="small_phi"`` expands to first
    order in ``phi``: a unit-width Gaussian at ``-sqrt(2) alpha0 phi`` carrying
    the plane wave ``e^{i sqrt(2) alpha0 x}`` and the global phase
    ``e^{i alpha0^2 phi}``. It warns when ``|phi| alpha0 > 0.5``.
    """
    x = grid.x
    if variant == "full":
        center = -math.sqrt(2.0) * alpha0 * math.sin(phi)
        k = math.sqrt(2.0) * alpha0 * math.cos(phi)
        offset = 0.5 * alpha0 * alpha0 * math.sin(2.0 * phi)
    elif variant == "small_phi":
        if abs(phi) * alpha0 > 0.5:
            warnings.warn(f"small-phase form used at |phi| alpha0 = {abs(phi) * alpha0:.3g}",
                          ValidityWarning, stacklevel=2)
        center = -math.sqrt(2.0) * alpha0 * phi
        k = math.sqrt(2.0) * alpha0
        offset = alpha0 * alpha0 * phi
    else:
        raise DomainError(f"unknown variant {variant!r}")
    psi = np.pi ** -0.25 * np.exp(-0.5 * (x - center) ** 2 + 1j * (k * x + offset))
    return Wavefunction(grid, psi)
