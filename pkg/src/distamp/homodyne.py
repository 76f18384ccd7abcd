"""Quadrature wavefunctions, homodyne distributions and cat-state visibility.

Branch amplitudes use ``alpha = i alpha0 e^{i phi}``, so ``phi = 0`` puts the
wavefunction peak at ``x = 0`` and a small ``phi`` shifts it to
``-sqrt(2) alpha0 phi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .analytic import EnvModel, SqueezeParams, solve_squeeze_params
from .density import DensityMatrix
from .errors import DegenerateOverlap, DomainError, GridTooNarrow, InvariantViolation
from .fock import (CoherentSpec, FockVector, QuadratureGrid, SqueezedNumberSpec, ValidityWarning,
                   Wavefunction, coherent_exact, coherent_wavefunction_closed, default_n_max,
                   hermite_functions, squeezed_number_state)

__all__ = [
    "CatSpec", "InterferenceReport", "Wavefunction", "cat_fock_state", "cat_interference_report",
    "cat_wavefunction", "coherent_overlap", "env_overlap", "quadrature_pdf",
    "single_state_approximation", "squeezed_branch_overlap", "squeezed_wavefunction_gaussian",
]

SMALL_PHI_GATE = 0.5
AGREEMENT_TOL = 1e-8


@dataclass(frozen=True)
class CatSpec:
    """Superposition of the coherent states at phases ``0`` and ``phi``."""

    alpha0: float
    phi: float

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise DomainError("alpha0 must be positive")


@dataclass(frozen=True)
class InterferenceReport:
    cross_term_initial: float
    cross_term_naive: float
    cross_term_entangled: float
    env_overlap: complex
    visibility_ratio: float

    def items(self):
        yield "cross_term_initial", self.cross_term_initial
        yield "cross_term_naive", self.cross_term_naive
        yield "cross_term_entangled", self.cross_term_entangled
        yield "env_overlap_re", self.env_overlap.real
        yield "env_overlap_im", self.env_overlap.imag
        yield "env_overlap_abs", abs(self.env_overlap)
        yield "visibility_ratio", self.visibility_ratio


def _gate(alpha0: float, phi: float) -> None:
    if abs(phi) * alpha0 > SMALL_PHI_GATE:
        warnings.warn(f"small-phase forms used at |phi| alpha0 = {abs(phi) * alpha0:.3g}",
                      ValidityWarning, stacklevel=3)


def _branch_geometry(alpha0: float, phi: float, variant: str):
    """Center, momentum and constant phase of a branch wavefunction."""
    if variant == "small_phi":
        return -math.sqrt(2.0) * alpha0 * phi, math.sqrt(2.0) * alpha0, alpha0 * alpha0 * phi
    if variant in ("full", "rotated"):
        return (-math.sqrt(2.0) * alpha0 * math.sin(phi), math.sqrt(2.0) * alpha0 * math.cos(phi),
                0.5 * alpha0 * alpha0 * math.sin(2.0 * phi))
    raise DomainError(f"unknown variant {variant!r}")


def squeezed_wavefunction_gaussian(alpha0: float, phi: float, sigma_ratio: float,
                                   grid: QuadratureGrid, variant: str = "small_phi") -> Wavefunction:
    """Gaussian wavefunction of a number-squeezed state, width ``sigma_ratio``.

    ``variant="small_phi"`` is first order in ``phi`` (plane wave
    ``e^{i sqrt(2) alpha0 x}``, center ``-sqrt(2) alpha0 phi``).
    ``variant="rotated"`` keeps the full phase-space rotation of the center
    and momentum, and equals the exact coherent wavefunction at
    ``sigma_ratio = 1``. Normalized on the grid.
    """
    if sigma_ratio < 1.0:
        raise DomainError("sigma_ratio must be at least 1")
    if variant == "small_phi":
        _gate(alpha0, phi)
    center, k, offset = _branch_geometry(alpha0, phi, variant)
    x = grid.x
    psi = (np.pi ** -0.25 / math.sqrt(sigma_ratio)) * np.exp(
        -((x - center) ** 2) / (2.0 * sigma_ratio ** 2) + 1j * (k * x + offset))
    return Wavefunction(grid, psi).normalized()


def quadrature_pdf(rho: DensityMatrix, grid: QuadratureGrid) -> np.ndarray:
    """Homodyne distribution ``P(x) = sum rho[n, n'] h_n(x) h_n'(x)``."""
    h = hermite_functions(grid.x, rho.n_max)
    p = np.einsum("nx,nx->x", h, rho.elements @ h).real
    if p.min() < -1e-9:
        raise InvariantViolation(f"negative homodyne probability {p.min():.3g}")
    total = float(np.trapezoid(p, dx=grid.spacing))
    if abs(total - 1.0) > 1e-4:
        raise GridTooNarrow(f"homodyne distribution integrates to {total:.6f}")
    return p


def cat_fock_state(spec: CatSpec, n_max: int | None = None) -> FockVector:
    """Normalized Fock-space cat state."""
    n0 = spec.alpha0 ** 2
    if n_max is None:
        n_max = default_n_max(n0)
    a = coherent_exact(CoherentSpec(n0, 0.0, True), n_max).amplitudes
    b = coherent_exact(CoherentSpec(n0, spec.phi, True), n_max).amplitudes
    return FockVector.from_array(a + b)


def coherent_overlap(alpha0: float, phi1: float, phi2: float) -> complex:
    """``<alpha_1|alpha_2>`` for ``alpha_j = i alpha0 e^{i phi_j}``."""
    a1 = 1j * alpha0 * complex(math.cos(phi1), math.sin(phi1))
    a2 = 1j * alpha0 * complex(math.cos(phi2), math.sin(phi2))
    return complex(np.exp(-0.5 * abs(a1) ** 2 - 0.5 * abs(a2) ** 2 + a1.conjugate() * a2))


def squeezed_branch_overlap(alpha0: float, phi1: float, phi2: float, sigma_ratio: float,
                            variant: str = "rotated") -> complex:
    """Closed-form overlap of two equal-width Gaussian branch wavefunctions."""
    c1, k1, o1 = _branch_geometry(alpha0, phi1, variant)
    c2, k2, o2 = _branch_geometry(alpha0, phi2, variant)
    s2 = sigma_ratio ** 2
    dk = k2 - k1
    mid = 0.5 * (c1 + c2)
    log_mag = -((c1 - c2) ** 2) / (4.0 * s2) - dk * dk * s2 / 4.0
    return complex(np.exp(log_mag + 1j * (o2 - o1 + dk * mid)))


def cat_wavefunction(spec: CatSpec, grid: QuadratureGrid, variant: str = "full") -> Wavefunction:
    """``psi_1 + psi_2`` normalized with the analytic branch overlap.

    ``variant="full"`` uses the exact coherent wavefunctions,
    ``variant="small_phi"`` the first-order forms.
    """
    psi1 = coherent_wavefunction_closed(spec.alpha0, 0.0, grid, variant)
    with warnings.catch_warnings():
        if variant != "small_phi":
            warnings.simplefilter("ignore", ValidityWarning)
        psi2 = coherent_wavefunction_closed(spec.alpha0, spec.phi, grid, variant)
    if variant == "full":
        ov = coherent_overlap(spec.alpha0, 0.0, spec.phi)
    else:
        ov = squeezed_branch_overlap(spec.alpha0, 0.0, spec.phi, 1.0, "small_phi")
    norm = math.sqrt(2.0 + 2.0 * ov.real)
    return Wavefunction(grid, (psi1.values + psi2.values) / norm)


def _overlap_grid(alpha0: float, phi: float, sigma_ratio: float) -> QuadratureGrid:
    reach = math.sqrt(2.0) * alpha0 * max(abs(math.sin(phi)), abs(phi)) + 14.0 * sigma_ratio
    # resolve the residual plane wave of the branch product
    k = math.sqrt(2.0) * alpha0 * abs(1.0 - math.cos(phi)) + 1.0
    count = int(max(4001, 16 * reach * k)) | 1
    return QuadratureGrid(-reach, reach, count)


def env_overlap(alpha0: float, phi: float, squeeze: SqueezeParams, variant: str = "full") -> complex:
    """Overlap of the environment states that the two cat branches imprint.

    Ratio of the coherent-branch overlap to the squeezed-branch overlap.
    ``variant="full"`` takes the exact coherent overlap over rotated
    squeezed Gaussians, which gives exactly 1 without squeezing.
    ``variant="small_phi"`` uses the first-order forms for both. The closed
    form is cross-checked by trapezoidal quadrature.
    """
    sigma_n = math.sqrt(2.0) * alpha0
    s = sigma_n / squeeze.sigma_n_tilde
    if variant == "full":
        num = coherent_overlap(alpha0, 0.0, phi)
        den = squeezed_branch_overlap(alpha0, 0.0, phi, s, "rotated")
        num_v = den_v = "full"
    elif variant == "small_phi":
        _gate(alpha0, phi)
        num = squeezed_branch_overlap(alpha0, 0.0, phi, 1.0, "small_phi")
        den = squeezed_branch_overlap(alpha0, 0.0, phi, s, "small_phi")
        num_v = den_v = "small_phi"
    else:
        raise DomainError(f"unknown variant {variant!r}")
    if abs(den) < 1e-300:
        raise DegenerateOverlap("squeezed branches do not overlap")
    closed = num / den
    if abs(closed) > 1.0 + 1e-12:
        raise InvariantViolation(
            f"|overlap| = {abs(closed):.6g} above 1: Gaussian branch form out of range at s = {s:.3g}")
    if variant == "full":
        c1, k1, _ = _branch_geometry(alpha0, 0.0, "rotated")
        c2, k2, _ = _branch_geometry(alpha0, phi, "rotated")
        # past s^4 = (dc/dk)^2 the momentum mismatch dominates and the overlap turns upward
        if (k2 - k1) ** 2 * s ** 4 > (c2 - c1) ** 2:
            warnings.warn(f"squeezing s = {s:.3g} past the overlap minimum at phi = {phi:.3g}",
                          ValidityWarning, stacklevel=2)

    grid = _overlap_grid(alpha0, phi, s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        q_num = coherent_wavefunction_closed(alpha0, 0.0, grid, num_v).inner(
            coherent_wavefunction_closed(alpha0, phi, grid, num_v))
        sq_v = "rotated" if den_v == "full" else "small_phi"
        q_den = squeezed_wavefunction_gaussian(alpha0, 0.0, s, grid, sq_v).inner(
            squeezed_wavefunction_gaussian(alpha0, phi, s, grid, sq_v))
    quad = q_num / q_den
    if abs(quad - closed) > AGREEMENT_TOL * max(1.0, abs(closed)):
        raise InvariantViolation(f"closed form {closed} and quadrature {quad} disagree")
    return closed


def _squeeze_for(alpha0: float, eta: float) -> SqueezeParams:
    n0 = alpha0 ** 2
    return solve_squeeze_params(EnvModel(eta, n0), math.sqrt(2.0 * n0))


def cat_interference_report(spec: CatSpec, eta: float, n_max: int | None = None) -> InterferenceReport:
    """Cross terms of ``P(0)`` before the chain, after it ignoring the
    environment, and after it including the environment overlap.

    ``n_max`` bounds the Fock-space cat used to confirm that the cutoff
    holds both branches.
    """
    if eta < 0:
        raise DomainError("eta must be non-negative")
    cat_fock_state(spec, n_max)
    a0, phi = spec.alpha0, spec.phi
    n0 = a0 * a0
    _gate(a0, phi)
    sq = _squeeze_for(a0, eta)
    s = math.sqrt(2.0 * n0) / sq.sigma_n_tilde

    def mod_at_zero(width, p):
        center = -math.sqrt(2.0) * a0 * p
        return np.pi ** -0.25 / math.sqrt(width) * math.exp(-center * center / (2.0 * width * width))

    fringe = math.cos(n0 * phi)
    initial = 2.0 * mod_at_zero(1.0, 0.0) * mod_at_zero(1.0, phi) * fringe
    naive = 2.0 * mod_at_zero(s, 0.0) * mod_at_zero(s, phi) * fringe
    e = env_overlap(a0, phi, sq) if eta > 0 else complex(1.0)
    entangled = naive * abs(e)
    ratio = entangled / naive if naive != 0 else abs(e)
    return InterferenceReport(initial, naive, entangled, e, ratio)


def single_state_approximation(n0: float, eta: float, phi: float = 0.0, x_max: float = 3.0,
                               n_max: int | None = None):
    """Replace the mixture by its central squeezed component.

    Valid while the spread of amplitudes across the mixture times the
    quadrature range stays small. Returns ``(state, delta_alpha0 * x_max)``
    and warns when that product exceeds 0.1.
    """
    sq = _squeeze_for(math.sqrt(n0), eta)
    spread = sq.sigma_L_tilde / (2.0 * math.sqrt(n0)) * x_max
    if spread > 0.1:
        warnings.warn(f"single-state approximation at delta_alpha0 * x = {spread:.3g}",
                      ValidityWarning, stacklevel=2)
    state = squeezed_number_state(SqueezedNumberSpec(n0, sq.sigma_n_tilde, phi, True), n_max)
    return state, spread
