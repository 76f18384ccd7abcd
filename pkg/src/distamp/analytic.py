"""Gaussian closed forms for the long-chain limit.

Flip counts become Gaussian, the environment overlap between two photon
numbers becomes a Gaussian kernel, and the reduced field state becomes an
incoherent mixture of number-squeezed states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .density import DensityMatrix
from .errors import DomainError, PerturbativityViolated, QuadratureFailure, TruncationOverflow
from .fock import CoherentSpec, gaussian_amplitudes

TAIL_SIGMAS = 8.0
TOP_BIN_LIMIT = 1e-8


@dataclass(frozen=True)
class EnvModel:
    """Flip-count model at reference photon number ``n0``."""

    eta: float
    n0: float

    def __post_init__(self):
        if self.eta < 0 or self.n0 < 0:
            raise DomainError("eta and n0 must be non-negative")

    @property
    def sigma_L(self) -> float:
        return math.sqrt(self.eta * self.n0)

    @property
    def c_L(self) -> float:
        return 1.0 / (math.sqrt(2.0 * math.pi) * self.sigma_L)


@dataclass(frozen=True)
class SqueezeParams:
    sigma_n_tilde: float
    sigma_L_tilde: float


def _check_flip(p: float) -> float:
    if p > 0.1:
        raise PerturbativityViolated(f"flip probability {p:.3g} above 0.1")
    return p


def absorption_probability(n: int, theta: float) -> float:
    """First-order probability that a loss atom absorbs a photon."""
    return _check_flip(theta * theta * n)


def emission_probability(n: int, theta: float) -> float:
    """First-order probability that a gain atom emits into the mode."""
    return _check_flip(theta * theta * (n + 1))


def env_poisson(n_l, n: int, eta: float):
    """Poisson probability of ``n_l`` loss flips with mean ``eta * n``."""
    mu = eta * n
    if mu < 0:
        raise DomainError("eta * n must be non-negative")
    return stats.poisson.pmf(n_l, mu)


def env_gaussian(n_l, n: int, model: EnvModel):
    """Gaussian loss-count density, mean ``eta n``, width frozen at ``n0``."""
    return model.c_L * np.exp(-((n_l - model.eta * n) ** 2) / (2.0 * model.sigma_L ** 2))


def delta_n_pdf(delta_n, model: EnvModel):
    """Density of the net photon change: zero mean, width ``sqrt(2) sigma_L``."""
    s = math.sqrt(2.0) * model.sigma_L
    return np.exp(-0.5 * (np.asarray(delta_n) / s) ** 2) / (math.sqrt(2.0 * math.pi) * s)


def overlap_kernel_closed(n, n_prime, delta_n, model: EnvModel):
    s2 = model.sigma_L ** 2
    return (math.sqrt(math.pi) * model.sigma_L * model.c_L ** 2
            * np.exp(-((np.asarray(n) - n_prime) ** 2) * model.eta ** 2 / (4.0 * s2))
            * np.exp(-(np.asarray(delta_n) ** 2) / (4.0 * s2)))


def overlap_kernel_numeric(n: int, n_prime: int, delta_n: int, model: EnvModel) -> float:
    """Integral over ``N_L`` of four square-rooted Gaussian count densities."""
    if model.sigma_L <= 0:
        raise DomainError("kernel needs eta * n0 > 0")
    s2 = model.sigma_L ** 2
    centers = np.array([model.eta * n, model.eta * n_prime,
                        model.eta * n - delta_n, model.eta * n_prime - delta_n])
    mid = centers.mean()
    # the exponent is a parabola in N_L; shift it so the integrand peaks at 1
    peak = -np.sum((mid - centers) ** 2) / (4.0 * s2)

    def integrand(u):
        return math.exp(-np.sum((u - centers) ** 2) / (4.0 * s2) - peak)

    half = 40.0 * model.sigma_L
    val, err = integrate.quad(integrand, mid - half, mid + half, points=[mid],
                              epsabs=0.0, epsrel=1e-13, limit=200)
    if not np.isfinite(val) or err > 1e-10 * abs(val):
        raise QuadratureFailure(f"kernel quadrature error {err:.3g} for value {val:.3g}")
    return float(model.c_L ** 2 * val * math.exp(peak))


def solve_squeeze_params(model: EnvModel, sigma_n: float) -> SqueezeParams:
    """Closed-form solution of the two width conditions.

    ``4 sL~^2 + sn~^2 = 4 sL^2 + sn^2`` and ``sL~^2 / sn~^2 = R``.
    """
    if sigma_n <= 0 or model.n0 <= 0:
        raise DomainError("sigma_n and n0 must be positive")
    s_l2 = model.sigma_L ** 2
    s_n2 = sigma_n ** 2
    if s_l2 == 0.0:
        return SqueezeParams(sigma_n, 0.0)
    ratio = squeeze_ratio(model, sigma_n)
    sn_t2 = (4.0 * s_l2 + s_n2) / (4.0 * ratio + 1.0)
    return SqueezeParams(math.sqrt(sn_t2), math.sqrt(ratio * sn_t2))


def squeeze_ratio(model: EnvModel, sigma_n: float) -> float:
    s_l2 = model.sigma_L ** 2
    s_n2 = sigma_n ** 2
    eta2 = model.eta ** 2
    return (4.0 * s_l2 ** 2 + 4.0 * eta2 * s_l2 * s_n2 + eta2 * s_n2 ** 2) / (4.0 * s_l2 * s_n2)


def squeeze_residuals(model: EnvModel, sigma_n: float, params: SqueezeParams) -> tuple[float, float]:
    """Relative residuals of the two width conditions."""
    rhs = 4.0 * model.sigma_L ** 2 + sigma_n ** 2
    lhs = 4.0 * params.sigma_L_tilde ** 2 + params.sigma_n_tilde ** 2
    ratio = squeeze_ratio(model, sigma_n)
    got = params.sigma_L_tilde ** 2 / params.sigma_n_tilde ** 2
    return abs(lhs - rhs) / rhs, abs(got - ratio) / ratio


def default_n_max_mixed(n0: float, eta: float) -> int:
    """Cutoff for the broadened photon-number distribution after the chain."""
    return int(math.ceil(n0 + 12.0 * math.sqrt(n0 * (1.0 + 2.0 * eta) + 1.0) + 10.0))


def _shift_accumulate(out: np.ndarray, block: np.ndarray, shift: int) -> None:
    d = out.shape[0]
    if shift >= 0:
        out[shift:, shift:] += block[:d - shift, :d - shift]
    else:
        out[:d + shift, :d + shift] += block[-shift:, -shift:]


def _finish(m: np.ndarray) -> DensityMatrix:
    rho = DensityMatrix.normalized(m)
    if rho.top_population() > TOP_BIN_LIMIT:
        raise TruncationOverflow(
            f"top-bin population {rho.top_population():.3g} at n_max={rho.n_max}")
    return rho


def reduced_density_analytic(spec: CoherentSpec, eta: float, n_max: int | None = None,
                             local_sigma: bool = False) -> DensityMatrix:
    """Reduced field state from the Gaussian overlap kernel.

    Entries ``c_n conj(c_n')`` of the Gaussian coherent amplitudes are damped
    by the kernel in ``n - n'`` and copied onto every shift ``delta_n`` with
    weight ``exp(-delta_n^2 / 4 sigma_L^2)``; the result is renormalized.
    ``local_sigma`` evaluates ``sigma_L^2 = eta (n + n') / 2`` per entry
    instead of freezing it at ``n0``.
    """
    if spec.n0 < 25:
        raise DomainError("Gaussian regime needs n0 >= 25")
    if not eta > 0:
        raise DomainError("eta must be positive")
    if n_max is None:
        n_max = default_n_max_mixed(spec.n0, eta)
    model = EnvModel(eta, spec.n0)
    c = gaussian_amplitudes(spec.n0, math.sqrt(2.0 * spec.n0), spec.phase, n_max)
    n = np.arange(n_max + 1)
    dn = n[:, None] - n[None, :]
    if local_sigma:
        # floor at one photon so the vacuum corner keeps a finite width
        s_l2 = eta * np.maximum(0.5 * (n[:, None] + n[None, :]), 1.0)
    else:
        s_l2 = np.full((n_max + 1, n_max + 1), model.sigma_L ** 2)
    pref = 1.0 / (2.0 * np.sqrt(np.pi * s_l2))
    base = np.outer(c, c.conj()) * pref * np.exp(-(dn ** 2) * eta ** 2 / (4.0 * s_l2))
    out = np.zeros_like(base)
    reach = int(math.floor(TAIL_SIGMAS * math.sqrt(s_l2.max())))
    for shift in range(-reach, reach + 1):
        _shift_accumulate(out, base * np.exp(-shift * shift / (4.0 * s_l2)), shift)
    return _finish(out)


def mixture_density(spec: CoherentSpec, params: SqueezeParams, n_max: int | None = None,
                    renormalize_components: bool = False) -> DensityMatrix:
    """Incoherent sum of number-squeezed states centered at ``n0 + delta_n``.

    Components keep the fixed Gaussian prefactor by default, so a component
    clipped by the vacuum edge loses weight rather than being rescaled.
    """
    if n_max is None:
        n_max = default_n_max_mixed(spec.n0, (params.sigma_L_tilde ** 2) / max(spec.n0, 1.0))
    out = np.zeros((n_max + 1, n_max + 1), np.complex128)
    if params.sigma_L_tilde == 0.0:
        shifts = [0]
    else:
        reach = int(math.floor(TAIL_SIGMAS * params.sigma_L_tilde))
        shifts = range(-reach, reach + 1)
    for shift in shifts:
        v = gaussian_amplitudes(spec.n0 + shift, params.sigma_n_tilde, spec.phase, n_max)
        norm2 = float(np.vdot(v, v).real)
        if norm2 == 0.0:
            continue
        if renormalize_components:
            v = v / math.sqrt(norm2)
        w = 1.0 if params.sigma_L_tilde == 0.0 else math.exp(
            -shift * shift / (4.0 * params.sigma_L_tilde ** 2))
        out += w * np.outer(v, v.conj())
    return _finish(out)
