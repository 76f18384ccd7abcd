"""Cross-backend verification suites run by ``distamp verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analytic as an
from .channel import (ChannelParams, cross_trace, env_overlap_exact, evolve_exact, evolve_kraus,
                      partial_trace, sample_walk)
from .density import fidelity
from .fock import CoherentSpec, coherent_exact, hermite_functions
from .homodyne import coherent_overlap, env_overlap, squeezed_branch_overlap


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    relation: str = "<="

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name}: {self.measured:.6g} {self.relation} {self.tolerance:.6g}"


def _le(name, measured, tol):
    return Check(name, bool(measured <= tol), float(measured), tol, "<=")


def _ge(name, measured, tol):
    return Check(name, bool(measured >= tol), float(measured), tol, ">=")


def suite_kernel(seed: int) -> list[Check]:
    model = an.EnvModel(0.5, 100.0)
    worst = 0.0
    for n in (90, 95, 100, 105, 110):
        for m in (90, 95, 100, 105, 110):
            for dn in (-6, -3, 0, 3, 6):
                num = an.overlap_kernel_numeric(n, m, dn, model)
                ref = float(an.overlap_kernel_closed(n, m, dn, model))
                worst = max(worst, abs(num - ref) / ref)
    return [_le("kernel quadrature vs closed form, max relative error", worst, 1e-8)]


def suite_squeeze(seed: int) -> list[Check]:
    worst = 0.0
    for n0 in (50.0, 100.0, 400.0):
        for eta in (0.2, 0.5, 1.0, 2.0, 10.0, 50.0):
            model = an.EnvModel(eta, n0)
            sn = math.sqrt(2.0 * n0)
            worst = max(worst, *an.squeeze_residuals(model, sn, an.solve_squeeze_params(model, sn)))
    model = an.EnvModel(50.0, 100.0)
    p = an.solve_squeeze_params(model, math.sqrt(200.0))
    return [
        _le("width condition residuals", worst, 1e-12),
        _le("|sn~ sqrt(eta/n0) - 1| at eta=50", abs(p.sigma_n_tilde * math.sqrt(50.0 / 100.0) - 1), 0.05),
        _le("|sL~/sn~/eta - 1| at eta=50", abs(p.sigma_L_tilde / p.sigma_n_tilde / 50.0 - 1), 0.02),
    ]


def suite_backends(seed: int) -> list[Check]:
    worst = 0.0
    for theta, n_steps in ((0.05, 6), (0.1, 8)):
        params = ChannelParams.from_theta(theta, n_steps)
        state = coherent_exact(CoherentSpec(4.0, 0.3), 27)
        a = partial_trace(evolve_exact(state, params)).elements
        b = evolve_kraus(state, params, check_perturbative=False).elements
        worst = max(worst, float(np.abs(a - b).max()))
    spec = CoherentSpec(100.0, 0.0)
    model = an.EnvModel(0.5, 100.0)
    mix = an.mixture_density(spec, an.solve_squeeze_params(model, math.sqrt(200.0)), 281)
    red = an.reduced_density_analytic(spec, 0.5, 281)
    kr = evolve_kraus(coherent_exact(spec, 250), ChannelParams(1.0, 500), check_perturbative=False)
    mix1 = an.mixture_density(spec, an.solve_squeeze_params(an.EnvModel(1.0, 100.0), math.sqrt(200.0)), 250)
    return [
        _le("exact vs Kraus, max elementwise", worst, 1e-9),
        _le("kernel form vs squeezed mixture, max elementwise", float(np.abs(mix.elements - red.elements).max()), 1e-5),
        _ge("Kraus (N_T=500) fidelity with mixture", fidelity(kr, mix1), 0.98),
    ]


def suite_cat(seed: int) -> list[Check]:
    a0, phi, n_steps, theta = 3.0, 0.2, 12, 0.06
    params = ChannelParams.from_theta(theta, n_steps)
    n_max = 40
    ja = evolve_exact(coherent_exact(CoherentSpec(a0 * a0, 0.0, True), n_max), params)
    jb = evolve_exact(coherent_exact(CoherentSpec(a0 * a0, phi, True), n_max), params)
    exact = abs(env_overlap_exact(ja, jb))
    sq = an.solve_squeeze_params(an.EnvModel(params.eta, a0 * a0), math.sqrt(2.0) * a0)
    closed = abs(env_overlap(a0, phi, sq))
    h = hermite_functions(0.0, n_max)[:, 0]
    x12 = cross_trace(ja, jb)
    r11 = partial_trace(ja).elements
    r22 = partial_trace(jb).elements
    vis = abs(h @ x12 @ h) / math.sqrt((h @ r11 @ h).real * (h @ r22 @ h).real)
    worst = 0.0
    for p in (0.01, 0.05, 0.1):
        for eta in (0.5, 2.0, 10.0):
            s = an.solve_squeeze_params(an.EnvModel(eta, 100.0), math.sqrt(200.0))
            e = env_overlap(10.0, p, s)
            den = squeezed_branch_overlap(10.0, 0.0, p, math.sqrt(200.0) / s.sigma_n_tilde)
            worst = max(worst, abs(abs(coherent_overlap(10.0, 0.0, p)) - abs(den) * abs(e)))
    return [
        _le("|env overlap| closed vs exact, relative", abs(closed - exact) / exact, 0.10),
        _le("cat suppression exact vs closed, relative", abs(vis - closed) / closed, 0.15),
        _le("unitarity identity residual", worst, 1e-8),
    ]


def suite_walk(seed: int) -> list[Check]:
    trials = 20000
    stats = sample_walk(100, ChannelParams(0.5, 10000), trials, seed, gain="symmetric")
    se_mean = stats.std_loss() / math.sqrt(trials)
    sd = stats.std_delta()
    se_sd = sd / math.sqrt(2.0 * (trials - 1))
    return [
        _le("mean N_L deviation from 50 in standard errors", abs(stats.mean_loss() - 50.0) / se_mean, 3.0),
        _le("stdev(delta n) deviation from 10 in standard errors", abs(sd - 10.0) / se_sd, 3.0),
    ]


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "kernel": suite_kernel,
    "squeeze": suite_squeeze,
    "backends": suite_backends,
    "cat": suite_cat,
    "walk": suite_walk,
}


def run(suite: str, seed: int) -> list[Check]:
    names = list(SUITES) if suite == "all" else [suite]
    checks = []
    for name in names:
        checks.extend(SUITES[name](seed))
    return checks
