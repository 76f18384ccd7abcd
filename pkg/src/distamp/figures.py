"""Figure data: each ``figN`` writes ``figN_*.csv`` plus ``figN.svg``."""

from __future__ import annotations

import math
import warnings
from pathlib import Path

import numpy as np

from . import io, svg
from .analytic import env_poisson
from .channel import ChannelParams, sample_walk
from .config import RunConfig
from .errors import DomainError
from .fock import (CoherentSpec, QuadratureGrid, SqueezedNumberSpec, ValidityWarning,
                   coherent_exact, coherent_wavefunction_closed, coordinate_wavefunction,
                   squeezed_number_state)
from .homodyne import (CatSpec, cat_interference_report, cat_wavefunction, env_overlap,
                       squeezed_wavefunction_gaussian, _squeeze_for)

WAVE_GRID = QuadratureGrid(-8.0, 8.0, 3201)
SQUEEZE_FACTOR = 2.0


def _prov(fig_id: int, config: RunConfig, **extra):
    return io.provenance(f"fig --id {fig_id}", config.as_dict(), **extra)


def fig2(config: RunConfig, out: Path) -> list[Path]:
    state = coherent_exact(CoherentSpec(config.n0, 0.0), config.n_max)
    p = state.probabilities()
    keep = np.flatnonzero(p > 0)
    path = io.write_csv(out / "fig2_pn.csv", ["n", "p"], zip(keep, p[keep]), _prov(2, config))
    plot = svg.line_panels(out / "fig2.svg", [("P(n)", keep, [("coherent", p[keep])])],
                           f"photon number distribution, n0 = {config.n0:g}")
    return [path, plot]


def typical_numbers(n0: float) -> tuple[int, int]:
    """Two photon numbers two standard deviations either side of ``n0``."""
    spread = 2.0 * math.sqrt(n0)
    return max(int(round(n0 - spread)), 0), int(round(n0 + spread))


def fig3(config: RunConfig, out: Path) -> list[Path]:
    if config.eta <= 0:
        raise DomainError("fig 3 needs eta > 0")
    params = ChannelParams(config.eta, config.n_steps)
    n1, n2 = typical_numbers(config.n0)
    runs = [sample_walk(n, params, config.trials, config.seed) for n in (n1, n2)]
    prov = _prov(3, config, n1=n1, n2=n2)
    paths, panels = [], []

    def dense(values, probs, lo, hi):
        out = np.zeros(hi - lo + 1)
        idx = values - lo
        ok = (idx >= 0) & (idx < out.size)
        out[idx[ok]] = probs[ok]
        return out

    # final photon number, Gaussian overlay of width sqrt(2 eta n)
    lo = min(n + s.delta_min for n, s in zip((n1, n2), runs))
    hi = max(n + s.delta_min + s.p_delta.size - 1 for n, s in zip((n1, n2), runs))
    grid = np.arange(lo, hi + 1)
    cols = [dense(n + s.delta_values, s.p_delta, lo, hi) for n, s in zip((n1, n2), runs)]
    over = [np.exp(-((grid - n) ** 2) / (4.0 * config.eta * n)) / math.sqrt(4.0 * math.pi * config.eta * n)
            for n in (n1, n2)]
    paths.append(io.write_csv(out / "fig3_pp.csv", ["n_final", "p_n1", "p_n2", "gauss_n1", "gauss_n2"],
                              zip(grid, *cols, *over), prov))
    panels.append(("P_p(n'; n)", grid, [("n1", cols[0]), ("n2", cols[1])]))

    for name, attr, label in (("pl", "p_loss", "N_L"), ("pa", "p_gain", "N_A")):
        top = max(getattr(s, attr).size for s in runs)
        k = np.arange(top)
        cols = [dense(np.arange(getattr(s, attr).size), getattr(s, attr), 0, top - 1) for s in runs]
        over = [env_poisson(k, n, config.eta) for n in (n1, n2)]
        paths.append(io.write_csv(out / f"fig3_{name}.csv",
                                  [label.lower(), "p_n1", "p_n2", "poisson_n1", "poisson_n2"],
                                  zip(k, *cols, *over), prov))
        panels.append((f"P({label}; n)", k, [("n1", cols[0]), ("n2", cols[1])]))
    paths.append(svg.line_panels(out / "fig3.svg", panels,
                                 f"random walk, n1 = {n1}, n2 = {n2}, eta = {config.eta:g}"))
    return paths


def _panels(fig_id: int, wf, config: RunConfig, out: Path, title: str) -> list[Path]:
    prov = _prov(fig_id, config)
    parts = (("re", wf.values.real), ("im", wf.values.imag), ("abs2", wf.abs2))
    paths = [io.write_csv(out / f"fig{fig_id}_{name}.csv", ["x", "value"], zip(wf.x, y), prov)
             for name, y in parts]
    paths.append(svg.line_panels(out / f"fig{fig_id}.svg",
                                 [(name, wf.x, [(name, y)]) for name, y in parts], title))
    return paths


def fig4(config: RunConfig, out: Path) -> list[Path]:
    a0 = math.sqrt(config.n0)
    wf = coherent_wavefunction_closed(a0, config.phi, WAVE_GRID)
    return _panels(4, wf, config, out, f"coherent state, alpha0 = {a0:g}, phi = {config.phi:g}")


def squeezed_exact_wavefunction(n0: float, phi: float, grid=WAVE_GRID):
    spec = SqueezedNumberSpec(n0, math.sqrt(2.0 * n0) / SQUEEZE_FACTOR, phi, True)
    return coordinate_wavefunction(squeezed_number_state(spec), grid)


def fig5(config: RunConfig, out: Path) -> list[Path]:
    wf = squeezed_exact_wavefunction(config.n0, config.phi)
    return _panels(5, wf, config, out, "number-squeezed state, Hermite sum")


def fig6(config: RunConfig, out: Path) -> list[Path]:
    wf = squeezed_wavefunction_gaussian(math.sqrt(config.n0), config.phi, SQUEEZE_FACTOR, WAVE_GRID)
    return _panels(6, wf, config, out, "number-squeezed state, Gaussian form")


def fig7(config: RunConfig, out: Path) -> list[Path]:
    a0 = math.sqrt(config.n0)
    spec = CatSpec(a0, config.phi)
    grid = WAVE_GRID
    prov = _prov(7, config)
    initial = cat_wavefunction(spec, grid)
    sq = _squeeze_for(a0, config.eta)
    s = math.sqrt(2.0 * config.n0) / sq.sigma_n_tilde
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        b1 = squeezed_wavefunction_gaussian(a0, 0.0, s, grid).values
        b2 = squeezed_wavefunction_gaussian(a0, config.phi, s, grid).values
        e = env_overlap(a0, config.phi, sq) if config.eta > 0 else complex(1.0)
        report = cat_interference_report(spec, config.eta, config.n_max)
    dx = grid.spacing
    naive = np.abs(b1 + b2) ** 2
    naive /= np.trapezoid(naive, dx=dx)
    # environment traced out: the branch cross term is weighted by <E1|E2>
    mixed = np.abs(b1) ** 2 + np.abs(b2) ** 2 + 2.0 * (np.conj(b1) * b2 * e).real
    mixed /= np.trapezoid(mixed, dx=dx)
    p0 = initial.abs2
    paths = [
        io.write_wavefunction(out / "fig7_initial.csv", initial, prov),
        io.write_csv(out / "fig7_pdf.csv", ["x", "p_initial", "p_naive", "p_entangled"],
                     zip(grid.x, p0, naive, mixed), prov),
        io.write_kv(out / "fig7_report.csv", list(report.items()), prov),
    ]
    win = np.abs(grid.x) <= 4.0
    paths.append(svg.line_panels(out / "fig7.svg", [
        ("before the chain", grid.x[win], [("|psi|^2", p0[win])]),
        ("after the chain", grid.x[win], [("without environment", naive[win]),
                                          ("with environment", mixed[win])]),
    ], f"cat interference, alpha0 = {a0:g}, phi = {config.phi:g}, eta = {config.eta:g}"))
    return paths


FIGURES = {2: fig2, 3: fig3, 4: fig4, 5: fig5, 6: fig6, 7: fig7}


def make_figure(fig_id: int, config: RunConfig) -> list[Path]:
    if fig_id not in FIGURES:
        raise DomainError(f"figure id must be one of {sorted(FIGURES)}")
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return FIGURES[fig_id](config, out)
