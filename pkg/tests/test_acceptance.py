"""Acceptance checks, one printed PASS/FAIL line per criterion.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""

import math
import time
import warnings
from contextlib import contextmanager

import numpy as np

from distamp import analytic as an
from distamp import channel, io
from distamp.channel import (ChannelParams, cross_trace, env_overlap_exact, evolve_exact,
                             evolve_kraus, partial_trace, sample_walk)
from distamp.config import RunConfig
from distamp.density import DensityMatrix, fidelity
from distamp.figures import SQUEEZE_FACTOR, make_figure, squeezed_exact_wavefunction
from distamp.fock import (CoherentSpec, QuadratureGrid, ValidityWarning, coherent_exact,
                          coherent_gaussian, coherent_wavefunction_closed, hermite_functions)
from distamp.homodyne import env_overlap, squeezed_wavefunction_gaussian

LINES = []


def record(number, ok, text):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
    LINES.append(line)
    print(line)
    return ok


def note(number, text):
    line = f"INFO criterion {number}: {text}"
    LINES.append(line)
    print(line)


@contextmanager
def timed():
    box = {}
    start = time.perf_counter()
    yield box
    box["s"] = time.perf_counter() - start


def test_c01_exact_vs_kraus():
    channel._branch_sums.cache_clear()
    worst = 0.0
    with timed() as t:
        for theta in (0.05, 0.1):
            for n_steps in (4, 8, 12):
                params = ChannelParams.from_theta(theta, n_steps)
                for n0 in (2.0, 4.0):
                    state = coherent_exact(CoherentSpec(n0, 0.3), 30)
                    a = partial_trace(evolve_exact(state, params)).elements
                    b = evolve_kraus(state, params, check_perturbative=False).elements
                    worst = max(worst, float(np.abs(a - b).max()))
    ok = worst <= 1e-9 and t["s"] < 10
    assert record(1, ok, f"max |exact - kraus| = {worst:.3g} (<= 1e-9), {t['s']:.2f} s (< 10 s)")


def test_c02_kernel_closed_form():
    model = an.EnvModel(0.5, 100.0)
    worst = 0.0
    points = 0
    with timed() as t:
        for n in (90, 95, 100, 105, 110):
            for m in (90, 95, 100, 105, 110):
                for dn in (-6, -3, 0, 3, 6):
                    num = an.overlap_kernel_numeric(n, m, dn, model)
                    ref = float(an.overlap_kernel_closed(n, m, dn, model))
                    worst = max(worst, abs(num - ref) / ref)
                    points += 1
    ok = points == 125 and worst <= 1e-8 and t["s"] < 1
    assert record(2, ok, f"{points} points, max relative error {worst:.3g} (<= 1e-8), "
                         f"{t['s']:.2f} s (< 1 s)")


def test_c03_mixture_equivalence():
    worst = 0.0
    with timed() as t:
        for n0 in (50.0, 100.0, 400.0):
            sn = math.sqrt(2 * n0)
            for eta in (0.2, 0.5, 1.0, 2.0):
                spec = CoherentSpec(n0, 0.0)
                n_max = an.default_n_max_mixed(n0, eta)
                mix = an.mixture_density(spec, an.solve_squeeze_params(an.EnvModel(eta, n0), sn), n_max)
                red = an.reduced_density_analytic(spec, eta, n_max)
                worst = max(worst, float(np.abs(mix.elements - red.elements).max()))
    ok = worst <= 1e-5 and t["s"] < 60
    assert record(3, ok, f"max elementwise difference {worst:.3g} (<= 1e-5), {t['s']:.2f} s (< 60 s)")


def test_c04_squeeze_solve():
    worst = 0.0
    with timed() as t:
        for n0 in (50.0, 100.0, 400.0):
            sn = math.sqrt(2 * n0)
            for eta in (0.2, 0.5, 1.0, 2.0, 10.0, 50.0):
                model = an.EnvModel(eta, n0)
                worst = max(worst, *an.squeeze_residuals(model, sn, an.solve_squeeze_params(model, sn)))
        p = an.solve_squeeze_params(an.EnvModel(50.0, 100.0), math.sqrt(200.0))
    width = abs(p.sigma_n_tilde * math.sqrt(50.0) / math.sqrt(100.0) - 1)
    ratio = abs(p.sigma_L_tilde / p.sigma_n_tilde / 50.0 - 1)
    ok = worst < 1e-12 and width <= 0.05 and ratio <= 0.02 and t["s"] < 1
    assert record(4, ok, f"residual {worst:.3g} (< 1e-12), width deviation {width:.3g} (<= 0.05), "
                         f"ratio deviation {ratio:.3g} (<= 0.02), {t['s']:.3f} s (< 1 s)")


def test_c05_kraus_vs_mixture():
    n_max = 250
    spec = CoherentSpec(100.0, 0.0)
    mix = an.mixture_density(spec, an.solve_squeeze_params(an.EnvModel(1.0, 100.0),
                                                           math.sqrt(200.0)), n_max)
    start = coherent_exact(spec, n_max)
    fids = []
    with timed() as t:
        for n_steps in (500, 1000, 2000):
            rho = evolve_kraus(start, ChannelParams(1.0, n_steps), check_perturbative=False)
            fids.append(fidelity(rho, mix))
    monotone = fids[0] < fids[1] < fids[2]
    ok = fids[-1] >= 0.98 and monotone and t["s"] < 120
    assert record(5, ok, "fidelity at N_T=500/1000/2000 = "
                         + "/".join(f"{f:.5f}" for f in fids)
                         + f" (>= 0.98, increasing), {t['s']:.1f} s (< 120 s)")


def test_c06_walk_statistics():
    trials = 100_000
    params = ChannelParams(0.5, 10_000)

    def judge(stats):
        z_mean = (stats.mean_loss() - 50.0) / (stats.std_loss() / math.sqrt(trials))
        sd = stats.std_delta()
        z_sd = (sd - 10.0) / (sd / math.sqrt(2.0 * (trials - 1)))
        return stats.mean_loss(), sd, z_mean, z_sd

    with timed() as t:
        mean, sd, zm, zs = judge(sample_walk(100, params, trials, 0xDEC0, gain="symmetric"))
    ok = abs(zm) <= 3 and abs(zs) <= 3 and t["s"] < 30
    exact = judge(sample_walk(100, params, trials, 0xDEC0, gain="exact"))
    note(6, f"with sqrt(n+1) gain rates: mean N_L {exact[0]:.4f} ({exact[2]:+.2f} SE), "
            f"stdev dn {exact[1]:.4f} ({exact[3]:+.2f} SE)")
    assert record(6, ok, f"mean N_L {mean:.4f} ({zm:+.2f} SE), stdev dn {sd:.4f} ({zs:+.2f} SE), "
                         f"|z| <= 3, {t['s']:.2f} s (< 30 s)")


def test_c07_no_loss_limit():
    spec = CoherentSpec(100.0, 0.3)
    with timed() as t:
        rho = an.reduced_density_analytic(spec, 1e-6)
        pure = DensityMatrix.from_pure(coherent_gaussian(spec, rho.n_max))
        f = fidelity(rho, pure)
    poisson = fidelity(rho, DensityMatrix.from_pure(coherent_exact(spec, rho.n_max)))
    note(7, f"fidelity with the exact Poisson coherent state {poisson:.7f}")
    ok = f >= 1 - 1e-4 and t["s"] < 5
    assert record(7, ok, f"fidelity with the coherent state {f:.7f} (>= 0.9999), {t['s']:.2f} s (< 5 s)")


def test_c08_wavefunction_approximation():
    grid = QuadratureGrid(-8.0, 8.0, 3201)
    win = np.abs(grid.x) <= 4.0
    with timed() as t:
        exact = squeezed_exact_wavefunction(100.0, 0.05, grid)
        approx = squeezed_wavefunction_gaussian(10.0, 0.05, SQUEEZE_FACTOR, grid)
        diff = exact.values - approx.values
        l2 = math.sqrt(float(np.trapezoid(np.abs(diff[win]) ** 2, dx=grid.spacing)))
        dabs = float(np.abs(exact.abs2 - approx.abs2)[win].max())
    ok = l2 <= 1e-2 and dabs <= 1e-2 and t["s"] < 5
    assert record(8, ok, f"L2 distance {l2:.3g} (<= 1e-2), max |d abs2| {dabs:.3g} (<= 1e-2) "
                         f"on |x| <= 4, {t['s']:.2f} s (< 5 s)")


def test_c09_overlap_vs_exact():
    worst_e = worst_v = 0.0
    n_max = 40
    h = hermite_functions(0.0, n_max)[:, 0]
    with timed() as t:
        for a0 in (2.0, 3.0):
            for phi in (0.1, 0.2, 0.3):
                for theta, n_steps in ((0.06, 12), (0.08, 8)):
                    params = ChannelParams.from_theta(theta, n_steps)
                    ja = evolve_exact(coherent_exact(CoherentSpec(a0 * a0, 0.0, True), n_max), params)
                    jb = evolve_exact(coherent_exact(CoherentSpec(a0 * a0, phi, True), n_max), params)
                    exact = abs(env_overlap_exact(ja, jb))
                    sq = an.solve_squeeze_params(an.EnvModel(params.eta, a0 * a0), math.sqrt(2) * a0)
                    closed = abs(env_overlap(a0, phi, sq))
                    x12 = cross_trace(ja, jb)
                    r1 = partial_trace(ja).elements
                    r2 = partial_trace(jb).elements
                    vis = abs(h @ x12 @ h) / math.sqrt((h @ r1 @ h).real * (h @ r2 @ h).real)
                    worst_e = max(worst_e, abs(closed - exact) / exact)
                    worst_v = max(worst_v, abs(vis - closed) / closed)
    ok = worst_e <= 0.10 and worst_v <= 0.15 and t["s"] < 60
    assert record(9, ok, f"overlap relative gap {worst_e:.3g} (<= 0.10), suppression relative gap "
                         f"{worst_v:.3g} (<= 0.15), {t['s']:.2f} s (< 60 s)")


def test_c10_unitarity_identity():
    a0 = 10.0
    grid = QuadratureGrid(-20.0, 20.0, 16001)
    worst = 0.0
    with timed() as t, warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        for phi in (0.01, 0.05, 0.1):
            for eta in (0.5, 2.0, 10.0):
                sq = an.solve_squeeze_params(an.EnvModel(eta, a0 * a0), math.sqrt(2) * a0)
                s = math.sqrt(2) * a0 / sq.sigma_n_tilde
                bare = coherent_wavefunction_closed(a0, 0.0, grid).inner(
                    coherent_wavefunction_closed(a0, phi, grid))
                squeezed = squeezed_wavefunction_gaussian(a0, 0.0, s, grid, "rotated").inner(
                    squeezed_wavefunction_gaussian(a0, phi, s, grid, "rotated"))
                e = env_overlap(a0, phi, sq)
                worst = max(worst, abs(abs(bare) - abs(squeezed) * abs(e)))
    ok = worst <= 1e-8 and t["s"] < 5
    assert record(10, ok, f"max residual {worst:.3g} (<= 1e-8), {t['s']:.2f} s (< 5 s)")


def _fig_checks(out):
    checks = {}
    c = io.read_columns(out / "fig2_pn.csv")
    mean = float(c["p"] @ c["n"])
    var = float(c["p"] @ (c["n"] - mean) ** 2)
    checks["fig2 peak at n0, mean and variance n0"] = (
        abs(c["n"][np.argmax(c["p"])] - 100) <= 1 and abs(mean - 100) < 0.5 and abs(var - 100) < 2)

    means = []
    for name, col in (("pp", "n_final"), ("pl", "n_l"), ("pa", "n_a")):
        c = io.read_columns(out / f"fig3_{name}.csv")
        m = [float(c[k] @ c[col]) for k in ("p_n1", "p_n2")]
        sd = [math.sqrt(float(c[k] @ (c[col] - mu) ** 2)) for k, mu in zip(("p_n1", "p_n2"), m)]
        means.append(m)
        checks[f"fig3 {name} histograms separate"] = (m[1] - m[0]) > 5 * max(sd) / math.sqrt(10000)
    # sqrt(n + 1) emission adds theta^2 per pair, so the mean drifts up by eta
    checks["fig3 final-number means track n1 + eta, n2 + eta"] = all(
        abs(mu - n - 1.0) < 0.5 for mu, n in zip(means[0], (80, 120)))

    for fig in (4, 5, 6):
        c = io.read_columns(out / f"fig{fig}_abs2.csv")
        dx = c["x"][1] - c["x"][0]
        norm = float(np.trapezoid(c["value"], dx=dx))
        xbar = float(np.trapezoid(c["x"] * c["value"], dx=dx)) / norm
        checks[f"fig{fig} x mean -0.7071"] = abs(xbar + 0.7071) < 5e-3 and abs(norm - 1) < 1e-3
        re = io.read_columns(out / f"fig{fig}_re.csv")["value"]
        im = io.read_columns(out / f"fig{fig}_im.csv")["value"]
        checks[f"fig{fig} panels consistent"] = np.abs(re ** 2 + im ** 2 - c["value"]).max() < 1e-12

    rep = {k: float(v) for k, v in io.read_kv(out / "fig7_report.csv").items()}
    c = io.read_columns(out / "fig7_pdf.csv")
    win = np.abs(c["x"]) <= 2.0

    def contrast(p):
        return (p[win].max() - p[win].min()) / (p[win].max() + p[win].min())

    checks["fig7 cross term reduced at eta > 0"] = (
        abs(rep["cross_term_entangled"]) < abs(rep["cross_term_naive"]) < abs(rep["cross_term_initial"])
        and rep["visibility_ratio"] < 1 and contrast(c["p_entangled"]) < contrast(c["p_naive"]))
    return checks


def test_c11_figures(tmp_path):
    with timed() as t:
        for fig_id in range(2, 8):
            make_figure(fig_id, RunConfig(output_dir=str(tmp_path)))
    checks = _fig_checks(tmp_path)
    failed = [k for k, v in checks.items() if not v]
    ok = not failed and t["s"] < 120
    detail = "all structural checks hold" if not failed else "failed: " + "; ".join(failed)
    assert record(11, ok, f"{len(checks)} checks, {detail}, {t['s']:.1f} s (< 120 s)")


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    failures = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_c"):
            continue
        try:
            if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
