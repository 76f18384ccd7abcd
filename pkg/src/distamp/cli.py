"""Command-line front end: ``distamp fig|evolve|verify``.

Exit codes: 0 success, 1 failed verification, 2 bad configuration,
3 capacity exceeded, 4 numerical invariant violated.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .analytic import (EnvModel, default_n_max_mixed, delta_n_pdf, env_poisson, mixture_density,
                       reduced_density_analytic, solve_squeeze_params)
from .channel import (ChannelParams, EnvStatistics, env_counts, evolve_exact, evolve_kraus,
                      partial_trace, sample_walk)
from .config import BACKENDS, RunConfig, build_config
from .density import fidelity
from .errors import DistampError, PerturbativityViolated
from .fock import CoherentSpec, coherent_exact

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n0", type=float, help="mean photon number")
    p.add_argument("--phi", type=float, help="phase in radians")
    p.add_argument("--eta", type=float, help="absorption lengths")
    p.add_argument("--steps", type=int, help="number of loss/gain pairs")
    p.add_argument("--nmax", type=int, help="Fock cutoff")
    p.add_argument("--seed", type=lambda s: int(s, 0), help="RNG seed")
    p.add_argument("--trials", type=int, help="Monte Carlo trials")
    p.add_argument("--backend", choices=BACKENDS)
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="key = value configuration file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="distamp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"distamp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fig = sub.add_parser("fig", help="write figure data")
    fig.add_argument("--id", type=int, required=True, dest="fig_id")
    _add_common(fig)
    evo = sub.add_parser("evolve", help="run one channel evolution")
    _add_common(evo)
    ver = sub.add_parser("verify", help="run verification suites")
    ver.add_argument("--suite", default="all",
                     choices=["all", "kernel", "squeeze", "backends", "cat", "walk"])
    _add_common(ver)
    return parser


def _config_from(args) -> RunConfig:
    flags = {k: getattr(args, k, None) for k in
             ("n0", "phi", "eta", "steps", "nmax", "seed", "trials", "backend", "out")}
    return build_config(flags, args.config)


def _analytic_stats(n: int, eta: float, n0: float) -> EnvStatistics:
    if eta == 0:
        one = np.ones(1)
        return EnvStatistics(one, one, one, 0, n)
    mu = eta * n
    top = int(mu + 12 * math.sqrt(mu) + 12)
    k = np.arange(top + 1)
    p = env_poisson(k, n, eta)
    reach = int(8 * math.sqrt(2 * eta * n0)) + 1
    dn = np.arange(-reach, reach + 1)
    pd = delta_n_pdf(dn, EnvModel(eta, n0))
    return EnvStatistics(p / p.sum(), p / p.sum(), pd / pd.sum(), -reach, n)


def cmd_evolve(config: RunConfig) -> list[Path]:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_max = config.n_max or default_n_max_mixed(config.n0, config.eta)
    spec = CoherentSpec(config.n0, config.phi)
    params = ChannelParams(config.eta, config.n_steps)
    report: dict[str, object] = {"backend": config.backend, "n_max": n_max,
                                 "theta": params.theta}
    n_ref = int(round(config.n0))
    if config.backend == "exact":
        joint = evolve_exact(coherent_exact(spec, n_max), params)
        rho = partial_trace(joint)
        stats = env_counts(joint)
    elif config.backend == "kraus":
        try:
            params.check_perturbative(n_max)
            report["perturbative"] = 1
        except PerturbativityViolated as exc:
            print(f"warning: {exc}", file=sys.stderr)
            report["perturbative"] = 0
        rho = evolve_kraus(coherent_exact(spec, n_max), params, check_perturbative=False)
        stats = sample_walk(n_ref, params, config.trials, config.seed)
    elif config.backend == "analytic":
        rho = reduced_density_analytic(spec, config.eta, n_max)
        stats = _analytic_stats(n_ref, config.eta, config.n0)
    else:
        sq = solve_squeeze_params(EnvModel(config.eta, config.n0), math.sqrt(2.0 * config.n0))
        rho = mixture_density(spec, sq, n_max)
        stats = _analytic_stats(n_ref, config.eta, config.n0)
    mean, var = rho.number_moments()
    report.update(trace=rho.trace(), purity=rho.purity(), number_mean=mean,
                  number_variance=var, min_eigenvalue=rho.min_eigenvalue(),
                  top_population=rho.top_population())
    if config.backend != "mixture" and config.eta > 0 and config.n0 >= 25:
        sq = solve_squeeze_params(EnvModel(config.eta, config.n0), math.sqrt(2.0 * config.n0))
        report["fidelity_vs_mixture"] = fidelity(rho, mixture_density(spec, sq, n_max))
    prov = io.provenance("evolve", config.as_dict(), n_max_used=n_max)
    return [
        io.write_density(out / "density.csv", rho, prov),
        io.write_env(out / "env.csv", stats, prov),
        io.write_kv(out / "report.csv", report, prov),
    ]


def cmd_fig(fig_id: int, config: RunConfig) -> list[Path]:
    from .figures import make_figure
    return make_figure(fig_id, config)


def cmd_verify(suite: str, config: RunConfig) -> int:
    from .verify import run
    checks = run(suite, config.seed)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from(args)
        if args.command == "fig":
            for path in cmd_fig(args.fig_id, config):
                print(path)
            return EXIT_OK
        if args.command == "evolve":
            for path in cmd_evolve(config):
                print(path)
            return EXIT_OK
        return cmd_verify(args.suite, config)
    except DistampError as exc:
        print(f"distamp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
