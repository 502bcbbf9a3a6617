"""Command line entry point: ``typent <subcommand> [options]``.

Exit codes: 0 all checks passed, 1 a tolerance check failed, 2 bad
configuration, 3 resource limit hit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import algebra
from .acceptance import run_acceptance
from .ensemble import EnsembleSpec
from .experiment import ConfigError, ExperimentConfig, GraphConfig, Partition, parse_k, resolve_seed, run_experiment
from .montecarlo import ResourceLimitError

log = logging.getLogger("typent")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3

DEFAULTS = {
    "single-edge": dict(graph=GraphConfig("chain", 2, 2), partitions=[Partition(0, 1)], k=[1]),
    "random-edge": dict(graph=GraphConfig("cycle", 12, 2), partitions=[Partition(0, 4)], k=[1, 2, 3]),
    "chain": dict(graph=GraphConfig("chain", 6, 2), partitions=[Partition(0, 3)], k=[1, 2, 3]),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="YAML experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--out", metavar="DIR", help="write report.csv and report.json here")
    p.add_argument("--dump-poly", action="store_true", help="write final swap-operator polynomials")
    p.add_argument("--mem-cap-gib", type=float, metavar="F")
    p.add_argument("--L", type=int, help="graph size")
    p.add_argument("--d", type=int, help="local dimension")
    p.add_argument("--k", help="depth: N, N,M,... or A..B")
    p.add_argument("--engines", help="comma separated subset of algebra,montecarlo,closed-form")
    p.add_argument("--workers", type=int)
    p.add_argument("--sample-csv", action="store_true", help="stream per-sample purities to CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="typent", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("single-edge", "random-edge", "chain"):
        p = sub.add_parser(name, help=f"run the {name} ensemble")
        _common(p)
        if name == "chain":
            p.add_argument("--ordering", choices=["least-entangling", "reversed", "random-per-step"])
        p.add_argument(
            "--scan",
            choices=["none", "area-law" if name == "random-edge" else "volume-law"],
        )
    p = sub.add_parser("spectrum", help="eigenvalues of the one-tick transfer matrix")
    _common(p)
    p.add_argument("--model", choices=["single-edge", "random-edge", "chain"])
    p.add_argument("--ordering", choices=["least-entangling", "reversed", "random-per-step"])
    p.add_argument("--basis-cap", type=int, default=4096)
    p = sub.add_parser("compare", help="run the preset acceptance suite")
    p.add_argument("--only", help="comma separated criterion numbers")
    p.add_argument("--out", metavar="DIR")
    return parser


def make_config(args, model: str) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        if cfg.model != model:
            raise ConfigError(f"config model {cfg.model!r} does not match subcommand {model!r}")
    else:
        cfg = ExperimentConfig(model=model, **DEFAULTS[model])
    if args.L is not None:
        cfg.graph.L = args.L
    if args.d is not None:
        cfg.graph.d = args.d
    if args.k is not None:
        cfg.k = parse_k(args.k)
    for key in ("seed", "samples", "out", "mem_cap_gib", "workers"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if args.engines:
        cfg.engines = [e.strip() for e in args.engines.split(",")]
    if args.dump_poly:
        cfg.dump_poly = True
    if args.sample_csv:
        cfg.sample_csv = True
    if getattr(args, "ordering", None):
        cfg.ordering = args.ordering
    if getattr(args, "scan", None):
        cfg.scan = args.scan
    cfg.validate()
    return cfg


def _print_report(report) -> None:
    sys.stdout.write(report.to_csv())
    for c in report.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    if "area_law_fit" in report.extras:
        print("area-law fit:", json.dumps(report.extras["area_law_fit"]))


def cmd_run(args) -> int:
    cfg = make_config(args, args.command)
    report = run_experiment(cfg)
    _print_report(report)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_spectrum(args) -> int:
    model = args.model or "random-edge"
    cfg = make_config(args, model) if not args.config else ExperimentConfig.load(args.config)
    if args.config and args.ordering:
        cfg.ordering = args.ordering
    g = cfg.graph.build()
    A = cfg.partitions[0].mask(g.n)
    try:
        sup = EnsembleSpec(cfg.model, g, A, 1, cfg.ordering).superop(resolve_seed(cfg))
        if isinstance(sup, algebra.SingleEdge) and g.n <= 12:
            basis = list(range(1 << g.n))
        elif g.is_chain():
            basis = algebra.chain_interval_basis(g.n)
        else:
            basis = algebra.closure_basis(sup, A, cap=args.basis_cap)
        M = algebra.transfer_matrix(sup, basis)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    sr = algebra.spectral_analysis(M)
    doc = {
        "model": cfg.model,
        "ordering": cfg.ordering if cfg.model == "chain" else None,
        "L": g.n,
        "d": g.d,
        "basis_dimension": sr.dimension,
        "leading": sr.leading,
        "gap": sr.gap,
        "eigenvalues": [[float(z.real), float(z.imag)] for z in sr.eigenvalues],
        "moduli": [float(m) for m in sr.moduli],
    }
    text = json.dumps(doc, indent=2)
    print(text)
    if cfg.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out) / "spectrum.json").write_text(text)
    ok = abs(sr.leading - 1.0) <= 1e-10 and float(np.max(sr.moduli)) <= 1.0 + 1e-10
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compare(args) -> int:
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError as exc:
            raise ConfigError("--only takes comma separated integers") from exc
    results = run_acceptance(only)
    for r in results:
        print(r.line())
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "acceptance.json").write_text(
            json.dumps([r.__dict__ for r in results], indent=2)
        )
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    handler = {"spectrum": cmd_spectrum, "compare": cmd_compare}.get(args.command, cmd_run)
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
