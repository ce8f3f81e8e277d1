"""``conelab`` command line.

Exit codes: 0 all checks passed (or were not applicable), 1 a checked claim
failed and a witness file was written, 2 usage or input error, 3 internal
error such as an exhausted grid budget.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import fejer, lab
from .cones import Cone, supp_c
from .convolution import PowerCache, convolve
from .errors import ConelabError, DegenerateMeasure, DimensionMismatch, GridOverflow, MeasureFormatError, ModeMismatch
from .io import SCHEMA_VERSION, dumps, load_measure, save_measure, save_report
from .measure import total_variation
from .sampling import DEFAULT_SEED, SamplerConfig

log = logging.getLogger("conelab")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


@dataclass
class ExperimentConfig:
    command: str
    action: str | None = None
    cone: Cone | None = None
    inputs: list = field(default_factory=list)
    output: str | None = None
    json_path: str | None = None
    witness_path: str = "witness.json"
    seed: int = DEFAULT_SEED
    trials: int = 100
    options: dict = field(default_factory=dict)


def _cone(text: str) -> Cone:
    try:
        return Cone.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid rational {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conelab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=SCHEMA_VERSION)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="canonicalize a measure file and print its summary")
    p.add_argument("--in", dest="inputs", action="append", required=True)
    p.add_argument("--out")

    p = sub.add_parser("conv", help="convolve measures, or 'conv pow' for convolution powers")
    p.add_argument("action", nargs="?", choices=["pow"])
    p.add_argument("--in", dest="inputs", action="append", required=True)
    p.add_argument("-k", type=int, default=2)
    p.add_argument("--out", required=True)

    p = sub.add_parser("suppc", help="print the cone support of a measure")
    p.add_argument("--cone", type=_cone, required=True)
    p.add_argument("--in", dest="inputs", action="append", required=True)

    p = sub.add_parser("verify", help="check one lemma instance")
    p.add_argument("action", choices=["lemma1", "lemma2"])
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--cone", type=_cone, required=True)
    p.add_argument("--h", type=_fraction, help="common cone shift (lemma1); defaults to the smallest valid one")
    p.add_argument("--r", type=_fraction, help="common cone support (lemma2); defaults to supp_C a")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--json")
    p.add_argument("--witness", default="witness.json")

    p = sub.add_parser("search", help="randomized searches")
    p.add_argument("action", choices=["thm2", "uniqueness"])
    p.add_argument("--cone", type=_cone, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--h", type=_fraction, default=Fraction(2))
    p.add_argument("--K", type=int, default=6)
    p.add_argument("--max-atoms", type=int, default=6)
    p.add_argument("--denominator", type=int, default=10)
    p.add_argument("--constraint", action="append", default=[], choices=["axis_contact", "outside_nonzero"])
    p.add_argument("--json")
    p.add_argument("--witness", default="witness.json")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")

    p = sub.add_parser("fejer", help="numerical check of the half-plane counterexample")
    p.add_argument("--L", type=float, default=200.0)
    p.add_argument("--N", type=int, default=65536)
    p.add_argument("--kmax", type=int, default=6)
    p.add_argument("--tol", type=float, default=0.02)
    p.add_argument("--ft-samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json")
    p.add_argument("--witness", default="witness.json")
    p.add_argument("--dump-csv")
    p.add_argument("--timings", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    skip = {"command", "action", "cone", "inputs", "out", "json", "witness", "seed", "trials", "verbose"}
    return ExperimentConfig(
        command=args.command,
        action=getattr(args, "action", None),
        cone=getattr(args, "cone", None),
        inputs=list(getattr(args, "inputs", None) or []),
        output=getattr(args, "out", None),
        json_path=getattr(args, "json", None),
        witness_path=getattr(args, "witness", "witness.json"),
        seed=getattr(args, "seed", DEFAULT_SEED),
        trials=getattr(args, "trials", 100),
        options={k: v for k, v in vars(args).items() if k not in skip},
    )


def _finish(report: lab.CheckReport, cfg: ExperimentConfig) -> int:
    timings = bool(cfg.options.get("timings"))
    text = dumps(report.to_dict(include_timings=timings))
    if cfg.json_path:
        Path(cfg.json_path).write_text(text)
    else:
        sys.stdout.write(text)
    if report.failed:
        Path(cfg.witness_path).write_text(dumps(report.witness))
        log.warning("claim %s failed; witness written to %s", report.claim, cfg.witness_path)
        return EXIT_FAILED
    return EXIT_OK


def _run_measure(cfg: ExperimentConfig) -> int:
    m = load_measure(cfg.inputs[0])
    if cfg.output:
        save_measure(m, cfg.output)
    print(f"dim={m.dim} mode={m.mode} atoms={len(m)} total_variation={total_variation(m)}")
    return EXIT_OK


def _run_conv(cfg: ExperimentConfig) -> int:
    if cfg.action == "pow":
        if len(cfg.inputs) != 1:
            raise ValueError("conv pow takes exactly one --in")
        k = cfg.options["k"]
        if k < 1:
            raise ValueError("-k must be at least 1")
        cache = PowerCache(load_measure(cfg.inputs[0]))
        out = Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        for j in range(1, k + 1):
            save_measure(cache.get(j), out / f"a^{j}.json")
        return EXIT_OK
    if len(cfg.inputs) < 2:
        raise ValueError("conv needs at least two --in files")
    measures = [load_measure(p) for p in cfg.inputs]
    result = measures[0]
    for m in measures[1:]:
        result = convolve(result, m)
    save_measure(result, cfg.output)
    return EXIT_OK


def _run_suppc(cfg: ExperimentConfig) -> int:
    print(supp_c(cfg.cone, load_measure(cfg.inputs[0])))
    return EXIT_OK


def _run_verify(cfg: ExperimentConfig) -> int:
    o = cfg.options
    a, b = load_measure(o["a"]), load_measure(o["b"])
    C = cfg.cone
    if cfg.action == "lemma1":
        h = o.get("h")
        if h is None:
            top = max(supp_c(C, a), supp_c(C, b))
            # smallest rational shift covering both supports
            h = Fraction(top.to_fraction()) if top.is_rational else Fraction(int(float(top)) + 1)
            h = h if h > 0 else Fraction(1)
        report = lab.verify_lemma1_instance(a, b, C, h)
    else:
        r = o.get("r")
        if r is None:
            top = supp_c(C, a)
            if not top.is_rational:
                raise ValueError("supp_C a is irrational; pass --r explicitly")
            r = top.to_fraction()
        report = lab.verify_lemma2_instance(a, b, C, r, o["kmax"])
    return _finish(report, cfg)


def _run_search(cfg: ExperimentConfig) -> int:
    o = cfg.options
    C = cfg.cone
    sampler = SamplerConfig(
        dim=C.dim,
        cone=C,
        max_atoms=o["max_atoms"],
        denominator=o["denominator"],
        trials=cfg.trials,
        seed=cfg.seed,
        h=o["h"],
        constraints=frozenset({"in_cone", *o["constraint"]}),
    )
    if cfg.action == "thm2":
        report = lab.falsify_theorem2(C, sampler)
    else:
        report = lab.uniqueness_search(C, o["h"], o["K"], sampler)
    return _finish(report, cfg)


def _run_fejer(cfg: ExperimentConfig) -> int:
    o = cfg.options
    report = fejer.verify_counterexample(
        fejer.GridSpec(o["L"], o["N"]),
        o["kmax"],
        o["tol"],
        ft_samples=o["ft_samples"],
        seed=cfg.seed,
        dump_csv=o.get("dump_csv"),
    )
    return _finish(report, cfg)


_COMMANDS = {
    "measure": _run_measure,
    "conv": _run_conv,
    "suppc": _run_suppc,
    "verify": _run_verify,
    "search": _run_search,
    "fejer": _run_fejer,
}


def run(cfg: ExperimentConfig) -> int:
    """Dispatch a parsed configuration and map errors onto exit codes."""
    try:
        return _COMMANDS[cfg.command](cfg)
    except GridOverflow as exc:
        log.error("%s", exc)
        return EXIT_INTERNAL
    except (MeasureFormatError, DimensionMismatch, ModeMismatch, DegenerateMeasure, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except ConelabError as exc:
        log.error("%s", exc)
        return EXIT_INTERNAL
    except MemoryError as exc:
        log.error("out of memory: %s", exc)
        return EXIT_INTERNAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
