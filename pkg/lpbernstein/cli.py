"""Command-line entry point: lpbernstein <subcommand> [options]."""
import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from typing import List, Optional, Sequence

from marshmallow import ValidationError

from . import settings
from .arcsets import ArcSet
from .equilibrium import density_model_for
from .errors import LabError, SolverFailure, TSetStructureError
from .harness import (bernstein_sweep, lemma_battery, resolve_set, sharpness_sweep, summarize,
                      summary_record, write_csv, write_density, write_json, write_margins,
                      write_rows)
from .models import (ExperimentConfig, ParamSet, arc_set_spec_schema,
                     experiment_config_schema, poly_spec_schema)
from .tset import TSet

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> List[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="experiment config JSON")
    parser.add_argument("--p", type=_floats, help="comma-separated p values")
    parser.add_argument("--n", type=_ints, help="comma-separated n ladder")
    parser.add_argument("--seeds", type=_ints, help="comma-separated seeds")
    parser.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lpbernstein", description="Numerical lab for L^p Bernstein inequalities")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    commands = parser.add_subparsers(dest="command", required=True)

    density = commands.add_parser("density", help="equilibrium density on a grid as CSV")
    source = density.add_mutually_exclusive_group(required=True)
    source.add_argument("--tset", help="PolySpec JSON of U")
    source.add_argument("--arcs", help="ArcSetSpec JSON")
    density.add_argument("--grid", type=int, default=512)
    density.add_argument("--collocation-degree", type=int, default=settings.COLLOCATION_DEGREES[0])
    density.add_argument("--out", help="CSV path (default: stdout)")

    tset = commands.add_parser("tset", help="build and validate a T-set")
    tset.add_argument("--coeffs", required=True, help="PolySpec JSON of U")

    _add_overrides(commands.add_parser("verify", help="Bernstein ratio sweep"))

    sharpness = commands.add_parser("sharpness", help="T_k(U) sharpness sweep")
    _add_overrides(sharpness)
    sharpness.add_argument("--ks", type=_ints, default=[1, 2, 4, 8, 16, 32, 64])

    _add_overrides(commands.add_parser("lemmas", help="lemma verifier battery"))

    report = commands.add_parser("report", help="merge JSON summaries into one CSV")
    report.add_argument("summaries", nargs="+")
    report.add_argument("--out", required=True, help="CSV path")
    return parser


def _read_json(path: str):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg: ExperimentConfig = experiment_config_schema.load(_read_json(args.config))
    changes = {}
    if args.p:
        changes["p_values"] = args.p
    if args.n:
        changes["n_ladder"] = args.n
    if args.seeds:
        changes["seeds"] = args.seeds
    if args.out:
        changes["output_dir"] = args.out
    if args.rel_tol is not None:
        changes["quad"] = dataclasses.replace(cfg.quad, rel_tol=args.rel_tol)
    return dataclasses.replace(cfg, **changes).validate()


def _output(cfg: ExperimentConfig, suffix: str) -> str:
    return os.path.join(cfg.output_dir, f"{cfg.name}_{suffix}")


def cmd_density(args: argparse.Namespace) -> int:
    if args.tset:
        model = density_model_for(TSet.from_spec(poly_spec_schema.load(_read_json(args.tset))))
    else:
        arcs = ArcSet.from_spec(arc_set_spec_schema.load(_read_json(args.arcs)))
        model = density_model_for(arcs, args.collocation_degree)
    t = model.arcs.grid(args.grid)
    values = model.density(t)
    if args.out:
        write_density(args.out, t, values)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["t", "omega"])
        writer.writerows(zip(t.tolist(), values.tolist()))
    return EXIT_OK


def cmd_tset(args: argparse.Namespace) -> int:
    tset = TSet.from_spec(poly_spec_schema.load(_read_json(args.coeffs)))
    print(json.dumps(tset.describe(), indent=2))
    return EXIT_OK


def _sweep_exit(summaries, flagged: int) -> int:
    if flagged:
        return EXIT_NUMERIC
    return EXIT_OK if all(s.passed for s in summaries) else EXIT_INVALID


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    rows = bernstein_sweep(cfg)
    summaries = [summarize(rows, cfg.name, p) for p in cfg.p_values]
    write_rows(_output(cfg, "rows.csv"), rows)
    write_json(_output(cfg, "summary.json"), [summary_record(s) for s in summaries])
    for s in summaries:
        log.info("%s p=%s maxima=%s passed=%s", s.name, s.p, s.maxima, s.passed)
    return _sweep_exit(summaries, sum(1 for row in rows if row.flagged))


def cmd_sharpness(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    tset, dens = resolve_set(cfg)
    if tset is None:
        raise TSetStructureError("sharpness sweeps need a T-set (tset or single_arc_beta)")
    rows = []
    for p in cfg.p_values:
        rows += sharpness_sweep(tset, p, args.ks, cfg.quad, dens)
    write_rows(_output(cfg, "sharpness.csv"), rows)
    gaps = {p: [abs(r.ratio - 1) for r in rows if r.p == p] for p in cfg.p_values}
    write_json(_output(cfg, "sharpness.json"),
               [{"name": cfg.name, "p": p, "ks": list(args.ks), "gaps": g}
                 for p, g in gaps.items()])
    return EXIT_NUMERIC if any(r.flagged for r in rows) else EXIT_OK


def cmd_lemmas(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    tset, dens = resolve_set(cfg)
    if tset is None:
        raise TSetStructureError("lemma batteries need a T-set (tset or single_arc_beta)")
    records = []
    for p in cfg.p_values:
        params = ParamSet.for_p(p).validate(theorem=not cfg.allow_p_ge_1)
        records += lemma_battery(tset, dens, cfg.n_ladder, cfg.seeds, params, cfg.quad, cfg.block)
    write_margins(_output(cfg, "margins.json"), records)
    failed = [r for r in records if not r.holds]
    for record in failed:
        log.warning("%s fails at n=%d seed=%s: slack %.3e", record.lemma, record.n, record.seed,
                    record.slack)
    return EXIT_INVALID if failed else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    rows = []
    for path in args.summaries:
        for entry in _read_json(path):
            rows.append({key: json.dumps(value) if isinstance(value, list) else value
                         for key, value in entry.items()})
    write_csv(args.out, rows)
    return EXIT_OK


COMMANDS = {
    "density": cmd_density,
    "tset": cmd_tset,
    "verify": cmd_verify,
    "sharpness": cmd_sharpness,
    "lemmas": cmd_lemmas,
    "report": cmd_report,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=args.log_level.upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, json.JSONDecodeError) as e:
        log.error("cannot read input: %s", e)
        return EXIT_INVALID
    except ValidationError as e:
        log.error("invalid input: %s", e.messages)
        return EXIT_INVALID
    except SolverFailure as e:
        log.error("%s", e)
        return EXIT_NUMERIC
    except LabError as e:
        log.error("%s", e)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
