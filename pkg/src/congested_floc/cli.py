"""Command-line front end.

Exit status: 0 success / no violation, 1 violation found (or a bound or
witness fact failed), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from pathlib import Path

from . import io as rio
from .mechanisms import MechanismId
from .model import Instance, InstanceError, as_rational
from .oracle import DEFAULT_RESOLUTION, grid_oracle, optimal_max, optimal_social
from .audit.bounds import upper_bound
from .audit.deviations import REFERENCE_MECHANISMS, DeviationModel, coalition_report, unilateral_report
from .audit.generator import ALPHA_POLICIES, GeneratorConfig, trial_instance
from .audit.ratios import approximation_ratio, worker_count, worst_case_search
from .audit.witnesses import check_witness, get_witness, witness_corpus

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

MECHANISM_CHOICES = [m.value for m in MechanismId] + sorted(REFERENCE_MECHANISMS)
AUDIT_DEFAULTS = GeneratorConfig(n_min=1, n_max=10, m_min=1, m_max=3, denominator=8,
                                 alpha_policy="mixed", alpha_denominator=4)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    instance: str | None = None
    witness: str | None = None
    generator: GeneratorConfig | None = None
    mechanisms: tuple[str, ...] = ()
    objective: str = "both"
    deviations: str = "both"
    seed: int | None = None
    trials: int = 1
    grid: Fraction | None = None
    oracle: str = "exact"
    at: tuple[Fraction, ...] = ()
    format: str = "json"
    output: str | None = None
    allow_violating_aversion: bool = False
    unilateral: bool = True
    coalition: bool = True


# -- instance sources ----------------------------------------------------------

def _instances(cfg: RunConfig) -> list[Instance]:
    if cfg.instance and cfg.witness:
        raise UsageError("give at most one of --instance and --witness")
    if cfg.instance:
        return [rio.load_instance(cfg.instance)]
    if cfg.witness:
        return [get_witness(cfg.witness).instance]
    if cfg.seed is None:
        raise UsageError("generated instances need --seed (or pass --instance / --witness)")
    return [trial_instance(cfg.generator, cfg.seed, t) for t in range(cfg.trials)]


def _objectives(cfg: RunConfig) -> list[str]:
    return ["social", "max"] if cfg.objective == "both" else [cfg.objective]


def _named_point(y: Fraction):
    def at(inst):
        return y
    at.__name__ = f"at={y}"
    return at


# -- eval -----------------------------------------------------------------------

def cmd_eval(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    mechs = cfg.mechanisms or tuple(m.value for m in MechanismId)
    objectives = _objectives(cfg)
    resolution = cfg.grid or DEFAULT_RESOLUTION
    points = list(cfg.at)
    if cfg.witness and not cfg.at:
        points = [(Fraction(f.params["y"]), f.params["objective"]) for f in get_witness(cfg.witness).facts
                  if f.kind == "ratio_at"]
    else:
        points = [(y, obj) for y in points for obj in objectives]
    runs, rows = [], []
    for inst in _instances(cfg):
        inst.require_nonempty()
        inst.require_consistent(cfg.allow_violating_aversion)
        optima = {}
        for obj in objectives:
            entry = {}
            if cfg.oracle in ("exact", "both"):
                if obj == "social":
                    entry["exact"] = optimal_social(inst, allow_violating_aversion=cfg.allow_violating_aversion)
                else:
                    entry["exact"] = optimal_max(inst, allow_violating_aversion=cfg.allow_violating_aversion)
            if cfg.oracle in ("grid", "both"):
                y, v = grid_oracle(inst, obj, resolution)
                entry["grid"] = {"resolution": resolution, "y": y, "value": v}
            optima[obj] = entry
        reports = [approximation_ratio(m, inst, obj, allow_violating_aversion=cfg.allow_violating_aversion)
                   for m in mechs for obj in objectives]
        comparisons = [approximation_ratio(_named_point(y), inst, obj,
                                           allow_violating_aversion=cfg.allow_violating_aversion)
                       for y, obj in points if obj in objectives]
        runs.append({"instance": inst, "optima": optima, "mechanisms": reports, "comparisons": comparisons})
        rows.extend(rio.ratio_row(r) for r in reports + comparisons)
    return {"runs": runs}, rows, EXIT_OK


# -- audit ----------------------------------------------------------------------

def _audit_one(args):
    mech, inst, dev, grid, allow, unilateral, coalition = args
    reps = []
    if unilateral:
        reps.append(unilateral_report(mech, inst, dev, grid=grid, allow_violating_aversion=allow))
    if coalition:
        reps.append(coalition_report(mech, inst, dev, grid=grid, allow_violating_aversion=allow))
    return reps


def cmd_audit(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    if len(cfg.mechanisms) != 1:
        raise UsageError("audit takes exactly one --mechanism")
    mech = cfg.mechanisms[0]
    dev = DeviationModel.parse(cfg.deviations)
    instances = _instances(cfg)
    for inst in instances:
        inst.require_nonempty()
        inst.require_consistent(cfg.allow_violating_aversion)
    jobs = [(mech, inst, dev, cfg.grid, cfg.allow_violating_aversion, cfg.unilateral, cfg.coalition)
            for inst in instances]
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_audit_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_audit_one(j) for j in jobs]
    checked = skipped = 0
    violations, rows = [], []
    for reps in results:
        for rep in reps:
            checked += rep.checked
            skipped += rep.skipped
            for v in rep.violations:
                violations.append({"instance": rep.instance, "audit": rep.kind, **rio.to_jsonable(v)})
                rows.append(rio.violation_row(v, instance=rep.instance, mechanism=rep.mechanism,
                                              deviation=dev, audit=rep.kind))
    audits = [k for k, on in (("unilateral", cfg.unilateral), ("coalition", cfg.coalition)) if on]
    doc = {
        "mechanism": mech,
        "deviation": dev.value,
        "audits": audits,
        "instances": len(instances),
        "checked": checked,
        "skipped_aversion_violating": skipped,
        "violation_count": len(violations),
        "ok": not violations,
        "violations": violations,
    }
    return doc, rows, EXIT_VIOLATION if violations else EXIT_OK


# -- search ---------------------------------------------------------------------

def cmd_search(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    if len(cfg.mechanisms) != 1:
        raise UsageError("search takes exactly one --mechanism")
    if cfg.objective == "both":
        raise UsageError("search needs --objective social or max")
    if cfg.seed is None:
        raise UsageError("search needs --seed")
    rep = worst_case_search(cfg.mechanisms[0], cfg.objective, cfg.generator, cfg.trials, cfg.seed)
    bound = upper_bound(cfg.mechanisms[0], cfg.objective)
    doc = {
        "mechanism": rep.best.mechanism,
        "objective": cfg.objective,
        "trials": rep.trials,
        "seed": rep.seed,
        "generator": asdict(cfg.generator),
        "best_trial": rep.best_trial,
        "best": rep.best,
        "best_instance": rep.best_instance,
        "bound": None if bound is None else {
            "label": bound.label, "decimal": rio.decimal(float(bound)), "note": bound.note},
        "within_bound": rep.within_bound,
    }
    return doc, [rio.search_row(rep)], EXIT_VIOLATION if rep.within_bound is False else EXIT_OK


# -- witnesses ------------------------------------------------------------------

def cmd_witnesses(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    ws = [get_witness(cfg.witness)] if cfg.witness else list(witness_corpus().values())
    entries, rows, failed = [], [], False
    for w in ws:
        results = check_witness(w)
        facts = []
        for r in results:
            failed |= not r.passed
            obs = r.observed
            facts.append({"fact": r.fact.label, "expected": rio.to_jsonable(r.fact.expected),
                          "observed": rio.to_jsonable(obs), "passed": r.passed})
            rows.append({"witness": w.name, "fact": r.fact.label,
                         "expected": _cell(r.fact.expected), "observed": _cell(obs),
                         "passed": str(r.passed).lower()})
        entries.append({"name": w.name, "description": w.description, "instance": w.instance,
                        "variants": w.variants, "facts": facts})
    return {"witnesses": entries}, rows, EXIT_VIOLATION if failed else EXIT_OK


def _cell(v) -> str:
    if isinstance(v, (tuple, list)):
        return ";".join(rio.exact(x) for x in v)
    if isinstance(v, bool):
        return str(v).lower()
    return rio.exact(v)


WITNESS_COLUMNS = ("witness", "fact", "expected", "observed", "passed")
COMMANDS = {
    "eval": (cmd_eval, rio.RATIO_COLUMNS),
    "audit": (cmd_audit, rio.VIOLATION_COLUMNS),
    "search": (cmd_search, rio.SEARCH_COLUMNS),
    "witnesses": (cmd_witnesses, WITNESS_COLUMNS),
}


# -- argument parsing -------------------------------------------------------------

def _rational_arg(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_rational(text: str) -> Fraction:
    v = _rational_arg(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="congested-floc",
                                description="Facility location with intra-group congestion: "
                                            "mechanisms, exact optima and strategyproofness audits.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, source=True, generator=True):
        if source:
            sp.add_argument("--instance", help="instance JSON file")
            sp.add_argument("--witness", help="builtin witness name")
        if generator:
            g = sp.add_argument_group("generator")
            g.add_argument("--seed", type=_seed)
            g.add_argument("--trials", type=_positive_int, default=None)
            g.add_argument("--n-min", type=_positive_int)
            g.add_argument("--n-max", type=_positive_int)
            g.add_argument("--m-min", type=_positive_int)
            g.add_argument("--m-max", type=_positive_int)
            g.add_argument("--denominator", type=_positive_int, help="location grid 1/D")
            g.add_argument("--alpha-policy", choices=ALPHA_POLICIES)
            g.add_argument("--alpha-denominator", type=_positive_int)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", "-o", help="write report here instead of stdout")
        sp.add_argument("--allow-violating-aversion", action="store_true",
                        help="run on instances that break consistency of aversion")

    e = sub.add_parser("eval", help="mechanism outputs, optima and exact ratios")
    common(e)
    e.add_argument("--mechanism", action="append", choices=MECHANISM_CHOICES,
                   help="repeatable; default: all five mechanisms")
    e.add_argument("--objective", choices=("social", "max", "both"), default="both")
    e.add_argument("--oracle", choices=("exact", "grid", "both"), default="exact")
    e.add_argument("--grid", type=_positive_rational, help="grid-oracle resolution (default 1/10000)")
    e.add_argument("--at", type=_rational_arg, action="append", default=[],
                   help="also report the ratio of a fixed facility location (repeatable)")

    a = sub.add_parser("audit", help="unilateral and co-located coalition misreport audits")
    common(a)
    a.add_argument("--mechanism", action="append", choices=MECHANISM_CHOICES, required=True)
    a.add_argument("--deviations", choices=("location", "group", "both"), default="both")
    a.add_argument("--grid", type=_positive_rational, help="add a uniform grid to the location candidates")
    a.add_argument("--no-coalitions", action="store_true")
    a.add_argument("--no-unilateral", action="store_true")

    s = sub.add_parser("search", help="seeded worst-case ratio search")
    common(s, source=False)
    s.add_argument("--mechanism", action="append", choices=MECHANISM_CHOICES, required=True)
    s.add_argument("--objective", choices=("social", "max"), required=True)

    w = sub.add_parser("witnesses", help="list builtin witnesses and check their facts")
    w.add_argument("--witness", help="check only this witness")
    w.add_argument("--format", choices=("json", "csv"), default="json")
    w.add_argument("--output", "-o")
    return p


def _generator(args, defaults: GeneratorConfig) -> GeneratorConfig:
    fields = ("n_min", "n_max", "m_min", "m_max", "denominator", "alpha_policy", "alpha_denominator")
    given = {f: getattr(args, f) for f in fields if getattr(args, f, None) is not None}
    cfg = replace(defaults, **given)
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def config_from_args(args) -> RunConfig:
    cmd = args.command
    defaults = AUDIT_DEFAULTS if cmd == "audit" else GeneratorConfig()
    trials = getattr(args, "trials", None)
    cfg = RunConfig(
        subcommand=cmd,
        instance=getattr(args, "instance", None),
        witness=getattr(args, "witness", None),
        generator=_generator(args, defaults) if cmd != "witnesses" else None,
        mechanisms=tuple(getattr(args, "mechanism", None) or ()),
        objective=getattr(args, "objective", "both"),
        deviations=getattr(args, "deviations", "both"),
        seed=getattr(args, "seed", None),
        trials=trials if trials is not None else (1000 if cmd == "search" else 1),
        grid=getattr(args, "grid", None),
        oracle=getattr(args, "oracle", "exact"),
        at=tuple(getattr(args, "at", ())),
        format=args.format,
        output=args.output,
        allow_violating_aversion=getattr(args, "allow_violating_aversion", False),
        unilateral=not getattr(args, "no_unilateral", False),
        coalition=not getattr(args, "no_coalitions", False),
    )
    if cmd in ("eval", "audit") and (cfg.instance or cfg.witness) and trials is not None:
        raise UsageError("--trials only applies to generated instances")
    return cfg


def render(cfg: RunConfig, doc: dict, rows: list[dict]) -> str:
    if cfg.format == "csv":
        return rio.dumps_csv(COMMANDS[cfg.subcommand][1], rows)
    return rio.dumps_json(doc)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        func = COMMANDS[cfg.subcommand][0]
        doc, rows, status = func(cfg)
    except (UsageError, InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_INPUT
    text = render(cfg, doc, rows)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
