"""Command-line frontend.

Exit codes: 0 accepted or success, 1 rejected (a witness is printed),
2 usage or document error.
"""

import argparse
import json
import sys
from dataclasses import replace

from . import kernels
from .document import (dump_relation, dump_system, load_quantizer, load_relation, load_system,
                       read_samples, relation_to_dict, to_jsonable)
from .errors import DocumentError, TemporaError
from .harness import SUITES, GeneratorConfig, run_theorem_suite
from .relations import (Flavor, check_behavior_inclusion, check_bisimulation, check_simulation,
                        synthesize_greatest)
from .signalmaps import quantize
from .signals import Signal
from .systems import check_state_axiom, external_behavior, make_system
from .timecore import INTERNAL, TimeAxis

AXIOM_LABEL = "Eq.(3)"
OK, REJECTED, USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _emit(args, report: dict, lines):
    if args.json:
        print(json.dumps(to_jsonable(report), indent=2))
    else:
        for line in lines:
            print(line)
        if getattr(args, "horizon_note", False) and report.get("horizon"):
            print(f"note: verdict is bounded by the horizon {tuple(report['horizon'])}; "
                  "obligations past it are not checked")


def _witness_lines(witness):
    if not witness:
        return []
    return [f"  {k}: {v}" for k, v in sorted(witness.items(), key=lambda kv: str(kv[0]))]


def _verdict_report(v, **extra):
    rep = {"accepted": bool(v), "clause": v.label, "failed_clause": v.failed_clause,
           "witness": v.witness, "horizon": v.horizon, "notes": v.notes}
    rep.update(extra)
    return rep


def _verdict_lines(what, v):
    if v:
        lines = [f"{what}: accepted"]
    else:
        lines = [f"{what}: rejected (clause {v.label})"] + _witness_lines(v.witness)
    return lines + [f"  note: {n}" for n in v.notes]


def _precheck(args, *systems):
    if args.no_axiom_check:
        return
    for s in systems:
        v = check_state_axiom(s)
        if not v:
            raise _Usage(f"{s.name or 'system'} violates its declared {s.axiom_class} axiom "
                         f"({AXIOM_LABEL}); use --no-axiom-check to skip")


# ---------------------------------------------------------------- commands

def cmd_validate(args):
    s = load_system(args.system)
    rep = {"valid": True, "trajectories": len(s.behavior), "axiom_class": s.axiom_class,
           "horizon": s.horizon}
    _emit(args, rep, [f"{args.system}: valid ({len(s.behavior)} trajectories, class {s.axiom_class})"])
    return OK


def cmd_check_axiom(args):
    s = load_system(args.system)
    v = check_state_axiom(s, args.cls)
    rep = {"accepted": v.accepted, "axiom_class": v.axiom_class, "clause": None if v else AXIOM_LABEL,
           "witness": v.witness, "boundary_notes": v.boundary_notes, "horizon": v.horizon}
    if v:
        lines = [f"state axiom ({v.axiom_class}): accepted"
                 + (" up to horizon" if v.boundary_notes else "")]
        lines += [f"  boundary: {n}" for n in v.boundary_notes]
    else:
        lines = [f"state axiom ({v.axiom_class}): rejected (clause {AXIOM_LABEL})"] + _witness_lines(v.witness)
    _emit(args, rep, lines)
    return OK if v else REJECTED


def cmd_external_behavior(args):
    s = load_system(args.system)
    beh = sorted(external_behavior(s), key=repr)
    rep = {"external_behavior": [list(g) for g in beh], "size": len(beh)}
    lines = [f"{len(beh)} external signal(s)"]
    lines += ["  " + " ".join("-" if g is None else str(g) for g in gamma) for gamma in beh]
    _emit(args, rep, lines)
    return OK


def cmd_check_relation(args):
    s1, s2 = load_system(args.sys1), load_system(args.sys2)
    _precheck(args, s1, s2)
    R = load_relation(args.relation, args.flavor, args.l)
    check = check_bisimulation if args.bisimulation else check_simulation
    v = check(s1, s2, R, R.flavor, R.l)
    what = f"{R.flavor.value}{'-bi' if args.bisimulation else ' '}simulation"
    if R.flavor == Flavor.L_INITIAL:
        what += f" (l={R.l})"
    _emit(args, _verdict_report(v, flavor=R.flavor.value, l=R.l), _verdict_lines(what, v))
    return OK if v else REJECTED


def cmd_synthesize(args):
    s1, s2 = load_system(args.sys1), load_system(args.sys2)
    _precheck(args, s1, s2)
    flavor = Flavor.parse(args.flavor or "async")
    res = synthesize_greatest(s1, s2, flavor, args.l or 0, bisimulation=args.bisimulation)
    rep = _verdict_report(res.verdict, flavor=flavor.value, l=args.l or 0,
                          relation=None if res.relation is None else relation_to_dict(res.relation),
                          deleted=len(res.deleted), kernel=kernels.BACKEND)
    if res.relation is not None:
        if args.out:
            dump_relation(res.relation, args.out)
        lines = [f"greatest {flavor.value} relation: {len(res.relation)} pair(s)"]
        lines += [f"  {a} ~ {b}" for a, b in res.relation]
        if args.out:
            lines.append(f"written to {args.out}")
    else:
        lines = [f"no {flavor.value} relation exists (clause {res.verdict.label})"]
        lines += _witness_lines(res.verdict.witness)
    _emit(args, rep, lines)
    return OK if res.relation is not None else REJECTED


def cmd_inclusion(args):
    s1, s2 = load_system(args.sys1), load_system(args.sys2)
    v = check_behavior_inclusion(s1, s2)
    rep = {"subset": v.subset, "superset": v.superset, "equal": v.equal, "relation": v.symbol,
           "missing": None if v.missing is None else list(v.missing)}
    lines = [f"B_E1 {v.symbol} B_E2"]
    if not v.subset and v.missing is not None:
        lines.append("  in B_E1 only: " + " ".join("-" if g is None else str(g) for g in v.missing))
    _emit(args, rep, lines)
    return OK if v.subset else REJECTED


def cmd_discretize(args):
    step, values = read_samples(args.csv, args.step)
    spec = load_quantizer(args.quantizer)
    internal = TimeAxis(step, len(values) - 1, INTERNAL)
    w = Signal(internal, tuple(values))
    entries = quantize(spec, w)
    x = tuple(None if v is None else "+".join(spec.classify(v)) or "_" for v in values)
    system = make_system(internal, spec.external_axis, [(w.values, x, entries)], w_space=spec.hull(),
                         gamma_space=None, axiom_class=args.cls or "async", name=args.name)
    text = dump_system(system, args.out, quantizer=spec)
    if args.out:
        rep = {"written": args.out, "entries": len(entries), "horizon": system.horizon}
        _emit(args, rep, [f"{len(entries)} Phi entr{'y' if len(entries) == 1 else 'ies'}; "
                          f"written to {args.out}"])
    else:
        sys.stdout.write(text)
    return OK


def cmd_harness(args):
    cfg = GeneratorConfig(seed=args.seed)
    if args.tau_style:
        cfg = replace(cfg, tau_style=args.tau_style)
    names = SUITES if args.suite == "all" else (args.suite,)
    reports = [run_theorem_suite(n, cfg, args.trials, shrink_failures=not args.no_shrink) for n in names]
    rep = {"kernel": kernels.BACKEND, "suites": [{
        "suite": r.suite, "trials": r.trials, "passed": r.passed, "failed": r.failed, "checks": r.checks,
        "vacuous": r.vacuous, "property_failures": r.property_failures, "elapsed": round(r.elapsed, 3),
        "counterexamples": [{"trial": c.trial, "seed": c.seed, "property": c.prop, "detail": c.detail,
                             "shrunk": c.shrunk} for c in r.counterexamples]} for r in reports]}
    lines = []
    for r in reports:
        lines.append(r.summary())
        for c in r.counterexamples[:3]:
            lines.append(f"  trial {c.trial} (seed {c.seed}) {c.prop}" + (" [shrunk]" if c.shrunk else ""))
    _emit(args, rep, lines)
    return OK if all(r.ok for r in reports) else REJECTED


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    common.add_argument("--horizon-note", action="store_true",
                        help="state the horizon bound that limits the verdict")
    relational = argparse.ArgumentParser(add_help=False)
    relational.add_argument("--flavor", choices=[f.value for f in Flavor], default=None)
    relational.add_argument("--l", type=int, default=None, help="external tick for l-initial relations")
    relational.add_argument("--bisimulation", action="store_true")
    relational.add_argument("--no-axiom-check", action="store_true",
                            help="do not check the declared axiom class of the inputs first")

    p = argparse.ArgumentParser(prog="tempora", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="parse and validate a system file")
    s.add_argument("system")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("check-axiom", parents=[common], help="check the state axiom")
    s.add_argument("system")
    s.add_argument("--class", dest="cls", default=None, help="async, ext-sync or sync")
    s.set_defaults(func=cmd_check_axiom)

    s = sub.add_parser("external-behavior", parents=[common], help="list the external behavior")
    s.add_argument("system")
    s.set_defaults(func=cmd_external_behavior)

    s = sub.add_parser("check-relation", parents=[common, relational], help="check a relation file")
    s.add_argument("sys1")
    s.add_argument("sys2")
    s.add_argument("relation")
    s.set_defaults(func=cmd_check_relation)

    s = sub.add_parser("synthesize", parents=[common, relational], help="greatest relation")
    s.add_argument("sys1")
    s.add_argument("sys2")
    s.add_argument("--out", default=None, help="write the relation file here")
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("inclusion", parents=[common], help="compare external behaviors")
    s.add_argument("sys1")
    s.add_argument("sys2")
    s.set_defaults(func=cmd_inclusion)

    s = sub.add_parser("discretize", parents=[common], help="quantize a sampled signal into a system")
    s.add_argument("csv")
    s.add_argument("quantizer")
    s.add_argument("--step", default=None, help="internal step as p/q (default: inferred)")
    s.add_argument("--class", dest="cls", default=None)
    s.add_argument("--name", default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_discretize)

    s = sub.add_parser("harness", parents=[common], help="run theorem suites")
    s.add_argument("--suite", choices=SUITES + ("all",), default="all")
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--tau-style", choices=["identity", "point-to-point", "set-to-point", "mixed"], default=None)
    s.add_argument("--no-shrink", action="store_true")
    s.set_defaults(func=cmd_harness)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "l", None) is not None and args.l < 0:
        parser.error("--l must be >= 0")
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be >= 1")
    try:
        return args.func(args)
    except (DocumentError, _Usage) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except TemporaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
