"""Command line front end: compile, solve, verify, gen, render, export-dot.

Exit codes: 0 ok, 2 malformed input, 3 shape/precondition error,
4 size guard or deadline, 5 verification failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from pathlib import Path

from . import flow, harness, knapsack, knapsack_reduction, mcn, paths, powergrid
from .engine import time_budget
from .errors import BudgetExceeded, ParseError, ShapeError, SizeLimitError
from .qbf import emit_qdimacs, parse_qdimacs, qbf_decide, random_qbf, top_level_witness

EXIT_OK, EXIT_PARSE, EXIT_SHAPE, EXIT_GUARD, EXIT_VERIFY = 0, 2, 3, 4, 5

FORMULA_TARGETS = ("ubik", "utik", "umik", "umfipf", "umcn")
KNAPSACK_TARGETS = ("spipuf", "tepgfu")

_FROM_JSON = {
    "umik": knapsack.umik_from_json,
    "umfipf": flow.mfipf_from_json,
    "spipuf": paths.spipuf_from_json,
    "tepgfu": powergrid.grid_from_json,
    "umcn": mcn.mcn_from_json,
}
_TO_JSON = {
    knapsack.UmikInstance: knapsack.umik_to_json,
    flow.MfipfInstance: flow.mfipf_to_json,
    paths.SpipufInstance: paths.spipuf_to_json,
    powergrid.GridInstance: powergrid.grid_to_json,
    mcn.McnInstance: mcn.mcn_to_json,
}


class VerifyFailed(Exception):
    pass


# -- file helpers ----------------------------------------------------------------

def _read(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dumps(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _load_json(path) -> dict:
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    return data


def load_instance(path):
    """Read a game instance (JSON with a "game" tag) or a QDIMACS formula."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        game = data.get("game")
        if game not in _FROM_JSON:
            raise ParseError(f"unknown game tag {game!r}")
        return game, _FROM_JSON[game](data)
    return "qbf", parse_qdimacs(text)


def instance_json(inst) -> dict:
    return _TO_JSON[type(inst)](inst)


def _parse_ints(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"expected comma separated integers, got {text!r}") from None


def _parse_range(text: str) -> range:
    try:
        lo, _, hi = text.partition("-")
        lo = int(lo)
        hi = int(hi) if hi else lo
    except ValueError:
        raise ParseError(f"bad size range {text!r}") from None
    if lo < 1 or hi < lo:
        raise ParseError(f"bad size range {text!r}")
    return range(lo, hi + 1)


# -- compile ---------------------------------------------------------------------

def compile_target(target: str, text: str):
    """(instance, provenance JSON or None, artifact) for one compile request."""
    if target in FORMULA_TARGETS:
        q = parse_qdimacs(text)
        art = harness.compile_for(target, q)
        if target in ("ubik", "utik", "umik"):
            return art.instance, knapsack_reduction.provenance_to_json(art), art
        inst, prov = art
        if target == "umfipf":
            return inst, flow.provenance_to_json(prov), art
        return inst, {"labels": list(prov.labels), "constants": prov.constants}, art
    try:
        u = knapsack.umik_from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if target == "spipuf":
        inst, prov = paths.compile_ubik_to_spipuf(u)
        return inst, {"arcs": [list(r) for r in prov]}, (inst, prov)
    grid, names = powergrid.compile_ubik_to_tepgfu(u)
    return grid, {"buses": list(names)}, (grid, names)


def dot_of(inst, **marks) -> str:
    if isinstance(inst, flow.MfipfInstance):
        return flow.network_dot(inst.network, **marks)
    if isinstance(inst, paths.SpipufInstance):
        return paths.graph_dot(inst.graph, **marks)
    if isinstance(inst, powergrid.GridInstance):
        return powergrid.grid_dot(inst, **marks)
    if isinstance(inst, mcn.McnInstance):
        return mcn.mcn_dot(inst, marks.get("outcome"), marks.get("labels"))
    raise ShapeError("no graph view for knapsack instances; use render")


def cmd_compile(args) -> int:
    inst, prov, _ = compile_target(args.target, _read(args.input))
    _write(args.out, _dumps(instance_json(inst)))
    if args.provenance and prov is not None:
        _write(args.provenance, _dumps(prov))
    if args.dot:
        _write(args.dot, dot_of(inst))
    return EXIT_OK


# -- solve -----------------------------------------------------------------------

def solve_instance(game: str, inst, prune: bool = True):
    if game == "qbf":
        decision = qbf_decide(inst)
        witness = top_level_witness(inst) if decision else None
        return decision, None if witness is None else [int(b) for b in witness]
    if game == "umik":
        decision, witness = knapsack.umik_decide(inst, prune)
    elif game == "umfipf":
        decision, witness = flow.umfipf_decide(inst, prune)
    elif game == "spipuf":
        decision, witness = paths.spipuf_decide(inst, prune)
    elif game == "tepgfu":
        decision, witness = powergrid.tepgfu_decide(inst, prune)
    else:
        decision, witness = mcn.umcn_decide(inst, prune)
    return decision, None if witness is None else sorted(witness)


def cmd_solve(args) -> int:
    game, inst = load_instance(args.input)
    try:
        with time_budget(args.deadline):
            decision, witness = solve_instance(game, inst, not args.no_prune)
    except BudgetExceeded as exc:
        raise SizeLimitError(str(exc)) from None
    _write(args.out, json.dumps({"decision": decision, "witness": witness}) + "\n")
    if args.dot and game not in ("qbf", "umik"):
        _write(args.dot, dot_of(inst, fortified=tuple(witness or ())) if game != "umcn" else dot_of(inst))
    return EXIT_OK


# -- verify ----------------------------------------------------------------------

def _family_from_args(args) -> harness.FamilySpec:
    game = args.family
    if args.blocks:
        sizes = [tuple(_parse_ints(args.blocks))]
    else:
        ranges = [_parse_range(r) for r in (args.x, args.y, args.z)]
        nblocks = {"ubik": 2, "umfipf": 2, "utik": 3, "umcn": 3, "umik": 4}.get(game, 2)
        sizes = list(itertools.product(*ranges[:min(nblocks, 3)]))
        if nblocks == 4:
            sizes = [s + (s[-1],) for s in sizes]
    cmin, cmax = args.cmin, args.cmax
    items = tuple(_parse_ints(args.items)) if args.items else (5, 5, 7)
    return harness.FamilySpec(game, tuple(sizes), (cmin, cmax), count=args.count, seed=args.seed,
                              prune=not args.no_prune, exhaustive=args.exhaustive,
                              record_only=args.record_only, deadline=args.deadline, items=items)


def verify_stored(args) -> harness.VerificationReport:
    """Check a stored compiled instance against its source formula."""
    q = parse_qdimacs(_read(args.source))
    target = args.family
    stored = _load_json(args.artifact)
    fresh, _, art = compile_target(target, emit_qdimacs(q))
    report = harness.VerificationReport()
    problems = []
    if stored != instance_json(fresh):
        problems.append("stored instance differs from the compiled formula")
    game, inst = load_instance(args.artifact)
    decided, _ = solve_instance(game, inst, not args.no_prune)
    expected = qbf_decide(q)
    report.records.append(harness.InstanceRecord(0, str(q), expected, decided, decided == expected,
                                                 0.0, 0.0, note="; ".join(problems)))
    if target in ("ubik", "utik"):
        stored_art = knapsack_reduction.CompiledArtifact(inst, art.layout, art.provenance, q, art.kind)
        problems += harness.audit_knapsack(stored_art)
    report.properties.append(harness.PropertyResult("structure", not problems, 1,
                                                    {"problems": problems} if problems else None))
    return report


def cmd_verify(args) -> int:
    if args.artifact:
        if not args.source:
            raise ShapeError("--artifact needs --source")
        report = verify_stored(args)
    else:
        spec = _family_from_args(args)
        report = harness.check_equivalence(spec)
        if args.properties and spec.game in ("ubik", "utik", "umfipf", "umcn"):
            for q in harness.family_formulas(spec):
                try:
                    art = harness.compile_for(spec.game, q)
                except ShapeError:
                    if spec.record_only:
                        continue
                    raise
                sub = harness.run_property_suite(spec.game, art)
                for p in sub.properties:
                    p.instance = p.instance or str(q)
                report.properties.extend(sub.properties)
    if args.mutations:
        muts = harness.run_mutations(args.mutations, args.seed)
        for m in muts:
            report.properties.append(harness.PropertyResult(
                f"mutation-{m.id}", m.caught, 1, None if m.caught else {"mutation": m.description}))
    if args.report:
        _write(args.report, _dumps(report.to_json()))
    sys.stdout.write(report.text())
    if not report.ok:
        raise VerifyFailed()
    return EXIT_OK


# -- gen -------------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.kind == "qbf":
        sizes = _parse_ints(args.blocks)
        if not sizes:
            raise ShapeError("--blocks is required for formulas")
        q = random_qbf(args.seed, sizes, args.clauses, args.negated)
        _write(args.out, emit_qdimacs(q))
        return EXIT_OK
    rng = random.Random(args.seed)
    n = args.n
    if n < 1:
        raise ShapeError("need at least one item")
    pairs = [(rng.randint(1, args.wmax), rng.randint(1, args.pmax)) for _ in range(n)]
    u = knapsack.make_umik(pairs, rng.randint(1, sum(w for w, _ in pairs)),
                           rng.randint(1, sum(p for _, p in pairs)), [rng.randint(1, n)])
    _write(args.out, _dumps(knapsack.umik_to_json(u)))
    return EXIT_OK


# -- render / export-dot -----------------------------------------------------------

def cmd_render(args) -> int:
    if args.figure:
        _write(args.out, harness.regenerate_figures()[f"figure{args.figure}"])
        return EXIT_OK
    if args.target not in ("ubik", "utik", "umik"):
        raise ShapeError("digit tables exist only for knapsack targets")
    q = parse_qdimacs(_read(args.input))
    art = harness.compile_for(args.target, q)
    _write(args.out, knapsack_reduction.render_table(art, args.names))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    game, inst = load_instance(args.input)
    if game == "umcn":
        vacc, inf, prot = (_parse_ints(s) for s in (args.vaccinate, args.infect, args.protect))
        outcome = mcn.propagate(inst, vacc, inf, prot) if (vacc or inf or prot) else None
        _write(args.out, mcn.mcn_dot(inst, outcome))
        return EXIT_OK
    if game in ("qbf", "umik"):
        raise ShapeError("no graph view for this instance; use render")
    _write(args.out, dot_of(inst, fortified=tuple(_parse_ints(args.fortify)),
                            attacked=tuple(_parse_ints(args.attack))))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="interdiction", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a formula or knapsack instance into a game")
    p.add_argument("--target", required=True, choices=FORMULA_TARGETS + KNAPSACK_TARGETS)
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--provenance", help="write the element-to-role map here")
    p.add_argument("--dot", help="also write a DOT drawing here")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", help="decide a game instance or a formula")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--deadline", type=float, help="wall-clock seconds before giving up")
    p.add_argument("--dot", help="write a DOT drawing with the witness highlighted")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check reductions against the formula oracle")
    p.add_argument("--family", required=True, choices=harness.QBF_GAMES + harness.UBIK_GAMES)
    p.add_argument("--x", default="1", help="size or range a-b of the first block")
    p.add_argument("--y", default="1")
    p.add_argument("--z", default="1")
    p.add_argument("--blocks", help="explicit block sizes, e.g. 1,1,1,1")
    p.add_argument("--cmin", type=int, default=1)
    p.add_argument("--cmax", type=int, default=2)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--items", help="max items,weight,profit for knapsack-sourced families")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--record-only", action="store_true")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--deadline", type=float)
    p.add_argument("--properties", action="store_true", help="also run the property suite per instance")
    p.add_argument("--mutations", type=int, default=0, help="number of seeded mutations to try")
    p.add_argument("--artifact", help="stored compiled instance to check against --source")
    p.add_argument("--source", help="QDIMACS formula the stored instance came from")
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random formula or knapsack instance")
    p.add_argument("--kind", choices=("qbf", "ubik"), default="qbf")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--blocks", help="block sizes, e.g. 2,2")
    p.add_argument("--clauses", type=int, default=2)
    p.add_argument("--negated", action="store_true")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--wmax", type=int, default=5)
    p.add_argument("--pmax", type=int, default=7)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("render", help="print the digit table of a knapsack compilation")
    p.add_argument("--target", choices=("ubik", "utik", "umik"), default="ubik")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--figure", type=int, choices=(1, 2), help="render a built-in worked example")
    p.add_argument("--names", help="one letter per variable, e.g. abcd")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("export-dot", help="draw a graph instance in DOT")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--fortify", help="fortified arc or line indices")
    p.add_argument("--attack", help="attacked arc or line indices")
    p.add_argument("--vaccinate", help="critical node play: vaccinated vertices")
    p.add_argument("--infect")
    p.add_argument("--protect")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except VerifyFailed:
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
