"""Command-line front end.

Exit status: 0 success, 1 no admissible repair, 2 input error, 3 resource
limit, 4 inconsistent program, 5 oracle disagreement (``oracle-check`` only).
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .compiler import RepairMode, RicPolicy, StabilizerPolicy, compile_query_program, repair_program
from .cqa import (
    RepairConfig,
    evaluate_k_query,
    run_pipeline,
    wfs_consistent_answers,
)
from .errors import (
    InconsistentProgram,
    NoAdmissibleRepair,
    RepairLPError,
    ResourceLimitExceeded,
)
from .grounder import ACTIVE, DomainDeclaration, ground
from .model import NULL, DatabaseInstance, Literal, Schema, contains_k, format_term, query_atoms
from .parser import emit_dlv, format_literal, parse_constraints, parse_domain, parse_instance, parse_program, parse_query
from .wfs import core, primed_projection, well_founded

EXIT_OK, EXIT_NO_REPAIR, EXIT_INPUT, EXIT_LIMIT, EXIT_INCONSISTENT, EXIT_MISMATCH = range(6)

STATUS = {
    EXIT_OK: "ok",
    EXIT_NO_REPAIR: "no_admissible_repair",
    EXIT_INPUT: "input_error",
    EXIT_LIMIT: "resource_limit",
    EXIT_INCONSISTENT: "inconsistent_program",
    EXIT_MISMATCH: "oracle_mismatch",
}

MODES = {"winslett": RepairMode.WINSLETT, "dalal": RepairMode.DALAL, "defaults": RepairMode.RAW_DEFAULTS}
STABILIZERS = {p.value: p for p in StabilizerPolicy}
RICS = {"null": RicPolicy.NULL_INSERTION, "delete": RicPolicy.DELETE_ONLY}


# ---------------------------------------------------------------------------
# argument handling

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("facts", nargs="?", help="database facts file (omit for an empty instance)")
    p.add_argument("--ics", help="integrity constraints file")
    p.add_argument("--q", help="query text, or @FILE to read it from a file")
    p.add_argument("--mode", choices=sorted(MODES), default="winslett")
    p.add_argument("--ric", choices=sorted(RICS), default="null", help="referential constraint policy")
    p.add_argument("--stabilizer", choices=sorted(STABILIZERS), default="guarded")
    p.add_argument("--domain", default="active", help="'active' or a file listing the finite domain")
    p.add_argument("--strong", help="extra program: definitions plus headless strong constraints")
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--emit", choices=("none", "dlv"), default="none", help="also print the compiled program")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-branches", type=int, default=None)
    p.add_argument("--all", action="store_true", help="core/wfs: include unprimed literals")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repairlp", description="Database repairs and consistent answers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    sub.add_parser("repair", parents=[common], help="list the repairs of an instance")
    q = sub.add_parser("query", parents=[common], help="consistent answers to a query")
    q.add_argument("--method", choices=("exact", "wfs"), default="exact")
    sub.add_parser("core", parents=[common], help="literals true in every answer set")
    sub.add_parser("wfs", parents=[common], help="well-founded partition of the repair program")
    sub.add_parser("ground", parents=[common], help="print the ground repair program")
    sub.add_parser("compile", parents=[common], help="print the repair program")
    o = sub.add_parser("oracle-check", parents=[common], help="randomized cross-check against brute force")
    o.add_argument("--count", type=int, default=50)
    return parser


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


class Inputs:
    def __init__(self, args):
        text = _read(args.facts) if args.facts else ""
        r = parse_instance(text, filename=args.facts or "<facts>")
        self.ics = parse_constraints(_read(args.ics), filename=args.ics) if args.ics else []
        atoms = [a for c in self.ics for a in c.atoms()]
        atoms += [c.existential.target for c in self.ics if c.existential is not None]
        self.query = None
        if args.q:
            qtext = _read(args.q[1:]) if args.q.startswith("@") else args.q
            self.query = parse_query(qtext)
            atoms += [a for a in query_atoms(self.query) if not a.is_builtin]
        schema = r.schema.merged(Schema.infer(atoms))
        self.extra = parse_program(_read(args.strong), schema, args.strong) if args.strong else None
        self.r = DatabaseInstance(schema, r.facts)
        if args.domain == "active":
            domain = ACTIVE
        else:
            domain = DomainDeclaration.finite(parse_domain(_read(args.domain), args.domain))
        self.config = RepairConfig(MODES[args.mode], STABILIZERS[args.stabilizer], RICS[args.ric], domain,
                                   args.max_branches)

    def program(self):
        prog = repair_program(self.ics, self.r.schema, self.config.mode, self.config.policy, self.config.ric_policy)
        if self.query is not None and not contains_k(self.query.body):
            qprog, _ = compile_query_program(self.query.body, self.config.mode, self.r.schema, _qpred(self.r))
            prog = prog + qprog
        return prog


def _qpred(r):
    return "query" if "query" not in r.schema else "aux_query"


# ---------------------------------------------------------------------------
# rendering

def _json_term(t):
    return None if t is NULL else t


def _atoms(atoms) -> list:
    return [format_literal(Literal(a)) for a in sorted(atoms, key=lambda a: a.sort_key())]


def _lits(lits) -> list:
    return [format_literal(l) for l in sorted(lits, key=Literal.sort_key)]


def _cmd_repair(inp: Inputs, args, out: dict, lines: list):
    run = run_pipeline(inp.r, inp.ics, inp.config, inp.extra)
    out["repairs"] = [
        {"facts": _atoms(rep.instance.facts), "inserted": _atoms(rep.inserted), "deleted": _atoms(rep.deleted)}
        for rep in run.repairs
    ]
    out["counts"] = {"repairs": len(run.repairs), "answer_sets": len(run.all_sets), "admissible": len(run.sets)}
    for i, rep in enumerate(out["repairs"], 1):
        lines.append(f"repair {i}: {len(rep['facts'])} fact(s)")
        lines.extend(f"  + {a}" for a in rep["inserted"])
        lines.extend(f"  - {a}" for a in rep["deleted"])
        lines.append("  {" + ", ".join(rep["facts"]) + "}")
    lines.append(f"{len(run.repairs)} repair(s)")


def _cmd_query(inp: Inputs, args, out: dict, lines: list):
    if inp.query is None:
        raise ValueError("query needs --q")
    if args.method == "wfs":
        res = wfs_consistent_answers(inp.query, inp.r, inp.ics, inp.config)
    else:
        res = evaluate_k_query(inp.query, inp.r, inp.ics, inp.config, inp.extra)
    rows = res.sorted_answers()
    out["variables"] = [v.name for v in res.variables]
    out["answers"] = [[_json_term(x) for x in t] for t in rows]
    out["certified_exact"] = res.certified_exact
    out["counts"] = {"answers": len(rows), "repairs": res.repairs_count}
    if not res.variables:
        lines.append("true" if res.truth else "false")
    else:
        lines.append("(" + ", ".join(out["variables"]) + ")")
        lines.extend("(" + ", ".join(format_term(x) for x in t) + ")" for t in rows)
        lines.append(f"{len(rows)} answer(s)")
    lines.append(f"certified_exact: {str(res.certified_exact).lower()}")


def _cmd_core(inp: Inputs, args, out: dict, lines: list):
    qprog = None
    if inp.query is not None and not contains_k(inp.query.body):
        qprog, _ = compile_query_program(inp.query.body, inp.config.mode, inp.r.schema, _qpred(inp.r))
    run = run_pipeline(inp.r, inp.ics, inp.config, inp.extra, qprog, inp.query)
    sets = run.sets
    c = core(sets)
    shown = c if args.all else primed_projection(c)
    out["core"] = _lits(shown)
    out["counts"] = {"answer_sets": len(sets), "core": len(shown)}
    lines.extend(out["core"])
    lines.append(f"{len(shown)} literal(s) in the core of {len(sets)} answer set(s)")


def _cmd_wfs(inp: Inputs, args, out: dict, lines: list):
    g = ground(inp.program(), inp.r, inp.config.domain, inp.ics, inp.query)
    w = well_founded(g, e_mode=inp.config.mode is RepairMode.RAW_DEFAULTS)
    pick = (lambda s: s) if args.all else primed_projection
    parts = {"true": pick(w.true), "false": pick(w.false), "undefined": pick(w.undefined)}
    if inp.query is not None and not args.all:  # keep the query atoms visible
        qp = _qpred(inp.r)
        for key, src in (("true", w.true), ("false", w.false), ("undefined", w.undefined)):
            parts[key] = parts[key] | {l for l in src if l.atom.pred == qp}
    for key, lits in parts.items():
        out[key] = _lits(lits)
        lines.append(f"{key}: {{" + ", ".join(out[key]) + "}")
    out["counts"] = {k: len(v) for k, v in parts.items()}


def _cmd_ground(inp: Inputs, args, out: dict, lines: list):
    g = ground(inp.program(), inp.r, inp.config.domain, inp.ics, inp.query)
    text = emit_dlv(g.rules)
    out["program"] = text
    out["counts"] = {"rules": len(g.rules), "literals": len(g.universe)}
    lines.append(text.rstrip("\n"))


def _cmd_compile(inp: Inputs, args, out: dict, lines: list):
    prog = inp.program()
    text = emit_dlv(prog)
    out["program"] = text
    out["counts"] = {"rules": len(prog.rules)}
    lines.append(text.rstrip("\n"))


def _cmd_oracle(inp: Inputs, args, out: dict, lines: list) -> int:
    from .oracle import enumerate_answer_sets_naive, enumerate_repairs_bruteforce, random_bic_instance, random_ground_program
    from .cqa import repairs_of
    from .solver import answer_sets

    rng = random.Random(args.seed)
    mode = MODES[args.mode]
    metric = "cardinality" if mode is RepairMode.DALAL else "setInclusion"
    rep_bad = as_bad = 0
    for _ in range(args.count):
        r, ics, dom = random_bic_instance(rng)
        cfg = RepairConfig(mode, STABILIZERS[args.stabilizer], domain=DomainDeclaration.finite(dom))
        expected = {x.instance for x in enumerate_repairs_bruteforce(r, ics, dom, metric)}
        try:
            got = {x.instance for x in repairs_of(r, ics, cfg)}
        except NoAdmissibleRepair:
            got = set()
        rep_bad += got != expected
        e_mode = rng.random() < 0.5
        rules = random_ground_program(rng, defaults=e_mode)
        try:
            got_as = set(answer_sets(rules, e_mode=e_mode))
        except InconsistentProgram:
            got_as = set()
        as_bad += got_as != set(enumerate_answer_sets_naive(rules, e_mode=e_mode))
    out["counts"] = {"cases": args.count, "repair_mismatches": rep_bad, "answer_set_mismatches": as_bad}
    lines.append(f"seed {args.seed}: {args.count} case(s)")
    lines.append(f"repair mismatches: {rep_bad}")
    lines.append(f"answer-set mismatches: {as_bad}")
    return EXIT_MISMATCH if rep_bad or as_bad else EXIT_OK


COMMANDS = {
    "repair": _cmd_repair,
    "query": _cmd_query,
    "core": _cmd_core,
    "wfs": _cmd_wfs,
    "ground": _cmd_ground,
    "compile": _cmd_compile,
    "oracle-check": _cmd_oracle,
}


def run(args, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    out: dict = {"command": args.command}
    lines: list = []
    code = EXIT_OK
    try:
        inp = Inputs(args)
        if args.emit == "dlv" and args.command not in ("compile", "ground"):
            lines.extend(emit_dlv(inp.program()).rstrip("\n").splitlines())
        code = COMMANDS[args.command](inp, args, out, lines) or EXIT_OK
    except NoAdmissibleRepair as e:
        code, msg = EXIT_NO_REPAIR, str(e)
    except ResourceLimitExceeded as e:
        code, msg = EXIT_LIMIT, str(e)
    except InconsistentProgram as e:
        code, msg = EXIT_INCONSISTENT, str(e)
    except (RepairLPError, OSError, ValueError) as e:
        code, msg = EXIT_INPUT, str(e)
    else:
        msg = None
    out["status"] = STATUS[code]
    if msg is not None:
        out["error"] = msg
    if args.output == "json":
        stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")
    else:
        if lines:
            stdout.write("\n".join(lines) + "\n")
        if msg is not None:
            stderr.write(f"repairlp: {out['status']}: {msg}\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
