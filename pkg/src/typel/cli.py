"""Command-line front end: one subcommand per reasoning task.

Exit codes: 0 entailed/consistent/in-closure/none-found (or plain success),
1 the negative verdict, 2 usage or input errors.  --format records emits one
JSON object per line with keys {mode, query, verdict} in stable order, so
repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys

from .datalog import DatalogError, DatalogProgram, dump_program
from .kb import (
    InstanceOf,
    KnowledgeBase,
    Query,
    RoleHolds,
    Subsumes,
    TypSubsumes,
    TypicalInstanceOf,
)
from .materialize import (
    build_program,
    check_consistency,
    check_instance,
    check_subsumption,
    subsumption_program,
    translate,
)
from .model import BoundOverflow, refute, render_model
from .normalize import TypSubsGoal, normalize
from .parser import parse_concept, parse_kb, parse_query, print_kb, query_text
from .rc import (
    InconsistentKBError,
    NotSimpleError,
    build_rc_program,
    compute_ranks,
    rc_consistent,
    rc_entails,
    t_occurrence_count,
)


class UsageError(ValueError):
    pass


def _load_kb(path: str) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh.read(), filename=path)


def _emit(args, verdict: str, query: Query | None) -> None:
    if args.format == "records":
        record = {
            "mode": args.command,
            "query": query_text(query) if query is not None else None,
            "verdict": verdict,
        }
        print(json.dumps(record, sort_keys=True))
    else:
        print(verdict)


def _dump(path: str | None, program: DatalogProgram) -> None:
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_program(program))


def _cmd_normalize(args) -> int:
    kb = _load_kb(args.kb)
    nkb, _ = normalize(kb, (), mode=args.mode)
    sys.stdout.write(print_kb(nkb.to_kb()))
    return 0


def _cmd_translate(args) -> int:
    kb = _load_kb(args.kb)
    nkb, _ = normalize(kb, (), mode="general")
    program = build_program(translate(nkb))
    text = dump_program(program)
    sys.stdout.write(text)
    _dump(args.dump_program, program)
    return 0


def _cmd_check(args) -> int:
    kb = _load_kb(args.kb)
    q = parse_query(args.query, kb)
    if not isinstance(q, (InstanceOf, TypicalInstanceOf, RoleHolds)):
        raise UsageError("check takes C(a), T(C)(a) or r(a, b); use subsumes for inclusions")
    if args.dump_program:
        nkb, _ = normalize(kb, (q,), mode="general")
        _dump(args.dump_program, build_program(translate(nkb)))
    verdict = check_instance(kb, q)
    _emit(args, "entailed" if verdict.entailed else "not-entailed", q)
    return 0 if verdict.entailed else 1


def _cmd_subsumes(args) -> int:
    kb = _load_kb(args.kb)
    q = parse_query(args.query, kb)
    if not isinstance(q, (Subsumes, TypSubsumes)):
        raise UsageError("subsumes takes C <= D or T(C) <= D; use check for assertions")
    if args.dump_program:
        nkb, _ = normalize(kb, (q,), mode="general")
        _dump(
            args.dump_program,
            subsumption_program(translate(nkb), typ_seed=isinstance(q, TypSubsumes)),
        )
    verdict = check_subsumption(kb, q)
    _emit(args, "entailed" if verdict.entailed else "not-entailed", q)
    return 0 if verdict.entailed else 1


def _cmd_consistent(args) -> int:
    kb = _load_kb(args.kb)
    if args.dump_program:
        nkb, _ = normalize(kb, (), mode="general")
        _dump(args.dump_program, build_program(translate(nkb)))
    ok = check_consistency(kb)
    _emit(args, "consistent" if ok else "inconsistent", None)
    return 0 if ok else 1


def _parse_concepts(args, kb: KnowledgeBase):
    return tuple(parse_concept(text, kb) for text in (args.concept or ()))


def _cmd_rc_ranks(args) -> int:
    kb = _load_kb(args.kb)
    extra = _parse_concepts(args, kb)
    if args.dump_program:
        nkb, _ = normalize(kb, (), mode="simple", extra_ranked=extra)
        _dump(
            args.dump_program,
            build_rc_program(nkb, t_occurrences=t_occurrence_count(kb)).program(),
        )
    ra = compute_ranks(kb, query_concepts=extra)
    if args.format == "records":
        for name, rank in ra.rows():
            print(json.dumps({"mode": "rc-ranks", "query": name, "verdict": rank}, sort_keys=True))
    else:
        for name, rank in ra.rows():
            print(f"{name} {rank}")
    return 0


def _cmd_rc_check(args) -> int:
    kb = _load_kb(args.kb)
    q = parse_query(args.query, kb)
    if not isinstance(q, TypSubsumes):
        raise UsageError("rc-check takes a T(C) <= D query")
    if args.dump_program:
        nkb, goals = normalize(kb, (q,), mode="simple")
        goal = goals[0]
        assert isinstance(goal, TypSubsGoal)
        _dump(
            args.dump_program,
            build_rc_program(
                nkb,
                extra_t_concepts=(goal.lhs,),
                def_subs_pairs=((goal.lhs, goal.rhs),),
                t_occurrences=t_occurrence_count(kb),
            ).program(),
        )
    verdict = rc_entails(kb, q)
    _emit(args, "in-closure" if verdict.in_closure else "not-in-closure", q)
    return 0 if verdict.in_closure else 1


def _cmd_rc_consistent(args) -> int:
    kb = _load_kb(args.kb)
    if args.dump_program:
        nkb, _ = normalize(kb, (), mode="simple")
        _dump(
            args.dump_program,
            build_rc_program(nkb, t_occurrences=t_occurrence_count(kb)).program(),
        )
    ok = rc_consistent(kb)
    _emit(args, "consistent" if ok else "inconsistent", None)
    return 0 if ok else 1


def _cmd_refute(args) -> int:
    kb = _load_kb(args.kb)
    q = parse_query(args.query, kb)
    m = refute(kb, q, max_domain=args.max_domain, max_rank=args.max_rank)
    if m is None:
        _emit(args, "none-found", q)
        return 0
    if args.format == "records":
        _emit(args, "counter-model", q)
    else:
        print("counter-model:")
        print(render_model(m))
    return 1


def _add_common(sp, query: bool, fmt: bool = True, dump: bool = True):
    sp.add_argument("kb", help=".kbt knowledge base file")
    if query:
        sp.add_argument("query", help="query text, e.g. 'C(a)' or 'C <= D'")
    if fmt:
        sp.add_argument(
            "--format", choices=("human", "records"), default="human",
            help="records = one JSON object per line",
        )
    if dump:
        sp.add_argument(
            "--dump-program", metavar="PATH", default=None,
            help="also write the evaluated Datalog program to PATH",
        )


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="typel",
        description="Reasoner for a low-complexity description logic with typicality.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("normalize", help="print the normal-form KB")
    sp.add_argument("kb")
    sp.add_argument("--mode", choices=("auto", "general", "simple"), default="auto")
    sp.set_defaults(fn=_cmd_normalize, format="human")

    sp = sub.add_parser("translate", help="print the Datalog program for the KB")
    sp.add_argument("kb")
    sp.add_argument("--dump-program", metavar="PATH", default=None)
    sp.set_defaults(fn=_cmd_translate, format="human")

    sp = sub.add_parser("check", help="rational entailment of an assertion")
    _add_common(sp, query=True)
    sp.set_defaults(fn=_cmd_check)

    sp = sub.add_parser("subsumes", help="rational entailment of an inclusion")
    _add_common(sp, query=True)
    sp.set_defaults(fn=_cmd_subsumes)

    sp = sub.add_parser("consistent", help="classical consistency")
    _add_common(sp, query=False)
    sp.set_defaults(fn=_cmd_consistent)

    sp = sub.add_parser("rc-ranks", help="rational-closure concept ranks")
    _add_common(sp, query=False)
    sp.add_argument(
        "--concept", action="append", metavar="TEXT",
        help="extra concept to rank (repeatable)",
    )
    sp.set_defaults(fn=_cmd_rc_ranks)

    sp = sub.add_parser("rc-check", help="membership of T(C) <= D in the rational closure")
    _add_common(sp, query=True)
    sp.set_defaults(fn=_cmd_rc_check)

    sp = sub.add_parser("rc-consistent", help="consistency of the rational closure")
    _add_common(sp, query=False)
    sp.set_defaults(fn=_cmd_rc_consistent)

    sp = sub.add_parser("refute", help="bounded counter-model search for a query")
    _add_common(sp, query=True, dump=False)
    sp.add_argument("--max-domain", type=int, default=3, metavar="N")
    sp.add_argument("--max-rank", type=int, default=2, metavar="N")
    sp.set_defaults(fn=_cmd_refute)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, DatalogError, BoundOverflow) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
