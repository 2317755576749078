"""Rational closure over the defeasible part of a simple knowledge base.

The construction iterates exceptionality: stage 0 holds every defeasible
inclusion, and a stage keeps exactly the inclusions whose left concept was
exceptional (subsumed by nothing, together with a typical-top hypothesis)
at the previous stage.  A concept's rank is the first stage where it stops
being exceptional; concepts exceptional at the fixpoint get rank infinity.
Everything runs inside one stratified Datalog program: a staged hypothesis
copy of the calculus answers the per-stage entailment checks, negation
reads off ranks, and two injection rules feed the computed ranks back into
the base calculus for the closure-consistency test.

Only simple KBs qualify: typicality may appear in inclusion left sides
only, so the defeasible part is a set of T(C) <= D axioms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .datalog import (
    Atom,
    DatalogProgram,
    FactStore,
    Rule,
    Var,
    evaluate,
    load_program,
    transform_rules,
)
from .kb import (
    ConceptExpr,
    KnowledgeBase,
    TypSubsumes,
    Typicality,
    first_non_simple_axiom,
)
from .materialize import (
    DERIVED_PREDS,
    IR_RULES,
    RT_LABELED,
    check_consistency,
    store_inconsistent,
    translate,
)
from .normalize import (
    InclTypical,
    NormalizedKB,
    TypSubsGoal,
    TypicalIncl,
    normalize,
)
from .parser import axiom_text


class NotSimpleError(ValueError):
    """The KB has a typicality occurrence outside inclusion left sides."""


class InconsistentKBError(ValueError):
    """Classically inconsistent input: every concept floods, ranks mean
    nothing."""


# base rule set for closure work: the structural rules plus the typicality
# rules without SupTyp, which simple KBs never need
RC_BASE_RULES: tuple[Rule, ...] = IR_RULES + tuple(
    rule for label, rule in RT_LABELED if label != "SupTyp"
)

# hypothesis copies: the positive calculus re-derived under the assumption
# that constant D is a typical-top instance of itself, at stage I; SubTyp is
# excluded because the staged subTypRC below replaces it
_H_SOURCE: tuple[Rule, ...] = IR_RULES + tuple(
    rule for label, rule in RT_LABELED if label not in ("SupTyp", "SubTyp")
)
_H_RENAME = {p: f"{p}_h" for p in DERIVED_PREDS}

H_RULES: tuple[Rule, ...] = transform_rules(
    _H_SOURCE,
    targets=DERIVED_PREDS,
    extra=(Var("D"), Var("I")),
    rename=_H_RENAME,
    guards=(Atom("t_cls", (Var("D"),)), Atom("possrank", (Var("I"),))),
    guard_mode="always",
)

# staging, exceptionality, ranks, fixpoint, closure membership, and the two
# rules injecting computed ranks into the base calculus; the range rule
# possrank(0..N) <- upperbound(N) is expanded into facts at build time
_RC_TEXT: tuple[tuple[str, str], ...] = (
    ("C0", "t_cls(?C) :- auxc(?Aux, ?C)."),
    (
        "C2",
        "exceptional(?C, ?I) :- t_cls(?C), possrank(?I), cls(?Z), inst_h(?C, ?Z, ?C, ?I), bot(?Z).",
    ),
    ("C3", "subTypAt(?C, ?D, 0) :- subTyp(?C, ?D)."),
    (
        "C4",
        "subTypAt(?C, ?D, ?I) :- possrank(?I), subTypAt(?C, ?D, ?I - 1), exceptional(?C, ?I - 1).",
    ),
    ("C5", "typ_h(?C, top, ?C, ?I) :- t_cls(?C), possrank(?I)."),
    ("C6", "inst_h(?C, ?C, ?C, ?I) :- t_cls(?C), possrank(?I)."),
    ("C7", "rank(?C, 0) :- t_cls(?C), not exceptional(?C, 0)."),
    (
        "C8",
        "rank(?C, ?I) :- t_cls(?C), possrank(?I), exceptional(?C, ?I - 1), not exceptional(?C, ?I).",
    ),
    ("C9", "newNonEx(?I) :- t_cls(?C), rank(?C, ?I)."),
    ("C10", "fixp(?I) :- possrank(?I), ?I > 0, not newNonEx(?I)."),
    ("C11", "fixp(?I) :- possrank(?I), fixp(?I - 1)."),
    ("C12", "inf_rank(?C) :- fixp(?I), exceptional(?C, ?I)."),
    (
        "subTypRC",
        "inst_h(?X, ?C, ?D, ?I) :- t_cls(?D), possrank(?I), subTypAt(?A, ?C, ?I), typ_h(?X, ?A, ?D, ?I).",
    ),
    (
        "inrc1",
        "inrc(?C, ?D) :- def_subs(?C, ?D), t_cls(?C), cls(?D), rank(?C, ?I), inst_h(?C, ?D, ?C, ?I).",
    ),
    ("inrc2", "inrc(?C, ?D) :- def_subs(?C, ?D), t_cls(?C), cls(?D), inf_rank(?C)."),
    (
        "SameRank_rc1",
        "sameRank(?AC, ?AD) :- auxc(?AC, ?C), auxc(?AD, ?D), rank(?C, ?I), rank(?D, ?I).",
    ),
    (
        "LeqRank_rc2",
        "leqRank(?AC, ?AD) :- auxc(?AC, ?C), auxc(?AD, ?D), rank(?C, ?I), rank(?D, ?J), ?I < ?J.",
    ),
)


def _parse_rc_rules() -> tuple[tuple[str, Rule], ...]:
    program = load_program("\n".join(text for _, text in _RC_TEXT) + "\n")
    assert not program.facts
    return tuple((label, rule) for (label, _), rule in zip(_RC_TEXT, program.rules))


RC_LABELED: tuple[tuple[str, Rule], ...] = _parse_rc_rules()
RC_RULES: tuple[Rule, ...] = tuple(rule for _, rule in RC_LABELED)


@dataclass(frozen=True, slots=True)
class RcProgram:
    base: DatalogProgram
    rc_rules: tuple[Rule, ...]
    h_rules: tuple[Rule, ...]
    upperbound_fact: Atom
    extra_facts: tuple[Atom, ...]

    def program(self) -> DatalogProgram:
        return DatalogProgram(
            facts=self.base.facts + (self.upperbound_fact,) + self.extra_facts,
            rules=self.base.rules + self.h_rules + self.rc_rules,
        )


@dataclass(frozen=True, slots=True)
class RankAssignment:
    """Rank per tracked concept name; names missing from ranks are in
    infinite.  display maps tracked names back to user-facing concepts."""

    ranks: dict[str, int]
    infinite: frozenset[str]
    fixpoint_stage: int
    display: dict[str, str]

    def rows(self) -> list[tuple[str, str]]:
        """(concept, rank) rows, finite ranks first, then inf; each block
        sorted by rank then display name."""
        finite = sorted(
            self.ranks.items(), key=lambda cv: (cv[1], self.display.get(cv[0], cv[0]))
        )
        out = [(self.display.get(c, c), str(i)) for c, i in finite]
        out += [
            (self.display.get(c, c), "inf")
            for c in sorted(self.infinite, key=lambda c: self.display.get(c, c))
        ]
        return out


@dataclass(frozen=True, slots=True)
class RcVerdict:
    in_closure: bool


def t_occurrence_count(kb: KnowledgeBase) -> int:
    """Syntactic T occurrences in the TBox, the bound on rank stages."""

    def count(c: ConceptExpr) -> int:
        n = 1 if isinstance(c, Typicality) else 0
        for attr in ("arg", "left", "right", "filler"):
            sub = getattr(c, attr, None)
            if isinstance(sub, ConceptExpr):
                n += count(sub)
        return n

    return sum(count(ax.lhs) + count(ax.rhs) for ax in kb.tbox)


def build_rc_program(
    nkb: NormalizedKB,
    extra_t_concepts: tuple[str, ...] = (),
    def_subs_pairs: tuple[tuple[str, str], ...] = (),
    t_occurrences: int | None = None,
) -> RcProgram:
    """Assemble the full closure program over a simple-mode normalization.

    extra_t_concepts are tracked names that must get a rank even without a
    defeasible axiom of their own; def_subs_pairs gate which inrc pairs the
    program may derive.  t_occurrences overrides the stage bound with the
    original TBox occurrence count (the normalized count is never larger).
    """
    for ax in nkb.axioms:
        if isinstance(ax, InclTypical):
            raise NotSimpleError(
                f"not a simple KB: an axiom places typicality on the right "
                f"({ax.sub} <= T({ax.arg}))"
            )
    it = translate(nkb)
    if t_occurrences is None:
        t_occurrences = sum(1 for ax in nkb.axioms if isinstance(ax, TypicalIncl))
    n = t_occurrences + 1
    extra: list[Atom] = [Atom("possrank", (i,)) for i in range(n + 1)]
    known = {f.args[1] for f in it.facts if f.pred == "auxc"}
    for name in extra_t_concepts:
        if name not in known:
            extra.append(Atom("auxc", (f"aux${name}", name)))
    for c, d in def_subs_pairs:
        extra.append(Atom("def_subs", (c, d)))
    return RcProgram(
        base=DatalogProgram(facts=it.facts, rules=RC_BASE_RULES),
        rc_rules=RC_RULES,
        h_rules=H_RULES,
        upperbound_fact=Atom("upperbound", (n,)),
        extra_facts=tuple(extra),
    )


def _gate(kb: KnowledgeBase) -> None:
    bad = first_non_simple_axiom(kb)
    if bad is not None:
        raise NotSimpleError(f"not a simple KB: {axiom_text(bad)}")
    if not check_consistency(kb):
        raise InconsistentKBError("classically inconsistent KB: ranks are undefined")


def _read_assignment(store: FactStore, nkb: NormalizedKB) -> RankAssignment:
    t_cls = {args[0] for args in store.facts("t_cls")}
    ranks: dict[str, int] = {}
    for c, i in store.facts("rank"):
        if c in ranks:
            raise AssertionError(f"two ranks derived for {c}: {ranks[c]} and {i}")
        ranks[c] = i
    infinite = frozenset(args[0] for args in store.facts("inf_rank"))
    both = set(ranks) & infinite
    if both:
        raise AssertionError(f"rank and inf_rank both derived for {sorted(both)}")
    neither = t_cls - set(ranks) - infinite
    if neither:
        raise AssertionError(f"no rank derived for {sorted(neither)}")
    stages = [args[0] for args in store.facts("fixp")]
    if not stages:
        raise AssertionError("exceptionality iteration found no fixpoint stage")
    display = {c: nkb.display_of(c) for c in t_cls}
    return RankAssignment(
        ranks=ranks,
        infinite=infinite,
        fixpoint_stage=min(stages),
        display=display,
    )


def compute_ranks(
    kb: KnowledgeBase, query_concepts: tuple[ConceptExpr, ...] = ()
) -> RankAssignment:
    """Rank every T-argument of the KB plus the given query concepts."""
    _gate(kb)
    nkb, _ = normalize(kb, (), mode="simple", extra_ranked=query_concepts)
    rcp = build_rc_program(nkb, t_occurrences=t_occurrence_count(kb))
    store = evaluate(rcp.program())
    return _read_assignment(store, nkb)


def rc_entails(kb: KnowledgeBase, q: TypSubsumes) -> RcVerdict:
    """Is T(C) <= D in the rational closure of the TBox?"""
    if not isinstance(q, TypSubsumes):
        raise TypeError(f"rational closure membership needs a T(C) <= D query, got {q!r}")
    _gate(kb)
    nkb, goals = normalize(kb, (q,), mode="simple")
    goal = goals[0]
    assert isinstance(goal, TypSubsGoal)
    rcp = build_rc_program(
        nkb,
        extra_t_concepts=(goal.lhs,),
        def_subs_pairs=((goal.lhs, goal.rhs),),
        t_occurrences=t_occurrence_count(kb),
    )
    store = evaluate(rcp.program())
    return RcVerdict(in_closure=store.contains("inrc", (goal.lhs, goal.rhs)))


def rc_consistent(kb: KnowledgeBase) -> bool:
    """Does some ranked model realize the computed rank assignment?

    The injection rules force the base calculus to treat equally ranked
    concepts' representatives as equally ranked elements; if that floods a
    bottom class, no model matches the assignment.
    """
    _gate(kb)
    nkb, _ = normalize(kb, (), mode="simple")
    rcp = build_rc_program(nkb, t_occurrences=t_occurrence_count(kb))
    store = evaluate(rcp.program())
    return not store_inconsistent(store)
