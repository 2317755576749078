"""Reasoner for a low-complexity description logic with a typicality operator.

The package parses knowledge bases in the .kbt text format, normalizes
them, translates them into a Datalog program evaluated by an internal
stratified engine, and answers instance, subsumption, and consistency
queries under the semantics of ranked interpretations.  On top of that
it computes rational-closure ranks for the defeasible part of a simple
KB and decides membership of defeasible inclusions in the closure.
A bounded ranked-model search doubles as an independent refutation
check for small KBs.
"""
from __future__ import annotations

from .datalog import (
    Atom,
    Compare,
    DatalogError,
    DatalogProgram,
    FactStore,
    Minus,
    Neg,
    Rule,
    Var,
    dump_program,
    evaluate,
    load_program,
    naive_evaluate,
    stratify,
)
from .kb import (
    BOT,
    TOP,
    Bot,
    ConceptAssertion,
    ConceptExpr,
    Conj,
    Exists,
    GCI,
    InstanceOf,
    KnowledgeBase,
    Name,
    Nominal,
    ProductToRole,
    RoleAssertion,
    RoleChain,
    RoleConj,
    RoleHolds,
    RoleIncl,
    RoleToProduct,
    SelfRestriction,
    Signature,
    Subsumes,
    Top,
    TypSubsumes,
    TypicalInstanceOf,
    Typicality,
    concept_text,
    is_simple,
    validate,
)
from .materialize import (
    build_program,
    check_consistency,
    check_instance,
    check_subsumption,
    subsumption_program,
    translate,
)
from .model import (
    BoundOverflow,
    RankedInterpretation,
    is_model,
    iter_models,
    refute,
    render_model,
    satisfies_query,
)
from .normalize import NormalizedKB, normalize
from .parser import (
    ParseError,
    axiom_text,
    parse_concept,
    parse_kb,
    parse_query,
    print_kb,
    query_text,
)
from .rc import (
    InconsistentKBError,
    NotSimpleError,
    RankAssignment,
    build_rc_program,
    compute_ranks,
    rc_consistent,
    rc_entails,
)

__all__ = [
    "Atom",
    "BOT",
    "Bot",
    "BoundOverflow",
    "Compare",
    "ConceptAssertion",
    "ConceptExpr",
    "Conj",
    "DatalogError",
    "DatalogProgram",
    "Exists",
    "FactStore",
    "GCI",
    "InconsistentKBError",
    "InstanceOf",
    "KnowledgeBase",
    "Minus",
    "Name",
    "Neg",
    "Nominal",
    "NormalizedKB",
    "NotSimpleError",
    "ParseError",
    "ProductToRole",
    "RankAssignment",
    "RankedInterpretation",
    "RoleAssertion",
    "RoleChain",
    "RoleConj",
    "RoleHolds",
    "RoleIncl",
    "RoleToProduct",
    "Rule",
    "SelfRestriction",
    "Signature",
    "Subsumes",
    "TOP",
    "Top",
    "TypSubsumes",
    "TypicalInstanceOf",
    "Typicality",
    "Var",
    "axiom_text",
    "build_program",
    "build_rc_program",
    "check_consistency",
    "check_instance",
    "check_subsumption",
    "compute_ranks",
    "concept_text",
    "dump_program",
    "evaluate",
    "is_model",
    "is_simple",
    "iter_models",
    "load_program",
    "naive_evaluate",
    "normalize",
    "parse_concept",
    "parse_kb",
    "parse_query",
    "print_kb",
    "query_text",
    "rc_consistent",
    "rc_entails",
    "refute",
    "render_model",
    "satisfies_query",
    "stratify",
    "subsumption_program",
    "translate",
    "validate",
]
