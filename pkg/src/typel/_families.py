"""Generated KB families for scaling measurements.

The chain family threads one individual through n classes linked by a
rotating mix of plain inclusions, existential steps, and defeasible steps,
so the materialization touches every rule group while the closure size
stays polynomial in n.
"""

from __future__ import annotations

from .kb import (
    ConceptAssertion,
    Exists,
    GCI,
    KnowledgeBase,
    Name,
    Signature,
    Typicality,
)


def chain_kb(n: int) -> KnowledgeBase:
    """A KB of ~n classes whose closure has ~n^2/8 membership atoms.

    Two tracks: W classes mint one witness each through an existential
    step, and every W class feeds the matching rung of a plain-inclusion
    spine S, so each witness climbs the remaining spine.  Sparse defeasible
    branches T(W_i) <= G keep the typicality rules in play without gating
    the climb.
    """
    if n < 4:
        raise ValueError("chain needs at least four classes")
    m = n // 2
    ws = [f"W{i}" for i in range(m)]
    ss = [f"S{i}" for i in range(m)]
    tbox: list[GCI] = []
    for i in range(m - 1):
        tbox.append(GCI(Name(ws[i]), Exists("r", Name(ws[i + 1]))))
        tbox.append(GCI(Name(ss[i]), Name(ss[i + 1])))
    for i in range(m):
        tbox.append(GCI(Name(ws[i]), Name(ss[i])))
    for i in range(0, m, 5):
        tbox.append(GCI(Typicality(Name(ws[i])), Name("G")))
    sig = Signature(
        concept_names=frozenset(ws) | frozenset(ss) | {"G"},
        role_names=frozenset({"r"}),
        individual_names=frozenset({"a"}),
        simple_roles=frozenset({"r"}),
    )
    return KnowledgeBase(
        signature=sig,
        tbox=tuple(tbox),
        abox=(ConceptAssertion(Name(ws[0]), "a"),),
    )


def fit_loglog_slope(xs: list[float], ys: list[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    import math

    lx = [math.log(x) for x in xs]
    ly = [math.log(max(y, 1e-9)) for y in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    num = sum((x - mx) * (y - my) for x, y in zip(lx, ly))
    den = sum((x - mx) ** 2 for x in lx)
    return num / den
