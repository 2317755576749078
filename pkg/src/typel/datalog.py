"""Stratified Datalog with negation, integer comparisons, and decrement terms.

The engine is deliberately small: programs are finite sets of ground facts
plus rules, predicates are stratified so every negated atom refers to a
fully computed lower stratum, and each stratum is saturated bottom-up with
semi-naive iteration.  A naive evaluator with the same semantics is kept as
a differential-testing oracle.

Terms are Python strings (symbolic constants), ints, variables, or ?v - k
decrements.  A decrement in a positive body atom unifies in both
directions: with v bound it denotes the value v - k, with v unbound it
binds v to the matched value plus k.

The textual program format round-trips through dump_program/load_program:

    edge(a, b).
    path(?x, ?y) :- edge(?x, ?y).
    rank(?C, ?I) :- level(?I), ?I > 0, not bad(?C, ?I - 1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class DatalogError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Minus:
    """The term ?var - amount; amount must be positive."""

    var: Var
    amount: int


Const = str | int
Term = Const | Var | Minus


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True, slots=True)
class Neg:
    atom: Atom


@dataclass(frozen=True, slots=True)
class Compare:
    op: str  # "<" or ">"
    left: Term
    right: Term


BodyItem = Atom | Neg | Compare


@dataclass(frozen=True, slots=True)
class Rule:
    head: Atom
    body: tuple[BodyItem, ...]


@dataclass(frozen=True, slots=True)
class DatalogProgram:
    facts: tuple[Atom, ...] = ()
    rules: tuple[Rule, ...] = ()


def _term_vars(t: Term) -> set[Var]:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Minus):
        return {t.var}
    return set()


def atom_vars(a: Atom) -> set[Var]:
    out: set[Var] = set()
    for t in a.args:
        out |= _term_vars(t)
    return out


def _check_const(c, where: str) -> None:
    if isinstance(c, bool) or not isinstance(c, (str, int)):
        raise DatalogError(f"{where}: not a constant: {c!r}")
    if isinstance(c, str) and (not c or c[0].isdigit()):
        raise DatalogError(f"{where}: symbolic constant may not start with a digit: {c!r}")


def validate_program(program: DatalogProgram) -> None:
    """Reject arity clashes, unsafe rules, empty bodies, and malformed terms."""
    arity: dict[str, int] = {}

    def see(pred: str, n: int, where: str) -> None:
        if arity.setdefault(pred, n) != n:
            raise DatalogError(f"{where}: predicate {pred!r} used with arity {n} and {arity[pred]}")

    for f in program.facts:
        see(f.pred, len(f.args), f"fact {f.pred}")
        for t in f.args:
            _check_const(t, f"fact {f.pred}")
    for i, rule in enumerate(program.rules):
        where = f"rule {i} ({rule.head.pred})"
        if not rule.body:
            raise DatalogError(f"{where}: empty body; use a fact instead")
        see(rule.head.pred, len(rule.head.args), where)
        for t in rule.head.args:
            if isinstance(t, Minus):
                raise DatalogError(f"{where}: decrement term in rule head")
            if not isinstance(t, Var):
                _check_const(t, where)
        positive_vars: set[Var] = set()
        plain_vars: set[Var] = set()
        minus_vars: set[Var] = set()
        for item in rule.body:
            match item:
                case Atom(pred, args):
                    see(pred, len(args), where)
                    positive_vars |= atom_vars(item)
                    for t in args:
                        if isinstance(t, Var):
                            plain_vars.add(t)
                        elif isinstance(t, Minus):
                            minus_vars.add(t.var)
                case Neg(atom):
                    see(atom.pred, len(atom.args), where)
                    for t in atom.args:
                        if isinstance(t, Minus):
                            minus_vars.add(t.var)
                case Compare(op, left, right):
                    if op not in ("<", ">"):
                        raise DatalogError(f"{where}: unknown comparison {op!r}")
                    for t in (left, right):
                        if isinstance(t, Minus):
                            minus_vars.add(t.var)
        # termination guard: a decremented variable must also be matched
        # plainly, else ?I - 1 joins could mint fresh integers forever
        loose = minus_vars - plain_vars
        if loose:
            names = ", ".join(sorted(v.name for v in loose))
            raise DatalogError(f"{where}: decremented variable(s) {names} never matched plainly")
        for item in rule.body:
            match item:
                case Neg(atom):
                    loose = atom_vars(atom) - positive_vars
                    kind = "negated atom"
                case Compare(_, left, right):
                    loose = (_term_vars(left) | _term_vars(right)) - positive_vars
                    kind = "comparison"
                case _:
                    continue
            if loose:
                names = ", ".join(sorted(v.name for v in loose))
                raise DatalogError(f"{where}: {kind} uses unbound variable(s) {names}")
        loose = atom_vars(rule.head) - positive_vars
        if loose:
            names = ", ".join(sorted(v.name for v in loose))
            raise DatalogError(f"{where}: head variable(s) {names} not bound by a positive body atom")


# --- stratification ---


def stratify(rules: tuple[Rule, ...]) -> tuple[list[list[Rule]], dict[str, int]]:
    """Assign strata so each negated predicate is complete before use.

    Returns (rules grouped per stratum in evaluation order, stratum of each
    predicate).  Raises DatalogError when negation occurs in a dependency
    cycle.
    """
    preds: set[str] = set()
    for rule in rules:
        preds.add(rule.head.pred)
        for item in rule.body:
            preds.add(item.atom.pred if isinstance(item, Neg) else item.pred if isinstance(item, Atom) else "")
    preds.discard("")
    stratum = {p: 0 for p in preds}
    limit = len(preds) + 1
    changed = True
    while changed:
        changed = False
        for rule in rules:
            h = rule.head.pred
            for item in rule.body:
                match item:
                    case Atom(pred, _):
                        want = stratum[pred]
                    case Neg(atom):
                        want = stratum[atom.pred] + 1
                    case _:
                        continue
                if stratum[h] < want:
                    stratum[h] = want
                    changed = True
                    if want > limit:
                        raise DatalogError(
                            "program is not stratifiable: " + _negation_cycle_message(rules)
                        )
    buckets: dict[int, list[Rule]] = {}
    for rule in rules:
        buckets.setdefault(stratum[rule.head.pred], []).append(rule)
    ordered = [buckets[s] for s in sorted(buckets)]
    return ordered, stratum


def _negation_cycle_message(rules: tuple[Rule, ...]) -> str:
    # Tarjan over the head -> body dependency graph to name one offending loop
    edges: dict[str, set[str]] = {}
    neg_edges: set[tuple[str, str]] = set()
    for rule in rules:
        h = rule.head.pred
        edges.setdefault(h, set())
        for item in rule.body:
            if isinstance(item, Atom):
                edges[h].add(item.pred)
                edges.setdefault(item.pred, set())
            elif isinstance(item, Neg):
                edges[h].add(item.atom.pred)
                edges.setdefault(item.atom.pred, set())
                neg_edges.add((h, item.atom.pred))
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = itertools.count()
    sccs: list[set[str]] = []

    def strongconnect(v: str) -> None:
        work = [(v, iter(sorted(edges[v])))]
        index[v] = low[v] = next(counter)
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(edges[w]))))
                    advanced = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                sccs.append(comp)

    for p in sorted(edges):
        if p not in index:
            strongconnect(p)
    for comp in sccs:
        for h, b in neg_edges:
            if h in comp and b in comp:
                return f"negation inside a recursive component: {{{', '.join(sorted(comp))}}}"
    return "negation inside a recursive component"


# --- fact storage ---


class FactStore:
    """Ground facts grouped by predicate, with hash indexes built on demand.

    An index is keyed by a sorted tuple of argument positions; each distinct
    key shape a rule needs gets built once, then kept current by add().
    """

    __slots__ = ("_sets", "_indexes")

    def __init__(self):
        self._sets: dict[str, set[tuple[Const, ...]]] = {}
        self._indexes: dict[
            str, dict[tuple[int, ...], dict[tuple[Const, ...], list[tuple[Const, ...]]]]
        ] = {}

    def add(self, pred: str, args: tuple[Const, ...]) -> bool:
        s = self._sets.setdefault(pred, set())
        if args in s:
            return False
        s.add(args)
        for positions, buckets in self._indexes.get(pred, {}).items():
            if len(args) > positions[-1]:
                key = tuple(args[p] for p in positions)
                buckets.setdefault(key, []).append(args)
        return True

    def contains(self, pred: str, args: tuple[Const, ...]) -> bool:
        return args in self._sets.get(pred, ())

    def facts(self, pred: str) -> set[tuple[Const, ...]]:
        return self._sets.get(pred, set())

    def match(
        self, pred: str, positions: tuple[int, ...], key: tuple[Const, ...]
    ) -> list[tuple[Const, ...]]:
        """Facts whose arguments at the given sorted positions equal key.

        Facts too short to have all the positions are excluded; arity
        mismatches beyond that are the caller's concern.
        """
        per_pred = self._indexes.setdefault(pred, {})
        buckets = per_pred.get(positions)
        if buckets is None:
            buckets = {}
            last = positions[-1]
            for fact in self._sets.get(pred, ()):
                if len(fact) > last:
                    buckets.setdefault(tuple(fact[p] for p in positions), []).append(fact)
            per_pred[positions] = buckets
        return buckets.get(key, [])

    def preds(self) -> list[str]:
        return sorted(self._sets)

    def __len__(self) -> int:
        return sum(len(s) for s in self._sets.values())

    def all_facts(self) -> set[tuple[str, tuple[Const, ...]]]:
        return {(p, args) for p, s in self._sets.items() for args in s}


# --- evaluation ---

_UNBOUND = object()


def _resolve(t: Term, subst: dict[Var, Const]):
    if isinstance(t, Var):
        return subst.get(t, _UNBOUND)
    if isinstance(t, Minus):
        v = subst.get(t.var, _UNBOUND)
        if v is _UNBOUND:
            return _UNBOUND
        if not isinstance(v, int):
            return None  # decrement of a symbol never matches anything
        return v - t.amount
    return t


def _match_args(
    pattern: tuple[Term, ...],
    fact: tuple[Const, ...],
    subst: dict[Var, Const],
    trail: list[Var],
) -> bool:
    """Extend subst in place to match fact; record new bindings on trail."""
    for t, v in zip(pattern, fact):
        if isinstance(t, Var):
            bound = subst.get(t, _UNBOUND)
            if bound is _UNBOUND:
                subst[t] = v
                trail.append(t)
            elif bound != v:
                return False
        elif isinstance(t, Minus):
            bound = subst.get(t.var, _UNBOUND)
            if bound is _UNBOUND:
                if not isinstance(v, int):
                    return False
                subst[t.var] = v + t.amount
                trail.append(t.var)
            else:
                if not isinstance(bound, int) or bound - t.amount != v:
                    return False
        elif t != v:
            return False
    return True


def _undo(subst: dict[Var, Const], trail: list[Var], mark: int) -> None:
    while len(trail) > mark:
        del subst[trail.pop()]


# Rules are compiled to variable slots (plain list indices) so the join loop
# never hashes Var objects.  A term op is (kind, payload, amount):
#   _OP_CONST: payload is the constant
#   _OP_VAR:   payload is the slot
#   _OP_MINUS: payload is the slot, amount is subtracted from its value
_OP_CONST, _OP_VAR, _OP_MINUS = 0, 1, 2

_TermOp = tuple  # (kind, payload, amount)


def _compile_term(t: Term, slots: dict[Var, int]) -> _TermOp:
    if isinstance(t, Var):
        return (_OP_VAR, slots.setdefault(t, len(slots)), 0)
    if isinstance(t, Minus):
        return (_OP_MINUS, slots.setdefault(t.var, len(slots)), t.amount)
    return (_OP_CONST, t, 0)


def _resolve_op(op: _TermOp, subst: list):
    kind, payload, amount = op
    if kind == _OP_CONST:
        return payload
    v = subst[payload]
    if kind == _OP_VAR or v is _UNBOUND:
        return v
    if not isinstance(v, int):
        return None  # decrement of a symbol never matches anything
    return v - amount


def _match_ops(ops: tuple, fact: tuple[Const, ...], subst: list, trail: list[int]) -> bool:
    """Extend subst in place to match fact; record touched slots on trail."""
    for op, v in zip(ops, fact):
        kind, payload, amount = op
        if kind == _OP_VAR:
            b = subst[payload]
            if b is _UNBOUND:
                subst[payload] = v
                trail.append(payload)
            elif b != v:
                return False
        elif kind == _OP_CONST:
            if payload != v:
                return False
        else:
            b = subst[payload]
            if b is _UNBOUND:
                if not isinstance(v, int):
                    return False
                subst[payload] = v + amount
                trail.append(payload)
            elif not isinstance(b, int) or b - amount != v:
                return False
    return True


@dataclass(frozen=True, slots=True)
class _CNeg:
    pred: str
    ops: tuple


@dataclass(frozen=True, slots=True)
class _CCmp:
    op: str
    left: _TermOp
    right: _TermOp


def _compile_constraint(item: BodyItem, slots: dict[Var, int]):
    if isinstance(item, Neg):
        return _CNeg(item.atom.pred, tuple(_compile_term(t, slots) for t in item.atom.args))
    return _CCmp(item.op, _compile_term(item.left, slots), _compile_term(item.right, slots))


def _check_c(item, subst: list, store: FactStore) -> bool:
    if type(item) is _CNeg:
        args = tuple(_resolve_op(o, subst) for o in item.ops)
        if any(a is _UNBOUND for a in args):
            raise DatalogError(f"negated atom {item.pred} evaluated with unbound variable")
        if any(a is None for a in args):
            return True  # a failed decrement denotes no value, so the atom is absent
        return not store.contains(item.pred, args)
    left = _resolve_op(item.left, subst)
    right = _resolve_op(item.right, subst)
    if left is _UNBOUND or right is _UNBOUND:
        raise DatalogError("comparison evaluated with unbound variable")
    if left is None or right is None:
        return False
    if not isinstance(left, int) or not isinstance(right, int):
        raise DatalogError(f"comparison between non-integers: {left!r} {item.op} {right!r}")
    return left < right if item.op == "<" else left > right


@dataclass(frozen=True, slots=True)
class _Variant:
    """One rule body in a fixed join order, compiled to slots."""

    head_pred: str
    head_ops: tuple
    preds: tuple[str, ...]
    ops: tuple[tuple, ...]
    # keys[i]: argument positions of atom i ground before it is joined
    # (constants, variables bound earlier, decrements of such variables)
    keys: tuple[tuple[int, ...], ...]
    key_ops: tuple[tuple, ...]
    # constraints become checkable at the earliest atom binding their variables;
    # those with no variables run once up front
    pre: tuple
    after: tuple[tuple, ...]
    nslots: int
    delta_first: bool
    fn: object = field(default=None, compare=False, repr=False)


def _compile_order(rule: Rule, order: list[int], delta_first: bool) -> _Variant:
    positives = [item for item in rule.body if isinstance(item, Atom)]
    others = [item for item in rule.body if not isinstance(item, Atom)]
    atoms = [positives[i] for i in order]
    slots: dict[Var, int] = {}
    all_ops: list[tuple] = []
    keys: list[tuple[int, ...]] = []
    key_ops: list[tuple] = []
    bound: set[Var] = set()
    bound_after: list[set[Var]] = []
    for a in atoms:
        ops = tuple(_compile_term(t, slots) for t in a.args)
        kp: list[int] = []
        for j, t in enumerate(a.args):
            if isinstance(t, Var):
                ground = t in bound
            elif isinstance(t, Minus):
                ground = t.var in bound
            else:
                ground = True
            if ground:
                kp.append(j)
        all_ops.append(ops)
        keys.append(tuple(kp))
        key_ops.append(tuple(ops[j] for j in kp))
        bound = bound | atom_vars(a)
        bound_after.append(bound)
    pre: list = []
    after: list[list] = [[] for _ in atoms]
    for item in others:
        if isinstance(item, Neg):
            need = atom_vars(item.atom)
        else:
            need = _term_vars(item.left) | _term_vars(item.right)
        citem = _compile_constraint(item, slots)
        if not need:
            pre.append(citem)
            continue
        for i, avail in enumerate(bound_after):
            if need <= avail:
                after[i].append(citem)
                break
    head_ops = tuple(_compile_term(t, slots) for t in rule.head.args)
    cv = _Variant(
        rule.head.pred,
        head_ops,
        tuple(a.pred for a in atoms),
        tuple(all_ops),
        tuple(keys),
        tuple(key_ops),
        tuple(pre),
        tuple(tuple(x) for x in after),
        len(slots),
        delta_first,
    )
    object.__setattr__(cv, "fn", _gen_fn(cv))
    return cv


def _cmp_rt(left, op: str, right) -> bool:
    """Runtime comparison shared by generated code, matching _check_c."""
    if left is None or right is None:
        return False
    if not isinstance(left, int) or not isinstance(right, int):
        raise DatalogError(f"comparison between non-integers: {left!r} {op} {right!r}")
    return left < right if op == "<" else left > right


def _gen_fn(cv: _Variant):
    """Compile one join order to a Python function (store, delta, out).

    The function runs the same join as the slot interpreter, with slots
    lowered to plain locals and index lookups inlined.  The naive evaluator
    keeps the interpreter, so the two paths cross-check each other.
    """
    lines = [
        "def _drv(store, delta, out):",
        "    _match = store.match",
        "    _facts = store.facts",
        "    _contains = store.contains",
        "    _add = out.add",
    ]
    ind = "    "
    fresh = itertools.count()
    bound_slots: set[int] = set()

    def side(op) -> str:
        # expression for one comparison side; a failed decrement becomes None
        kind, payload, amount = op
        if kind == _OP_CONST:
            return repr(payload)
        if kind == _OP_VAR:
            return f"v{payload}"
        return f"((v{payload} - {amount}) if type(v{payload}) is int else None)"

    def emit_constraint(item, exit_stmt: str) -> None:
        if type(item) is _CNeg:
            guards = []
            args = []
            for kind, payload, amount in item.ops:
                if kind == _OP_CONST:
                    args.append(repr(payload))
                elif kind == _OP_VAR:
                    args.append(f"v{payload}")
                else:
                    # a failed decrement denotes no value, so the atom is absent
                    guards.append(f"type(v{payload}) is int")
                    args.append(f"(v{payload} - {amount})")
            arg_tuple = f"({', '.join(args)},)" if args else "()"
            cond = f"_contains({item.pred!r}, {arg_tuple})"
            if guards:
                cond = " and ".join(guards + [cond])
            lines.append(f"{ind}if {cond}: {exit_stmt}")
        else:
            lines.append(
                f"{ind}if not _cmp({side(item.left)}, {item.op!r}, {side(item.right)}): "
                f"{exit_stmt}"
            )

    for item in cv.pre:
        emit_constraint(item, "return")

    for i, (pred, ops) in enumerate(zip(cv.preds, cv.ops)):
        from_delta = i == 0 and cv.delta_first
        kp = () if from_delta else cv.keys[i]
        guards = []
        if from_delta:
            cand = "delta"
        elif kp:
            kexprs = []
            for kind, payload, amount in cv.key_ops[i]:
                if kind == _OP_CONST:
                    kexprs.append(repr(payload))
                elif kind == _OP_VAR:
                    kexprs.append(f"v{payload}")
                else:
                    guards.append(f"type(v{payload}) is int")
                    kexprs.append(f"(v{payload} - {amount})")
            cand = f"_match({pred!r}, {kp!r}, ({', '.join(kexprs)},))"
        else:
            cand = f"_facts({pred!r})"
        exit_stmt = "continue" if ind != "    " else "return"
        if not from_delta and set(kp) == set(range(len(ops))) and not cv.after[i]:
            # pure filter: every position is index-guaranteed, nothing to bind
            cond = " and ".join(guards + [cand])
            lines.append(f"{ind}if not ({cond}): {exit_stmt}")
            continue
        if guards:
            lines.append(f"{ind}if {' and '.join(guards)}:")
            ind += "    "
        f = f"f{i}"
        lines.append(f"{ind}for {f} in {cand}:")
        ind += "    "
        kpset = set(kp)
        for j, (kind, payload, amount) in enumerate(ops):
            if j in kpset:
                continue  # equality is guaranteed by the index key
            if kind == _OP_CONST:
                lines.append(f"{ind}if {f}[{j}] != {repr(payload)}: continue")
            elif kind == _OP_VAR:
                if payload in bound_slots:
                    lines.append(f"{ind}if {f}[{j}] != v{payload}: continue")
                else:
                    lines.append(f"{ind}v{payload} = {f}[{j}]")
                    bound_slots.add(payload)
            else:
                if payload in bound_slots:
                    lines.append(
                        f"{ind}if type(v{payload}) is not int "
                        f"or v{payload} - {amount} != {f}[{j}]: continue"
                    )
                else:
                    t = f"_t{next(fresh)}"
                    lines.append(f"{ind}{t} = {f}[{j}]")
                    lines.append(f"{ind}if type({t}) is not int: continue")
                    lines.append(f"{ind}v{payload} = {t} + {amount}")
                    bound_slots.add(payload)
        for item in cv.after[i]:
            emit_constraint(item, "continue")

    head = ", ".join(
        repr(payload) if kind == _OP_CONST else f"v{payload}"
        for kind, payload, _ in cv.head_ops
    )
    lines.append(f"{ind}_add(({head},))" if head else f"{ind}_add(())")
    ns: dict = {}
    exec(compile("\n".join(lines), "<datalog-rule>", "exec"), {"_cmp": _cmp_rt}, ns)
    return ns["_drv"]


def _greedy_order(positives: list[Atom], first: int) -> list[int]:
    """Join order starting at first, then most-ground atoms eagerly."""
    order = [first]
    bound = set(atom_vars(positives[first]))
    remaining = [i for i in range(len(positives)) if i != first]
    while remaining:

        def groundness(i: int) -> tuple[int, int, int]:
            a = positives[i]
            nb = 0
            for t in a.args:
                if isinstance(t, Var):
                    nb += t in bound
                elif isinstance(t, Minus):
                    nb += t.var in bound
                else:
                    nb += 1
            return (nb - len(a.args), nb, -i)

        best = max(remaining, key=groundness)
        remaining.remove(best)
        order.append(best)
        bound |= atom_vars(positives[best])
    return order


@dataclass(frozen=True, slots=True)
class _CompiledRule:
    head_pred: str
    positive_preds: tuple[str, ...]
    base: _Variant
    # variants[k] joins positive occurrence k first, fed by the delta set
    variants: tuple[_Variant, ...]


def _compile_rule(rule: Rule) -> _CompiledRule:
    positives = [item for item in rule.body if isinstance(item, Atom)]
    base = _compile_order(rule, list(range(len(positives))), False)
    variants = tuple(
        _compile_order(rule, _greedy_order(positives, k), True) for k in range(len(positives))
    )
    return _CompiledRule(rule.head.pred, tuple(a.pred for a in positives), base, variants)


def _derive(
    cv: _Variant,
    store: FactStore,
    delta: set[tuple[Const, ...]] | None,
    out: set[tuple[Const, ...]],
) -> None:
    """Collect head instantiations for one join order into out."""
    subst: list = [_UNBOUND] * cv.nslots
    trail: list[int] = []
    for item in cv.pre:
        if not _check_c(item, subst, store):
            return
    n = len(cv.preds)
    preds = cv.preds
    all_ops = cv.ops
    keys = cv.keys
    key_ops = cv.key_ops
    after = cv.after
    head_ops = cv.head_ops

    def rec(i: int) -> None:
        if i == n:
            out.add(tuple(_resolve_op(o, subst) for o in head_ops))
            return
        ops = all_ops[i]
        arity = len(ops)
        if i == 0 and delta is not None:
            cands = delta
        else:
            kp = keys[i]
            if kp:
                key: list[Const] = []
                for o in key_ops[i]:
                    v = _resolve_op(o, subst)
                    if v is None:
                        return  # decrement of a symbol matches nothing
                    key.append(v)
                cands = store.match(preds[i], kp, tuple(key))
            else:
                cands = store.facts(preds[i])
        aft = after[i]
        for fact in cands:
            if len(fact) != arity:
                continue
            mark = len(trail)
            if _match_ops(ops, fact, subst, trail):
                if not aft or all(_check_c(c, subst, store) for c in aft):
                    rec(i + 1)
            while len(trail) > mark:
                subst[trail.pop()] = _UNBOUND

    rec(0)


def _eval_stratum_seminaive(store: FactStore, rules: list[Rule], idb: set[str]) -> None:
    compiled = [_compile_rule(r) for r in rules]
    delta: dict[str, set[tuple[Const, ...]]] = {}
    for c in compiled:
        produced: set[tuple[Const, ...]] = set()
        c.base.fn(store, None, produced)
        for args in produced:
            if store.add(c.head_pred, args):
                delta.setdefault(c.head_pred, set()).add(args)
    recursive = [c for c in compiled if any(p in idb for p in c.positive_preds)]
    while delta:
        new_delta: dict[str, set[tuple[Const, ...]]] = {}
        for c in recursive:
            for k, pred in enumerate(c.positive_preds):
                d = delta.get(pred)
                if not d:
                    continue
                produced = set()
                c.variants[k].fn(store, d, produced)
                for args in produced:
                    if store.add(c.head_pred, args):
                        new_delta.setdefault(c.head_pred, set()).add(args)
        delta = new_delta


def _eval_stratum_naive(store: FactStore, rules: list[Rule]) -> None:
    # full re-derivation through the slot interpreter; this is the slow
    # reference path the semi-naive generated code is checked against
    compiled = [_compile_rule(r) for r in rules]
    changed = True
    while changed:
        changed = False
        for c in compiled:
            produced: set[tuple[Const, ...]] = set()
            _derive(c.base, store, None, produced)
            for args in produced:
                if store.add(c.head_pred, args):
                    changed = True


def _strata_with_idb(program: DatalogProgram) -> list[tuple[list[Rule], set[str]]]:
    ordered, _ = stratify(program.rules)
    return [(rules, {r.head.pred for r in rules}) for rules in ordered]


def grounding_bound(program: DatalogProgram) -> int:
    """Upper bound on derivable ground atoms: sum over predicates of
    |constants|^arity.  Constants are those in facts plus rule literals."""
    constants: set[Const] = set()
    arity: dict[str, int] = {}
    for f in program.facts:
        arity[f.pred] = len(f.args)
        constants.update(f.args)  # type: ignore[arg-type]

    def scan(atom: Atom) -> None:
        arity[atom.pred] = len(atom.args)
        for t in atom.args:
            if not isinstance(t, (Var, Minus)):
                constants.add(t)

    for rule in program.rules:
        scan(rule.head)
        for item in rule.body:
            if isinstance(item, Atom):
                scan(item)
            elif isinstance(item, Neg):
                scan(item.atom)
    n = max(len(constants), 1)
    return sum(n**k for k in arity.values())


def _check_bound(store: FactStore, bound: int) -> None:
    if len(store) > bound:
        raise DatalogError(
            f"grounding bound exceeded: {len(store)} facts, bound {bound}; "
            "a rule is deriving constants from outside the program"
        )


def evaluate(program: DatalogProgram) -> FactStore:
    """Saturate the program, stratum by stratum, with semi-naive iteration."""
    validate_program(program)
    bound = grounding_bound(program)
    store = FactStore()
    for f in program.facts:
        store.add(f.pred, f.args)  # type: ignore[arg-type]
    for rules, idb in _strata_with_idb(program):
        _eval_stratum_seminaive(store, rules, idb)
        _check_bound(store, bound)
    return store


def naive_evaluate(program: DatalogProgram) -> FactStore:
    """Reference evaluator: full re-application to fixpoint per stratum."""
    validate_program(program)
    bound = grounding_bound(program)
    store = FactStore()
    for f in program.facts:
        store.add(f.pred, f.args)  # type: ignore[arg-type]
    for rules, _ in _strata_with_idb(program):
        _eval_stratum_naive(store, rules)
        _check_bound(store, bound)
    return store


def query(store: FactStore, pattern: Atom) -> list[dict[Var, Const]]:
    """All substitutions grounding pattern to a stored fact, sorted stably."""
    results: list[dict[Var, Const]] = []
    subst: dict[Var, Const] = {}
    trail: list[Var] = []
    first = _resolve(pattern.args[0], subst) if pattern.args else _UNBOUND
    candidates = (
        store.match(pattern.pred, (0,), (first,))
        if first not in (_UNBOUND, None)
        else store.facts(pattern.pred)
    )
    for fact in candidates:
        if len(fact) != len(pattern.args):
            continue
        mark = len(trail)
        if _match_args(pattern.args, fact, subst, trail):
            results.append(dict(subst))
        _undo(subst, trail, mark)
    results.sort(key=lambda s: sorted((v.name, repr(c)) for v, c in s.items()))
    return results


# --- rule transformation ---


def transform_rules(
    rules: tuple[Rule, ...],
    targets: frozenset[str],
    extra: tuple[Term, ...],
    rename: dict[str, str] | None = None,
    guards: tuple[Atom, ...] = (),
    guard_mode: str = "auto",
) -> tuple[Rule, ...]:
    """Widen a family of predicates by extra trailing arguments.

    Every atom whose predicate is in targets gets the extra terms appended
    (and is renamed when rename says so).  guards are prepended to keep the
    new variables bound: always, or under "auto" only when no positive body
    atom was widened.
    """
    rename = rename or {}

    def widen(a: Atom) -> Atom:
        if a.pred not in targets:
            return a
        return Atom(rename.get(a.pred, a.pred), a.args + extra)

    out: list[Rule] = []
    for rule in rules:
        body: list[BodyItem] = []
        touched = False
        for item in rule.body:
            match item:
                case Atom():
                    w = widen(item)
                    touched = touched or w is not item
                    body.append(w)
                case Neg(atom):
                    body.append(Neg(widen(atom)))
                case _:
                    body.append(item)
        need_guards = guard_mode == "always" or (guard_mode == "auto" and not touched)
        if need_guards:
            body = list(guards) + body
        out.append(Rule(widen(rule.head), tuple(body)))
    return tuple(out)


# --- textual format ---


def term_text(t: Term) -> str:
    if isinstance(t, Var):
        return f"?{t.name}"
    if isinstance(t, Minus):
        return f"?{t.var.name} - {t.amount}"
    return str(t)


def atom_text(a: Atom) -> str:
    return f"{a.pred}({', '.join(term_text(t) for t in a.args)})"


def _item_text(item: BodyItem) -> str:
    match item:
        case Atom():
            return atom_text(item)
        case Neg(atom):
            return f"not {atom_text(atom)}"
        case Compare(op, left, right):
            return f"{term_text(left)} {op} {term_text(right)}"
    raise TypeError(f"not a body item: {item!r}")


def rule_text(r: Rule) -> str:
    return f"{atom_text(r.head)} :- {', '.join(_item_text(i) for i in r.body)}."


def dump_program(program: DatalogProgram) -> str:
    """Serialize facts then rules, one per line; load_program inverts this."""
    lines = [atom_text(f) + "." for f in program.facts]
    lines += [rule_text(r) for r in program.rules]
    return "\n".join(lines) + "\n"


_IDENT_EXTRA = set("_$'")


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in _IDENT_EXTRA


def _tokenize_program(text: str) -> list[tuple[str, str, int, int]]:
    toks = []
    line, i, n = 1, 0, len(text)
    col = 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith(":-", i):
            toks.append((":-", ":-", line, col))
            i += 2
            col += 2
            continue
        if ch in "(),.<>-?":
            toks.append((ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch in _IDENT_EXTRA:
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            toks.append(("not" if word == "not" else "ident", word, line, col))
            col += j - i
            i = j
            continue
        raise DatalogError(f"line {line}:{col}: unexpected character {ch!r}")
    toks.append(("eof", "", line, col))
    return toks


class _ProgramParser:
    def __init__(self, text: str):
        self.toks = _tokenize_program(text)
        self.pos = 0

    def peek(self, ahead: int = 0):
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.pos]
        if t[0] != "eof":
            self.pos += 1
        return t

    def fail(self, tok, msg: str):
        raise DatalogError(f"line {tok[2]}:{tok[3]}: {msg}")

    def expect(self, kind: str):
        t = self.next()
        if t[0] != kind:
            self.fail(t, f"expected {kind!r}, found {t[1] or 'end of input'!r}")
        return t

    def term(self) -> Term:
        t = self.next()
        if t[0] == "?":
            name = self.expect("ident")[1]
            if self.peek()[0] == "-":
                self.next()
                amount = int(self.expect("int")[1])
                if amount <= 0:
                    self.fail(t, "decrement amount must be positive")
                return Minus(Var(name), amount)
            return Var(name)
        if t[0] == "int":
            return int(t[1])
        if t[0] == "ident":
            return t[1]
        self.fail(t, f"expected a term, found {t[1] or 'end of input'!r}")

    def atom(self) -> Atom:
        pred = self.expect("ident")[1]
        self.expect("(")
        args: list[Term] = []
        if self.peek()[0] != ")":
            args.append(self.term())
            while self.peek()[0] == ",":
                self.next()
                args.append(self.term())
        self.expect(")")
        return Atom(pred, tuple(args))

    def body_item(self) -> BodyItem:
        t = self.peek()
        if t[0] == "not":
            self.next()
            return Neg(self.atom())
        if t[0] == "ident" and self.peek(1)[0] == "(":
            return self.atom()
        left = self.term()
        op = self.next()
        if op[0] not in ("<", ">"):
            self.fail(op, f"expected '<' or '>', found {op[1] or 'end of input'!r}")
        right = self.term()
        return Compare(op[0], left, right)

    def parse(self) -> DatalogProgram:
        facts: list[Atom] = []
        rules: list[Rule] = []
        while self.peek()[0] != "eof":
            head = self.atom()
            if self.peek()[0] == ":-":
                self.next()
                body = [self.body_item()]
                while self.peek()[0] == ",":
                    self.next()
                    body.append(self.body_item())
                self.expect(".")
                rules.append(Rule(head, tuple(body)))
            else:
                self.expect(".")
                for a in head.args:
                    if isinstance(a, (Var, Minus)):
                        raise DatalogError(f"fact {head.pred} contains a variable")
                facts.append(head)
        return DatalogProgram(tuple(facts), tuple(rules))


def load_program(text: str) -> DatalogProgram:
    """Parse the textual program format produced by dump_program."""
    return _ProgramParser(text).parse()
