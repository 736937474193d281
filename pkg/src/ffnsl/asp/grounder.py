"""Grounding: range expansion, safety checking, and semantics-preserving
instantiation of rules over the derivable atoms.

Instantiation joins positive body atoms against the set of possibly-derivable
atoms (the least model of the program with negation ignored), so the output
stays proportional to what can actually fire rather than to the full
constant^arity blow-up.  Comparison literals are evaluated away; negative
literals whose atom can never be derived are dropped as vacuously true.
"""

from __future__ import annotations

from itertools import product

from ..errors import (GroundingError, NonIntegerArithmeticError,
                      UnsafeRuleError)
from .syntax import (Arith, Atom, Compare, Constant, Integer, Naf,
                     NormalRule, Pos, Program, Range, Variable, render_rule,
                     substitute_atom)


def expand_ranges(program: Program) -> Program:
    """Expand ``p(1..4).`` style facts into one fact per value (cartesian
    over multiple range arguments).  Ranges anywhere else are rejected."""
    out = []
    for rule in program.rules:
        has_range = rule.head is not None and any(
            isinstance(a, Range) for a in rule.head.args)
        if not has_range:
            for lit in rule.body:
                if isinstance(lit, (Pos, Naf)) and any(
                        isinstance(a, Range) for a in lit.atom.args):
                    raise GroundingError(
                        f"range term outside a fact: {render_rule(rule)}")
            out.append(rule)
            continue
        if rule.body:
            raise GroundingError(
                f"range term outside a fact: {render_rule(rule)}")
        choices = []
        for arg in rule.head.args:
            if isinstance(arg, Range):
                if arg.lo > arg.hi:
                    raise GroundingError(f"empty range {arg!r}")
                choices.append([Integer(v) for v in range(arg.lo, arg.hi + 1)])
            else:
                choices.append([arg])
        for combo in product(*choices):
            out.append(NormalRule(Atom(rule.head.pred, tuple(combo)), ()))
    return Program(out)


def _term_vars(t, acc):
    if isinstance(t, Variable):
        acc.add(t.name)
    elif isinstance(t, Arith):
        _term_vars(t.left, acc)
        _term_vars(t.right, acc)


def check_safety(rule: NormalRule) -> None:
    """Every variable in the head, in a negative literal, in a comparison, or
    inside arithmetic must occur as a plain argument of a positive body atom."""
    bound: set[str] = set()
    for lit in rule.body:
        if isinstance(lit, Pos):
            for arg in lit.atom.args:
                if isinstance(arg, Variable):
                    bound.add(arg.name)
                elif isinstance(arg, Arith):
                    raise GroundingError(
                        "arithmetic term in body atom argument is not "
                        f"supported: {render_rule(rule)}")
    need: set[str] = set()
    if rule.head is not None:
        for arg in rule.head.args:
            _term_vars(arg, need)
    for lit in rule.body:
        if isinstance(lit, Naf):
            for arg in lit.atom.args:
                _term_vars(arg, need)
                if isinstance(arg, Arith):
                    raise GroundingError(
                        "arithmetic term in body atom argument is not "
                        f"supported: {render_rule(rule)}")
        elif isinstance(lit, Compare):
            _term_vars(lit.left, need)
            _term_vars(lit.right, need)
    unsafe = need - bound
    if unsafe:
        raise UnsafeRuleError(sorted(unsafe)[0], render_rule(rule))


def eval_term(t, theta):
    """Resolve a term to a ground Constant/Integer under bindings."""
    if isinstance(t, Variable):
        value = theta.get(t.name)
        if value is None:
            raise GroundingError(f"unbound variable {t.name}")
        return value
    if isinstance(t, Arith):
        left = eval_term(t.left, theta)
        right = eval_term(t.right, theta)
        if not isinstance(left, Integer) or not isinstance(right, Integer):
            raise NonIntegerArithmeticError(
                f"arithmetic over non-integer terms: {t!r}")
        a, b = left.value, right.value
        if t.op == "+":
            return Integer(a + b)
        if t.op == "-":
            return Integer(a - b)
        if t.op == "*":
            return Integer(a * b)
        if b == 0:
            raise GroundingError(f"division by zero in {t!r}")
        # integer division truncates toward zero
        q = abs(a) // abs(b)
        return Integer(q if (a < 0) == (b < 0) else -q)
    return t


def eval_compare(lit: Compare, theta) -> bool:
    left = eval_term(lit.left, theta)
    right = eval_term(lit.right, theta)
    if lit.op == "=":
        return left == right
    if lit.op == "!=":
        return left != right
    if not isinstance(left, Integer) or not isinstance(right, Integer):
        raise NonIntegerArithmeticError(
            f"ordering comparison over non-integer terms: {lit!r}")
    a, b = left.value, right.value
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[lit.op]


def _unify_atom(pattern: Atom, fact: Atom, theta: dict) -> list | None:
    """Extend theta (in place) to match pattern against a ground fact.
    Returns the trail of newly bound names, or None on mismatch."""
    trail = []
    for p_arg, f_arg in zip(pattern.args, fact.args):
        if isinstance(p_arg, Variable):
            bound = theta.get(p_arg.name)
            if bound is None:
                theta[p_arg.name] = f_arg
                trail.append(p_arg.name)
            elif bound != f_arg:
                for name in trail:
                    del theta[name]
                return None
        elif p_arg != f_arg:
            for name in trail:
                del theta[name]
            return None
    return trail


def iter_matches(patterns, relations, theta):
    """Yield bindings (shared dict, valid only during the yield) matching all
    positive atom patterns against the indexed relations, left to right."""
    if not patterns:
        yield theta
        return
    first, rest = patterns[0], patterns[1:]
    for fact in relations.get(first.key, ()):
        trail = _unify_atom(first, fact, theta)
        if trail is None:
            continue
        yield from iter_matches(rest, relations, theta)
        for name in trail:
            del theta[name]


class GroundResult:
    __slots__ = ("program", "derivable")

    def __init__(self, program: Program, derivable: dict):
        self.program = program
        self.derivable = derivable


def ground_full(program: Program) -> GroundResult:
    prog = expand_ranges(program)
    for rule in prog.rules:
        check_safety(rule)

    derivable: dict[Atom, None] = {}
    relations: dict[tuple, list] = {}

    def add_atom(atom: Atom) -> bool:
        if atom in derivable:
            return False
        derivable[atom] = None
        relations.setdefault(atom.key, []).append(atom)
        return True

    facts = []
    nonfacts = []
    for rule in prog.rules:
        if rule.is_fact():
            if not rule.head.is_ground():
                bad = next(a.name for a in rule.head.args
                           if isinstance(a, Variable))
                raise UnsafeRuleError(bad, render_rule(rule))
            facts.append(rule)
            add_atom(rule.head)
        else:
            nonfacts.append(rule)

    # pre-split rule bodies once
    split = []
    for rule in nonfacts:
        pos = [lit.atom for lit in rule.body if isinstance(lit, Pos)]
        nafs = [lit.atom for lit in rule.body if isinstance(lit, Naf)]
        cmps = [lit for lit in rule.body if isinstance(lit, Compare)]
        split.append((rule, pos, nafs, cmps))

    instances: dict[tuple, tuple] = {}
    changed = True
    while changed:
        changed = False
        for rule, pos, nafs, cmps in split:
            theta: dict[str, object] = {}
            for binding in iter_matches(pos, relations, theta):
                if cmps and not all(eval_compare(c, binding) for c in cmps):
                    continue
                adapter = _NameTheta(binding)
                g_pos = tuple(a if a.is_ground() else substitute_atom(a, adapter)
                              for a in pos)
                g_naf = tuple(a if a.is_ground() else substitute_atom(a, adapter)
                              for a in nafs)
                if rule.head is None:
                    g_head = None
                else:
                    g_head = Atom(rule.head.pred, tuple(
                        eval_term(arg, binding) for arg in rule.head.args))
                key = (g_head, g_pos, g_naf)
                if key in instances:
                    continue
                instances[key] = (g_head, g_pos, g_naf)
                if g_head is not None and add_atom(g_head):
                    changed = True

    out_rules = list(facts)
    seen = set()
    for g_head, g_pos, g_naf in instances.values():
        body = [Pos(a) for a in g_pos]
        # a negative literal over an underivable atom is vacuously true
        body.extend(Naf(a) for a in g_naf if a in derivable)
        final = NormalRule(g_head, tuple(body))
        if final not in seen:
            seen.add(final)
            out_rules.append(final)
    return GroundResult(Program(out_rules), derivable)


class _NameTheta(dict):
    """Adapter mapping Variable objects onto a name-keyed binding dict."""

    def __init__(self, binding):
        super().__init__()
        self.binding = binding

    def get(self, var, default=None):
        return self.binding.get(var.name, default)


def ground(program: Program) -> Program:
    """Instantiate a program; answer sets are preserved exactly."""
    return ground_full(program).program
