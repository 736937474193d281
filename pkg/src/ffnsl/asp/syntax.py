"""Syntax tree for the logic-program subset used throughout the package.

The language covers normal rules plus headless constraints:

    head :- lit, ..., not atom, ..., T1 != T2, ... .

Terms are constants (bare symbols or quoted strings), integers, variables
(uppercase, ``_`` anonymous), integer ranges (facts only) and arithmetic
expressions over integers.  No function symbols.
"""

from __future__ import annotations

COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*", "/")


class Term:
    __slots__ = ()


class Constant(Term):
    """Symbolic constant. Quoted-string constants keep their quotes in
    ``symbol`` so rendering and equality are by surface form."""

    __slots__ = ("symbol", "_h")

    def __init__(self, symbol: str):
        self.symbol = symbol
        self._h = hash(("c", symbol))

    def __eq__(self, other):
        return type(other) is Constant and other.symbol == self.symbol

    def __hash__(self):
        return self._h

    def __repr__(self):
        return self.symbol


class Integer(Term):
    __slots__ = ("value", "_h")

    def __init__(self, value: int):
        self.value = value
        self._h = hash(("i", value))

    def __eq__(self, other):
        return type(other) is Integer and other.value == self.value

    def __hash__(self):
        return self._h

    def __repr__(self):
        return str(self.value)


class Variable(Term):
    __slots__ = ("name", "_h")

    def __init__(self, name: str):
        self.name = name
        self._h = hash(("v", name))

    @property
    def is_anonymous(self) -> bool:
        return self.name.startswith("_")

    def __eq__(self, other):
        return type(other) is Variable and other.name == self.name

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "_" if self.is_anonymous else self.name


class Arith(Term):
    __slots__ = ("op", "left", "right", "_h")

    def __init__(self, op: str, left: Term, right: Term):
        assert op in ARITH_OPS
        self.op = op
        self.left = left
        self.right = right
        self._h = hash(("a", op, left, right))

    def __eq__(self, other):
        return (type(other) is Arith and other.op == self.op
                and other.left == self.left and other.right == self.right)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return render_term(self)


class Range(Term):
    """Inclusive integer range shorthand, only legal inside facts."""

    __slots__ = ("lo", "hi", "_h")

    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.hi = hi
        self._h = hash(("r", lo, hi))

    def __eq__(self, other):
        return type(other) is Range and other.lo == self.lo and other.hi == self.hi

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"{self.lo}..{self.hi}"


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def render_term(t: Term) -> str:
    if isinstance(t, Arith):
        left = render_term(t.left)
        right = render_term(t.right)
        if isinstance(t.left, Arith) and _PRECEDENCE[t.left.op] < _PRECEDENCE[t.op]:
            left = f"({left})"
        if isinstance(t.right, Arith) and _PRECEDENCE[t.right.op] <= _PRECEDENCE[t.op]:
            right = f"({right})"
        return f"{left} {t.op} {right}"
    return repr(t)


class Atom:
    __slots__ = ("pred", "args", "_h")

    def __init__(self, pred: str, args: tuple[Term, ...] = ()):
        self.pred = pred
        self.args = tuple(args)
        self._h = hash((pred, self.args))

    @property
    def key(self) -> tuple[str, int]:
        """(predicate, arity) — the stable identifier of a relation."""
        return (self.pred, len(self.args))

    def is_ground(self) -> bool:
        return all(type(a) in (Constant, Integer) for a in self.args)

    def __eq__(self, other):
        return (type(other) is Atom and other._h == self._h
                and other.pred == self.pred and other.args == self.args)

    def __hash__(self):
        return self._h

    def __repr__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(render_term(a) for a in self.args)})"


class BodyLiteral:
    __slots__ = ()


class Pos(BodyLiteral):
    __slots__ = ("atom", "_h")

    def __init__(self, atom: Atom):
        self.atom = atom
        self._h = hash(("p", atom))

    def __eq__(self, other):
        return type(other) is Pos and other.atom == self.atom

    def __hash__(self):
        return self._h

    def __repr__(self):
        return repr(self.atom)


class Naf(BodyLiteral):
    __slots__ = ("atom", "_h")

    def __init__(self, atom: Atom):
        self.atom = atom
        self._h = hash(("n", atom))

    def __eq__(self, other):
        return type(other) is Naf and other.atom == self.atom

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"not {self.atom!r}"


class Compare(BodyLiteral):
    __slots__ = ("op", "left", "right", "_h")

    def __init__(self, op: str, left: Term, right: Term):
        assert op in COMPARE_OPS
        self.op = op
        self.left = left
        self.right = right
        self._h = hash(("cmp", op, left, right))

    def __eq__(self, other):
        return (type(other) is Compare and other.op == self.op
                and other.left == self.left and other.right == self.right)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"{render_term(self.left)} {self.op} {render_term(self.right)}"


class NormalRule:
    """head :- body.  A missing head denotes a constraint."""

    __slots__ = ("head", "body", "_h")

    def __init__(self, head: Atom | None, body: tuple[BodyLiteral, ...] = ()):
        self.head = head
        self.body = tuple(body)
        self._h = hash((head, self.body))

    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def n_literals(self) -> int:
        """Total literal count: head (if present) plus body literals."""
        return (0 if self.head is None else 1) + len(self.body)

    def __eq__(self, other):
        return (type(other) is NormalRule and other.head == self.head
                and other.body == self.body)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return render_rule(self)


def render_rule(rule: NormalRule) -> str:
    body = ", ".join(repr(lit) for lit in rule.body)
    if rule.head is None:
        return f":- {body}."
    if not rule.body:
        return f"{rule.head!r}."
    return f"{rule.head!r} :- {body}."


class Program:
    __slots__ = ("rules", "_h")

    def __init__(self, rules=()):
        self.rules = tuple(rules)
        self._h = hash(self.rules)

    def __eq__(self, other):
        return type(other) is Program and other.rules == self.rules

    def __hash__(self):
        return self._h

    def __add__(self, other: "Program") -> "Program":
        return Program(self.rules + other.rules)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def render(self) -> str:
        return "\n".join(render_rule(r) for r in self.rules)

    def __repr__(self):
        return self.render()


EMPTY_PROGRAM = Program()


def rule_variables(rule: NormalRule) -> list[Variable]:
    """Distinct variables of a rule in first-occurrence order (head first)."""
    seen: dict[Variable, None] = {}

    def walk_term(t):
        if isinstance(t, Variable):
            seen.setdefault(t)
        elif isinstance(t, Arith):
            walk_term(t.left)
            walk_term(t.right)

    def walk_atom(a):
        for arg in a.args:
            walk_term(arg)

    if rule.head is not None:
        walk_atom(rule.head)
    for lit in rule.body:
        if isinstance(lit, (Pos, Naf)):
            walk_atom(lit.atom)
        else:
            walk_term(lit.left)
            walk_term(lit.right)
    return list(seen)


def substitute_term(t: Term, theta: dict[Variable, Term]) -> Term:
    if isinstance(t, Variable):
        return theta.get(t, t)
    if isinstance(t, Arith):
        return Arith(t.op, substitute_term(t.left, theta), substitute_term(t.right, theta))
    return t


def substitute_atom(a: Atom, theta: dict[Variable, Term]) -> Atom:
    return Atom(a.pred, tuple(substitute_term(x, theta) for x in a.args))


def rename_rule(rule: NormalRule, mapping: dict[str, str]) -> NormalRule:
    """Rename variables of a rule by name; used for canonical forms."""
    theta = {}

    def collect(t):
        if isinstance(t, Variable) and t.name in mapping:
            theta[t] = Variable(mapping[t.name])
        elif isinstance(t, Arith):
            collect(t.left)
            collect(t.right)

    if rule.head is not None:
        for a in rule.head.args:
            collect(a)
    for lit in rule.body:
        if isinstance(lit, (Pos, Naf)):
            for a in lit.atom.args:
                collect(a)
        else:
            collect(lit.left)
            collect(lit.right)

    head = substitute_atom(rule.head, theta) if rule.head is not None else None
    body = []
    for lit in rule.body:
        if isinstance(lit, Pos):
            body.append(Pos(substitute_atom(lit.atom, theta)))
        elif isinstance(lit, Naf):
            body.append(Naf(substitute_atom(lit.atom, theta)))
        else:
            body.append(Compare(lit.op, substitute_term(lit.left, theta),
                                substitute_term(lit.right, theta)))
    return NormalRule(head, tuple(body))
