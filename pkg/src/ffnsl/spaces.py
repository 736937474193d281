"""Mode-bias declarations and enumeration of the finite candidate rule list.

Bias text uses ``#modeh``/``#modeb`` schemas with ``var(type)`` and
``const(type)`` placeholders, ``#maxv`` for the distinct-variable cap,
``#constant`` declarations, and an artifact extension ``#max_body`` bounding
body length.  Plain statements in a bias file (type facts, helper rule
definitions) are collected as a support program to be evaluated alongside the
background knowledge.  ``#bias`` and ``#ground_without_replacement`` are
accepted and ignored with a warning.

Predicate invention is supported in a single fixed pattern: a target
predicate defined as the guarded complement of one invented predicate.  The
linking rule is compiled to a concrete scaffold rule intended for the
background program, and only invented-predicate definitions populate the
candidate list.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import permutations, product

from .asp.grounder import check_safety, expand_ranges
from .asp.parser import TokenStream, _RuleParser, tokenize
from .asp.syntax import (Atom, Compare, Constant, Integer, Naf, NormalRule,
                         Pos, Program, Term, Variable, render_rule)
from .errors import AspSyntaxError, SpaceTooLargeError, UnsafeRuleError

log = logging.getLogger(__name__)

DEFAULT_MAXV = 3
DEFAULT_MAX_BODY = 3
DEFAULT_SPACE_CAP = 100_000


@dataclass(frozen=True)
class VarSlot:
    type: str


@dataclass(frozen=True)
class ConstSlot:
    type: str


@dataclass(frozen=True)
class AtomSchema:
    pred: str
    slots: tuple   # VarSlot | ConstSlot | ground Term


@dataclass(frozen=True)
class CompareSchema:
    op: str
    left: VarSlot
    right: VarSlot


@dataclass(frozen=True)
class BodyDecl:
    recall: int | None   # None = unbounded (capped by max_body)
    schema: AtomSchema | CompareSchema
    flags: tuple = ()


@dataclass
class Invention:
    target: tuple[str, int]
    invented: tuple[str, int]
    guard_pred: str | None = None
    has_identity: bool = False
    has_inverse: bool = False


@dataclass
class ModeBias:
    head_decls: list = field(default_factory=list)
    body_decls: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    maxv: int = DEFAULT_MAXV
    max_body: int = DEFAULT_MAX_BODY
    support: Program = field(default_factory=Program)
    invention: Invention | None = None
    warnings: list = field(default_factory=list)


@dataclass
class HypothesisSpace:
    rules: list[NormalRule]
    origin: ModeBias
    scaffold: Program = field(default_factory=Program)

    def __len__(self):
        return len(self.rules)

    def dump(self) -> str:
        return "\n".join(render_rule(r) for r in self.rules)


# ---------------------------------------------------------------------------
# bias parsing

def _parse_schema_arg(stream: TokenStream):
    tok = stream.next()
    if tok.kind == "IDENT" and tok.value in ("var", "const") and stream.at("("):
        stream.next()
        type_tok = stream.expect("IDENT")
        stream.expect(")")
        return VarSlot(type_tok.value) if tok.value == "var" else ConstSlot(type_tok.value)
    if tok.kind == "IDENT":
        return Constant(tok.value)
    if tok.kind == "INT":
        return Integer(tok.value)
    if tok.kind == "STRING":
        return Constant(tok.value)
    raise AspSyntaxError(f"bad schema argument {tok.value!r}", tok.line, tok.col)


def _parse_schema(stream: TokenStream):
    first = _parse_schema_arg_or_atom(stream)
    if stream.peek().kind in ("=", "!=", "<", "<=", ">", ">="):
        op = stream.next().kind
        right = _parse_schema_arg(stream)
        if not isinstance(first, VarSlot) or not isinstance(right, VarSlot):
            stream.error("comparison schemas must relate var() placeholders")
        return CompareSchema(op, first, right)
    if not isinstance(first, AtomSchema):
        stream.error("expected an atom schema")
    return first


def _parse_schema_arg_or_atom(stream: TokenStream):
    tok = stream.peek()
    if tok.kind == "IDENT" and tok.value in ("var", "const") and stream.peek(1).kind == "(":
        return _parse_schema_arg(stream)
    name_tok = stream.expect("IDENT")
    if not stream.at("("):
        return AtomSchema(name_tok.value, ())
    stream.next()
    slots = [_parse_schema_arg(stream)]
    while stream.at(","):
        stream.next()
        slots.append(_parse_schema_arg(stream))
    stream.expect(")")
    return AtomSchema(name_tok.value, tuple(slots))


def _parse_pred_arity(stream: TokenStream) -> tuple[str, int]:
    name = stream.expect("IDENT").value
    stream.expect("/")
    arity = stream.expect("INT").value
    return (name, arity)


def _parse_meta_rule(stream: TokenStream, bias: ModeBias):
    """One of the two fixed invention linking rules, written with
    placeholder predicates, e.g. ``P(X) :- player(X), not Q(X), inverse(P, Q).``"""
    stream.expect("VAR")
    stream.expect("(")
    stream.expect("VAR")
    stream.expect(")")
    stream.expect(":-")
    guard = None
    negated = False
    kind = None
    while True:
        tok = stream.next()
        if tok.kind == "NOT":
            negated = True
            continue
        if tok.kind == "VAR":       # Q(X)
            stream.expect("(")
            stream.expect("VAR")
            stream.expect(")")
        elif tok.kind == "IDENT":
            if stream.at("(") and stream.peek(1).kind == "VAR" and stream.peek(2).kind == ")":
                stream.next()
                stream.next()
                stream.next()
                guard = tok.value   # e.g. player(X)
            elif tok.value in ("identity", "inverse"):
                kind = tok.value
                stream.expect("(")
                stream.expect("VAR")
                stream.expect(",")
                stream.expect("VAR")
                stream.expect(")")
            else:
                raise AspSyntaxError(f"unrecognized meta-rule element {tok.value!r}",
                                     tok.line, tok.col)
        else:
            raise AspSyntaxError("malformed invention meta-rule", tok.line, tok.col)
        if stream.at(","):
            stream.next()
            continue
        break
    stream.expect(".")
    if kind is None:
        raise AspSyntaxError("invention meta-rule without identity/inverse marker")
    inv = bias.invention or Invention(("", 1), ("", 1))
    if kind == "identity":
        inv.has_identity = True
    else:
        inv.has_inverse = True
        inv.guard_pred = guard
        if negated is False:
            raise AspSyntaxError("inverse meta-rule must negate the invented predicate")
    bias.invention = inv


def parse_bias(text: str) -> ModeBias:
    bias = ModeBias()
    stream = TokenStream(tokenize(text))
    statements = []
    while not stream.at("EOF"):
        tok = stream.peek()
        if tok.kind == "DIRECTIVE":
            stream.next()
            name = tok.value
            if name == "modeh":
                stream.expect("(")
                bias.head_decls.append(_parse_schema(stream))
                stream.expect(")")
                stream.expect(".")
            elif name == "modeb":
                stream.expect("(")
                recall = None
                if stream.at("INT") and stream.peek(1).kind == ",":
                    recall = stream.next().value
                    stream.next()
                schema = _parse_schema(stream)
                flags = ()
                if stream.at(","):
                    stream.next()
                    stream.expect("(")
                    flags = (stream.expect("IDENT").value,)
                    stream.expect(")")
                stream.expect(")")
                stream.expect(".")
                bias.body_decls.append(BodyDecl(recall, schema, flags))
            elif name == "maxv":
                stream.expect("(")
                bias.maxv = stream.expect("INT").value
                stream.expect(")")
                stream.expect(".")
            elif name == "max_body":
                stream.expect("(")
                bias.max_body = stream.expect("INT").value
                stream.expect(")")
                stream.expect(".")
            elif name == "constant":
                stream.expect("(")
                type_name = stream.expect("IDENT").value
                stream.expect(",")
                val_tok = stream.next()
                if val_tok.kind == "INT":
                    value = Integer(val_tok.value)
                elif val_tok.kind in ("IDENT", "STRING"):
                    value = Constant(val_tok.value)
                else:
                    raise AspSyntaxError("bad constant value", val_tok.line, val_tok.col)
                stream.expect(")")
                stream.expect(".")
                bias.constants.setdefault(type_name, []).append(value)
            elif name == "predicate":
                stream.expect("(")
                role = stream.expect("IDENT").value
                stream.expect(",")
                pred = _parse_pred_arity(stream)
                stream.expect(")")
                stream.expect(".")
                inv = bias.invention or Invention(("", 1), ("", 1))
                if role == "target":
                    inv.target = pred
                elif role == "invented":
                    inv.invented = pred
                else:
                    raise AspSyntaxError(f"unknown predicate role {role!r}")
                bias.invention = inv
            elif name == "modem":
                # meta-level mode declaration; the linking pattern itself is
                # taken from the meta rules, so only record a warning-free ack
                depth = 0
                while True:
                    t = stream.next()
                    if t.kind == "(":
                        depth += 1
                    elif t.kind == ")":
                        depth -= 1
                        if depth == 0:
                            break
                    elif t.kind == "EOF":
                        raise AspSyntaxError("unterminated #modem")
                stream.expect(".")
            elif name in ("bias", "ground_without_replacement"):
                message = f"directive #{name} is accepted but ignored"
                bias.warnings.append(message)
                log.warning(message)
                if stream.at("("):
                    depth = 0
                    while True:
                        t = stream.next()
                        if t.kind == "(":
                            depth += 1
                        elif t.kind == ")":
                            depth -= 1
                            if depth == 0:
                                break
                        elif t.kind == "EOF":
                            raise AspSyntaxError(f"unterminated #{name}")
                stream.expect(".")
            else:
                raise AspSyntaxError(f"unknown directive #{name}", tok.line, tok.col)
        elif tok.kind == "VAR":
            _parse_meta_rule(stream, bias)
        else:
            statements.append(_RuleParser(stream).parse_rule())
    bias.support = Program(statements)
    _harvest_type_facts(bias)
    return bias


def _harvest_type_facts(bias: ModeBias):
    """Unary facts in the support program double as constant declarations."""
    for rule in expand_ranges(bias.support).rules:
        if rule.is_fact() and len(rule.head.args) == 1:
            values = bias.constants.setdefault(rule.head.pred, [])
            if rule.head.args[0] not in values:
                values.append(rule.head.args[0])


# ---------------------------------------------------------------------------
# canonical forms

def _literal_invariant(lit) -> str:
    if isinstance(lit, Pos):
        return _atom_invariant(lit.atom)
    if isinstance(lit, Naf):
        return "~" + _atom_invariant(lit.atom)
    return f"{_term_invariant(lit.left)} {lit.op} {_term_invariant(lit.right)}"


def _atom_invariant(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({','.join(_term_invariant(t) for t in a.args)})"


def _term_invariant(t: Term) -> str:
    if isinstance(t, Variable):
        return "\x7f"
    return repr(t)


def _rename_first_occurrence(head, body):
    mapping: dict[str, str] = {}

    def visit(term):
        if isinstance(term, Variable) and term.name not in mapping:
            mapping[term.name] = f"V{len(mapping) + 1}"

    def visit_atom(a):
        for arg in a.args:
            visit(arg)

    if head is not None:
        visit_atom(head)
    for lit in body:
        if isinstance(lit, (Pos, Naf)):
            visit_atom(lit.atom)
        else:
            visit(lit.left)
            visit(lit.right)
    from .asp.syntax import rename_rule
    return rename_rule(NormalRule(head, tuple(body)), mapping)


def canonical_form(rule: NormalRule) -> str:
    """Deterministic representative of a rule's alpha-equivalence class:
    body literals are blocked by a variable-blind invariant, blocks are
    permuted jointly, and the best first-occurrence renaming is kept."""
    body = list(rule.body)
    body.sort(key=_literal_invariant)
    blocks = []
    for lit in body:
        key = _literal_invariant(lit)
        if blocks and blocks[-1][0] == key:
            blocks[-1][1].append(lit)
        else:
            blocks.append((key, [lit]))
    best = None
    for arrangement in product(*(permutations(lits) for _, lits in blocks)):
        ordered = [lit for chunk in arrangement for lit in chunk]
        text = render_rule(_rename_first_occurrence(rule.head, ordered))
        if best is None or text < best:
            best = text
    return best if best is not None else render_rule(rule)


# ---------------------------------------------------------------------------
# enumeration

class _Enumerator:
    def __init__(self, bias: ModeBias, cap: int):
        self.bias = bias
        self.cap = cap
        self.out: dict[str, NormalRule] = {}

    def run(self) -> list[NormalRule]:
        for head_schema in self.bias.head_decls:
            if isinstance(head_schema, CompareSchema):
                raise AspSyntaxError("comparison schema cannot be a head")
            for head, vars_used in self._instantiate_head(head_schema):
                self._extend(head, [], {}, vars_used, 0, None)
        rules = sorted(self.out.values(),
                       key=lambda r: (r.n_literals, canonical_form(r)))
        return rules

    def _emit(self, head, body):
        rule = NormalRule(head, tuple(body))
        try:
            check_safety(rule)
        except UnsafeRuleError:
            return
        self.out.setdefault(canonical_form(rule), rule)
        if len(self.out) > self.cap:
            raise SpaceTooLargeError(
                f"candidate rule list exceeds cap of {self.cap}")

    def _instantiate_head(self, schema: AtomSchema):
        """Yield (head atom, ordered var list [(name, type)])."""
        def assign(slot_idx, args, vars_used):
            if slot_idx == len(schema.slots):
                yield Atom(schema.pred, tuple(args)), list(vars_used)
                return
            slot = schema.slots[slot_idx]
            if isinstance(slot, VarSlot):
                for name, vtype in vars_used:
                    if vtype == slot.type:
                        yield from assign(slot_idx + 1, args + [Variable(name)], vars_used)
                if len(vars_used) < self.bias.maxv:
                    fresh = f"V{len(vars_used) + 1}"
                    yield from assign(slot_idx + 1, args + [Variable(fresh)],
                                      vars_used + [(fresh, slot.type)])
            elif isinstance(slot, ConstSlot):
                for value in self.bias.constants.get(slot.type, []):
                    yield from assign(slot_idx + 1, args + [value], vars_used)
            else:
                yield from assign(slot_idx + 1, args + [slot], vars_used)
        yield from assign(0, [], [])

    def _instantiate_body_literal(self, decl: BodyDecl, vars_used):
        """Yield (literal, new vars_used)."""
        schema = decl.schema
        if isinstance(schema, CompareSchema):
            slots = (schema.left, schema.right)
        else:
            slots = schema.slots

        def assign(slot_idx, args, vu):
            if slot_idx == len(slots):
                if isinstance(schema, CompareSchema):
                    yield Compare(schema.op, args[0], args[1]), vu
                else:
                    yield Pos(Atom(schema.pred, tuple(args))), vu
                return
            slot = slots[slot_idx]
            if isinstance(slot, VarSlot):
                for name, vtype in vu:
                    if vtype == slot.type:
                        yield from assign(slot_idx + 1, args + [Variable(name)], vu)
                if len(vu) < self.bias.maxv:
                    fresh = f"V{len(vu) + 1}"
                    yield from assign(slot_idx + 1, args + [Variable(fresh)],
                                      vu + [(fresh, slot.type)])
            elif isinstance(slot, ConstSlot):
                for value in self.bias.constants.get(slot.type, []):
                    yield from assign(slot_idx + 1, args + [value], vu)
            else:
                yield from assign(slot_idx + 1, args + [slot], vu)

        yield from assign(0, [], vars_used)

    def _extend(self, head, body, decl_counts, vars_used, from_decl, last_key):
        if body or not self.bias.body_decls:
            self._emit(head, body)
        if len(body) >= self.bias.max_body:
            return
        for di in range(from_decl, len(self.bias.body_decls)):
            decl = self.bias.body_decls[di]
            recall = decl.recall if decl.recall is not None else self.bias.max_body
            if decl_counts.get(di, 0) >= recall:
                continue
            for literal, new_vars in self._instantiate_body_literal(decl, vars_used):
                key = repr(literal)
                if di == from_decl and last_key is not None and key <= last_key:
                    continue
                decl_counts[di] = decl_counts.get(di, 0) + 1
                self._extend(head, body + [literal], decl_counts, new_vars, di, key)
                decl_counts[di] -= 1


def compile_invention(bias: ModeBias) -> Program:
    """Concrete scaffold rule(s) linking the target predicate to the invented
    one.  The guarded-complement link is the one materialized; the identity
    link is reported and skipped since emitting both would make the target
    hold unconditionally."""
    inv = bias.invention
    if inv is None:
        return Program()
    if not inv.has_inverse:
        log.warning("invention declared without an inverse linking rule; "
                    "no scaffold emitted")
        return Program()
    if inv.has_identity:
        log.warning("identity linking rule is not scaffolded; using the "
                    "guarded-complement link only")
    target, t_arity = inv.target
    invented, i_arity = inv.invented
    if t_arity != 1 or i_arity != 1:
        raise AspSyntaxError("invention is only supported for unary predicates")
    x = Variable("X")
    body = []
    if inv.guard_pred:
        body.append(Pos(Atom(inv.guard_pred, (x,))))
    body.append(Naf(Atom(invented, (x,))))
    return Program((NormalRule(Atom(target, (x,)), tuple(body)),))


def enumerate_space(bias: ModeBias, cap: int = DEFAULT_SPACE_CAP) -> HypothesisSpace:
    """All safe candidate rules induced by the bias, deduplicated up to
    variable renaming, in deterministic (length, canonical text) order."""
    rules = _Enumerator(bias, cap).run()
    return HypothesisSpace(rules=rules, origin=bias,
                           scaffold=compile_invention(bias))


def space_contains(space: HypothesisSpace, rule: NormalRule) -> bool:
    forms = {canonical_form(r) for r in space.rules}
    return canonical_form(rule) in forms
