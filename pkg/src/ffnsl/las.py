"""Weighted context-dependent partial interpretations and hypothesis scoring.

A learning task is a triple of background knowledge, a finite candidate rule
list, and weighted examples.  A hypothesis (any subset of the candidates) is
scored as its literal count plus the penalties of the examples it fails to
accept; lower is better.

Scoring goes through :class:`TaskScorer`, which detects the common case where
every candidate rule is negation-free, non-recursive, and feeds the rest of
the program only through its head predicate.  There, acceptance of a
hypothesis factors through the union of per-rule derived head atoms, so each
(rule, example) pair is evaluated once and subset scoring reduces to set
unions plus a cached acceptance lookup.  Anything else falls back to a
memoized full answer-set check per (hypothesis, example).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .asp.grounder import eval_compare, ground_full, iter_matches
from .asp.parser import TokenStream, _RuleParser, parse_program, tokenize
from .asp.solver import DEFAULT_NODE_BUDGET, has_answer_set
from .asp.syntax import (Atom, Compare, Naf, NormalRule, Pos, Program,
                         render_rule, substitute_atom)
from .errors import AspSyntaxError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartialInterpretation:
    inc: frozenset[Atom]
    exc: frozenset[Atom]

    def __post_init__(self):
        if self.inc & self.exc:
            raise ValueError("inclusion and exclusion sets overlap")


def extends(interpretation: frozenset[Atom] | set[Atom],
            pi: PartialInterpretation) -> bool:
    """inc ⊆ I and exc ∩ I = ∅."""
    return pi.inc <= interpretation and not (pi.exc & interpretation)


@dataclass(frozen=True)
class WCDPI:
    id: str
    penalty: int
    pi: PartialInterpretation
    ctx: Program

    def __post_init__(self):
        if self.penalty < 1:
            raise ValueError(f"penalty must be >= 1, got {self.penalty}")


@dataclass
class LasTask:
    background: Program
    space: object  # HypothesisSpace or any sequence of NormalRule
    examples: list[WCDPI]

    @property
    def space_rules(self) -> tuple[NormalRule, ...]:
        rules = getattr(self.space, "rules", self.space)
        return tuple(rules)

    def __post_init__(self):
        ids = [e.id for e in self.examples]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate example ids in task")


@dataclass(frozen=True)
class Hypothesis:
    rules: tuple[int, ...]   # strictly increasing candidate indices
    length: int              # total literal count across rules

    def __post_init__(self):
        if list(self.rules) != sorted(set(self.rules)):
            raise ValueError("rule indices must be strictly increasing")


def hypothesis_from_indices(task: LasTask, indices) -> Hypothesis:
    rules = task.space_rules
    idx = tuple(sorted(indices))
    return Hypothesis(idx, sum(rules[i].n_literals for i in idx))


def hypothesis_program(task: LasTask, h: Hypothesis) -> Program:
    rules = task.space_rules
    return Program(tuple(rules[i] for i in h.rules))


def _pi_constraints(pi: PartialInterpretation) -> Program:
    rules = [NormalRule(None, (Naf(a),)) for a in sorted(pi.inc, key=repr)]
    rules += [NormalRule(None, (Pos(a),)) for a in sorted(pi.exc, key=repr)]
    return Program(rules)


def accepts(program: Program, example: WCDPI,
            budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """True iff some answer set of program ∪ ctx extends the example's
    partial interpretation."""
    full = program + example.ctx + _pi_constraints(example.pi)
    return has_answer_set(full, budget=budget)


# ---------------------------------------------------------------------------
# scoring

def _mentions(rule: NormalRule, keys: set) -> bool:
    if rule.head is not None and rule.head.key in keys:
        return True
    for lit in rule.body:
        if isinstance(lit, (Pos, Naf)) and lit.atom.key in keys:
            return True
    return False


class _ExampleState:
    __slots__ = ("example", "relations", "fire", "accept", "base_consistent")

    def __init__(self, example):
        self.example = example
        self.relations = None          # decomposed path: indexed base model
        self.fire = {}                 # rule index -> frozenset of head atoms
        self.accept = {}               # frozenset of head atoms -> bool
        self.base_consistent = None


class TaskScorer:
    """Caches per-example work so that many hypotheses can be scored cheaply
    over one task.  Safe to use from one thread; create one per worker."""

    def __init__(self, task: LasTask, budget: int = DEFAULT_NODE_BUDGET):
        self.task = task
        self.budget = budget
        self.rules = task.space_rules
        self._states = {e.id: _ExampleState(e) for e in task.examples}
        self._generic_memo: dict[tuple, bool] = {}
        self._split_rules = []
        for rule in self.rules:
            pos = tuple(l.atom for l in rule.body if isinstance(l, Pos))
            cmps = tuple(l for l in rule.body if isinstance(l, Compare))
            self._split_rules.append((rule, pos, cmps))
        self.decomposable = self._check_decomposable()

    # -- structural analysis --

    def _check_decomposable(self) -> bool:
        if not self.rules:
            return False
        space_heads: set = set()
        space_bodies: set = set()
        for rule in self.rules:
            if rule.head is None:
                return False
            space_heads.add(rule.head.key)
            for lit in rule.body:
                if isinstance(lit, Naf):
                    return False
                if isinstance(lit, Pos):
                    space_bodies.add(lit.atom.key)
        if space_heads & space_bodies:
            return False
        all_rules = list(self.task.background.rules)
        for e in self.task.examples:
            all_rules.extend(e.ctx.rules)
        base = []
        dependent = []
        for rule in all_rules:
            if rule.head is not None and rule.head.key in space_heads:
                return False
            (dependent if _mentions(rule, space_heads) else base).append(rule)
        base_heads = set()
        for rule in base:
            if rule.head is None:
                return False
            if any(isinstance(lit, Naf) for lit in rule.body):
                return False
            base_heads.add(rule.head.key)
        for rule in base:
            for lit in rule.body:
                if isinstance(lit, Pos) and lit.atom.key not in base_heads:
                    return False
        for rule in dependent:
            if rule.head is not None and (rule.head.key in space_bodies
                                          or rule.head.key in base_heads):
                return False
        self._space_heads = space_heads
        return True

    # -- decomposed path --

    def _base_relations(self, state: _ExampleState):
        if state.relations is not None:
            return state.relations
        rules = [r for r in (tuple(self.task.background.rules)
                             + state.example.ctx.rules)
                 if not _mentions(r, self._space_heads)]
        derivable = ground_full(Program(rules)).derivable
        relations: dict[tuple, list] = {}
        for atom in derivable:
            relations.setdefault(atom.key, []).append(atom)
        state.relations = relations
        return relations

    def _fire_heads(self, rule_idx: int, state: _ExampleState) -> frozenset:
        cached = state.fire.get(rule_idx)
        if cached is not None:
            return cached
        relations = self._base_relations(state)
        rule, pos, cmps = self._split_rules[rule_idx]
        heads = set()
        theta: dict[str, object] = {}
        for binding in iter_matches(pos, relations, theta):
            if cmps and not all(eval_compare(c, binding) for c in cmps):
                continue
            heads.add(substitute_atom(rule.head, _Bind(binding)))
        result = frozenset(heads)
        state.fire[rule_idx] = result
        return result

    def _accept_with_heads(self, state: _ExampleState, heads: frozenset) -> bool:
        cached = state.accept.get(heads)
        if cached is not None:
            return cached
        e = state.example
        derived = Program(tuple(NormalRule(a, ()) for a in sorted(heads, key=repr)))
        result = accepts(self.task.background + derived, e, budget=self.budget)
        state.accept[heads] = result
        if not heads:
            self._note_base_consistency(state)
        return result

    def _note_base_consistency(self, state: _ExampleState):
        if state.base_consistent is not None:
            return
        consistent = has_answer_set(
            self.task.background + state.example.ctx, budget=self.budget)
        state.base_consistent = consistent
        if not consistent:
            log.warning("example %s has an inconsistent context; it cannot "
                        "be accepted by any hypothesis", state.example.id)

    # -- generic path --

    def _accepts_generic(self, indices: tuple, state: _ExampleState) -> bool:
        key = (indices, state.example.id)
        cached = self._generic_memo.get(key)
        if cached is not None:
            return cached
        program = self.task.background + Program(
            tuple(self.rules[i] for i in indices))
        result = accepts(program, state.example, budget=self.budget)
        self._generic_memo[key] = result
        if not indices:
            self._note_base_consistency(state)
        return result

    # -- public API --

    def example_accepted(self, indices: tuple[int, ...], example_id: str) -> bool:
        state = self._states[example_id]
        if self.decomposable:
            heads = frozenset()
            for i in indices:
                heads |= self._fire_heads(i, state)
            return self._accept_with_heads(state, heads)
        return self._accepts_generic(tuple(sorted(indices)), state)

    def score(self, indices, bound: int | None = None):
        """Score the hypothesis made of the given rule indices.

        Returns (score, uncovered ids).  With ``bound``, gives up early once
        the score provably reaches it and returns (None, None)."""
        indices = tuple(sorted(indices))
        length = sum(self.rules[i].n_literals for i in indices)
        if bound is not None and length >= bound:
            return None, None
        total = length
        uncovered = []
        for e in self.task.examples:
            if not self.example_accepted(indices, e.id):
                total += e.penalty
                uncovered.append(e.id)
                if bound is not None and total >= bound:
                    return None, None
        return total, uncovered


class _Bind(dict):
    """Adapter: Variable-keyed lookups over a name-keyed binding dict."""

    def __init__(self, binding):
        super().__init__()
        self.binding = binding

    def get(self, var, default=None):
        return self.binding.get(var.name, default)


def score(h: Hypothesis, task: LasTask,
          scorer: TaskScorer | None = None) -> tuple[int, list[str]]:
    """Length of the hypothesis plus penalties of unaccepted examples."""
    if scorer is None:
        scorer = TaskScorer(task)
    value, uncovered = scorer.score(h.rules)
    return value, uncovered


# ---------------------------------------------------------------------------
# example text / JSON formats

_ID_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def _render_id(example_id: str) -> str:
    if example_id and example_id[0].isalpha() and set(example_id) <= _ID_OK:
        return example_id
    return '"' + example_id + '"'


def render_wcdpi(e: WCDPI) -> str:
    inc = ",".join(repr(a) for a in sorted(e.pi.inc, key=repr))
    exc = ",".join(repr(a) for a in sorted(e.pi.exc, key=repr))
    if e.ctx.rules:
        ctx = "{ " + " ".join(render_rule(r) for r in e.ctx.rules) + " }"
    else:
        ctx = "{}"
    return (f"#example(id={_render_id(e.id)}, penalty={e.penalty}, "
            f"inc={{{inc}}}, exc={{{exc}}}, ctx={ctx}).")


def render_wcdpis(examples) -> str:
    return "\n".join(render_wcdpi(e) for e in examples) + "\n"


def _parse_atom_set(stream: TokenStream) -> frozenset[Atom]:
    stream.expect("{")
    atoms = []
    rp = _RuleParser(stream)
    while not stream.at("}"):
        atoms.append(rp.parse_atom())
        if stream.at(","):
            stream.next()
    stream.expect("}")
    return frozenset(atoms)


def _expect_keyword(stream: TokenStream, word: str):
    tok = stream.expect("IDENT")
    if tok.value != word:
        raise AspSyntaxError(f"expected {word!r}, found {tok.value!r}",
                             tok.line, tok.col)
    stream.expect("=")


def parse_wcdpis(text: str) -> list[WCDPI]:
    stream = TokenStream(tokenize(text))
    out = []
    while not stream.at("EOF"):
        tok = stream.expect("DIRECTIVE")
        if tok.value != "example":
            raise AspSyntaxError(f"expected #example, found #{tok.value}",
                                 tok.line, tok.col)
        stream.expect("(")
        _expect_keyword(stream, "id")
        id_tok = stream.next()
        if id_tok.kind == "STRING":
            example_id = id_tok.value[1:-1]
        elif id_tok.kind in ("IDENT", "VAR"):
            example_id = id_tok.value
        else:
            raise AspSyntaxError("bad example id", id_tok.line, id_tok.col)
        stream.expect(",")
        _expect_keyword(stream, "penalty")
        penalty = stream.expect("INT").value
        stream.expect(",")
        _expect_keyword(stream, "inc")
        inc = _parse_atom_set(stream)
        stream.expect(",")
        _expect_keyword(stream, "exc")
        exc = _parse_atom_set(stream)
        stream.expect(",")
        _expect_keyword(stream, "ctx")
        stream.expect("{")
        ctx_rules = []
        while not stream.at("}"):
            ctx_rules.append(_RuleParser(stream).parse_rule())
        stream.expect("}")
        stream.expect(")")
        stream.expect(".")
        out.append(WCDPI(example_id, penalty,
                         PartialInterpretation(inc, exc), Program(ctx_rules)))
    return out


def wcdpi_to_json(e: WCDPI) -> dict:
    return {
        "id": e.id,
        "penalty": e.penalty,
        "inc": [repr(a) for a in sorted(e.pi.inc, key=repr)],
        "exc": [repr(a) for a in sorted(e.pi.exc, key=repr)],
        "ctx": [render_rule(r) for r in e.ctx.rules],
    }


def wcdpi_from_json(payload: dict) -> WCDPI:
    from .asp.parser import parse_ground_atom
    inc = frozenset(parse_ground_atom(a) for a in payload["inc"])
    exc = frozenset(parse_ground_atom(a) for a in payload["exc"])
    ctx = parse_program("\n".join(payload["ctx"]))
    return WCDPI(payload["id"], int(payload["penalty"]),
                 PartialInterpretation(inc, exc), ctx)


def dump_wcdpis_json(examples, fp) -> None:
    json.dump([wcdpi_to_json(e) for e in examples], fp, indent=2)


def load_wcdpis_json(fp) -> list[WCDPI]:
    return [wcdpi_from_json(x) for x in json.load(fp)]
