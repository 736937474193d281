"""Answer-set computation for ground normal programs with constraints.

The enumerator branches on the truth of atoms that occur under negation,
in first-occurrence order, taking the "out" branch first.  Unit propagation
uses two fixpoints per node: a lower bound (rules whose negative literals are
all decided out must fire) and an upper bound (rules whose negative literals
are not decided in may fire).  Atoms forced by either bound are assigned
without branching, which makes stratified programs solve deterministically
with no search.
"""

from __future__ import annotations

from ..errors import BudgetExceededError, ConstraintViolated
from .grounder import ground_full
from .syntax import Atom, Naf, NormalRule, Pos, Program

DEFAULT_NODE_BUDGET = 10_000_000

_OUT = 0
_IN = 1


class _Compiled:
    """Ground program over interned atom ids.

    rules: list of (head_id | -1 for constraints, pos tuple, naf tuple)
    """

    __slots__ = ("atoms", "ids", "rules", "naf_order")

    def __init__(self, program: Program):
        self.atoms: list[Atom] = []
        self.ids: dict[Atom, int] = {}
        self.rules = []
        naf_seen: dict[int, None] = {}
        for rule in program.rules:
            head = -1 if rule.head is None else self._intern(rule.head)
            pos = []
            naf = []
            for lit in rule.body:
                if isinstance(lit, Pos):
                    pos.append(self._intern(lit.atom))
                elif isinstance(lit, Naf):
                    naf.append(self._intern(lit.atom))
                else:
                    raise ValueError(
                        "comparison literal in ground program; ground() first")
            self.rules.append((head, tuple(pos), tuple(naf)))
            for a in naf:
                naf_seen.setdefault(a)
        self.naf_order = list(naf_seen)

    def _intern(self, atom: Atom) -> int:
        idx = self.ids.get(atom)
        if idx is None:
            idx = len(self.atoms)
            self.ids[atom] = idx
            self.atoms.append(atom)
        return idx


def _fixpoint(rules, naf_pred):
    """Least model of the rules whose negative literals all satisfy
    naf_pred; returns (model set, constraint_violated)."""
    model: set[int] = set()
    violated = False
    changed = True
    while changed:
        changed = False
        for head, pos, naf in rules:
            if head != -1 and head in model:
                continue
            if naf and not all(naf_pred(a) for a in naf):
                continue
            if all(p in model for p in pos):
                if head == -1:
                    violated = True
                else:
                    model.add(head)
                    changed = True
    return model, violated


class _Search:
    def __init__(self, compiled: _Compiled, limit, budget):
        self.c = compiled
        self.limit = limit
        self.budget = budget
        self.nodes = 0
        self.results: list[frozenset[Atom]] = []

    def run(self):
        self._solve({})
        return self.results

    def _done(self) -> bool:
        return self.limit is not None and len(self.results) >= self.limit

    def _solve(self, assign: dict[int, int]):
        if self._done():
            return
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(
                f"node budget of {self.budget} exhausted",
                partial=[set(m) for m in self.results])

        # propagate forced assignments to a fixpoint
        while True:
            lower, low_violated = _fixpoint(
                self.c.rules, lambda a: assign.get(a) == _OUT)
            if low_violated:
                return  # a constraint fires in every completion
            upper, _ = _fixpoint(
                self.c.rules, lambda a: assign.get(a) != _IN)
            forced = False
            for a in self.c.naf_order:
                val = assign.get(a)
                in_lower = a in lower
                in_upper = a in upper
                if val is None:
                    if in_lower:
                        assign[a] = _IN
                        forced = True
                    elif not in_upper:
                        assign[a] = _OUT
                        forced = True
                elif val == _OUT and in_lower:
                    return
                elif val == _IN and not in_upper:
                    return
            if not forced:
                break

        unassigned = [a for a in self.c.naf_order if a not in assign]
        if not unassigned:
            self._check_leaf(assign, lower)
            return
        pick = unassigned[0]
        for value in (_OUT, _IN):
            child = dict(assign)
            child[pick] = value
            self._solve(child)
            if self._done():
                return

    def _check_leaf(self, assign, lower):
        # with every negated atom decided, the lower fixpoint is the least
        # model of the reduct; it is stable iff it agrees with the guesses
        for a in self.c.naf_order:
            if (a in lower) != (assign[a] == _IN):
                return
        self.results.append(frozenset(self.c.atoms[i] for i in lower))


def answer_sets(program: Program, limit: int | None = None,
                budget: int = DEFAULT_NODE_BUDGET) -> list[frozenset[Atom]]:
    """All answer sets (up to ``limit``) in deterministic search order."""
    grounded = ground_full(program).program
    compiled = _Compiled(grounded)
    return _Search(compiled, limit, budget).run()


def has_answer_set(program: Program, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    return bool(answer_sets(program, limit=1, budget=budget))


def bravely_entails(program: Program, atom: Atom,
                    budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """True iff some answer set contains the atom."""
    goal = Program((NormalRule(None, (Naf(atom),)),))
    return has_answer_set(program + goal, budget=budget)


def reduct(program: Program, interpretation: frozenset[Atom] | set[Atom]) -> Program:
    """Negation-free transform: drop rules with a negated atom inside the
    interpretation, strip remaining negative literals."""
    out = []
    for rule in program.rules:
        body = []
        keep = True
        for lit in rule.body:
            if isinstance(lit, Naf):
                if lit.atom in interpretation:
                    keep = False
                    break
            elif isinstance(lit, Pos):
                body.append(lit)
            else:
                raise ValueError("comparison literal in ground program")
        if keep:
            out.append(NormalRule(rule.head, tuple(body)))
    return Program(out)


def least_model(program: Program) -> frozenset[Atom]:
    """Unique minimal model of a negation-free ground program.

    Raises ConstraintViolated when a constraint body is satisfied by the
    fixpoint (candidate rejection, not failure)."""
    compiled = _Compiled(program)
    if compiled.naf_order:
        raise ValueError("least_model requires a negation-free program")
    model, violated = _fixpoint(compiled.rules, lambda a: True)
    if violated:
        raise ConstraintViolated("constraint body satisfied by least model")
    return frozenset(compiled.atoms[i] for i in model)
