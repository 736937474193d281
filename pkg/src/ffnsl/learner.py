"""Search for an optimal hypothesis: exact anytime iterative deepening over
total literal count, plus a greedy add-then-prune fallback for large spaces.

The deepening bound is exact against the scoring function: any hypothesis of
total length L scores at least L, so once every subset of length up to the
incumbent score has been enumerated, the incumbent is provably optimal.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .asp.solver import DEFAULT_NODE_BUDGET
from .errors import SpaceTooLargeError
from .las import Hypothesis, LasTask, TaskScorer, hypothesis_from_indices


@dataclass
class SearchConfig:
    mode: str = "exact"                     # "exact" | "greedy"
    max_hypothesis_length: int = 12
    time_budget_s: float | None = None      # wall-clock cap; None = unbounded
    timeout_returns_incumbent: bool = True
    solver_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        if self.max_hypothesis_length < 0:
            raise ValueError("max_hypothesis_length must be >= 0")
        if self.mode not in ("exact", "greedy"):
            raise ValueError(f"unknown search mode {self.mode!r}")


@dataclass
class LearnResult:
    hypothesis: Hypothesis
    score: int
    uncovered: list[str]
    proof_of_optimality: bool
    wall_s: float = 0.0
    nodes_scored: int = 0


class _Deadline:
    def __init__(self, seconds):
        self.t_end = None if seconds is None else time.monotonic() + seconds

    def expired(self) -> bool:
        return self.t_end is not None and time.monotonic() > self.t_end


def learn_exact(task: LasTask, cfg: SearchConfig | None = None,
                scorer: TaskScorer | None = None) -> LearnResult:
    """Iterative deepening on hypothesis length L = 0, 1, 2, ...; at each
    level every rule subset of total length L is scored (indices ascending,
    so enumeration within a level is lexicographic).  Ties keep the
    lexicographically smallest index sequence.  Terminates with an
    optimality proof once L exceeds the incumbent score."""
    cfg = cfg or SearchConfig()
    scorer = scorer or TaskScorer(task, budget=cfg.solver_budget)
    rules = task.space_rules
    lengths = [r.n_literals for r in rules]
    deadline = _Deadline(cfg.time_budget_s)
    t0 = time.monotonic()

    stats = {"scored": 0}
    inc_score, inc_uncov = scorer.score(())
    incumbent: tuple[int, ...] = ()
    stats["scored"] += 1

    max_level = min(cfg.max_hypothesis_length, sum(lengths))
    proof = False
    timed_out = False

    def consider(indices: tuple[int, ...]):
        nonlocal inc_score, inc_uncov, incumbent
        stats["scored"] += 1
        value, uncov = scorer.score(indices, bound=inc_score + 1)
        if value is None:
            return
        if value < inc_score or (value == inc_score and indices < incumbent):
            inc_score, inc_uncov, incumbent = value, uncov, indices

    def level_subsets(level: int, start: int, chosen: list[int], remaining: int):
        """Yield subsets with total length exactly `level` (indices ascending)."""
        nonlocal timed_out
        if remaining == 0:
            yield tuple(chosen)
            return
        for i in range(start, len(rules)):
            if deadline.expired():
                timed_out = True
                return
            if lengths[i] > remaining:
                continue
            chosen.append(i)
            yield from level_subsets(level, i + 1, chosen, remaining - lengths[i])
            chosen.pop()
            if timed_out:
                return

    level = 1
    while level <= max_level and not timed_out:
        if level > inc_score:
            proof = True
            break
        for subset in level_subsets(level, 0, [], level):
            consider(subset)
            if deadline.expired():
                timed_out = True
                break
        level += 1
    if not timed_out and not proof:
        # level range exhausted: optimal only if nothing longer could win
        proof = level > inc_score or max_level >= sum(lengths)

    h = hypothesis_from_indices(task, incumbent)
    return LearnResult(h, inc_score, inc_uncov, proof,
                       wall_s=time.monotonic() - t0,
                       nodes_scored=stats["scored"])


def learn_greedy(task: LasTask, cfg: SearchConfig | None = None,
                 scorer: TaskScorer | None = None) -> LearnResult:
    """Start from the empty hypothesis; repeatedly add the single rule that
    most reduces the score (ties to the lowest index); stop at a local
    optimum, then prune rules whose removal does not increase the score."""
    cfg = cfg or SearchConfig(mode="greedy")
    scorer = scorer or TaskScorer(task, budget=cfg.solver_budget)
    rules = task.space_rules
    deadline = _Deadline(cfg.time_budget_s)
    t0 = time.monotonic()
    stats = {"scored": 1}

    current: list[int] = []
    current_score, current_uncov = scorer.score(())

    improved = True
    while improved and not deadline.expired():
        improved = False
        best = None
        for i in range(len(rules)):
            if i in current:
                continue
            candidate = tuple(sorted(current + [i]))
            if sum(rules[j].n_literals for j in candidate) > cfg.max_hypothesis_length:
                continue
            stats["scored"] += 1
            value, uncov = scorer.score(candidate, bound=current_score)
            if value is None:
                continue
            if best is None or value < best[0]:
                best = (value, i, uncov)
        if best is not None and best[0] < current_score:
            current.append(best[1])
            current.sort()
            current_score, current_uncov = best[0], best[2]
            improved = True

    # prune pass: drop rules that no longer pay for themselves
    pruned = True
    while pruned and not deadline.expired():
        pruned = False
        for i in list(current):
            candidate = tuple(j for j in current if j != i)
            stats["scored"] += 1
            value, uncov = scorer.score(candidate)
            if value <= current_score:
                current.remove(i)
                current_score, current_uncov = value, uncov
                pruned = True
                break

    h = hypothesis_from_indices(task, tuple(current))
    return LearnResult(h, current_score, current_uncov, False,
                       wall_s=time.monotonic() - t0,
                       nodes_scored=stats["scored"])


def learn(task: LasTask, cfg: SearchConfig | None = None,
          scorer: TaskScorer | None = None) -> LearnResult:
    cfg = cfg or SearchConfig()
    if cfg.mode == "greedy":
        return learn_greedy(task, cfg, scorer)
    return learn_exact(task, cfg, scorer)


def verify_optimal(task: LasTask, h: Hypothesis,
                   scorer: TaskScorer | None = None,
                   max_space: int = 16) -> bool:
    """Exhaustive check that no subset of the candidate rules scores strictly
    better than the given hypothesis.  Only for small spaces."""
    rules = task.space_rules
    if len(rules) > max_space:
        raise SpaceTooLargeError(
            f"exhaustive verification limited to {max_space} rules, "
            f"space has {len(rules)}")
    scorer = scorer or TaskScorer(task)
    target, _ = scorer.score(h.rules)
    n = len(rules)
    for mask in range(1 << n):
        indices = tuple(i for i in range(n) if mask & (1 << i))
        value, _ = scorer.score(indices, bound=target)
        if value is not None and value < target:
            return False
    return True
