"""Evaluation metrics: downstream accuracy from true or predicted features,
example quality (share of contexts inconsistent with their label), penalty
mass allocation, and hypothesis interpretability.
"""

from __future__ import annotations

from .asp.solver import DEFAULT_NODE_BUDGET, answer_sets, bravely_entails
from .asp.syntax import Compare, Naf, NormalRule, Pos, Program
from .d2k import D2KOutput, D2KTuple, LabelAtoms, MarkerLabel, context_facts
from .errors import ZeroTotalPenaltyError
from .las import WCDPI, accepts


def instance_context(bundle, instance) -> Program:
    """Context facts from an instance's true classes (no predictor)."""
    tuples = tuple(
        D2KTuple(bundle.network_id, bundle.mapping.classes[tc], tuple(meta))
        for tc, meta in instance.inputs)
    return context_facts(D2KOutput(1.0, tuples), bundle.templates)


def predicted_context(bundle, seq) -> Program | None:
    """Context facts from prediction vectors; None when every input hit a
    background class."""
    from .d2k import generate
    from .errors import AllBackgroundError
    try:
        output = generate(seq, {bundle.network_id: bundle.mapping})
    except AllBackgroundError:
        return None
    return context_facts(output, bundle.templates)


def predict_label(bundle, hypothesis: Program, ctx: Program,
                  budget: int = DEFAULT_NODE_BUDGET):
    """Downstream prediction under background + hypothesis + context.

    Label-atom tasks: the unique bravely entailed label atom, or None when
    zero or several are entailed (callers count None as incorrect).
    Marker tasks: positive label iff the marker atom is bravely entailed."""
    program = bundle.background + hypothesis + ctx
    scheme = bundle.label_scheme
    if isinstance(scheme, MarkerLabel):
        entailed = bravely_entails(program, scheme.marker, budget=budget)
        return scheme.positive if entailed else scheme.negative
    assert isinstance(scheme, LabelAtoms)
    models = answer_sets(program, budget=budget)
    entailed = [y for y, atom in scheme.all_atoms()
                if any(atom in m for m in models)]
    return entailed[0] if len(entailed) == 1 else None


def hypothesis_accuracy(hypothesis: Program, bundle, symbolic_test,
                        budget: int = DEFAULT_NODE_BUDGET) -> float:
    """Fraction of test instances whose label is predicted from the TRUE
    symbolic features.  Ambiguous predictions count as incorrect."""
    if not symbolic_test:
        return 0.0
    hits = 0
    for inst in symbolic_test:
        ctx = instance_context(bundle, inst)
        if predict_label(bundle, hypothesis, ctx, budget=budget) == inst.label:
            hits += 1
    return hits / len(symbolic_test)


def framework_accuracy(hypothesis: Program, bundle, test_instances,
                       predicted_sequences,
                       budget: int = DEFAULT_NODE_BUDGET) -> float:
    """Like hypothesis_accuracy but the features come from predictions.
    Sequences whose inputs were all background count as incorrect."""
    if not test_instances:
        return 0.0
    by_id = dict(predicted_sequences)
    hits = 0
    for inst in test_instances:
        ctx = predicted_context(bundle, by_id[inst.seq_id])
        if ctx is None:
            continue
        if predict_label(bundle, hypothesis, ctx, budget=budget) == inst.label:
            hits += 1
    return hits / len(test_instances)


def example_correct(example: WCDPI, bundle,
                    budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """An example is correct when the ground-truth rules over its context
    accept its partial interpretation (context consistent with the label)."""
    return accepts(bundle.background + bundle.ground_truth_rules, example,
                   budget=budget)


def pct_incorrect_examples(wcdpis, bundle,
                           budget: int = DEFAULT_NODE_BUDGET) -> float:
    if not wcdpis:
        return 0.0
    bad = sum(1 for e in wcdpis if not example_correct(e, bundle, budget=budget))
    return bad / len(wcdpis)


def weight_penalty_ratio(wcdpis, bundle,
                         budget: int = DEFAULT_NODE_BUDGET) -> float:
    """Share of total penalty mass carried by correct examples."""
    total = sum(e.penalty for e in wcdpis)
    if total == 0:
        raise ZeroTotalPenaltyError("no penalty mass over the example set")
    good = sum(e.penalty for e in wcdpis
               if example_correct(e, bundle, budget=budget))
    return good / total


def interpretability(hypothesis: Program) -> int:
    """Total atom occurrences (head plus body); a negated atom counts once,
    a comparison literal counts once."""
    count = 0
    for rule in hypothesis.rules:
        if rule.head is not None:
            count += 1
        for lit in rule.body:
            if isinstance(lit, (Pos, Naf, Compare)):
                count += 1
    return count
