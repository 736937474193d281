"""Bridge from per-input prediction vectors to weighted symbolic examples.

For a sequence of inputs, each prediction vector contributes the feature
pairs of its argmax class plus any per-input metadata; the sequence
confidence is the minimum over contributing argmax confidences (the Gödel
t-norm as fuzzy conjunction).  Confidence converts to an integer example
penalty as floor(100 * w) + 1, and the label y over domain Y becomes the
partial interpretation <{y}, Y \\ {y}> in the task's label-atom encoding.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from decimal import ROUND_FLOOR, Decimal

from .asp.syntax import Atom, Constant, Integer, NormalRule, Program, Term
from .errors import (AllBackgroundError, EmptyVectorError, OutOfRangeError,
                     TemplateSlotUnresolvedError, UnknownNetworkError)
from .las import PartialInterpretation, WCDPI


@dataclass(frozen=True)
class PredictionVector:
    network_id: str
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.probs) < 1:
            raise EmptyVectorError("prediction vector must be non-empty")
        for p in self.probs:
            if not (0.0 <= p <= 1.0):
                raise OutOfRangeError(f"probability {p} outside [0,1]")


# metadata is a tuple of (name, value) pairs with unique names
MetaData = tuple[tuple[str, object], ...]


@dataclass
class FeatureMapping:
    """Per network: class index (1-based) -> feature/value pairs.
    Background classes produce no symbolic output at all."""
    network_id: str
    classes: dict[int, tuple[tuple[str, object], ...]]
    background: frozenset[int] = frozenset()

    @property
    def k(self) -> int:
        return len(self.classes) + len(self.background)

    def __post_init__(self):
        for z in range(1, self.k + 1):
            if (z in self.classes) == (z in self.background):
                raise ValueError(
                    f"class {z} must map to exactly one pair set or be background")


@dataclass(frozen=True)
class FactTemplate:
    """Predicate plus ordered slot names, filled from feature pairs first and
    metadata second."""
    predicate: str
    slots: tuple[str, ...]

    def render(self, pairs: dict[str, object]) -> Atom:
        args = []
        for slot in self.slots:
            if slot not in pairs:
                raise TemplateSlotUnresolvedError(
                    f"slot {slot!r} of template {self.predicate!r} has no value")
            args.append(as_term(pairs[slot]))
        return Atom(self.predicate, tuple(args))


def as_term(value) -> Term:
    if isinstance(value, Term):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean feature values are not supported")
    if isinstance(value, int):
        return Integer(value)
    if isinstance(value, str):
        return Constant(value)
    raise TypeError(f"cannot render {value!r} as a term")


@dataclass(frozen=True)
class D2KTuple:
    network_id: str
    features: tuple[tuple[str, object], ...]
    meta: MetaData


@dataclass(frozen=True)
class D2KOutput:
    w: float
    tuples: tuple[D2KTuple, ...]


def predict_class(v: PredictionVector) -> tuple[int, float]:
    """Argmax class (1-based) and its confidence; ties go to the lowest index."""
    best_idx = 0
    best = v.probs[0]
    for i in range(1, len(v.probs)):
        if v.probs[i] > best:
            best = v.probs[i]
            best_idx = i
    return best_idx + 1, best


def aggregate_confidence(confs) -> float:
    """Minimum of the confidences (Gödel t-norm conjunction)."""
    confs = list(confs)
    if not confs:
        raise EmptyVectorError("no confidences to aggregate")
    for c in confs:
        if not (0.0 <= c <= 1.0):
            raise OutOfRangeError(f"confidence {c} outside [0,1]")
    return min(confs)


def penalty(w: float) -> int:
    """floor(100 * w) + 1 over the decimal value of w, in {1, ..., 101}.

    The floor is taken on the shortest decimal representation so that e.g.
    0.96 maps to 97 even though float(0.96) * 100 dips below 96."""
    if not (0.0 <= w <= 1.0):
        raise OutOfRangeError(f"confidence {w} outside [0,1]")
    scaled = Decimal(str(w)) * 100
    return int(scaled.to_integral_value(rounding=ROUND_FLOOR)) + 1


def generate(seq, mappings: dict[str, FeatureMapping]) -> D2KOutput:
    """Run the generator over one sequence of (PredictionVector, MetaData):
    accumulate a symbolic tuple per non-background input and aggregate the
    included confidences."""
    tuples = []
    confs = []
    for vector, meta in seq:
        mapping = mappings.get(vector.network_id)
        if mapping is None:
            raise UnknownNetworkError(
                f"no feature mapping for network {vector.network_id!r}")
        z, conf = predict_class(vector)
        if z in mapping.background:
            continue
        pairs = mapping.classes.get(z)
        if pairs is None:
            raise OutOfRangeError(
                f"class {z} has no feature mapping for network "
                f"{vector.network_id!r}")
        tuples.append(D2KTuple(vector.network_id, pairs, tuple(meta)))
        confs.append(conf)
    if not tuples:
        raise AllBackgroundError("every input predicted a background class")
    return D2KOutput(aggregate_confidence(confs), tuple(tuples))


@dataclass(frozen=True)
class LabelAtoms:
    """Label domain encoded as one atom per label, e.g. winner(1)..winner(4)."""
    predicate: str
    domain: tuple[object, ...]

    def atom(self, label) -> Atom:
        return Atom(self.predicate, (as_term(label),))

    def pi(self, label) -> PartialInterpretation:
        if label not in self.domain:
            raise OutOfRangeError(f"label {label!r} outside domain {self.domain}")
        inc = frozenset({self.atom(label)})
        exc = frozenset(self.atom(y) for y in self.domain if y != label)
        return PartialInterpretation(inc, exc)

    def all_atoms(self):
        return [(y, self.atom(y)) for y in self.domain]


@dataclass(frozen=True)
class MarkerLabel:
    """Binary label domain encoded by brave entailment of a single marker
    atom: positive label -> marker included, negative -> marker excluded."""
    marker: Atom
    positive: object = 1
    negative: object = 0

    @property
    def domain(self):
        return (self.negative, self.positive)

    def pi(self, label) -> PartialInterpretation:
        if label == self.positive:
            return PartialInterpretation(frozenset({self.marker}), frozenset())
        if label == self.negative:
            return PartialInterpretation(frozenset(), frozenset({self.marker}))
        raise OutOfRangeError(f"label {label!r} outside domain {self.domain}")


def context_facts(output: D2KOutput, templates) -> Program:
    facts = []
    for tup in output.tuples:
        pairs = dict(tup.features)
        for name, value in tup.meta:
            pairs.setdefault(name, value)
        for template in templates:
            facts.append(NormalRule(template.render(pairs), ()))
    return Program(facts)


def example_id(ctx: Program, label, seq_index: int) -> str:
    digest = hashlib.sha256(
        (ctx.render() + "|" + repr(label)).encode()).hexdigest()[:10]
    return f"e{seq_index:05d}_{digest}"


def to_wcdpi(output: D2KOutput, label, label_scheme, templates,
             example_id: str) -> WCDPI:
    """Pack one generator output plus its label into a weighted example."""
    ctx = context_facts(output, templates)
    return WCDPI(example_id, penalty(output.w), label_scheme.pi(label), ctx)
