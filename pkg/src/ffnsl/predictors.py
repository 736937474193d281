"""Seeded synthetic predictors standing in for pre-trained networks.

A profile fixes accuracy and a confidence distribution separately for clean
and shifted inputs.  The bundled presets model the two confidence regimes
seen on out-of-distribution data: a softmax-style network that stays near
certainty no matter what, and an uncertainty-aware one whose confidence
collapses under shift.  Wrong predictions pick a uniformly random wrong
class (optionally a fixed collapse class for shifted inputs).

Every vector is produced from an RNG stream derived by hashing the base seed
with the sequence id, so per-sequence output is independent of dataset order
and worker scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .d2k import MetaData, PredictionVector
from .errors import MalformedRowError, ProbabilityOutOfRangeError

_CONF_FLOOR = 1e-6


@dataclass(frozen=True)
class ConfDist:
    """Confidence distribution over [0,1]: beta(a,b), a constant, or an
    empirical histogram (bin edges + weights)."""
    kind: str
    params: tuple

    @staticmethod
    def beta(a: float, b: float) -> "ConfDist":
        if a <= 0 or b <= 0:
            raise ValueError("beta parameters must be positive")
        return ConfDist("beta", (a, b))

    @staticmethod
    def constant(c: float) -> "ConfDist":
        if not (0.0 <= c <= 1.0):
            raise ValueError("constant confidence must be in [0,1]")
        return ConfDist("constant", (c,))

    @staticmethod
    def histogram(edges, weights) -> "ConfDist":
        edges = tuple(float(e) for e in edges)
        weights = tuple(float(w) for w in weights)
        if len(edges) != len(weights) + 1 or min(weights) < 0 or sum(weights) <= 0:
            raise ValueError("histogram needs len(edges) == len(weights)+1, "
                             "nonnegative weights with positive sum")
        return ConfDist("histogram", (edges, weights))

    def sample(self, rng: np.random.Generator) -> float:
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "beta":
            return float(np.clip(rng.beta(*self.params), 0.0, 1.0))
        edges, weights = self.params
        probs = np.asarray(weights) / sum(weights)
        idx = rng.choice(len(weights), p=probs)
        return float(rng.uniform(edges[idx], edges[idx + 1]))

    @staticmethod
    def from_spec(spec) -> "ConfDist":
        if isinstance(spec, ConfDist):
            return spec
        if isinstance(spec, (int, float)):
            return ConfDist.constant(float(spec))
        if isinstance(spec, dict):
            if "beta" in spec:
                return ConfDist.beta(*spec["beta"])
            if "constant" in spec:
                return ConfDist.constant(spec["constant"])
            if "histogram" in spec:
                h = spec["histogram"]
                return ConfDist.histogram(h["edges"], h["weights"])
        raise ValueError(f"unrecognized confidence distribution spec: {spec!r}")


@dataclass(frozen=True)
class PredictorProfile:
    name: str
    clean_accuracy: float
    shifted_accuracy: float
    clean_conf: ConfDist
    shifted_conf: ConfDist
    collapse_to: int | None = None   # shifted wrong predictions land here

    def __post_init__(self):
        for acc in (self.clean_accuracy, self.shifted_accuracy):
            if not (0.0 <= acc <= 1.0):
                raise ValueError("accuracies must be in [0,1]")


PROFILES = {
    # stays near-certain even on shifted inputs
    "overconfident": PredictorProfile(
        "overconfident", clean_accuracy=0.99, shifted_accuracy=0.10,
        clean_conf=ConfDist.beta(50, 1), shifted_conf=ConfDist.beta(50, 1)),
    # confidence collapses under shift
    "calibrated": PredictorProfile(
        "calibrated", clean_accuracy=0.99, shifted_accuracy=0.10,
        clean_conf=ConfDist.beta(20, 2), shifted_conf=ConfDist.beta(2, 5)),
    # degenerate: always right, always certain
    "perfect": PredictorProfile(
        "perfect", clean_accuracy=1.0, shifted_accuracy=1.0,
        clean_conf=ConfDist.constant(1.0), shifted_conf=ConfDist.constant(1.0)),
}


def profile_from_spec(spec) -> PredictorProfile:
    if isinstance(spec, PredictorProfile):
        return spec
    if isinstance(spec, str):
        if spec not in PROFILES:
            raise ValueError(f"unknown profile {spec!r}; "
                             f"bundled: {sorted(PROFILES)}")
        return PROFILES[spec]
    return PredictorProfile(
        name=spec.get("name", "custom"),
        clean_accuracy=float(spec["clean_accuracy"]),
        shifted_accuracy=float(spec["shifted_accuracy"]),
        clean_conf=ConfDist.from_spec(spec["clean_conf"]),
        shifted_conf=ConfDist.from_spec(spec["shifted_conf"]),
        collapse_to=spec.get("collapse_to"),
    )


def simulate(true_class: int, k: int, shifted: bool,
             profile: PredictorProfile, rng: np.random.Generator,
             network_id: str = "net") -> PredictionVector:
    """One prediction vector: the argmax matches the true class with the
    profile accuracy, its confidence is drawn from the matching distribution,
    and the remaining mass spreads uniformly while keeping the chosen class a
    strict argmax."""
    if not (1 <= true_class <= k):
        raise ValueError(f"true class {true_class} outside 1..{k}")
    accuracy = profile.shifted_accuracy if shifted else profile.clean_accuracy
    conf_dist = profile.shifted_conf if shifted else profile.clean_conf
    if rng.random() < accuracy:
        chosen = true_class
    elif shifted and profile.collapse_to is not None and profile.collapse_to != true_class:
        chosen = profile.collapse_to
    else:
        offset = int(rng.integers(1, k)) if k > 1 else 0
        chosen = (true_class - 1 + offset) % k + 1
    conf = max(conf_dist.sample(rng), _CONF_FLOOR)
    if k == 1:
        return PredictionVector(network_id, (conf,))
    rest = min((1.0 - conf) / (k - 1), conf / 2)
    probs = [rest] * k
    probs[chosen - 1] = conf
    return PredictionVector(network_id, tuple(probs))


def sequence_rng(seed: int, seq_id: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}|{seq_id}".encode()).digest()
    entropy = [int.from_bytes(digest[i:i + 4], "big") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class ShiftPlan:
    shift_fraction: float
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.shift_fraction <= 1.0):
            raise ValueError("shift fraction must be in [0,1]")


def apply_shift_plan(instances, plan: ShiftPlan) -> dict[str, tuple[bool, ...]]:
    """Flag exactly floor(p * N) of the N inputs across the dataset, chosen
    by a seeded shuffle; returns per-sequence flag tuples."""
    coords = [(inst.seq_id, i) for inst in instances
              for i in range(inst.n_inputs)]
    n_flag = int(len(coords) * plan.shift_fraction)
    rng = np.random.default_rng(np.random.SeedSequence([plan.seed, len(coords)]))
    order = rng.permutation(len(coords))
    flagged = {tuple(coords[i]) for i in order[:n_flag]}
    return {
        inst.seq_id: tuple((inst.seq_id, i) in flagged
                           for i in range(inst.n_inputs))
        for inst in instances
    }


def simulate_dataset(instances, profile: PredictorProfile, plan: ShiftPlan,
                     k: int, network_id: str = "net"):
    """Prediction vectors for every instance: list of
    (seq_id, [(vector, meta), ...]) in dataset order."""
    flags = apply_shift_plan(instances, plan)
    out = []
    for inst in instances:
        rng = sequence_rng(plan.seed, inst.seq_id)
        seq = []
        for (true_class, meta), shifted in zip(inst.inputs, flags[inst.seq_id]):
            vector = simulate(true_class, k, shifted, profile, rng, network_id)
            seq.append((vector, tuple(meta)))
        out.append((inst.seq_id, seq))
    return out


# ---------------------------------------------------------------------------
# prediction CSV files

CSV_FIXED_FIELDS = ("seq_id", "input_idx", "network_id", "meta_json")


def save_predictions(sequences, path) -> None:
    """sequences: list of (seq_id, [(PredictionVector, MetaData), ...])."""
    k_max = max((len(v.probs) for _, seq in sequences for v, _ in seq),
                default=0)
    header = list(CSV_FIXED_FIELDS) + [f"p_{i + 1}" for i in range(k_max)]
    with open(path, "w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(header)
        for seq_id, seq in sequences:
            for idx, (vector, meta) in enumerate(seq):
                row = [seq_id, idx, vector.network_id,
                       json.dumps(dict(meta), sort_keys=True)]
                row.extend(repr(p) for p in vector.probs)
                row.extend("" for _ in range(k_max - len(vector.probs)))
                writer.writerow(row)


def load_predictions(path):
    """Inverse of save_predictions; bit-exact on round trip."""
    grouped: dict[str, list] = {}
    with open(path, newline="") as fp:
        reader = csv.reader(fp)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRowError("empty prediction file", 1) from None
        if header[:4] != list(CSV_FIXED_FIELDS):
            raise MalformedRowError(
                f"bad header, expected {','.join(CSV_FIXED_FIELDS)},p_1,...", 1)
        for row in reader:
            line_no = reader.line_num
            if len(row) < 5:
                raise MalformedRowError("row needs seq_id, input_idx, "
                                        "network_id, meta_json, p_1...", line_no)
            seq_id, idx_s, network_id, meta_json = row[:4]
            try:
                idx = int(idx_s)
                meta = tuple(sorted(json.loads(meta_json).items()))
            except (ValueError, json.JSONDecodeError) as exc:
                raise MalformedRowError(str(exc), line_no) from None
            probs = []
            for cell in row[4:]:
                if cell == "":
                    break
                try:
                    p = float(cell)
                except ValueError:
                    raise MalformedRowError(f"bad probability {cell!r}",
                                            line_no) from None
                if not (0.0 <= p <= 1.0):
                    raise ProbabilityOutOfRangeError(
                        f"probability {p} outside [0,1] at line {line_no}")
                probs.append(p)
            if not probs:
                raise MalformedRowError("empty probability vector", line_no)
            grouped.setdefault(seq_id, []).append(
                (idx, PredictionVector(network_id, tuple(probs)), meta))
    out = []
    for seq_id, rows in grouped.items():
        rows.sort(key=lambda r: r[0])
        out.append((seq_id, [(v, m) for _, v, m in rows]))
    return out
