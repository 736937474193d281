"""Labelled sequence datasets and their JSON-lines file format.

One instance per line: {"seq_id": ..., "inputs": [[true_class, {meta}], ...],
"label": ...}.  True classes are 1-based indices into the task's feature
mapping; meta is a flat name->value object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class Instance:
    seq_id: str
    inputs: tuple          # tuple of (true_class, meta_pairs) pairs
    label: object

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)


def instance_to_json(inst: Instance) -> str:
    return json.dumps({
        "seq_id": inst.seq_id,
        "inputs": [[tc, dict(meta)] for tc, meta in inst.inputs],
        "label": inst.label,
    }, sort_keys=True)


def instance_from_json(line: str) -> Instance:
    payload = json.loads(line)
    inputs = tuple((int(tc), tuple(sorted(meta.items())))
                   for tc, meta in payload["inputs"])
    return Instance(payload["seq_id"], inputs, payload["label"])


def save_dataset(instances, path) -> None:
    with open(path, "w") as fp:
        for inst in instances:
            fp.write(instance_to_json(inst) + "\n")


def load_dataset(path) -> list[Instance]:
    out = []
    with open(path) as fp:
        for line in fp:
            line = line.strip()
            if line:
                out.append(instance_from_json(line))
    return out
