"""Bundled classification tasks: card-trick winner and grid validity.

Each bundle packs background knowledge, a mode bias, fact templates, the
feature mapping used to turn class indices into symbolic values, a label
encoding, and reference rules used by the metrics as a ground-truth oracle.
Generators are seeded and pure; labels are produced by procedural oracles
and cross-checked elsewhere against answer-set evaluation of the reference
rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .asp.parser import parse_program
from .asp.syntax import Atom, NormalRule, Program
from .d2k import FactTemplate, FeatureMapping, LabelAtoms, MarkerLabel
from .data import Instance
from .errors import GenerationExhaustedError, UnknownTaskError
from .spaces import HypothesisSpace, ModeBias, enumerate_space, parse_bias

# ---------------------------------------------------------------------------
# Follow Suit Winner

RANKS = ("a", 2, 3, 4, 5, 6, 7, 8, 9, 10, "j", "q", "k")
SUITS = ("h", "c", "s", "d")
RANK_VALUE = {2: 2, 3: 3, 4: 4, 5: 5, 6: 6, 7: 7, 8: 8, 9: 9, 10: 10,
              "j": 11, "q": 12, "k": 13, "a": 14}


def card_class(rank, suit) -> int:
    """1-based class index of a card in the 52-way feature mapping."""
    return SUITS.index(suit) * 13 + RANKS.index(rank) + 1


def class_card(z: int):
    suit = SUITS[(z - 1) // 13]
    rank = RANKS[(z - 1) % 13]
    return rank, suit


@dataclass(frozen=True)
class Trick:
    cards: tuple          # ((rank, suit), ...) for players 1..4
    label: int            # winning player

    def to_instance(self, seq_id: str) -> Instance:
        inputs = tuple(
            (card_class(rank, suit), (("player", player),))
            for player, (rank, suit) in enumerate(self.cards, start=1))
        return Instance(seq_id, inputs, self.label)


def follow_suit_winner(cards) -> int:
    """The player with the highest-ranked card in the suit led by player 1.
    Player 1 always qualifies, so a winner always exists and is unique."""
    lead_suit = cards[0][1]
    best_player, best_value = 1, RANK_VALUE[cards[0][0]]
    for player, (rank, suit) in enumerate(cards[1:], start=2):
        if suit == lead_suit and RANK_VALUE[rank] > best_value:
            best_player, best_value = player, RANK_VALUE[rank]
    return best_player


def gen_follow_suit(n_games: int, seed: int) -> list[Trick]:
    """13 tricks per game from a shuffled deck dealt to four hands; each
    player plays a random card from hand every trick."""
    tricks = []
    deck = [(rank, suit) for suit in SUITS for rank in RANKS]
    for game in range(n_games):
        rng = np.random.default_rng(np.random.SeedSequence([seed, game]))
        order = rng.permutation(52)
        hands = [[deck[i] for i in order[p * 13:(p + 1) * 13]] for p in range(4)]
        for _ in range(13):
            cards = tuple(hand.pop(int(rng.integers(len(hand))))
                          for hand in hands)
            tricks.append(Trick(cards, follow_suit_winner(cards)))
    return tricks


FOLLOW_SUIT_BK = """
suit(h). suit(s). suit(d). suit(c).

rank(a). rank(2). rank(3). rank(4). rank(5). rank(6). rank(7). rank(8).
rank(9). rank(10). rank(j). rank(q). rank(k).

rank_value(2, 2). rank_value(3, 3). rank_value(4, 4). rank_value(5, 5).
rank_value(6, 6). rank_value(7, 7). rank_value(8, 8). rank_value(9, 9).
rank_value(10, 10). rank_value(j, 11). rank_value(q, 12). rank_value(k, 13).
rank_value(a, 14).

player(1..4).

rank_higher(P1, P2) :- card(P1, R1, _), card(P2, R2, _), rank_value(R1, V1), rank_value(R2, V2), V1 > V2.

suit(P1, S) :- card(P1, _, S).
"""

FOLLOW_SUIT_BIAS = """
P(X) :- Q(X), identity(P, Q).
P(X) :- player(X), not Q(X), inverse(P, Q).
#modem(2, inverse(target/1, invented/1)).
#modem(2, identity(target/1, invented/1)).
#predicate(target, winner/1).
#predicate(invented, p1/1).

#constant(player, 1).
#constant(player, 2).
#constant(player, 3).
#constant(player, 4).
#modeh(p1(var(player))).
#modeb(1, var(suit) != var(suit)).
#modeb(1, suit(var(player), var(suit)), (positive)).
#modeb(1, suit(const(player), var(suit)), (positive)).
#modeb(1, rank_higher(var(player),var(player)),(positive)).
#max_body(3).
"""

FOLLOW_SUIT_GT = """
p1(V1) :- V2 != V3, suit(1,V2), suit(V1,V3).
p1(V1) :- rank_higher(V2,V1), suit(1,V3), suit(V2,V3).
"""


def follow_suit_mapping() -> FeatureMapping:
    classes = {
        card_class(rank, suit): (("rank", rank), ("suit", suit))
        for suit in SUITS for rank in RANKS
    }
    return FeatureMapping("card", classes)


# ---------------------------------------------------------------------------
# Sudoku Grid Validity

@dataclass(frozen=True)
class SudokuInstance:
    size: int
    cells: tuple          # ((row, col, digit), ...) row-major
    label: int            # 0 valid, 1 invalid

    def to_instance(self, seq_id: str) -> Instance:
        inputs = tuple(
            (digit, (("col", col), ("row", row)))
            for row, col, digit in self.cells)
        return Instance(seq_id, inputs, self.label)


def _block_index(row: int, col: int, size: int) -> int:
    b = 2 if size == 4 else 3
    return ((row - 1) // b) * b + (col - 1) // b + 1


def sudoku_valid(inst: SudokuInstance) -> bool:
    """False iff some row, column, or block holds a duplicate digit."""
    seen = set()
    for row, col, digit in inst.cells:
        keys = (("r", row, digit), ("c", col, digit),
                ("b", _block_index(row, col, inst.size), digit))
        for key in keys:
            if key in seen:
                return False
            seen.add(key)
    return True


def _solved_grid(size: int, rng: np.random.Generator):
    grid = [[0] * size for _ in range(size)]
    b = 2 if size == 4 else 3

    def ok(r, c, v):
        if v in grid[r]:
            return False
        if any(grid[i][c] == v for i in range(size)):
            return False
        br, bc = r - r % b, c - c % b
        return all(grid[br + i][bc + j] != v
                   for i in range(b) for j in range(b))

    def fill(pos):
        if pos == size * size:
            return True
        r, c = divmod(pos, size)
        values = list(range(1, size + 1))
        rng.shuffle(values)
        for v in values:
            if ok(r, c, v):
                grid[r][c] = v
                if fill(pos + 1):
                    return True
                grid[r][c] = 0
        return False

    if not fill(0):
        raise GenerationExhaustedError("backtracking fill failed")
    return grid


def _partial_from_solution(size, rng, fill_fraction):
    grid = _solved_grid(size, rng)
    n_cells = max(1, int(fill_fraction * size * size))
    chosen = sorted(rng.permutation(size * size)[:n_cells].tolist())
    cells = tuple((pos // size + 1, pos % size + 1, grid[pos // size][pos % size])
                  for pos in chosen)
    return SudokuInstance(size, cells, 0)


_KINDS = ("row", "col", "block")


def _mutate_invalid(valid: SudokuInstance, kind: str,
                    rng: np.random.Generator) -> SudokuInstance | None:
    """Change one digit to match another digit in the same row/col/block."""
    size = valid.size
    groups: dict[object, list[int]] = {}
    for i, (row, col, _) in enumerate(valid.cells):
        if kind == "row":
            key = row
        elif kind == "col":
            key = col
        else:
            key = _block_index(row, col, size)
        groups.setdefault(key, []).append(i)
    pairs = [(i, j) for members in groups.values() if len(members) >= 2
             for i in members for j in members if i != j]
    if not pairs:
        return None
    i, j = pairs[int(rng.integers(len(pairs)))]
    cells = list(valid.cells)
    row, col, _ = cells[i]
    cells[i] = (row, col, valid.cells[j][2])
    mutated = SudokuInstance(size, tuple(cells), 1)
    assert not sudoku_valid(mutated)
    return mutated


def gen_sudoku(size: int, n_valid: int, n_invalid: int, seed: int,
               fill_fraction: float = 0.35,
               retry_budget: int = 200) -> list[SudokuInstance]:
    """Valid grids are sampled from solved grids; invalid grids mutate a
    fresh valid grid with the three violation kinds represented equally."""
    if size not in (4, 9):
        raise ValueError("grid size must be 4 or 9")
    out = []
    for i in range(n_valid):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0, i]))
        out.append(_partial_from_solution(size, rng, fill_fraction))
    for i in range(n_invalid):
        kind = _KINDS[i % 3]
        mutated = None
        for attempt in range(retry_budget):
            rng = np.random.default_rng(
                np.random.SeedSequence([seed, 1, i, attempt]))
            base = _partial_from_solution(size, rng, fill_fraction)
            mutated = _mutate_invalid(base, kind, rng)
            if mutated is not None:
                break
        if mutated is None:
            raise GenerationExhaustedError(
                f"could not place a {kind} violation in {retry_budget} tries")
        out.append(mutated)
    return out


def _grid_facts(size: int) -> str:
    lines = []
    for row in range(1, size + 1):
        for col in range(1, size + 1):
            cell = f'"{row}, {col}"'
            lines.append(f"col({cell}, {col}).")
            lines.append(f"row({cell}, {row}).")
            lines.append(f"block({cell}, {_block_index(row, col, size)}).")
    for row in range(1, size + 1):
        for col in range(1, size + 1):
            lines.append(f'cell_at({row}, {col}, "{row}, {col}").')
    lines.append("digit(C, N) :- digit(R, Co, N), cell_at(R, Co, C).")
    return "\n".join(lines)


def _sudoku_bias(size: int) -> str:
    return f"""
#modeh(invalid).
#modeb(2, digit(var(cell), var(num))).
#modeb(2, row(var(cell), var(row))).
#modeb(2, col(var(cell), var(col))).
#modeb(2, block(var(cell), var(block))).
#modeb(1, neq(var(cell), var(cell))).
#maxv(4).
#max_body(5).
num(1..{size}).
row(1..{size}).
col(1..{size}).
block(1..{size}).
cell(C) :- digit(C, _).
neq(X, Y) :- cell(X), cell(Y), X != Y.
"""


SUDOKU_GT = """
invalid :- neq(V2,V1), digit(V1,V3), block(V2,V0), block(V1,V0), digit(V2,V3).
invalid :- neq(V1,V0), digit(V0,V2), digit(V1,V2), row(V0,V3), row(V1,V3).
invalid :- neq(V1,V0), digit(V0,V3), digit(V1,V3), col(V0,V2), col(V1,V2).
"""

SUDOKU4_REDUCED_BK = """
div_same1(X,Y,C) :- (X - 1) / C = (Y - 1) / C, idx1(X), idx1(Y), X < Y, quotient(C).
div_same2(X,Y,C) :- (X - 1) / C = (Y - 1) / C, idx2(X), idx2(Y), X < Y, quotient(C).

quotient(1..3).
idx1(1..4).
idx2(1..4).
"""

SUDOKU4_REDUCED_BIAS = """
#modeh(invalid).
#modeb(digit(var(idx1), var(idx2), var(num))).
#modeb(div_same1(var(idx1), var(idx1), const(quotient))).
#modeb(div_same2(var(idx2), var(idx2), const(quotient))).

#maxv(5).
#max_body(3).
num(1..4).
quotient(1..3).

#bias("penalty(1, head).").
#bias("penalty(1, body(X)) :- in_body(X).").
#ground_without_replacement.
"""

SUDOKU4_REDUCED_GT = """
invalid :- digit(X,Y1,N), digit(X,Y2,N), Y1 != Y2.
invalid :- digit(X1,Y,N), digit(X2,Y,N), X1 != X2.
invalid :- digit(X1,Y1,N), digit(X2,Y2,N), (X1 - 1) / 2 = (X2 - 1) / 2, (Y1 - 1) / 2 = (Y2 - 1) / 2, X1 != X2.
invalid :- digit(X1,Y1,N), digit(X2,Y2,N), (X1 - 1) / 2 = (X2 - 1) / 2, (Y1 - 1) / 2 = (Y2 - 1) / 2, Y1 != Y2.
"""


def sudoku_mapping(k: int) -> FeatureMapping:
    return FeatureMapping("digit", {z: (("value", z),) for z in range(1, k + 1)})


# ---------------------------------------------------------------------------
# bundles

@dataclass
class TaskBundle:
    name: str
    background: Program
    bias: ModeBias
    bias_text: str
    templates: tuple[FactTemplate, ...]
    label_scheme: object               # LabelAtoms | MarkerLabel
    mapping: FeatureMapping
    network_id: str
    k: int
    ground_truth_rules: Program
    _space: HypothesisSpace | None = field(default=None, repr=False)

    def space(self) -> HypothesisSpace:
        if self._space is None:
            self._space = enumerate_space(self.bias)
        return self._space


def _dedup_program(*programs: Program) -> Program:
    seen = set()
    rules = []
    for program in programs:
        for rule in program.rules:
            if rule not in seen:
                seen.add(rule)
                rules.append(rule)
    return Program(rules)


def _assemble(name, bk_text, bias_text, templates, label_scheme, mapping,
              network_id, k, gt_text) -> TaskBundle:
    bias = parse_bias(bias_text)
    from .spaces import compile_invention
    background = _dedup_program(parse_program(bk_text), bias.support,
                                compile_invention(bias))
    return TaskBundle(
        name=name,
        background=background,
        bias=bias,
        bias_text=bias_text,
        templates=tuple(templates),
        label_scheme=label_scheme,
        mapping=mapping,
        network_id=network_id,
        k=k,
        ground_truth_rules=parse_program(gt_text),
    )


@lru_cache(maxsize=None)
def bundle(task: str) -> TaskBundle:
    if task == "follow_suit":
        return _assemble(
            "follow_suit", FOLLOW_SUIT_BK, FOLLOW_SUIT_BIAS,
            (FactTemplate("card", ("player", "rank", "suit")),),
            LabelAtoms("winner", (1, 2, 3, 4)),
            follow_suit_mapping(), "card", 52, FOLLOW_SUIT_GT)
    if task == "sudoku4":
        return _assemble(
            "sudoku4", _grid_facts(4), _sudoku_bias(4),
            (FactTemplate("digit", ("row", "col", "value")),),
            MarkerLabel(Atom("invalid")),
            sudoku_mapping(4), "digit", 4, SUDOKU_GT)
    if task == "sudoku9":
        return _assemble(
            "sudoku9", _grid_facts(9), _sudoku_bias(9),
            (FactTemplate("digit", ("row", "col", "value")),),
            MarkerLabel(Atom("invalid")),
            sudoku_mapping(9), "digit", 9, SUDOKU_GT)
    if task == "sudoku4_reduced":
        return _assemble(
            "sudoku4_reduced", SUDOKU4_REDUCED_BK, SUDOKU4_REDUCED_BIAS,
            (FactTemplate("digit", ("row", "col", "value")),),
            MarkerLabel(Atom("invalid")),
            sudoku_mapping(4), "digit", 4, SUDOKU4_REDUCED_GT)
    raise UnknownTaskError(
        f"unknown task {task!r}; available: follow_suit, sudoku4, sudoku9, "
        "sudoku4_reduced")


def generate_instances(task: str, seed: int, *, games: int | None = None,
                       n_valid: int | None = None, n_invalid: int | None = None,
                       fill_fraction: float = 0.35,
                       id_prefix: str = "") -> list[Instance]:
    """Seeded dataset generation dispatch for the bundled tasks."""
    if task == "follow_suit":
        tricks = gen_follow_suit(games if games is not None else 8, seed)
        return [t.to_instance(f"{id_prefix}fs{i:05d}")
                for i, t in enumerate(tricks)]
    if task in ("sudoku4", "sudoku9", "sudoku4_reduced"):
        size = 9 if task == "sudoku9" else 4
        grids = gen_sudoku(size,
                           n_valid if n_valid is not None else 160,
                           n_invalid if n_invalid is not None else 160,
                           seed, fill_fraction=fill_fraction)
        return [g.to_instance(f"{id_prefix}sud{i:05d}")
                for i, g in enumerate(grids)]
    raise UnknownTaskError(f"unknown task {task!r}")


# ---------------------------------------------------------------------------
# single-image fixtures (no generators; used to exercise the bridge)

def crop_fixture():
    """39-way crop predictor: 38 (species, disease) classes plus a
    background class that emits no example."""
    species = ["apple", "blueberry", "cherry", "corn", "grape", "orange",
               "peach", "pepper", "potato", "raspberry", "soybean", "squash",
               "strawberry", "tomato"]
    diseases = ["healthy", "bacterial_spot", "black_rot", "early_blight",
                "late_blight", "leaf_scorch", "powdery_mildew"]
    classes = {}
    for z in range(1, 39):
        classes[z] = (("species", species[z % len(species)]),
                      ("disease", diseases[z % len(diseases)]))
    classes[17] = (("species", "peach"), ("disease", "bacterial_spot"))
    mapping = FeatureMapping("crop", classes, background=frozenset({39}))
    templates = (FactTemplate("species", ("species",)),
                 FactTemplate("disease", ("disease",)),
                 FactTemplate("location", ("location",)))
    return mapping, templates, LabelAtoms("yield", (0, 1, 2))


def scene_fixture():
    """67-way indoor-scene predictor mapped to five super-class labels."""
    classes = {z: (("scene", f"scene{z}"),) for z in range(1, 68)}
    classes[8] = (("scene", "bookstore"),)
    mapping = FeatureMapping("image", classes)
    templates = (FactTemplate("scene", ("scene",)),)
    return mapping, templates, LabelAtoms("label", (0, 1, 2, 3, 4))
