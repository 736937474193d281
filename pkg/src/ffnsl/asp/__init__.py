"""Logic-program core: parsing, grounding, and answer-set computation."""

from .grounder import (check_safety, eval_compare, eval_term, expand_ranges,
                       ground, ground_full, iter_matches)
from .parser import parse_ground_atom, parse_program, parse_rule, tokenize
from .solver import (DEFAULT_NODE_BUDGET, answer_sets, bravely_entails,
                     has_answer_set, least_model, reduct)
from .syntax import (Arith, Atom, BodyLiteral, Compare, Constant, Integer,
                     Naf, NormalRule, Pos, Program, Range, Term, Variable,
                     render_rule, render_term, rule_variables)

__all__ = [
    "Arith", "Atom", "BodyLiteral", "Compare", "Constant", "Integer",
    "Naf", "NormalRule", "Pos", "Program", "Range", "Term", "Variable",
    "render_rule", "render_term", "rule_variables",
    "parse_program", "parse_rule", "parse_ground_atom", "tokenize",
    "expand_ranges", "check_safety", "ground", "ground_full",
    "iter_matches", "eval_term", "eval_compare",
    "answer_sets", "bravely_entails", "has_answer_set", "least_model",
    "reduct", "DEFAULT_NODE_BUDGET",
]
