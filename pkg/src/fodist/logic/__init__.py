"""FO formulas over {adjacency, equality}: AST, text syntax, model checking, builders."""

from .ast import (
    FALSE,
    TRUE,
    Adj,
    And,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Top,
    conj,
    disj,
    free_variables,
    num_variables,
    variables,
)
from .evaluate import evaluate, evaluate_reference
from .sentences import (
    build_count_zero_sentence,
    build_witness_sentence,
    build_X_sentence,
    build_Y_sentence,
    build_Z_sentence,
    distinct_vertices,
    extension_axiom,
)
from .syntax import parse, to_text
