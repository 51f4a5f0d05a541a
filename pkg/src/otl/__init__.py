"""Omega-automatic structures: automata kernel, cardinalities, presentations,
tree isomorphism for small heights, and the tree-building compiler."""

from .automata import BuchiAutomaton, StateBudgetExceeded, TrackAlphabet
from .cardinality import ALEPH0, CONTINUUM, Cardinality, Finite, count_accepting_runs, \
    language_cardinality
from .lasso import PAD, LassoWord, convolve, parse_lasso
from .parity import ParityAutomaton, complement, to_deterministic_parity
from .presentation import Presentation, eval_sentence, validate_presentation
from .trees import Verdict, check_forest_height, iso_height1, iso_height2

__version__ = "0.1.0"

__all__ = [
    "ALEPH0", "CONTINUUM", "PAD", "BuchiAutomaton", "Cardinality", "Finite", "LassoWord",
    "ParityAutomaton", "Presentation", "StateBudgetExceeded", "TrackAlphabet", "Verdict",
    "check_forest_height", "complement", "convolve", "count_accepting_runs", "eval_sentence",
    "iso_height1", "iso_height2", "language_cardinality", "parse_lasso",
    "to_deterministic_parity", "validate_presentation",
]
