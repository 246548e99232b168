"""nfakit: a fast, simple nondeterministic finite automata library.

Explicit three-layered transition representation with an operation suite
(boolean operations, determinization, trimming, antichain inclusion,
simulation reduction), a textual automata format with mintermization, a
regex frontend, and a command-line harness.
"""

__version__ = "0.1.0"

from .core import (
    EPSILON,
    Alphabet,
    AutomataError,
    Delta,
    EpsilonError,
    Nfa,
    OrdVector,
    SparseSet,
    StateLimitError,
    StatePost,
    SymbolPost,
    Transition,
    synchronized_iterator,
)
from .algorithms import (
    complement,
    concatenate,
    concatenate_inplace,
    determinize,
    intersection,
    is_in_lang,
    is_lang_empty,
    make_complete,
    remove_epsilon,
    revert,
    trim,
    union,
    union_inplace,
    useful_states,
)
from .inclusion import (
    AntichainStore,
    SimulationRelation,
    compute_simulation,
    is_included,
    is_universal,
    reduce_simulation,
)
from .formats import (
    FormatError,
    MataDocument,
    Minterm,
    MintermError,
    mintermize,
    parse_mata,
    serialize_mata,
    to_dot,
    to_nfa_bits,
    to_nfa_explicit,
)
from .regex import RegexError, compile_regex, parse_regex

__all__ = [
    "EPSILON",
    "Alphabet",
    "AntichainStore",
    "AutomataError",
    "Delta",
    "EpsilonError",
    "FormatError",
    "MataDocument",
    "Minterm",
    "MintermError",
    "Nfa",
    "OrdVector",
    "RegexError",
    "SimulationRelation",
    "SparseSet",
    "StateLimitError",
    "StatePost",
    "SymbolPost",
    "Transition",
    "__version__",
    "complement",
    "compile_regex",
    "compute_simulation",
    "concatenate",
    "concatenate_inplace",
    "determinize",
    "intersection",
    "is_in_lang",
    "is_included",
    "is_lang_empty",
    "is_universal",
    "make_complete",
    "mintermize",
    "parse_mata",
    "parse_regex",
    "reduce_simulation",
    "remove_epsilon",
    "revert",
    "serialize_mata",
    "synchronized_iterator",
    "to_dot",
    "to_nfa_bits",
    "to_nfa_explicit",
    "trim",
    "union",
    "union_inplace",
    "useful_states",
]
