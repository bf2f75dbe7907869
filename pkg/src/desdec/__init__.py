"""Decomposition of task automata into local automata for distributed agents.

The main entry points:

- :func:`decompose_two` / :func:`check_dc1` .. :func:`check_dc4` for two agents,
- :func:`decomposable_oracle` for the compose-and-compare verdict,
- :func:`hierarchical_decompose` for n agents,
- :func:`verify_closed_loop` for controller/plant pairs.
"""

__version__ = "0.1.0"

from .automaton import (
    AlphabetSystem,
    Automaton,
    accessible,
    as_string,
    format_string,
    is_deterministic,
    is_path_automaton,
    language_upto,
    path_automaton,
)
from .compose import (
    InterleavingLanguage,
    StateClass,
    determinize,
    interleave,
    parallel,
    parallel_many,
    project_automaton,
    project_string,
    tau_classes,
)
from .decompose import (
    Verdict,
    Witness,
    check_dc1,
    check_dc2,
    check_dc3,
    check_dc4,
    decompose_two,
    decomposable_oracle,
)
from .equivalence import (
    Relation,
    bisimilar,
    check_bisimulation,
    check_isomorphism,
    check_simulation,
    distinguishing_string,
    isomorphic,
    isomorphism,
    language_equal,
    simulates,
)
from .errors import (
    AlphabetError,
    ArityError,
    AutomatonError,
    DesdecError,
    InternalConsistencyError,
    NondeterministicError,
    ParseError,
    ResourceLimitError,
)
from .hierarchy import (
    ClosedLoopVerdict,
    DecompositionResult,
    hierarchical_decompose,
    intermediate_check,
    universal_controller,
    verify_closed_loop,
)
from .io import AutomatonFile, parse_automata, parse_automaton, to_dot, write_automaton
from .replay import replay
from .kernels import BACKEND
