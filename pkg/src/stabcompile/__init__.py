"""Least-squares stabilizer-gauge corrections that make encoded logical
Hamiltonians expressible in a hardware-accessible Lie algebra."""

__version__ = "0.1.0"

from .pauli import (  # noqa: E402
    DimensionError,
    PauliString,
    all_pauli_strings,
    from_pauli_terms,
    hs_inner,
    hs_norm,
    pauli_coefficients,
    to_pauli_terms,
    unvectorize,
    vectorize,
)
from .lie import (  # noqa: E402
    ConnectivityGraph,
    OrthonormalBasis,
    graph_generators,
    is_closed,
    join,
    lie_closure,
    project,
)
from .code_space import (  # noqa: E402
    CodeSpec,
    build_k,
    builtin_code,
    logical_basis,
    naive_encoding,
    named_gate,
    stabilizer_basis,
    traceless_log,
    validate_encoder,
)
from .compiler import (  # noqa: E402
    CompilationProblem,
    CompilationResult,
    accessibility_residual,
    build_a,
    build_m,
    is_correctibly_accessible,
    pinv,
    random_stabilizer,
    solve,
    solve_fast,
    solve_plain,
    solve_regularized,
    solve_weighted,
)
from .verify import codespace_action_error, expm_skew, phase_free_distance, verify  # noqa: E402

__all__ = [
    "DimensionError",
    "PauliString",
    "all_pauli_strings",
    "from_pauli_terms",
    "hs_inner",
    "hs_norm",
    "pauli_coefficients",
    "to_pauli_terms",
    "unvectorize",
    "vectorize",
    "ConnectivityGraph",
    "OrthonormalBasis",
    "graph_generators",
    "is_closed",
    "join",
    "lie_closure",
    "project",
    "CodeSpec",
    "build_k",
    "builtin_code",
    "logical_basis",
    "naive_encoding",
    "named_gate",
    "stabilizer_basis",
    "traceless_log",
    "validate_encoder",
    "CompilationProblem",
    "CompilationResult",
    "accessibility_residual",
    "build_a",
    "build_m",
    "is_correctibly_accessible",
    "pinv",
    "random_stabilizer",
    "solve",
    "solve_fast",
    "solve_plain",
    "solve_regularized",
    "solve_weighted",
    "codespace_action_error",
    "expm_skew",
    "phase_free_distance",
    "verify",
]
