"""JSON problem configs, Pauli-sum text and complex-matrix files.

Config layout (all qubit indices 0-based)::

    {
      "code": "[[4,2,2]]"                      # or {"encoder": <matrix|path>, "n": 4, "k": 2}
      "logical": {"gate": "CNOT"},             # or {"pauli": "0.5 XX - 0.25 ZI"} / {"unitary": <matrix|path>}
      "edges": [[1, 3]],                       # or "generators": ["XXII", ...]
      "mode": "plain", "lambda": 0.0, "weights": {"XXII": 2.0}, "default_weight": 1.0,
      "seed": 0, "svd_tol": 1e-10
    }

Matrices are nested lists of ``[re, im]`` pairs, inline or in a JSON file
whose path is resolved relative to the config.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .code_space import BUILTIN_CODES, GATES, CodeSpec, builtin_code, traceless_log
from .compiler import MODES, CompilationProblem
from .lie import ConnectivityGraph, OrthonormalBasis, graph_generators, lie_closure
from .pauli import PauliString, from_pauli_terms

_KNOWN_KEYS = {"code", "logical", "edges", "generators", "mode", "lambda", "weights",
               "default_weight", "seed", "svd_tol", "name"}


class ConfigError(ValueError):
    """Malformed or inconsistent problem config; ``field`` and ``line`` locate it."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


# -- Pauli sums ---------------------------------------------------------------

_TERM_RE = re.compile(
    r"\s*([+-])?\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*([IXYZ]+)\s*")


def parse_pauli_sum(text: str) -> dict[str, float]:
    """Parse ``"0.5 XX - 0.25*ZI + IZ"`` into ``{label: coefficient}``.

    Repeated labels accumulate. A missing coefficient means 1.
    """
    out: dict[str, float] = {}
    pos = 0
    text = text.strip()
    if not text:
        raise ValueError("empty Pauli sum")
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse Pauli sum near {text[pos:pos + 12]!r}")
        sign, num, label = m.groups()
        if sign is None and not first:
            raise ValueError(f"missing '+' or '-' before {label!r}")
        coef = float(num) if num is not None else 1.0
        if sign == "-":
            coef = -coef
        out[label] = out.get(label, 0.0) + coef
        pos = m.end()
        first = False
    widths = {len(k) for k in out}
    if len(widths) != 1:
        raise ValueError("Pauli labels in one sum must have equal length")
    return out


def pauli_sum_hamiltonian(terms: dict[str, float]) -> np.ndarray:
    """``i * sum_P c_P P`` (skew-Hermitian); identity terms are dropped."""
    clean = {k: v for k, v in terms.items() if set(k) != {"I"}}
    n = len(next(iter(terms)))
    return from_pauli_terms(clean, n)


# -- matrices -----------------------------------------------------------------

def matrix_from_json(obj: Any) -> np.ndarray:
    """Nested ``[re, im]`` pairs (or plain reals) to a complex 2D array."""
    if isinstance(obj, dict):
        obj = obj.get("matrix")
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 2:
        return arr.astype(complex)
    if arr.ndim == 3 and arr.shape[2] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    raise ValueError("matrix must be a 2D list of numbers or of [re, im] pairs")


def matrix_to_json(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def load_matrix(path: str | Path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


def save_matrix(a: np.ndarray, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"matrix": matrix_to_json(a)}, fh)
        fh.write("\n")


# -- problem configs ----------------------------------------------------------

@dataclass
class ProblemConfig:
    raw: dict
    problem: CompilationProblem
    seed: int
    config_hash: str
    generator_labels: tuple


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _matrix_source(value, base: Path) -> np.ndarray:
    if isinstance(value, str):
        return load_matrix(base / value)
    return matrix_from_json(value)


def _build_code(value, base: Path) -> CodeSpec:
    if isinstance(value, str):
        if value not in BUILTIN_CODES:
            raise ValueError(f"unknown code {value!r}; built-in codes: {sorted(BUILTIN_CODES)}")
        return builtin_code(value)
    if not isinstance(value, dict):
        raise ValueError("code must be a built-in name or an object")
    sources = [k for k in ("builtin", "encoder") if k in value]
    if len(sources) != 1:
        raise ValueError("code needs exactly one of 'builtin' or 'encoder'")
    if "builtin" in value:
        return _build_code(value["builtin"], base)
    enc = _matrix_source(value["encoder"], base)
    for key in ("n", "k"):
        if not isinstance(value.get(key), int):
            raise ValueError(f"encoder code needs integer '{key}'")
    n, k = value["n"], value["k"]
    if enc.shape != (1 << n, 1 << n):
        raise ValueError(f"encoder is {enc.shape[0]}x{enc.shape[1]}, expected {1 << n}x{1 << n} for n={n}")
    return CodeSpec.from_unitary(enc, k, value.get("d"), value.get("name"))


def _build_logical(value, code: CodeSpec, base: Path) -> np.ndarray:
    if not isinstance(value, dict):
        raise ValueError("logical must be an object with one of 'gate', 'pauli', 'unitary'")
    sources = [k for k in ("gate", "pauli", "unitary") if k in value]
    if len(sources) != 1:
        raise ValueError("logical needs exactly one of 'gate', 'pauli', 'unitary'")
    src = sources[0]
    if src == "pauli":
        terms = parse_pauli_sum(value["pauli"]) if isinstance(value["pauli"], str) else {
            str(k): float(v) for k, v in value["pauli"].items()}
        if not terms:
            raise ValueError("empty Pauli sum")
        if len(next(iter(terms))) != code.k:
            raise ValueError(f"logical Pauli labels must act on k={code.k} qubits")
        return pauli_sum_hamiltonian(terms)
    if src == "gate":
        name = str(value["gate"]).upper()
        if name not in GATES:
            raise ValueError(f"unknown gate {value['gate']!r}; known: {sorted(GATES)}")
        u = GATES[name]
    else:
        u = _matrix_source(value["unitary"], base)
    if u.shape != (code.logical_dim, code.logical_dim):
        raise ValueError(f"logical unitary must be {code.logical_dim}x{code.logical_dim}")
    return traceless_log(u)


def _build_accessible(raw: dict, n: int):
    if "edges" in raw and "generators" in raw:
        raise ConfigError("give either 'edges' or 'generators', not both", "edges")
    if "generators" in raw:
        gens = [PauliString.from_label(g) for g in raw["generators"]]
        for g in gens:
            if g.n != n:
                raise ValueError(f"generator {g.label} does not act on {n} qubits")
        graph = None
    else:
        edges = raw.get("edges", [])
        graph = ConnectivityGraph.from_edges(n, [tuple(e) for e in edges])
        gens = graph_generators(graph)
    basis = lie_closure(gens, n) if gens else OrthonormalBasis.empty(n)
    return basis, graph, tuple(g.label for g in gens)


def config_hash(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def problem_from_dict(raw: dict, base: str | Path = ".", text: str = "") -> ProblemConfig:
    base = Path(base)

    def fail(key: str, exc: Exception):
        raise ConfigError(str(exc), key, _line_of(text, key)) from exc

    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object")
    unknown = sorted(set(raw) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown}", unknown[0], _line_of(text, unknown[0]))
    for key in ("code", "logical"):
        if key not in raw:
            raise ConfigError("missing required key", key)

    try:
        code = _build_code(raw["code"], base)
    except (ValueError, OSError, TypeError) as exc:
        fail("code", exc)
    try:
        h_logical = _build_logical(raw["logical"], code, base)
    except (ValueError, OSError, TypeError) as exc:
        fail("logical", exc)
    key = "generators" if "generators" in raw else "edges"
    try:
        accessible, graph, labels = _build_accessible(raw, code.n)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        fail(key, exc)

    mode = raw.get("mode", "plain")
    if mode not in MODES:
        fail("mode", ValueError(f"unknown mode {mode!r}; expected one of {MODES}"))
    try:
        lam = float(raw.get("lambda", 0.0))
        if not lam >= 0:
            raise ValueError("lambda must be nonnegative")
    except (ValueError, TypeError) as exc:
        fail("lambda", exc)
    weights = None
    if "weights" in raw:
        try:
            weights = {PauliString.from_label(k): float(v) for k, v in raw["weights"].items()}
        except (ValueError, TypeError, AttributeError) as exc:
            fail("weights", exc)
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        fail("seed", ValueError("seed must be an integer"))

    try:
        problem = CompilationProblem(
            code=code, h_logical=h_logical, accessible=accessible, mode=mode, lam=lam,
            weights=weights, default_weight=float(raw.get("default_weight", 1.0)),
            svd_tol=float(raw.get("svd_tol", 1e-10)), graph=graph,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return ProblemConfig(raw, problem, seed, config_hash(raw), labels)


def parse_config(path: str | Path) -> ProblemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc
    return problem_from_dict(raw, path.parent, text)


def parse_problem(path: str | Path) -> CompilationProblem:
    """Read a JSON config into a validated :class:`CompilationProblem`."""
    return parse_config(path).problem
