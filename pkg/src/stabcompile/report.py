"""Compile reports and their deterministic JSON serialization."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .compiler import TERM_CUTOFF, CompilationResult
from .verify import VerificationReport

SIG_DIGITS = 15


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if not math.isfinite(x) or x == 0:
        return float(x)
    return float(f"{x:.{digits}g}")


def _clean(obj):
    """Round floats to ``SIG_DIGITS`` and turn tuples into lists, recursively."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Report:
    mode: str
    residual: float
    accessibility_residual: float
    accessible: bool
    term_count: int
    terms: list  # [label, coefficient] pairs of h_total = sum c * iP, frame order
    correction_norm: float
    verification: dict
    timing: dict
    provenance: dict
    solver_info: dict = field(default_factory=dict)
    sweep: list | None = None

    def __post_init__(self):
        for f in fields(self):
            setattr(self, f.name, _clean(getattr(self, f.name)))

    @classmethod
    def from_result(cls, result: CompilationResult, verification: VerificationReport | None,
                    provenance: dict, correction_norm: float, total_time: float | None = None,
                    sweep: list | None = None) -> Report:
        terms = sorted(result.pauli_terms.items(), key=lambda kv: kv[0].index)
        timing = {"solve_time": result.solve_time}
        if total_time is not None:
            timing["total_time"] = total_time
        return cls(
            mode=result.mode,
            residual=result.residual,
            accessibility_residual=result.accessibility_residual,
            accessible=result.accessible,
            term_count=len(terms),
            terms=[[p.label, c] for p, c in terms if abs(c) > TERM_CUTOFF],
            correction_norm=correction_norm,
            verification=verification.to_dict() if verification is not None else {},
            timing=timing,
            provenance=provenance,
            solver_info=dict(result.info),
            sweep=sweep,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        names = {f.name for f in fields(cls)}
        missing = {f.name for f in fields(cls) if f.name not in ("solver_info", "sweep")} - set(d)
        if missing:
            raise ValueError(f"report is missing {sorted(missing)}")
        return cls(**{k: v for k, v in d.items() if k in names})

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=True) + "\n"


def emit_report(r: Report, path: str | Path) -> None:
    Path(path).write_text(r.dumps(), encoding="utf-8")


def load_report(path: str | Path) -> Report:
    return Report.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
