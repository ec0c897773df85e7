"""Check records shared by the verification routines and the CLI."""

import time
from dataclasses import dataclass, field, asdict


@dataclass
class CheckRecord:
    check_id: str
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tol_abs: float
    tol_rel: float
    passed: bool
    cutoffs: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self):
        d = asdict(self)
        d["lhs"] = _num(self.lhs)
        d["rhs"] = _num(self.rhs)
        return d


def _num(z):
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return [z.real, z.imag]


def make_record(check_id, lhs, rhs, tol_abs=0.0, tol_rel=0.0, cutoffs=None, t0=None):
    lhs = complex(lhs)
    rhs = complex(rhs)
    abs_err = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel_err = abs_err / scale if scale > 0 else 0.0
    passed = (tol_abs > 0 and abs_err <= tol_abs) or (
        tol_rel > 0 and rel_err <= tol_rel
    )
    return CheckRecord(
        check_id=check_id,
        lhs=lhs,
        rhs=rhs,
        abs_err=abs_err,
        rel_err=rel_err,
        tol_abs=tol_abs,
        tol_rel=tol_rel,
        passed=passed,
        cutoffs=dict(cutoffs or {}),
        seconds=0.0 if t0 is None else time.perf_counter() - t0,
    )


def residual_record(check_id, residual, tol_abs, cutoffs=None, t0=None):
    """Record for a residual that should vanish."""
    return make_record(
        check_id, residual, 0.0, tol_abs=tol_abs, cutoffs=cutoffs, t0=t0
    )
