"""Verification reports: the record emitted by every identity check.

Exact (integer/rational) checks carry zero error fields and tolerance 0.
Numeric checks record both absolute and relative error and pass when either
one is within tolerance; the policy applied is recorded in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .precision import decimal_str

PASS = "pass"
FAIL = "fail"
UNCONVERGED = "unconverged"

# Field order of the serialized report; fixed so output is reproducible.
_JSON_FIELDS = ("identity", "k", "lhs", "rhs", "abs_err", "rel_err",
                "tolerance", "precision_bits", "nodes", "terms",
                "elapsed_ms", "status", "policy", "detail")


@dataclass
class VerificationReport:
    identity: str
    k: int | None
    lhs: object
    rhs: object
    abs_err: object
    rel_err: object
    tolerance: object
    precision_bits: int
    nodes: int
    terms: int
    elapsed_ms: float
    status: str
    policy: str = "abs_or_rel"
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        """Serializable form; numeric values become decimal strings."""
        meta = {"identity", "k", "precision_bits", "nodes", "terms",
                "status", "policy", "detail"}
        out = {}
        for name in _JSON_FIELDS:
            v = getattr(self, name)
            if name == "elapsed_ms":
                out[name] = round(float(v), 3)
            elif name in meta:
                out[name] = v
            else:
                out[name] = decimal_str(v, self.precision_bits)
        return out

    def summary_line(self) -> str:
        where = f" k={self.k}" if self.k is not None else ""
        return (f"{self.identity}{where}: {self.status.upper()} "
                f"(abs_err={decimal_str(self.abs_err, 64)}, "
                f"rel_err={decimal_str(self.rel_err, 64)}, "
                f"tol={decimal_str(self.tolerance, 64)}, "
                f"{self.elapsed_ms:.0f} ms)")


def exact_report(identity, checked, mismatch, elapsed_ms, k=None, detail=""):
    """Report for an exact coefficient-level check.

    `mismatch` is None when all `checked` coefficients agree, otherwise a
    triple (index, lhs_value, rhs_value) of the first disagreement.
    """
    if mismatch is None:
        return VerificationReport(
            identity=identity, k=k, lhs="equal", rhs="equal",
            abs_err=0, rel_err=0, tolerance=0, precision_bits=0,
            nodes=0, terms=checked, elapsed_ms=elapsed_ms, status=PASS,
            policy="exact", detail=detail)
    idx, lv, rv = mismatch
    diff = abs(Fraction(lv) - Fraction(rv))
    return VerificationReport(
        identity=identity, k=k, lhs=lv, rhs=rv,
        abs_err=diff, rel_err=diff, tolerance=0, precision_bits=0,
        nodes=0, terms=checked, elapsed_ms=elapsed_ms, status=FAIL,
        policy="exact", detail=f"first mismatch at index {idx}; {detail}".strip("; "))


def numeric_report(identity, lhs, rhs, tolerance, precision_bits, elapsed_ms,
                   k=None, nodes=0, terms=0, converged=True, detail=""):
    """Report comparing two numeric values under the abs-or-rel policy."""
    abs_err = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel_err = abs_err / scale if scale > 0 else abs_err
    if not converged:
        status = UNCONVERGED
    elif abs_err <= tolerance or rel_err <= tolerance:
        status = PASS
    else:
        status = FAIL
    return VerificationReport(
        identity=identity, k=k, lhs=lhs, rhs=rhs,
        abs_err=abs_err, rel_err=rel_err, tolerance=tolerance,
        precision_bits=precision_bits, nodes=nodes, terms=terms,
        elapsed_ms=elapsed_ms, status=status, detail=detail)
