"""Exhaustive validators for the cost-function hierarchy.

Everything here decides membership by brute force over all subsets, which is
exactly what makes a failed check trustworthy: each `fail` comes with the
violating tuple.  XOS is deliberately absent -- recognizing XOS structure
from value queries is intractable, so XOS claims are always backed by an
explicit clause certificate (see `XosCost.matches`).

The hierarchy being checked:  additive < gross substitutes < submodular <
XOS < subadditive, with matroid rank functions sitting inside gross
substitutes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .costs import CostOracle
from .errors import DomainError
from .limits import guard

__all__ = ["ClassReport", "validate_class", "VALIDATORS"]


@dataclass(frozen=True)
class ClassReport:
    cls: str
    passed: bool
    witness: dict | None = field(default=None)

    def __bool__(self) -> bool:
        return self.passed


def _tabulate(oracle: CostOracle) -> tuple[tuple[int, ...], list[Fraction]]:
    labels = oracle.ground
    n = len(labels)
    vals = []
    for mask in range(1 << n):
        S = frozenset(labels[i] for i in range(n) if mask >> i & 1)
        vals.append(oracle.eval(S))
    return labels, vals


def _set_of(mask: int, labels: tuple[int, ...]) -> list[int]:
    return [labels[i] for i in range(len(labels)) if mask >> i & 1]


def _check_monotone_normalized(labels, vals) -> dict | None:
    n = len(labels)
    if vals[0] != 0:
        return {"reason": "not normalized", "c_empty": str(vals[0])}
    for mask in range(1 << n):
        for i in range(n):
            if mask >> i & 1:
                continue
            if vals[mask | 1 << i] < vals[mask]:
                return {
                    "reason": "not monotone",
                    "S": _set_of(mask, labels),
                    "x": labels[i],
                    "c_S": str(vals[mask]),
                    "c_Sx": str(vals[mask | 1 << i]),
                }
    return None


def _check_submodular(labels, vals) -> dict | None:
    # Local characterization: c(x|A) >= c(x|A u {j}) for every A and distinct
    # x, j outside A.  Equivalent to the definitional "c(x|B) <= c(x|A) for
    # all A <= B, x outside B" (chain the one-step drops along B - A), and
    # quadratic instead of exponential in the number of set pairs.
    n = len(labels)
    for mask in range(1 << n):
        free = [i for i in range(n) if not mask >> i & 1]
        for i in free:
            base = vals[mask | 1 << i] - vals[mask]
            for j in free:
                if j == i:
                    continue
                bigger = mask | 1 << j
                if vals[bigger | 1 << i] - vals[bigger] > base:
                    return {
                        "reason": "marginal grows",
                        "x": labels[i],
                        "A": _set_of(mask, labels),
                        "B": _set_of(bigger, labels),
                        "c_x_given_A": str(base),
                        "c_x_given_B": str(vals[bigger | 1 << i] - vals[bigger]),
                    }
    return None


def _check_subadditive(labels, vals) -> dict | None:
    # Disjoint pairs suffice: for overlapping A, B monotonicity gives
    # c(A u B) <= c(A) + c(B \ A) <= c(A) + c(B).  3^n submask pairs.
    n = len(labels)
    for mask in range(1 << n):
        sub = (mask - 1) & mask
        while sub:
            rest = mask ^ sub
            if sub < rest and vals[mask] > vals[sub] + vals[rest]:
                return {
                    "A": _set_of(sub, labels),
                    "B": _set_of(rest, labels),
                    "c_AB": str(vals[mask]),
                    "c_A": str(vals[sub]),
                    "c_B": str(vals[rest]),
                }
            sub = (sub - 1) & mask
    return None


def _check_matroid_rank(labels, vals) -> dict | None:
    n = len(labels)
    bad = _check_monotone_normalized(labels, vals)
    if bad:
        return bad
    for mask in range(1 << n):
        v = vals[mask]
        if v.denominator != 1:
            return {"reason": "not integral", "S": _set_of(mask, labels), "c_S": str(v)}
        if v > mask.bit_count():
            return {"reason": "exceeds cardinality", "S": _set_of(mask, labels), "c_S": str(v)}
    return _check_submodular(labels, vals)


def _check_gross_substitutes(labels, vals) -> dict | None:
    # Submodularity plus the triple condition: for every S and distinct
    # i, j, k outside S the multiset
    #   { f(ij|S)+f(k|S),  f(i|S)+f(jk|S),  f(j|S)+f(ik|S) }
    # must not have a unique maximum.
    bad = _check_submodular(labels, vals)
    if bad:
        bad["reason"] = "not submodular: " + bad["reason"]
        return bad
    n = len(labels)
    for mask in range(1 << n):
        base = vals[mask]
        free = [i for i in range(n) if not mask >> i & 1]
        for a in range(len(free)):
            for b in range(a + 1, len(free)):
                for c in range(b + 1, len(free)):
                    i, j, k = free[a], free[b], free[c]
                    bi, bj, bk = 1 << i, 1 << j, 1 << k
                    exprs = [
                        vals[mask | bi | bj] + vals[mask | bk] - 2 * base,
                        vals[mask | bi] + vals[mask | bj | bk] - 2 * base,
                        vals[mask | bj] + vals[mask | bi | bk] - 2 * base,
                    ]
                    top = max(exprs)
                    if exprs.count(top) == 1:
                        return {
                            "reason": "unique max in triple",
                            "S": _set_of(mask, labels),
                            "triple": [labels[i], labels[j], labels[k]],
                            "values": [str(e) for e in exprs],
                        }
    return None


VALIDATORS = {
    "monotone_normalized": _check_monotone_normalized,
    "submodular": _check_submodular,
    "subadditive": _check_subadditive,
    "matroid_rank": _check_matroid_rank,
    "gross_substitutes": _check_gross_substitutes,
}


def validate_class(oracle: CostOracle, cls: str) -> ClassReport:
    """Decide class membership exhaustively.

    cls is one of monotone_normalized / submodular / subadditive /
    matroid_rank / gross_substitutes.  Fails with the violating tuple in
    `witness`.  Raises CapabilityError above the exhaustive-checking bound
    (n <= 14, or n <= 10 for gross substitutes).
    """
    check = VALIDATORS.get(cls)
    if check is None:
        raise DomainError(f"unknown cost class {cls!r}; choose from {sorted(VALIDATORS)}")
    guard("gross_substitutes" if cls == "gross_substitutes" else "validator", oracle.arity)
    labels, vals = _tabulate(oracle)
    witness = check(labels, vals)
    return ClassReport(cls=cls, passed=witness is None, witness=witness)
