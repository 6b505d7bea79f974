"""Integer combinations of object ids and membership in a relation subgroup."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

from .linalg import hnf
from .matrix import Matrix
from .rings import INTEGERS


class FormalSum:
    """An element of the free abelian group on object ids.

    Zero coefficients are never stored, so equality is dictionary equality.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[str, int] | None = None):
        self.terms = {k: int(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def of(cls, *pairs) -> "FormalSum":
        out = cls()
        for key, c in pairs:
            out = out + cls({key: c})
        return out

    def __add__(self, other: "FormalSum") -> "FormalSum":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return FormalSum(t)

    def __neg__(self):
        return FormalSum({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "FormalSum":
        return FormalSum({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, FormalSum) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " ".join(f"{'+' if v > 0 else '-'}{abs(v) if abs(v) != 1 else ''}[{k}]"
                        for k, v in sorted(self.terms.items()))


def combine(coefficients: Sequence[int], relations: Sequence[FormalSum]) -> FormalSum:
    total = FormalSum()
    for c, r in zip(coefficients, relations):
        total = total + r.scale(c)
    return total


def formal_membership(target: FormalSum, relations: Sequence[FormalSum]
                      ) -> tuple[bool, Optional[list[int]]]:
    """Decide whether target is an integer combination of the relations.

    Solves c R = target with R the relation matrix (one row per relation)
    through the row HNF of R, then confirms the answer by direct summation.
    """
    ids = sorted(set(target.terms).union(*(r.terms for r in relations)))
    n = len(ids)
    m = len(relations)
    if m == 0:
        return (True, []) if not target else (False, None)
    R = Matrix(INTEGERS, [[r.terms.get(k, 0) for k in ids] for r in relations], m, n)
    H, U = hnf(R)
    t = [target.terms.get(k, 0) for k in ids]
    y = [0] * m  # coefficients against the rows of H
    residual = list(t)
    for i in range(m):
        row = H.row(i)
        piv = next((j for j, a in enumerate(row) if a), None)
        if piv is None:
            break
        q, rem = divmod(residual[piv], row[piv])
        if rem:
            return False, None
        y[i] = q
        if q:
            residual = [a - q * b for a, b in zip(residual, row)]
    if any(residual):
        return False, None
    coeffs = [sum(y[i] * U[i, j] for i in range(m)) for j in range(m)]
    if combine(coeffs, relations) != target:
        return False, None
    return True, coeffs
