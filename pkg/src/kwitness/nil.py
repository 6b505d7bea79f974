"""Binary multicomplexes carrying a commuting nilpotent endomorphism."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .complexes import (
    CHOICES,
    BinaryMulticomplex,
    Failure,
    ShapeError,
    ValidationReport,
    check_shape,
    shift,
    validate_multicomplex,
)
from .matrix import Matrix


class NotNilpotent(ValueError):
    pass


@dataclass(frozen=True)
class NilMulticomplex:
    base: BinaryMulticomplex
    nil: Mapping  # position -> square Matrix, every position present

    @classmethod
    def build(cls, base: BinaryMulticomplex, nil: Mapping | None = None) -> "NilMulticomplex":
        full = {x: Matrix.zeros(base.ring, r, r) for x, r in base.ranks.items()}
        for x, m in (nil or {}).items():
            x = tuple(x)
            if x not in full:
                raise ShapeError(f"endomorphism at {list(x)} outside the support")
            full[x] = m
        return cls(base, full)

    @property
    def ring(self):
        return self.base.ring

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def rank(self, x) -> int:
        return self.base.rank(x)

    def is_zero_endomorphism(self) -> bool:
        return all(m.is_zero() for m in self.nil.values())

    def zero_partner(self) -> "NilMulticomplex":
        """The same complex with the zero endomorphism."""
        return NilMulticomplex.build(self.base)


def check_nil_shape(N: NilMulticomplex) -> None:
    check_shape(N.base)
    bad = []
    for x, r in N.base.ranks.items():
        m = N.nil.get(x)
        if m is None or m.shape != (r, r) or m.ring != N.ring:
            shape = None if m is None else m.shape
            bad.append(f"endomorphism at {list(x)}: shape {shape}, expected {r}x{r}")
    if bad:
        raise ShapeError("; ".join(bad))


def nil_commutation_failures(N: NilMulticomplex) -> list:
    out = []
    C = N.base
    for i in range(1, C.dimension + 1):
        for tilde in (False, True):
            for x in C.ranks:
                if x[i - 1] < 1:
                    continue
                d = C.d(i, x, tilde)
                if N.nil[shift(x, i)] @ d != d @ N.nil[x]:
                    out.append(Failure(x, i, CHOICES[tilde],
                                       "commutation: endomorphism does not commute"))
    return out


def validate_nil(N: NilMulticomplex) -> ValidationReport:
    """Base validation plus commutation and nilpotency of the endomorphism."""
    check_nil_shape(N)
    report = validate_multicomplex(N.base)
    report.failures.extend(nil_commutation_failures(N))
    for x, r in N.base.ranks.items():
        if r and not N.nil[x].power(r).is_zero():
            report.failures.append(Failure(x, None, None, "nilpotency: ν^rank ≠ 0"))
    if report.failures:
        report.witnesses.clear()
    return report


@dataclass(frozen=True)
class NilIndexData:
    per_position: Mapping  # position -> least m with ν^m = 0
    max_index: int
    min_index: int         # over positions of positive rank; 0 if there are none


def nilpotency_index(m: Matrix) -> int:
    """Least k with m^k = 0 (0 for the empty matrix)."""
    r = m.rows
    if r == 0:
        return 0
    p = Matrix.identity(m.ring, r)
    for k in range(1, r + 1):
        p = p @ m
        if p.is_zero():
            return k
    raise NotNilpotent(f"matrix with nonzero power {r}: {m.tolist()}")


def nil_index(N: NilMulticomplex) -> NilIndexData:
    per = {x: nilpotency_index(m) for x, m in N.nil.items()}
    live = [k for x, k in per.items() if N.rank(x) > 0]
    return NilIndexData(per, max(per.values(), default=0), min(live, default=0))
