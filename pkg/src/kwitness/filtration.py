"""Kernel filtrations of nilpotent endomorphisms and the layer-splitting step.

For a Nil multicomplex (F, ν) and an exponent e, the degreewise kernels
K = ker ν^e form a sub-multicomplex (ν commutes with every differential).
``layer_split`` builds the sequence 0 -> (K, ν|K) -> (F, ν) -> (F/K, ν̄) -> 0
with explicit bases and splittings, and audits every side condition the
splitting argument relies on.  A failed side condition is returned as a
``SplitFailure`` value, not raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .complexes import CHOICES, BinaryMulticomplex, Failure, shift
from .linalg import (
    InternalInvariantViolation,
    Lattice,
    NotSaturated,
    all_units,
    coordinates,
    inverse,
    invariant_factors,
    kernel_saturated,
    split_saturated_inclusion,
)
from .matrix import Matrix
from .nil import NilMulticomplex, nil_index, validate_nil

MAX_INDEX = "max-index"
MIN_INDEX = "paper-min-index"
STRATEGIES = (MAX_INDEX, MIN_INDEX)


def kernel_filtration(N: NilMulticomplex) -> list[dict]:
    """Degreewise ker ν^i for i = 1..maxIndex, as saturated lattices.

    Entry ``i - 1`` of the result maps each position to ker ν^i.  Every law
    of the filtration is re-checked; a failure is a bug, not a property of
    the input.
    """
    m = nil_index(N).max_index
    ring = N.ring
    powers = {x: Matrix.identity(ring, N.rank(x)) for x in N.nil}
    chain = []
    for _ in range(m):
        powers = {x: p @ N.nil[x] for x, p in powers.items()}
        chain.append({x: kernel_saturated(p) for x, p in powers.items()})
    for x, r in N.base.ranks.items():
        if chain and chain[-1][x].rank != r:
            raise InternalInvariantViolation(f"top of the filtration at {x} is not the module")
        prev = Lattice.zero(ring, r)
        for step in chain:
            K = step[x]
            inc = coordinates(prev.basis, K)
            if inc is None:
                raise InternalInvariantViolation(f"filtration not increasing at {x}")
            if not all_units(ring, invariant_factors(inc)):
                raise InternalInvariantViolation(f"graded piece at {x} has torsion")
            if coordinates(N.nil[x] @ K.basis, prev) is None:
                raise InternalInvariantViolation(f"ν does not lower the filtration at {x}")
            prev = K
    return chain


def layer_exponent(N: NilMulticomplex, strategy: str) -> int:
    idx = nil_index(N)
    if strategy == MAX_INDEX:
        return idx.max_index - 1
    if strategy == MIN_INDEX:
        # ker ν^0 = 0 would make no progress; clamp to 1
        return max(1, idx.min_index - 1)
    raise ValueError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class SplitFailure:
    strategy: str
    exponent: int
    part: str            # "closure", "sub", "quotient", "squares"
    failures: tuple      # Failure records against the named part

    def describe(self) -> list[str]:
        out = []
        for f in self.failures:
            if f.direction is None:
                out.append(f"{self.part} at {_fmt(f.position)}: {f.reason}")
            else:
                out.append(
                    f"{self.part} line at direction {f.direction}, fixed coordinates "
                    f"{_fmt(f.position)}, differential {f.differential}: {f.reason}")
        return out

    def __str__(self):
        return "; ".join(self.describe())


def _fmt(pos):
    return "[" + ",".join("*" if c is None else str(c) for c in pos) + "]"


@dataclass(frozen=True)
class FiltrationLayer:
    strategy: str
    exponent: int
    lattices: Mapping           # position -> Lattice (ker ν^e)
    sub: NilMulticomplex        # (K, ν|K) in the lattice bases
    quotient: NilMulticomplex   # (F/K, ν̄) in the complement bases
    inclusion: Mapping          # position -> basis of K (rank F x rank K)
    projection: Mapping         # position -> rank Q x rank F, kernel = K
    retraction: Mapping         # position -> rank K x rank F, retraction @ inclusion = I
    section: Mapping            # position -> complement basis, projection @ section = I


def layer_split(N: NilMulticomplex, strategy: str = MAX_INDEX):
    """One splitting step along ker ν^e; FiltrationLayer or SplitFailure."""
    idx = nil_index(N)
    if idx.max_index < 2:
        raise ValueError("layer_split needs a nonzero endomorphism (maxIndex >= 2)")
    e = layer_exponent(N, strategy)
    lattices = {x: kernel_saturated(m.power(e)) for x, m in N.nil.items()}
    return split_along(N, lattices, strategy, e)


def split_along(N: NilMulticomplex, lattices: Mapping, strategy: str = MAX_INDEX,
                exponent: int = 0):
    ring = N.ring
    C = N.base
    inclusion, projection, retraction, section = {}, {}, {}, {}
    bad = []
    for x, K in lattices.items():
        try:
            _, comp = split_saturated_inclusion(K)
        except NotSaturated as exc:
            bad.append(Failure(x, None, None, f"sub not saturated: {exc}"))
            continue
        inv = inverse(K.basis.hstack(comp))
        k, r = K.rank, C.rank(x)
        inclusion[x] = K.basis
        section[x] = comp
        retraction[x] = inv.submatrix(0, k, 0, r)
        projection[x] = inv.submatrix(k, r, 0, r)
    if bad:
        return SplitFailure(strategy, exponent, "closure", tuple(bad))

    sub_pairs, quot_pairs = [], []
    for i in range(1, C.dimension + 1):
        sp, qp = [], []
        for tilde in (False, True):
            smaps, qmaps = {}, {}
            for x, d in C.maps(i, tilde).items():
                y = shift(x, i)
                coords = coordinates(d @ inclusion[x], lattices[y])
                if coords is None:
                    bad.append(Failure(x, i, CHOICES[tilde], "sub not closed under differential"))
                    continue
                smaps[x] = coords
                qmaps[x] = projection[y] @ d @ section[x]
            sp.append(smaps)
            qp.append(qmaps)
        sub_pairs.append(tuple(sp))
        quot_pairs.append(tuple(qp))
    sub_nil, quot_nil = {}, {}
    for x, nu in N.nil.items():
        coords = coordinates(nu @ inclusion[x], lattices[x])
        if coords is None:
            bad.append(Failure(x, None, None, "sub not closed under ν"))
            continue
        sub_nil[x] = coords
        quot_nil[x] = projection[x] @ nu @ section[x]
    if bad:
        return SplitFailure(strategy, exponent, "closure", tuple(bad))

    sub_ranks = {x: K.rank for x, K in lattices.items()}
    quot_ranks = {x: C.rank(x) - K.rank for x, K in lattices.items()}
    sub = NilMulticomplex.build(
        BinaryMulticomplex.build(ring, C.dimension, sub_ranks, sub_pairs), sub_nil)
    quotient = NilMulticomplex.build(
        BinaryMulticomplex.build(ring, C.dimension, quot_ranks, quot_pairs), quot_nil)

    for part, obj in (("sub", sub), ("quotient", quotient)):
        report = validate_nil(obj)
        if not report.passed:
            return SplitFailure(strategy, exponent, part, tuple(report.failures))

    layer = FiltrationLayer(strategy, exponent, dict(lattices), sub, quotient,
                            inclusion, projection, retraction, section)
    squares = _square_failures(N, layer)
    if squares:
        return SplitFailure(strategy, exponent, "squares", tuple(squares))
    return layer


def _square_failures(N: NilMulticomplex, layer: FiltrationLayer) -> list:
    """Replay exactness, splitting and every commuting square of the layer."""
    out = []
    C, S, Q = N.base, layer.sub.base, layer.quotient.base
    for x in C.ranks:
        inc, proj = layer.inclusion[x], layer.projection[x]
        if not (proj @ inc).is_zero():
            out.append(Failure(x, None, None, "projection ∘ inclusion ≠ 0"))
        if not (layer.retraction[x] @ inc).is_identity():
            out.append(Failure(x, None, None, "retraction ∘ inclusion ≠ identity"))
        if not (proj @ layer.section[x]).is_identity():
            out.append(Failure(x, None, None, "projection ∘ section ≠ identity"))
        if N.nil[x] @ inc != inc @ layer.sub.nil[x]:
            out.append(Failure(x, None, None, "inclusion does not commute with ν"))
        if proj @ N.nil[x] != layer.quotient.nil[x] @ proj:
            out.append(Failure(x, None, None, "projection does not commute with ν"))
    for i in range(1, C.dimension + 1):
        for tilde in (False, True):
            for x in C.maps(i, tilde):
                y = shift(x, i)
                d = C.d(i, x, tilde)
                if d @ layer.inclusion[x] != layer.inclusion[y] @ S.d(i, x, tilde):
                    out.append(Failure(x, i, CHOICES[tilde], "inclusion square does not commute"))
                if layer.projection[y] @ d != Q.d(i, x, tilde) @ layer.projection[x]:
                    out.append(Failure(x, i, CHOICES[tilde], "projection square does not commute"))
    return out
