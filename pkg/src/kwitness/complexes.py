"""Bounded acyclic binary multicomplexes of free modules supported on [0,2]^n.

Directions are numbered from 1.  The component of a differential in
direction ``i`` at position ``x`` maps the module at ``x`` to the module at
``x - e_i``; it exists only when ``x[i-1] >= 1``.  Every such component is
stored explicitly (zero matrices included), so two complexes are equal
exactly when they agree entrywise.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .linalg import (
    Lattice,
    coordinates,
    invariant_factors,
    is_invertible,
    kernel_saturated,
    right_inverse,
)
from .matrix import Matrix
from .rings import INTEGERS, RingSpec

Position = tuple

SUPPORT = (0, 1, 2)
CHOICES = ("d", "dTilde")


class ShapeError(ValueError):
    """A matrix or position does not fit the graded shape of its complex."""


class DimensionMismatch(ValueError):
    pass


class ValidationError(ValueError):
    """Raised by constructions whose output must validate but does not."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def positions(n: int) -> list[Position]:
    return list(itertools.product(SUPPORT, repeat=n))


def shift(x: Position, i: int, k: int = -1) -> Position:
    y = list(x)
    y[i - 1] += k
    return tuple(y)


@dataclass(frozen=True)
class BinaryMulticomplex:
    ring: RingSpec
    dimension: int
    ranks: Mapping[Position, int]
    # differentials[i-1] = (d, dTilde), each a dict position -> Matrix
    differentials: tuple

    @classmethod
    def build(cls, ring: RingSpec, dimension: int, ranks: Mapping, differentials=()):
        """Normalize loose input: fill absent ranks with 0, absent maps with zeros.

        Positions outside [0,2]^n raise ShapeError.  Supplied matrices are kept
        as given; their shapes are checked by ``check_shape``.
        """
        if dimension < 0:
            raise ShapeError("negative dimension")
        full = {x: 0 for x in positions(dimension)}
        for x, r in ranks.items():
            x = tuple(x)
            if x not in full:
                raise ShapeError(f"position {list(x)} outside the [0,2]^{dimension} support")
            if r < 0:
                raise ShapeError(f"negative rank at {list(x)}")
            full[x] = r
        differentials = list(differentials)
        if len(differentials) > dimension:
            raise ShapeError(f"{len(differentials)} differential pairs for dimension {dimension}")
        while len(differentials) < dimension:
            differentials.append(({}, {}))
        pairs = []
        for i, pair in enumerate(differentials, start=1):
            filled = []
            for maps in pair:
                out = {}
                for x in full:
                    if x[i - 1] >= 1:
                        out[x] = Matrix.zeros(ring, full[shift(x, i)], full[x])
                for x, m in maps.items():
                    x = tuple(x)
                    if x not in out:
                        raise ShapeError(
                            f"direction {i}: no differential component at {list(x)}")
                    out[x] = m
                filled.append(out)
            pairs.append(tuple(filled))
        return cls(ring, dimension, full, tuple(pairs))

    def rank(self, x: Position) -> int:
        return self.ranks.get(tuple(x), 0)

    def d(self, i: int, x: Position, tilde: bool = False) -> Matrix:
        """Component at x in direction i; a zero 0 x rank map on the boundary."""
        x = tuple(x)
        if x[i - 1] == 0:
            return Matrix.zeros(self.ring, 0, self.rank(x))
        return self.differentials[i - 1][1 if tilde else 0][x]

    def maps(self, i: int, tilde: bool = False) -> dict:
        return self.differentials[i - 1][1 if tilde else 0]

    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def map_differentials(self, fn) -> "BinaryMulticomplex":
        """Apply fn(i, tilde, x, matrix) to every stored component."""
        pairs = tuple(
            tuple({x: fn(i, t, x, m) for x, m in self.maps(i, t).items()} for t in (False, True))
            for i in range(1, self.dimension + 1)
        )
        return BinaryMulticomplex(self.ring, self.dimension, dict(self.ranks), pairs)


def check_shape(C: BinaryMulticomplex) -> None:
    """Raise ShapeError listing every component of the wrong size."""
    problems = []
    if len(C.differentials) != C.dimension:
        problems.append(f"{len(C.differentials)} differential pairs for dimension {C.dimension}")
    for i in range(1, len(C.differentials) + 1):
        for tilde, name in zip((False, True), CHOICES):
            for x, m in C.maps(i, tilde).items():
                want = (C.rank(shift(x, i)), C.rank(x))
                if m.ring != C.ring:
                    problems.append(f"direction {i} {name} at {list(x)}: ring {m.ring}")
                if m.shape != want:
                    problems.append(
                        f"direction {i} {name} at {list(x)}: shape {m.rows}x{m.cols}, "
                        f"expected {want[0]}x{want[1]}")
    if problems:
        raise ShapeError("; ".join(problems))


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Failure:
    position: tuple  # a line is named by its position with None in its own direction
    direction: Optional[int]
    differential: Optional[str]
    reason: str

    def __str__(self):
        pos = "[" + ",".join("*" if c is None else str(c) for c in self.position) + "]"
        where = f"direction {self.direction} {self.differential} " if self.direction else ""
        return f"{where}at {pos}: {self.reason}"


@dataclass(frozen=True)
class AcyclicityWitness:
    """Replayable evidence that 0 -> N2 -a-> N1 -b-> N0 -> 0 is acyclic.

    ``kernel`` is Z1 = ker(b) with a saturated basis, ``image_coordinates``
    expresses a in that basis (square and invertible when im a = Z1), and
    ``right_inverse`` satisfies b @ right_inverse = I.
    """

    kernel: Lattice
    image_coordinates: Matrix
    right_inverse: Matrix

    def replay(self, a: Matrix, b: Matrix) -> bool:
        Z = self.kernel.basis
        C = self.image_coordinates
        S = self.right_inverse
        return (
            (b @ Z).is_zero()
            and self.kernel.is_saturated()
            and Z.cols + b.rows == b.cols
            and Z @ C == a
            and is_invertible(C)
            and (b @ S).is_identity()
        )


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def summary(self) -> str:
        if self.passed:
            return "pass"
        return "fail\n" + "\n".join(f"  - {f}" for f in self.failures)


@dataclass(frozen=True)
class Line:
    direction: int
    differential: str
    position: tuple  # None at the line's own coordinate
    top: Matrix      # degree 2 -> 1
    bottom: Matrix   # degree 1 -> 0


def lines(C: BinaryMulticomplex, tildes=(False, True)) -> Iterator[Line]:
    for i in range(1, C.dimension + 1):
        others = list(itertools.product(SUPPORT, repeat=C.dimension - 1))
        for tilde in tildes:
            for rest in others:
                x2 = rest[:i - 1] + (2,) + rest[i - 1:]
                x1 = shift(x2, i)
                name = rest[:i - 1] + (None,) + rest[i - 1:]
                yield Line(i, CHOICES[tilde], name, C.d(i, x2, tilde), C.d(i, x1, tilde))


def check_line(a: Matrix, b: Matrix) -> tuple[list[str], Optional[AcyclicityWitness]]:
    """Acyclicity of 0 -> N2 -a-> N1 -b-> N0 -> 0 over a PID.

    Acyclic means: a injective, ker b = im a as saturated lattices, and b
    surjective over the ring.  Returns the failed conditions and, if there
    are none, a witness.
    """
    reasons = []
    if not (b @ a).is_zero():
        reasons.append("d∘d ≠ 0 (not a complex)")
        return reasons, None
    if kernel_saturated(a).rank != 0:
        reasons.append("not exact at degree 2: left map not injective")
    Z = kernel_saturated(b)
    C = coordinates(a, Z)
    if C is None:
        reasons.append("not exact at degree 1: image not contained in kernel")
    elif C.rows != C.cols:
        reasons.append(
            f"not exact at degree 1: kernel rank {C.rows} differs from image rank {C.cols}")
    elif not is_invertible(C):
        reasons.append(
            "not exact at degree 1: image has finite index in the kernel "
            f"(invariant factors {invariant_factors(C)})")
    S = right_inverse(b)
    if S is None:
        factors = invariant_factors(b)
        if len(factors) < b.rows:
            reasons.append(
                f"not exact at degree 0: right map has rank {len(factors)} < {b.rows}")
        else:
            bad = [f for f in factors if not b.ring.is_unit(f)]
            reasons.append(
                f"not exact at degree 0: right map not surjective (invariant factors {bad})")
    if reasons:
        return reasons, None
    return [], AcyclicityWitness(Z, C, S)


def validate_multicomplex(C: BinaryMulticomplex) -> ValidationReport:
    """Full check of a binary multicomplex; raises ShapeError before anything else."""
    check_shape(C)
    report = ValidationReport()
    for line in lines(C):
        reasons, witness = check_line(line.top, line.bottom)
        for r in reasons:
            report.failures.append(Failure(line.position, line.direction, line.differential, r))
        if witness is not None:
            report.witnesses[(line.direction, line.differential, line.position)] = witness
    n = C.dimension
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for ti in (False, True):
                for tj in (False, True):
                    for x in C.ranks:
                        if x[i - 1] < 1 or x[j - 1] < 1:
                            continue
                        lhs = C.d(i, shift(x, j), ti) @ C.d(j, x, tj)
                        rhs = C.d(j, shift(x, i), tj) @ C.d(i, x, ti)
                        if lhs != rhs:
                            report.failures.append(Failure(
                                x, i, CHOICES[ti],
                                f"does not commute with direction {j} {CHOICES[tj]}"))
    if report.failures:
        report.witnesses.clear()
    return report


def diagonal_directions(C: BinaryMulticomplex) -> frozenset:
    check_shape(C)
    return frozenset(
        i for i in range(1, C.dimension + 1) if C.maps(i, False) == C.maps(i, True)
    )


# -- constructions -----------------------------------------------------------

def line_complex(ring: RingSpec, ranks, d2: Matrix, d1: Matrix,
                 d2_tilde: Matrix | None = None, d1_tilde: Matrix | None = None):
    """A one-dimensional binary complex from degree ranks (r0, r1, r2).

    Omitted tilde maps duplicate the plain ones.
    """
    r0, r1, r2 = ranks
    d = {(2,): d2, (1,): d1}
    dt = {(2,): d2 if d2_tilde is None else d2_tilde, (1,): d1 if d1_tilde is None else d1_tilde}
    return BinaryMulticomplex.build(ring, 1, {(0,): r0, (1,): r1, (2,): r2}, [(d, dt)])


def free_module(ring: RingSpec, r: int) -> BinaryMulticomplex:
    return BinaryMulticomplex.build(ring, 0, {(): r})


def delta_embed(C: BinaryMulticomplex, direction: int = 1) -> BinaryMulticomplex:
    """Duplicate the plain differential of ``direction``.

    The single-differential complex is (N, d^i) with the other directions'
    pairs kept; the d~^i of the argument is ignored.  The result must
    validate, otherwise ValidationError carries the report.
    """
    if not 1 <= direction <= C.dimension:
        raise DimensionMismatch(f"direction {direction} outside 1..{C.dimension}")
    pairs = list(C.differentials)
    d = pairs[direction - 1][0]
    pairs[direction - 1] = (d, dict(d))
    out = BinaryMulticomplex(C.ring, C.dimension, dict(C.ranks), tuple(pairs))
    report = validate_multicomplex(out)
    if not report.passed:
        raise ValidationError("delta_embed of a non-acyclic complex", report)
    return out


def direct_sum(C1: BinaryMulticomplex, C2: BinaryMulticomplex) -> BinaryMulticomplex:
    if C1.dimension != C2.dimension:
        raise DimensionMismatch(f"dimensions {C1.dimension} and {C2.dimension}")
    if C1.ring != C2.ring:
        raise DimensionMismatch(f"rings {C1.ring} and {C2.ring}")
    ranks = {x: C1.rank(x) + C2.rank(x) for x in C1.ranks}
    pairs = tuple(
        tuple({x: C1.maps(i, t)[x].block_diag(C2.maps(i, t)[x]) for x in C1.maps(i, t)}
              for t in (False, True))
        for i in range(1, C1.dimension + 1)
    )
    return BinaryMulticomplex(C1.ring, C1.dimension, ranks, pairs)


def tensor(C1: BinaryMulticomplex, C2: BinaryMulticomplex) -> BinaryMulticomplex:
    """External tensor product; the directions of C2 follow those of C1."""
    if C1.ring != C2.ring:
        raise DimensionMismatch(f"rings {C1.ring} and {C2.ring}")
    ring = C1.ring
    n1, n2 = C1.dimension, C2.dimension
    ranks = {x1 + x2: C1.rank(x1) * C2.rank(x2) for x1 in C1.ranks for x2 in C2.ranks}
    pairs = []
    for i in range(1, n1 + 1):
        pairs.append(tuple(
            {x1 + x2: m.kron(Matrix.identity(ring, C2.rank(x2)))
             for x1, m in C1.maps(i, t).items() for x2 in C2.ranks}
            for t in (False, True)))
    for j in range(1, n2 + 1):
        pairs.append(tuple(
            {x1 + x2: Matrix.identity(ring, C1.rank(x1)).kron(m)
             for x1 in C1.ranks for x2, m in C2.maps(j, t).items()}
            for t in (False, True)))
    return BinaryMulticomplex(ring, n1 + n2, ranks, tuple(pairs))


def conjugate(C: BinaryMulticomplex, g: Mapping, g_inv: Mapping) -> BinaryMulticomplex:
    """Change of basis: d(x) becomes g[x - e_i] @ d(x) @ g_inv[x]."""
    return C.map_differentials(lambda i, t, x, m: g[shift(x, i)] @ m @ g_inv[x])


def random_unimodular(rng: random.Random, ring: RingSpec, n: int, entry_bound: int,
                      steps: int | None = None) -> tuple[Matrix, Matrix]:
    """A random product of elementary matrices and its inverse."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    W = [[int(i == j) for j in range(n)] for i in range(n)]
    if n >= 2:
        for _ in range(2 * n if steps is None else steps):
            i, j = rng.sample(range(n), 2)
            q = rng.randint(-entry_bound, entry_bound)
            # row_i += q row_j on U; col_j -= q col_i on W keeps W = U^-1
            U[i] = [a + q * b for a, b in zip(U[i], U[j])]
            for row in W:
                row[j] -= q * row[i]
    for i in range(n):
        if rng.random() < 0.3:
            U[i] = [-a for a in U[i]]
            for row in W:
                row[i] = -row[i]
    return Matrix(ring, U, n, n), Matrix(ring, W, n, n)


def _random_line(rng, ring, size, entry_bound) -> BinaryMulticomplex:
    # elementary lines: a copies of Z -id-> Z in window (2,1), b in window (1,0)
    a = rng.randint(0, size)
    b = size - a
    I = Matrix.identity
    d2 = I(ring, a).vstack(Matrix.zeros(ring, b, a))
    d1 = Matrix.zeros(ring, b, a).hstack(I(ring, b))
    C = line_complex(ring, (b, a + b, a), d2, d1)
    if rng.random() < 0.4:
        return C
    # the tilde differential: the same elementary decomposition in another basis
    g, gi = {}, {}
    for x in C.ranks:
        g[x], gi[x] = random_unimodular(rng, ring, C.rank(x), entry_bound)
    twisted = conjugate(C, g, gi)
    pairs = ((C.maps(1, False), twisted.maps(1, True)),)
    return BinaryMulticomplex(ring, 1, dict(C.ranks), pairs)


def random_acyclic_binary(seed, dimension: int, rank_bound: int, entry_bound: int,
                          ring: RingSpec = INTEGERS) -> BinaryMulticomplex:
    """A seeded acyclic binary multicomplex with ranks at most ``rank_bound``.

    Sums of external products of random one-dimensional binary lines, then
    an independent unimodular change of basis at every position.
    """
    if rank_bound < 1 or entry_bound < 1:
        raise ValueError("bounds must be at least 1")
    rng = random.Random(seed)
    if dimension == 0:
        return free_module(ring, rng.randint(1, rank_bound))
    summands = rng.randint(1, 2) if rank_bound >= 2 else 1
    budget = rank_bound // summands
    total = None
    for _ in range(summands):
        piece = None
        left = budget
        for k in range(dimension):
            # keep the product of line sizes within the budget
            size = rng.randint(1, max(1, left))
            left = max(1, left // size)
            line = _random_line(rng, ring, size, entry_bound)
            piece = line if piece is None else tensor(piece, line)
        total = piece if total is None else direct_sum(total, piece)
    g, gi = {}, {}
    for x in total.ranks:
        g[x], gi[x] = random_unimodular(rng, ring, total.rank(x), entry_bound)
    return conjugate(total, g, gi)
