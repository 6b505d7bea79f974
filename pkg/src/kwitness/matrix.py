"""Immutable dense matrices over a supported ring."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .rings import RingSpec, Scalar


class Matrix:
    """A rows x cols matrix with entries in ``ring``.

    Degenerate shapes (0 x n, n x 0) are legal.  Instances are treated as
    immutable; every operation returns a new matrix.
    """

    __slots__ = ("ring", "rows", "cols", "data")

    def __init__(self, ring: RingSpec, data: Iterable[Sequence], rows: int | None = None,
                 cols: int | None = None, *, check: bool = True):
        data = tuple(tuple(row) for row in data)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(row) != cols for row in data):
            raise ValueError(f"ragged or mis-sized matrix data for shape {rows}x{cols}")
        if check:
            data = tuple(tuple(ring.coerce(x) for x in row) for row in data)
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def _raw(cls, ring, data, rows, cols):
        m = object.__new__(cls)
        m.ring = ring
        m.rows = rows
        m.cols = cols
        m.data = data
        return m

    @classmethod
    def zeros(cls, ring: RingSpec, rows: int, cols: int) -> "Matrix":
        return cls._raw(ring, tuple((0,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "Matrix":
        return cls._raw(ring, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def column_vector(cls, ring: RingSpec, values: Sequence) -> "Matrix":
        return cls(ring, [[v] for v in values], len(values), 1)

    @classmethod
    def from_columns(cls, ring: RingSpec, columns: Sequence[Sequence], rows: int) -> "Matrix":
        cols = len(columns)
        return cls(ring, [[columns[j][i] for j in range(cols)] for i in range(rows)], rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple:
        return self.data[i]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.data)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list[list]:
        return [list(row) for row in self.data]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.ring == other.ring and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.ring, self.rows, self.cols, self.data))

    def __repr__(self):
        return f"Matrix({self.ring}, {self.rows}x{self.cols}, {self.tolist()})"

    def _check_same(self, other: "Matrix"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        data = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data))
        return Matrix._raw(self.ring, data, self.rows, self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        data = tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.data, other.data))
        return Matrix._raw(self.ring, data, self.rows, self.cols)

    def __neg__(self) -> "Matrix":
        return Matrix._raw(self.ring, tuple(tuple(-a for a in r) for r in self.data),
                           self.rows, self.cols)

    def scale(self, c: Scalar) -> "Matrix":
        c = self.ring.coerce(c)
        return Matrix._raw(self.ring, tuple(tuple(c * a for a in r) for r in self.data),
                           self.rows, self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols_b = list(zip(*other.data)) if other.rows else [()] * other.cols
        data = tuple(
            tuple(sum(a * b for a, b in zip(r, c)) if r else 0 for c in cols_b)
            for r in self.data
        )
        return Matrix._raw(self.ring, data, self.rows, other.cols)

    def power(self, k: int) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        out = Matrix.identity(self.ring, self.rows)
        for _ in range(k):
            out = out @ self
        return out

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(self.ring, tuple(zip(*self.data)) if self.rows else
                           tuple(() for _ in range(self.cols)), self.cols, self.rows)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == Matrix.identity(self.ring, self.rows)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        data = tuple(tuple(r[c0:c1]) for r in self.data[r0:r1])
        return Matrix._raw(self.ring, data, r1 - r0, c1 - c0)

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix._raw(self.ring, tuple(tuple(r[j] for j in idx) for r in self.data),
                           self.rows, len(idx))

    def with_entry(self, i: int, j: int, value: Scalar) -> "Matrix":
        data = [list(r) for r in self.data]
        data[i][j] = self.ring.coerce(value)
        return Matrix._raw(self.ring, tuple(tuple(r) for r in data), self.rows, self.cols)

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.rows != other.rows:
            raise ValueError("hstack row mismatch")
        data = tuple(a + b for a, b in zip(self.data, other.data))
        return Matrix._raw(self.ring, data, self.rows, self.cols + other.cols)

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.cols != other.cols:
            raise ValueError("vstack column mismatch")
        return Matrix._raw(self.ring, self.data + other.data, self.rows + other.rows, self.cols)

    def block_diag(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        top = tuple(r + (0,) * other.cols for r in self.data)
        bottom = tuple((0,) * self.cols + r for r in other.data)
        return Matrix._raw(self.ring, top + bottom, self.rows + other.rows, self.cols + other.cols)

    def kron(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        data = tuple(
            tuple(a * b for a in ra for b in rb)
            for ra in self.data for rb in other.data
        )
        return Matrix._raw(self.ring, data, self.rows * other.rows, self.cols * other.cols)

    def max_abs_entry(self):
        """Largest |numerator| or denominator; a size measure for bounds."""
        best = 0
        for r in self.data:
            for a in r:
                if isinstance(a, Fraction):
                    best = max(best, abs(a.numerator), a.denominator)
                else:
                    best = max(best, abs(a))
        return best
