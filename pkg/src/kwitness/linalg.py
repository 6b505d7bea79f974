"""Exact linear algebra over the integers and the integers localized at a prime.

Conventions, fixed once so every postcondition is checkable by equality:

* ``hnf`` is row style.  Nonzero rows come first, pivot columns strictly
  increase, each pivot is normalized (positive over Z, a power of p over
  Z_(p)), and entries above a pivot lie in the residue system of that pivot
  (``RingSpec.residue``).  Zero rows sit at the bottom.
* ``snf`` returns a diagonal with d1 | d2 | ... and normalized entries.
* A ``Lattice`` stores its basis as the columns of a matrix; the basis
  produced by ``kernel_saturated`` is the transpose of a row HNF, hence
  canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .matrix import Matrix
from .rings import RingSpec


class NotSaturated(ValueError):
    """A lattice's quotient has torsion (a non-unit invariant factor)."""


class InternalInvariantViolation(AssertionError):
    """A postcondition that is a theorem over a PID failed to replay."""


# -- row-operation helpers on mutable lists ---------------------------------

def _addmul_row(A, dst, src, q, start=0):
    # A[dst] -= q * A[src]
    if q == 0:
        return
    rd, rs = A[dst], A[src]
    for k in range(start, len(rd)):
        if rs[k]:
            rd[k] -= q * rs[k]


def _scale_row(A, i, u):
    if u != 1:
        A[i] = [u * a for a in A[i]]


def _tidy(a):
    if isinstance(a, Fraction) and a.denominator == 1:
        return a.numerator
    return a


def _tomatrix(ring, A, rows, cols):
    if ring.localized:
        return Matrix._raw(ring, tuple(tuple(_tidy(a) for a in r) for r in A), rows, cols)
    return Matrix._raw(ring, tuple(tuple(r) for r in A), rows, cols)


def _identity_rows(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


# -- canonical forms ---------------------------------------------------------

def hnf(M: Matrix) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form.  Returns (H, U) with H = U @ M, U invertible."""
    ring = M.ring
    m, n = M.shape
    A = [list(r) for r in M.data]
    U = _identity_rows(m)
    r = 0
    for j in range(n):
        if r == m:
            break
        while True:
            live = [i for i in range(r, m) if A[i][j] != 0]
            if not live:
                break
            best = min(live, key=lambda i: ring.size(A[i][j]))
            if best != r:
                A[r], A[best] = A[best], A[r]
                U[r], U[best] = U[best], U[r]
            done = True
            for i in range(r + 1, m):
                if A[i][j] != 0:
                    q, rem = ring.divmod(A[i][j], A[r][j])
                    _addmul_row(A, i, r, q, j)
                    _addmul_row(U, i, r, q)
                    if rem != 0:
                        done = False
            if done:
                break
        if A[r][j] == 0:
            continue
        u = ring.normal_unit(A[r][j])
        _scale_row(A, r, u)
        _scale_row(U, r, u)
        piv = A[r][j]
        for i in range(r):
            if A[i][j] != 0:
                q, _ = ring.residue(A[i][j], piv)
                _addmul_row(A, i, r, q, j)
                _addmul_row(U, i, r, q)
        r += 1
    return _tomatrix(ring, A, m, n), _tomatrix(ring, U, m, m)


def hnf_rank(H: Matrix) -> int:
    """Number of nonzero rows of a matrix in row echelon form."""
    return sum(1 for row in H.data if any(row))


def is_hnf(H: Matrix) -> bool:
    """Predicate for the canonical row HNF described in the module docstring."""
    ring = H.ring
    last = -1
    seen_zero = False
    for i, row in enumerate(H.data):
        nz = [j for j, a in enumerate(row) if a != 0]
        if not nz:
            seen_zero = True
            continue
        if seen_zero:
            return False
        j = nz[0]
        if j <= last:
            return False
        piv = row[j]
        if ring.normalize(piv) != piv:
            return False
        for k in range(i):
            _, rem = ring.residue(H.data[k][j], piv)
            if rem != H.data[k][j]:
                return False
        last = j
    return True


def snf(M: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form.  Returns (D, U, V) with D = U @ M @ V."""
    ring = M.ring
    m, n = M.shape
    D = [list(r) for r in M.data]
    U = _identity_rows(m)
    V = _identity_rows(n)  # column operations are tracked as row ops on V^T

    def swap_cols(a, b):
        for row in D:
            row[a], row[b] = row[b], row[a]
        V[a], V[b] = V[b], V[a]

    def addmul_col(dst, src, q):
        # column dst -= q * column src
        for row in D:
            if row[src]:
                row[dst] -= q * row[src]
        _addmul_row(V, dst, src, q)

    for t in range(min(m, n)):
        cand = [(i, j) for i in range(t, m) for j in range(t, n) if D[i][j] != 0]
        if not cand:
            break
        i0, j0 = min(cand, key=lambda ij: ring.size(D[ij[0]][ij[1]]))
        if i0 != t:
            D[t], D[i0] = D[i0], D[t]
            U[t], U[i0] = U[i0], U[t]
        if j0 != t:
            swap_cols(t, j0)
        while True:
            piv = D[t][t]
            for i in range(t + 1, m):
                if D[i][t] != 0:
                    q, _ = ring.divmod(D[i][t], piv)
                    _addmul_row(D, i, t, q, t)
                    _addmul_row(U, i, t, q)
            for j in range(t + 1, n):
                if D[t][j] != 0:
                    q, _ = ring.divmod(D[t][j], piv)
                    addmul_col(j, t, q)
            rest = [(i, t) for i in range(t + 1, m) if D[i][t] != 0]
            rest += [(t, j) for j in range(t + 1, n) if D[t][j] != 0]
            if rest:
                i1, j1 = min(rest, key=lambda ij: ring.size(D[ij[0]][ij[1]]))
                if i1 != t:
                    D[t], D[i1] = D[i1], D[t]
                    U[t], U[i1] = U[i1], U[t]
                else:
                    swap_cols(t, j1)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if not ring.divides(piv, D[i][j])), None)
            if bad is None:
                break
            # pull the offending row into the pivot row and re-eliminate
            _addmul_row(D, t, bad[0], -1)
            _addmul_row(U, t, bad[0], -1)
        u = ring.normal_unit(D[t][t])
        _scale_row(D, t, u)
        _scale_row(U, t, u)
    Vm = _tomatrix(ring, V, n, n).T
    return _tomatrix(ring, D, m, n), _tomatrix(ring, U, m, m), Vm


def invariant_factors(M: Matrix) -> list:
    """Nonzero diagonal entries of the Smith form of ``M``."""
    D, _, _ = snf(M)
    out = []
    for i in range(min(D.shape)):
        if D[i, i] != 0:
            out.append(D[i, i])
    return out


def all_units(ring: RingSpec, factors) -> bool:
    return all(ring.is_unit(f) for f in factors)


# -- fraction-field computations -------------------------------------------

def _integral_rows(M: Matrix):
    """Rows cleared of denominators, with the scale applied to each row."""
    rows, scales = [], []
    for row in M.data:
        den = 1
        for a in row:
            if isinstance(a, Fraction):
                d = a.denominator
                den = den * d // _gcd(den, d)
        rows.append([int(a * den) for a in row])
        scales.append(den)
    return rows, scales


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _bareiss(A, ncols):
    """Fraction-free elimination in place; returns (rank, sign, last pivot)."""
    m = len(A)
    r = 0
    sign = 1
    prev = 1
    for j in range(ncols):
        p = next((i for i in range(r, m) if A[i][j] != 0), None)
        if p is None:
            continue
        if p != r:
            A[r], A[p] = A[p], A[r]
            sign = -sign
        for i in range(r + 1, m):
            for k in range(j + 1, ncols):
                A[i][k] = (A[i][k] * A[r][j] - A[i][j] * A[r][k]) // prev
            A[i][j] = 0
        prev = A[r][j]
        r += 1
        if r == m:
            break
    return r, sign, prev


def rank(M: Matrix) -> int:
    """Rank over the fraction field."""
    A, _ = _integral_rows(M)
    return _bareiss(A, M.cols)[0]


def det(M: Matrix):
    """Exact determinant of a square matrix."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return 1
    A, scales = _integral_rows(M)
    r, sign, last = _bareiss(A, n)
    if r < n:
        return 0
    d = Fraction(sign * last)
    for s in scales:
        d /= s
    return M.ring.coerce(d)


def is_invertible(M: Matrix) -> bool:
    """Square and determinant a unit of the ring."""
    return M.rows == M.cols and M.ring.is_unit(det(M))


def _rref_solve(M: Matrix, B: Matrix) -> Optional[list[list[Fraction]]]:
    """Solve M X = B over the fraction field when M has independent columns.

    Returns None when no solution exists.  The caller guarantees full column
    rank, so a solution is unique when it exists.
    """
    m, n = M.shape
    k = B.cols
    A = [[Fraction(a) for a in M.data[i]] + [Fraction(b) for b in B.data[i]] for i in range(m)]
    piv_cols = []
    r = 0
    for j in range(n):
        p = next((i for i in range(r, m) if A[i][j] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][j]
        A[r] = [a * inv for a in A[r]]
        for i in range(m):
            if i != r and A[i][j] != 0:
                f = A[i][j]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        piv_cols.append(j)
        r += 1
    if r < n:
        raise ValueError("solve requires independent columns")
    for i in range(r, m):
        if any(A[i][n + c] != 0 for c in range(k)):
            return None
    return [[A[i][n + c] for c in range(k)] for i in range(n)]


def solve_in_ring(M: Matrix, B: Matrix) -> Optional[Matrix]:
    """The unique X over the ring with M @ X = B, or None."""
    sol = _rref_solve(M, B)
    if sol is None:
        return None
    ring = M.ring
    if not all(ring.contains(a) for row in sol for a in row):
        return None
    return Matrix(ring, sol, M.cols, B.cols)  # coerce tidies integral fractions


def inverse(M: Matrix) -> Matrix:
    """Inverse over the ring; raises ValueError if M is not invertible there."""
    if M.rows != M.cols:
        raise ValueError("inverse of a non-square matrix")
    if rank(M) != M.rows:
        raise ValueError("matrix is singular")
    X = solve_in_ring(M, Matrix.identity(M.ring, M.rows))
    if X is None:
        raise ValueError(f"matrix is not invertible over {M.ring}")
    return X


# -- lattices ----------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """A free submodule of R^ambient_rank, basis vectors as columns."""

    ambient_rank: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.rows != self.ambient_rank:
            raise ValueError("basis rows must equal the ambient rank")

    @property
    def ring(self) -> RingSpec:
        return self.basis.ring

    @property
    def rank(self) -> int:
        return self.basis.cols

    @classmethod
    def full(cls, ring: RingSpec, n: int) -> "Lattice":
        return cls(n, Matrix.identity(ring, n))

    @classmethod
    def zero(cls, ring: RingSpec, n: int) -> "Lattice":
        return cls(n, Matrix.zeros(ring, n, 0))

    def is_saturated(self) -> bool:
        return rank(self.basis) == self.rank and all_units(self.ring, invariant_factors(self.basis))


def kernel_saturated(M: Matrix) -> Lattice:
    """The lattice {x : M x = 0} with a canonical, certified saturated basis."""
    H, U = hnf(M.T)
    r = hnf_rank(H)
    n = M.cols
    kernel_rows = U.submatrix(r, n, 0, n)
    if kernel_rows.rows:
        kernel_rows, _ = hnf(kernel_rows)
    basis = kernel_rows.T
    lat = Lattice(n, basis)
    if not (M @ basis).is_zero():
        raise InternalInvariantViolation("kernel basis is not annihilated")
    if basis.cols + r != n or not lat.is_saturated():
        raise InternalInvariantViolation("kernel basis is not a saturated basis")
    return lat


def split_saturated_inclusion(K: Lattice) -> tuple[Matrix, Matrix]:
    """Retraction and complement basis for a saturated lattice.

    Returns (retraction, complement) with retraction @ K.basis = I_k and
    [K.basis | complement] invertible over the ring.
    """
    B = K.basis
    ring = B.ring
    n, k = B.shape
    if rank(B) != k:
        raise NotSaturated("basis columns are dependent")
    D, U, V = snf(B)
    diag = [D[i, i] for i in range(k)]
    if not all_units(ring, diag):
        raise NotSaturated(f"quotient has torsion: invariant factors {diag}")
    # D = [I_k; 0] after normalization, so B = U^-1 [V^-1; 0].
    proj = Matrix.identity(ring, k).hstack(Matrix.zeros(ring, k, n - k))
    retraction = V @ proj @ U
    complement = inverse(U).submatrix(0, n, k, n)
    return retraction, complement


def membership(v: Sequence, L: Lattice) -> tuple[bool, Optional[tuple]]:
    """Whether v lies in L, with its (unique) coordinates in L's basis."""
    ring = L.ring
    vec = Matrix.column_vector(ring, v)
    if vec.rows != L.ambient_rank:
        raise ValueError("vector is not in the ambient module")
    if L.rank == 0:
        return (True, ()) if vec.is_zero() else (False, None)
    X = solve_in_ring(L.basis, vec)
    if X is None:
        return False, None
    return True, X.column(0)


def coordinates(B: Matrix, L: Lattice) -> Optional[Matrix]:
    """Coordinates of every column of B in L's basis, or None if one is outside L."""
    if L.rank == 0:
        return Matrix.zeros(B.ring, 0, B.cols) if B.is_zero() else None
    return solve_in_ring(L.basis, B)


def right_inverse(M: Matrix) -> Optional[Matrix]:
    """S with M @ S = I when M is surjective over the ring, else None."""
    ring = M.ring
    m, n = M.shape
    D, U, V = snf(M)
    diag = [D[i, i] for i in range(min(m, n))]
    if m > n or not all_units(ring, diag):
        return None
    # M = U^-1 [I 0] V^-1, so V [I; 0] U is a right inverse.
    emb = Matrix.identity(ring, m).vstack(Matrix.zeros(ring, n - m, m))
    return V @ emb @ U
