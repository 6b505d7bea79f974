"""Reference checks that share no code with the linear-algebra engine.

Ranks and minors are computed by sympy over the rationals.  A matrix of
rank r has unit invariant factors iff the gcd of its r x r minors is a unit,
which over a localization means some r x r minor has valuation zero.  These
checks are slow and only meant for cross-checking at small sizes.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import sympy

from .complexes import positions, shift


def _sym(m) -> sympy.Matrix:
    return sympy.Matrix(m.rows, m.cols, [
        sympy.Rational(a.numerator, a.denominator) if isinstance(a, Fraction) else sympy.Integer(a)
        for row in m.data for a in row])


def _product(a, b):
    # plain triple loop, deliberately not Matrix.__matmul__
    return [[sum(a.data[i][k] * b.data[k][j] for k in range(a.cols)) for j in range(b.cols)]
            for i in range(a.rows)]


def _zero(rows) -> bool:
    return all(v == 0 for row in rows for v in row)


def _ident(rows) -> bool:
    return all(v == (i == j) for i, row in enumerate(rows) for j, v in enumerate(row))


def oracle_rank(m) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return _sym(m).rank()


def unit_divisor(m, ring, r: int) -> bool:
    """Is the gcd of the r x r minors of m a unit of the ring?"""
    if r == 0:
        return True
    S = _sym(m)
    g = sympy.Integer(0)
    for rows in itertools.combinations(range(m.rows), r):
        for cols in itertools.combinations(range(m.cols), r):
            minor = S.extract(list(rows), list(cols)).det()
            if minor == 0:
                continue
            if ring.localized:
                num, den = sympy.fraction(sympy.Rational(minor))
                if int(num) % ring.prime != 0:
                    return True
            else:
                g = sympy.gcd(g, minor)
                if g == 1:
                    return True
    return False


def line_is_exact(a, b, ring) -> bool:
    """0 -> N2 -a-> N1 -b-> N0 -> 0 is exact with free, saturated pieces."""
    r2, r1, r0 = a.cols, a.rows, b.rows
    if not _zero(_product(b, a)):
        return False
    ra, rb = oracle_rank(a), oracle_rank(b)
    if ra != r2 or rb != r0 or ra + rb != r1:
        return False
    return unit_divisor(a, ring, ra) and unit_divisor(b, ring, rb)


def nil_object_ok(N) -> bool:
    """Every line exact, pairs commuting across directions, ν commuting and nilpotent."""
    C = N.base
    n = C.dimension
    for i in range(1, n + 1):
        for tilde in (False, True):
            for x in positions(n):
                if x[i - 1] != 2:
                    continue
                a = C.d(i, x, tilde)
                b = C.d(i, shift(x, i), tilde)
                if not line_is_exact(a, b, C.ring):
                    return False
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for ti in (False, True):
                for tj in (False, True):
                    for x in positions(n):
                        if x[i - 1] < 1 or x[j - 1] < 1:
                            continue
                        lhs = _product(C.d(j, shift(x, i), tj), C.d(i, x, ti))
                        rhs = _product(C.d(i, shift(x, j), ti), C.d(j, x, tj))
                        if lhs != rhs:
                            return False
    for i in range(1, n + 1):
        for tilde in (False, True):
            for x in positions(n):
                if x[i - 1] < 1:
                    continue
                d = C.d(i, x, tilde)
                if _product(N.nil[shift(x, i)], d) != _product(d, N.nil[x]):
                    return False
    for x in positions(n):
        m = N.nil[x]
        if m.rows == 0:
            continue
        S = _sym(m)
        if not (S ** m.rows).is_zero_matrix:
            return False
    return True


def _squares(maps, src, dst) -> bool:
    """maps commute with ν and with every differential (src -> dst)."""
    A, B = src.base, dst.base
    for x in positions(A.dimension):
        if _product(maps[x], src.nil[x]) != _product(dst.nil[x], maps[x]):
            return False
    for i in range(1, A.dimension + 1):
        for tilde in (False, True):
            for x in positions(A.dimension):
                if x[i - 1] < 1:
                    continue
                y = shift(x, i)
                if _product(maps[y], A.d(i, x, tilde)) != _product(B.d(i, x, tilde), maps[x]):
                    return False
    return True


def _shapes_ok(maps, rows_of, cols_of, n) -> bool:
    for x in positions(n):
        m = maps.get(x)
        if m is None or m.rows != rows_of(x) or m.cols != cols_of(x):
            return False
    return True


def step_ok(step, reg, ring) -> bool:
    kind = step.kind
    if kind == "ShortExact":
        if not all(k in reg for k in (step.sub, step.total, step.quotient)):
            return False
        S, F, Q = reg[step.sub], reg[step.total], reg[step.quotient]
        n = F.dimension
        if S.dimension != n or Q.dimension != n:
            return False
        if not (_shapes_ok(step.inclusion, F.rank, S.rank, n)
                and _shapes_ok(step.projection, Q.rank, F.rank, n)
                and _shapes_ok(step.retraction, S.rank, F.rank, n)
                and _shapes_ok(step.section, F.rank, Q.rank, n)):
            return False
        for x in positions(n):
            inc, proj = step.inclusion[x], step.projection[x]
            rs, rq = S.rank(x), Q.rank(x)
            if rs + rq != F.rank(x):
                return False
            if not _zero(_product(proj, inc)):
                return False
            if oracle_rank(inc) != rs or not unit_divisor(inc, ring, rs):
                return False
            if oracle_rank(proj) != rq or not unit_divisor(proj, ring, rq):
                return False
            if not _ident(_product(step.retraction[x], inc)):
                return False
            if not _ident(_product(proj, step.section[x])):
                return False
        # inclusion S -> F and projection F -> Q
        return _squares(step.inclusion, S, F) and _squares(step.projection, F, Q)
    if kind == "Diagonal":
        if step.object not in reg:
            return False
        T = reg[step.object]
        i = step.direction
        if not 1 <= i <= T.dimension:
            return False
        if T.base.maps(i, False) != T.base.maps(i, True):
            return False
        return all(_zero(m.data) for m in T.nil.values())
    if kind == "Isomorphism":
        if step.left not in reg or step.right not in reg:
            return False
        L, R = reg[step.left], reg[step.right]
        n = L.dimension
        if R.dimension != n or not _shapes_ok(step.maps, R.rank, L.rank, n):
            return False
        for x in positions(n):
            m = step.maps[x]
            if m.rows != m.cols:
                return False
            if m.rows and not (oracle_rank(m) == m.rows and unit_divisor(m, ring, m.rows)):
                return False
        return _squares(step.maps, L, R)
    return False


def step_sum(cert) -> dict:
    """The claimed combination, summed from the step fields directly."""
    total: dict = {}

    def add(key, c):
        total[key] = total.get(key, 0) + c
        if total[key] == 0:
            del total[key]

    for c, step in zip(cert.claim.coefficients, cert.steps):
        if step.kind == "ShortExact":
            add(step.total, c)
            add(step.sub, -c)
            add(step.quotient, -c)
        elif step.kind == "Diagonal":
            add(step.object, c)
        else:
            add(step.left, c)
            add(step.right, -c)
    return total


def certificate_ok(cert) -> bool:
    """Reference decision for a certificate; True iff every replayed identity holds."""
    reg = cert.registry
    for N in reg.values():
        if N.ring != cert.ring or not nil_object_ok(N):
            return False
    for step in cert.steps:
        if not step_ok(step, reg, cert.ring):
            return False
    nu_id, zero_id = cert.target_pair
    if nu_id not in reg or zero_id not in reg:
        return False
    F, F0 = reg[nu_id], reg[zero_id]
    if F.base != F0.base or not all(_zero(m.data) for m in F0.nil.values()):
        return False
    target = {nu_id: 1, zero_id: -1}
    if dict(cert.claim.target.terms) != target:
        return False
    if len(cert.claim.coefficients) != len(cert.steps):
        return False
    return step_sum(cert) == target
