"""Seeded corpus generation: nilpotent matrices and commuting nilpotent endomorphisms."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from .complexes import BinaryMulticomplex, random_acyclic_binary, shift
from .linalg import kernel_saturated
from .matrix import Matrix
from .nil import NilMulticomplex
from .rings import INTEGERS, RingSpec


def random_nilpotent(rng: random.Random, ring: RingSpec, r: int, entry_bound: int = 9,
                     conj_bound: int = 3, attempts: int = 200) -> Matrix:
    """U T U^-1 with T strictly upper triangular and U invertible, entries bounded.

    U has entries in [-conj_bound, conj_bound].  Over a localization U also
    carries unit scalings, so the sample has p-coprime denominators.  Samples
    whose conjugate exceeds ``entry_bound`` (numerators and denominators) are
    rejected; after ``attempts`` the triangular matrix itself is returned.
    """
    units = [u for u in range(-4, 5) if u and ring.is_unit(u)] if ring.localized else [1]
    for _ in range(attempts):
        density = rng.uniform(0.3, 1.0)
        T = [[0] * r for _ in range(r)]
        for i in range(r):
            for j in range(i + 1, r):
                if rng.random() < density:
                    T[i][j] = rng.randint(-2, 2)
        if r >= 2 and not any(map(any, T)):
            continue
        U, Ui = _bounded_unimodular(rng, ring, r, conj_bound)
        if ring.localized:
            scale = [rng.choice(units) for _ in range(r)]
            U = Matrix(ring, [[a * scale[j] for j, a in enumerate(row)] for row in U.data])
            Ui = Matrix(ring, [[Fraction(a, scale[i]) for a in row]
                               for i, row in enumerate(Ui.data)])
        nu = U @ Matrix(ring, T) @ Ui
        if nu.max_abs_entry() <= entry_bound:
            return Matrix(ring, nu.data)
    return Matrix(ring, T)


def _bounded_unimodular(rng, ring, n, bound):
    # elementary operations with multiplier +-1, stopping before an entry leaves the bound
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    W = [[int(i == j) for j in range(n)] for i in range(n)]
    if n >= 2:
        for _ in range(3 * n):
            i, j = rng.sample(range(n), 2)
            q = rng.choice((-1, 1))
            new = [a + q * b for a, b in zip(U[i], U[j])]
            if max(abs(a) for a in new) > bound:
                continue
            U[i] = new
            for row in W:
                row[j] -= q * row[i]
    return Matrix(ring, U), Matrix(ring, W)


# -- commuting nilpotent endomorphisms ---------------------------------------

def commutant_basis(C: BinaryMulticomplex) -> list[dict]:
    """A saturated basis of the graded endomorphisms commuting with every differential."""
    ring = C.ring
    order = list(C.ranks)
    offset, total = {}, 0
    for x in order:
        offset[x] = total
        total += C.rank(x) ** 2

    def var(x, a, b):
        return offset[x] + a * C.rank(x) + b

    rows = []
    for i in range(1, C.dimension + 1):
        for tilde in (False, True):
            for x, d in C.maps(i, tilde).items():
                y = shift(x, i)
                # (ν_y d - d ν_x)[p][q] = 0
                for p in range(C.rank(y)):
                    for q in range(C.rank(x)):
                        row = [0] * total
                        for k in range(C.rank(y)):
                            if d[k, q]:
                                row[var(y, p, k)] += d[k, q]
                        for k in range(C.rank(x)):
                            if d[p, k]:
                                row[var(x, k, q)] -= d[p, k]
                        if any(row):
                            rows.append(row)
    A = Matrix(ring, rows, len(rows), total)
    K = kernel_saturated(A)
    out = []
    for v in K.basis.columns():
        nu = {}
        for x in order:
            r = C.rank(x)
            nu[x] = Matrix(ring, [[v[var(x, a, b)] for b in range(r)] for a in range(r)], r, r)
        out.append(nu)
    return out


def _combine(ring, basis, coeffs, order, ranks):
    out = {}
    for x in order:
        r = ranks[x]
        acc = Matrix.zeros(ring, r, r)
        for c, b in zip(coeffs, basis):
            if c:
                acc = acc + b[x].scale(c)
        out[x] = acc
    return out


def _is_nilpotent(nu: dict) -> bool:
    return all(m.power(m.rows).is_zero() for m in nu.values() if m.rows)


def _is_zero(nu: dict) -> bool:
    return all(m.is_zero() for m in nu.values())


def _primitive(ring, nu: dict) -> dict:
    """Divide out the integer content so sampled entries stay small."""
    if ring.localized:
        return nu
    g = 0
    for m in nu.values():
        for row in m.data:
            for a in row:
                g = _gcd(g, a)
    if g <= 1:
        return nu
    return {x: Matrix(ring, [[a // g for a in row] for row in m.data], m.rows, m.cols)
            for x, m in nu.items()}


def _gcd(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def _poly_factors(phi: dict):
    """Distinct monic irreducible factors (rational coefficient lists) of the char poly."""
    t = sympy.Symbol("t")
    total = sympy.Integer(1)
    for m in phi.values():
        if m.rows:
            M = sympy.Matrix([[sympy.Rational(a.numerator, a.denominator)
                               if isinstance(a, Fraction) else a for a in row] for row in m.data])
            total *= M.charpoly(t).as_expr()
    _, factors = sympy.factor_list(sympy.expand(total), t)
    out = []
    for f, _k in factors:
        coeffs = sympy.Poly(f, t).monic().all_coeffs()
        out.append([Fraction(int(c.p), int(c.q)) for c in coeffs])
    return out


def _poly_eval(ring, coeffs, phi: dict) -> dict:
    out = {}
    for x, m in phi.items():
        acc = Matrix.zeros(ring, m.rows, m.rows)
        ident = Matrix.identity(ring, m.rows)
        for c in coeffs:
            acc = acc @ m + ident.scale(ring.coerce(c))
        out[x] = acc
    return out


def _mul(a: dict, b: dict) -> dict:
    return {x: a[x] @ b[x] for x in a}


def commutant_nilpotent_sample(C: BinaryMulticomplex, seed, trials: int,
                               coeff_bound: int = 2) -> list[NilMulticomplex]:
    """Nil multicomplexes over C with sampled commuting nilpotent endomorphisms.

    The commutation constraints are solved exactly (saturated kernel); small
    integer combinations of the solution basis are kept when nilpotent.  To
    reach nilpotents that no sparse combination hits, products of the form
    P_a(φ) χ P_b(φ) are also tried, where φ, χ commute with C and P_a, P_b
    are complementary factor products of φ's characteristic polynomial (their
    product is a multiple of it, so the result squares to zero).
    The zero endomorphism is always the first entry.
    """
    ring = C.ring
    order = list(C.ranks)
    ranks = dict(C.ranks)
    found = [NilMulticomplex.build(C)]
    seen = {tuple(sorted((x, m.data) for x, m in found[0].nil.items()))}

    def keep(nu, primitive=False):
        if primitive:
            nu = _primitive(ring, nu)
        if _is_zero(nu) or not _is_nilpotent(nu):
            return
        key = tuple(sorted((x, m.data) for x, m in nu.items()))
        if key in seen:
            return
        seen.add(key)
        found.append(NilMulticomplex.build(C, nu))

    if trials <= 0:
        return found
    basis = commutant_basis(C)
    if not basis:
        return found
    rng = random.Random(seed)
    k = len(basis)
    for t in range(trials):
        mode = t % 3
        coeffs = [0] * k
        if mode == 0:
            # one or two basis vectors
            for j in rng.sample(range(k), min(k, rng.randint(1, 2))):
                coeffs[j] = rng.choice([c for c in range(-coeff_bound, coeff_bound + 1) if c])
            keep(_combine(ring, basis, coeffs, order, ranks))
        elif mode == 1:
            coeffs = [rng.randint(-coeff_bound, coeff_bound) for _ in range(k)]
            phi = _combine(ring, basis, coeffs, order, ranks)
            factors = _poly_factors(phi)
            if len(factors) < 2:
                # radical of the characteristic polynomial evaluated at φ
                if factors:
                    keep(_poly_eval(ring, factors[0], phi), primitive=True)
                continue
            a, b = rng.sample(range(len(factors)), 2)
            chi = _combine(ring, basis, [rng.randint(-coeff_bound, coeff_bound)
                                         for _ in range(k)], order, ranks)
            pa = _factor_product(ring, factors, phi, skip=a)
            pb = _factor_product(ring, factors, phi, skip=b)
            keep(_mul(_mul(pa, chi), pb), primitive=True)
        else:
            # sparse combination over a small support
            support = rng.sample(range(k), min(k, rng.randint(2, 4)))
            for j in support:
                coeffs[j] = rng.randint(-coeff_bound, coeff_bound)
            keep(_combine(ring, basis, coeffs, order, ranks))
    return found


def _factor_product(ring, factors, phi, skip):
    """Product of f(φ)^rank over every factor but one; kills all other components."""
    power = max((m.rows for m in phi.values()), default=0)
    out = {x: Matrix.identity(ring, m.rows) for x, m in phi.items()}
    for j, f in enumerate(factors):
        if j == skip:
            continue
        fe = _poly_eval(ring, f, phi)
        for _ in range(power):
            out = _mul(out, fe)
    return out


def generate_instance(seed, index: int, dimension: int, rank_bound: int,
                      entry_bound: int = 3, ring: RingSpec = INTEGERS,
                      attempts: int = 8, trials: int = 9) -> NilMulticomplex:
    """The ``index``-th corpus instance for ``seed``.

    A random acyclic binary multicomplex with a sampled commuting nilpotent
    endomorphism.  Complexes whose commutant sample holds only ν = 0 are
    redrawn up to ``attempts`` times before the zero endomorphism is kept.
    """
    N = None
    for attempt in range(attempts):
        tag = f"{seed}:{index}:{attempt}"
        rng = random.Random(tag)
        if dimension == 0:
            C = random_acyclic_binary(tag, 0, rank_bound, entry_bound, ring)
            nu = random_nilpotent(rng, ring, C.rank(()), entry_bound=3 * entry_bound)
            N = NilMulticomplex.build(C, {(): nu})
            if not nu.is_zero():
                return N
            continue
        C = random_acyclic_binary(tag, dimension, rank_bound, entry_bound, ring)
        found = commutant_nilpotent_sample(C, tag, trials)
        if len(found) > 1:
            return rng.choice(found[1:])
        N = found[0]
    return N
