import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kwitness.linalg import (
    Lattice,
    NotSaturated,
    all_units,
    coordinates,
    det,
    hnf,
    invariant_factors,
    is_hnf,
    is_invertible,
    kernel_saturated,
    membership,
    rank,
    right_inverse,
    snf,
    split_saturated_inclusion,
)
from kwitness.matrix import Matrix
from kwitness.rings import INTEGERS, localized

from conftest import Z

Z5 = localized(5)
Z3 = localized(3)


def _matrices(ring=INTEGERS, max_size=6, bound=9):
    def build(shape):
        r, c = shape
        return st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c),
                        min_size=r, max_size=r).map(lambda rows: Matrix(ring, rows, r, c))
    return st.tuples(st.integers(0, max_size), st.integers(0, max_size)).flatmap(build)


def _local_matrices(p):
    R = localized(p)
    dens = [d for d in range(1, 8) if d % p]
    entry = st.tuples(st.integers(-9, 9), st.sampled_from(dens)).map(lambda t: Fraction(*t))

    def build(shape):
        r, c = shape
        return st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r,
                        max_size=r).map(lambda rows: Matrix(R, rows, r, c))
    return st.tuples(st.integers(0, 5), st.integers(0, 5)).flatmap(build)


# examples

def test_hnf_identity_and_zero():
    I = Matrix.identity(INTEGERS, 2)
    assert hnf(I) == (I, I)
    H, U = hnf(Matrix.zeros(INTEGERS, 1, 2))
    assert H.is_zero() and U.is_identity()


def test_hnf_example():
    M = Z([[2, 4], [1, 3]])
    H, U = hnf(M)
    assert H == Z([[1, 1], [0, 2]])
    assert U @ M == H and det(U) in (1, -1)


def test_snf_examples():
    M = Z([[2, 0], [0, 3]])
    D, U, V = snf(M)
    assert D == Z([[1, 0], [0, 6]]) and U @ M @ V == D
    assert abs(det(D)) == abs(det(M))
    M5 = Matrix(Z5, [[2, 0], [0, 3]])
    D5, U5, V5 = snf(M5)
    assert D5.is_identity() and U5 @ M5 @ V5 == D5
    assert snf(Matrix.zeros(INTEGERS, 2, 3))[0].is_zero()


def _brute_kernel(M, bound=3):
    return [v for v in itertools.product(range(-bound, bound + 1), repeat=M.cols)
            if any(v) and (M @ Matrix(INTEGERS, [[a] for a in v])).is_zero()]


@pytest.mark.parametrize("rows", [[[1, 1]], [[2, 2]]])
def test_kernel_examples(rows):
    M = Z(rows)
    K = kernel_saturated(M)
    assert K.basis == Z([[1], [-1]])
    # every small solution is an integer multiple of the basis vector
    for v in _brute_kernel(M):
        assert membership(v, K)[0]


def test_kernel_of_identity_is_zero():
    assert kernel_saturated(Matrix.identity(INTEGERS, 3)).rank == 0


def test_split_examples():
    ret, comp = split_saturated_inclusion(Lattice(2, Z([[1], [0]])))
    assert ret == Z([[1, 0]]) and comp == Z([[0], [1]])
    K = Lattice(2, Z([[1], [1]]))
    ret, comp = split_saturated_inclusion(K)
    assert ret == Z([[1, 0]]) and comp == Z([[0], [1]])
    assert (ret @ K.basis).is_identity()
    assert det(K.basis.hstack(comp)) == 1
    with pytest.raises(NotSaturated):
        split_saturated_inclusion(Lattice(2, Z([[2], [0]])))


def test_invariant_factor_examples():
    assert invariant_factors(Matrix.identity(INTEGERS, 3)) == [1, 1, 1]
    assert invariant_factors(Z([[2]])) == [2]
    assert invariant_factors(Matrix(Z3, [[2]])) == [1]


def test_membership_examples():
    L = Lattice(2, Z([[1], [-1]]))
    assert membership((2, -2), L) == (True, (2,))
    assert membership((1, 0), L) == (False, None)
    assert membership((0, 0), L) == (True, (0,))


def test_membership_respects_the_ring():
    L = Lattice(1, Z([[2]]))
    assert not membership((1,), L)[0]
    ok, c = membership((1,), Lattice(1, Matrix(Z3, [[2]])))
    assert ok and c == (Fraction(1, 2),)


def test_right_inverse():
    M = Z([[2, 3]])
    S = right_inverse(M)
    assert (M @ S).is_identity()
    assert right_inverse(Z([[2, 4]])) is None


# properties

@settings(max_examples=150, deadline=None)
@given(_matrices())
def test_hnf_replay(M):
    H, U = hnf(M)
    assert U @ M == H and is_invertible(U) and is_hnf(H)


@settings(max_examples=60, deadline=None)
@given(_matrices(max_size=4), st.randoms(use_true_random=False))
def test_hnf_is_canonical(M, rnd):
    from kwitness.complexes import random_unimodular
    W, _ = random_unimodular(rnd, INTEGERS, M.rows, 2)
    assert hnf(W @ M)[0] == hnf(M)[0]


def _is_chain(D, ring):
    diag = [D[i, i] for i in range(min(D.shape))]
    off = all(D[i, j] == 0 for i in range(D.rows) for j in range(D.cols) if i != j)
    nonzero = [a for a in diag if a != 0]
    return (off and diag[:len(nonzero)] == nonzero
            and all(ring.divides(a, b) for a, b in zip(nonzero, nonzero[1:]))
            and all(ring.normalize(a) == a for a in nonzero))


@settings(max_examples=150, deadline=None)
@given(_matrices())
def test_snf_replay(M):
    D, U, V = snf(M)
    assert U @ M @ V == D and is_invertible(U) and is_invertible(V)
    assert _is_chain(D, INTEGERS)


@settings(max_examples=80, deadline=None)
@given(_local_matrices(3))
def test_snf_replay_localized(M):
    D, U, V = snf(M)
    assert U @ M @ V == D and is_invertible(U) and is_invertible(V)
    assert _is_chain(D, M.ring)


@settings(max_examples=150, deadline=None)
@given(_matrices())
def test_kernel_is_exact_and_saturated(M):
    K = kernel_saturated(M)
    assert (M @ K.basis).is_zero()
    assert K.rank + rank(M) == M.cols
    assert all_units(INTEGERS, invariant_factors(K.basis))


@settings(max_examples=100, deadline=None)
@given(_matrices(max_size=5))
def test_splitting_replay(M):
    K = kernel_saturated(M)
    ret, comp = split_saturated_inclusion(K)
    assert (ret @ K.basis).is_identity()
    assert is_invertible(K.basis.hstack(comp))


@settings(max_examples=100, deadline=None)
@given(_matrices(max_size=5), st.sampled_from([2, 3, 5]))
def test_ring_coherence(M, p):
    R = localized(p)
    ML = Matrix(R, M.data, M.rows, M.cols)
    assert rank(ML) == rank(M)
    assert invariant_factors(ML) == [R.normalize(d) for d in invariant_factors(M)]


@settings(max_examples=100, deadline=None)
@given(_matrices(max_size=4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_membership_recovers_coordinates(M, coeffs):
    K = kernel_saturated(M)
    c = coeffs[:K.rank]
    v = K.basis @ Matrix(INTEGERS, [[a] for a in c], K.rank, 1)
    ok, got = membership(v.column(0), K)
    assert ok and list(got) == c
    assert coordinates(K.basis, K).is_identity()
