import pytest

from kwitness.complexes import ShapeError, free_module, random_acyclic_binary
from kwitness.matrix import Matrix
from kwitness.nil import NilMulticomplex, NotNilpotent, check_nil_shape, nil_index, nilpotency_index, validate_nil
from kwitness.rings import INTEGERS

from conftest import Z

J2 = [[0, 1], [0, 0]]
J3 = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]


def test_zero_endomorphism_passes():
    C = random_acyclic_binary(2, 2, 4, 2)
    N = NilMulticomplex.build(C)
    assert validate_nil(N).passed and N.is_zero_endomorphism()


def test_diagonal_line_with_nilpotent(diag121):
    N = NilMulticomplex.build(diag121, {(1,): Z(J2)})
    assert validate_nil(N).passed
    # the four commutation products
    assert (Z(J2) @ diag121.d(1, (2,), False)).is_zero()
    assert (diag121.d(1, (1,), False) @ Z(J2)).is_zero()


def test_identity_fails_nilpotency(diag121):
    N = NilMulticomplex.build(diag121, {(1,): Matrix.identity(INTEGERS, 2)})
    reasons = [f.reason for f in validate_nil(N).failures]
    assert any("nilpotency" in r for r in reasons)


def test_commutation_failure(diag121):
    N = NilMulticomplex.build(diag121, {(1,): Z([[0, 0], [1, 0]])})
    reasons = [f.reason for f in validate_nil(N).failures]
    assert any("commutation" in r for r in reasons)


def test_nil_shape():
    with pytest.raises(ShapeError):
        check_nil_shape(NilMulticomplex.build(free_module(INTEGERS, 2), {(): Z([[0]])}))


@pytest.mark.parametrize("rows,index", [(J2, 2), (J3, 3), ([[0] * 3] * 3, 1)])
def test_nilpotency_index(rows, index):
    assert nilpotency_index(Z(rows)) == index


def test_nil_index_data(diag121):
    N = NilMulticomplex.build(diag121, {(1,): Z(J2)})
    idx = nil_index(N)
    assert idx.per_position == {(0,): 1, (1,): 2, (2,): 1}
    assert idx.max_index == 2 and idx.min_index == 1
    empty = NilMulticomplex.build(free_module(INTEGERS, 0))
    assert nil_index(empty).per_position == {(): 0}


def test_nil_index_rejects_non_nilpotent():
    N = NilMulticomplex.build(free_module(INTEGERS, 1), {(): Z([[1]])})
    with pytest.raises(NotNilpotent):
        nil_index(N)
