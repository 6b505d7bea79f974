import pytest

from kwitness.matrix import Matrix
from kwitness.rings import INTEGERS

from conftest import Z


def test_product_and_identity():
    A = Z([[1, 2], [3, 4]])
    assert A @ Matrix.identity(INTEGERS, 2) == A
    assert A @ A == Z([[7, 10], [15, 22]])
    assert A.power(0).is_identity()


def test_degenerate_shapes():
    E = Matrix.zeros(INTEGERS, 0, 3)
    F = Matrix.zeros(INTEGERS, 3, 0)
    assert (F @ E).shape == (3, 3) and (F @ E).is_zero()
    assert (E @ F).shape == (0, 0) and (E @ F).is_identity()
    assert E.T.shape == (3, 0)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        Z([[1, 2]]) @ Z([[1, 2]])


def test_stacking():
    A = Z([[1]])
    assert A.hstack(Z([[2]])) == Z([[1, 2]])
    assert A.vstack(Z([[2]])) == Z([[1], [2]])
    assert A.block_diag(Z([[2]])) == Z([[1, 0], [0, 2]])
    assert Z([[1, 2]]).kron(Z([[1], [1]])) == Z([[1, 2], [1, 2]])


def test_values_are_immutable_and_hashable():
    A = Z([[1, 2]])
    B = A.with_entry(0, 1, 5)
    assert A == Z([[1, 2]]) and B == Z([[1, 5]])
    assert len({A, Z([[1, 2]])}) == 1
