import random

import pytest

from kwitness import oracle
from kwitness.complexes import (
    BinaryMulticomplex,
    DimensionMismatch,
    ShapeError,
    ValidationError,
    check_line,
    check_shape,
    delta_embed,
    diagonal_directions,
    direct_sum,
    free_module,
    line_complex,
    random_acyclic_binary,
    tensor,
    validate_multicomplex,
)
from kwitness.matrix import Matrix
from kwitness.rings import INTEGERS, localized

from conftest import Z


def twisted121():
    return line_complex(INTEGERS, (1, 2, 1), Z([[1], [0]]), Z([[0, 1]]),
                        Z([[0], [1]]), Z([[1, 0]]))


def test_diagonal_line_passes_with_witnesses(diag121):
    report = validate_multicomplex(diag121)
    assert report.passed and report.verdict == "pass"
    assert len(report.witnesses) == 2
    for (i, choice, _), w in report.witnesses.items():
        tilde = choice == "dTilde"
        assert w.replay(diag121.d(i, (2,), tilde), diag121.d(i, (1,), tilde))
    assert w.kernel.basis == Z([[1], [0]])


def test_non_surjective_line_fails():
    C = line_complex(INTEGERS, (1, 1, 0), Matrix.zeros(INTEGERS, 1, 0), Z([[2]]))
    report = validate_multicomplex(C)
    assert not report.passed
    assert {f.differential for f in report.failures} == {"d", "dTilde"}
    assert all("degree 0" in f.reason for f in report.failures)


def test_single_module_passes_vacuously():
    assert validate_multicomplex(free_module(INTEGERS, 3)).passed


def test_not_a_complex():
    C = line_complex(INTEGERS, (1, 1, 1), Z([[1]]), Z([[1]]))
    reasons = [f.reason for f in validate_multicomplex(C).failures]
    assert any("not a complex" in r for r in reasons)


def test_shape_errors():
    with pytest.raises(ShapeError):
        BinaryMulticomplex.build(INTEGERS, 1, {(3,): 1})
    bad = BinaryMulticomplex.build(INTEGERS, 1, {(0,): 1, (1,): 1},
                                   [({(1,): Z([[1, 1]])}, {})])
    with pytest.raises(ShapeError):
        check_shape(bad)
    with pytest.raises(ShapeError):
        validate_multicomplex(bad)


def test_cross_commutation_checked():
    # direction-2 tilde differential that does not commute with direction 1
    C = tensor(line_complex(INTEGERS, (1, 1, 0), Matrix.zeros(INTEGERS, 1, 0), Z([[1]])),
               line_complex(INTEGERS, (1, 1, 0), Matrix.zeros(INTEGERS, 1, 0), Z([[1]])))
    assert validate_multicomplex(C).passed
    pairs = list(C.differentials)
    d2t = dict(pairs[1][1])
    d2t[(1, 1)] = Z([[-1]])
    pairs[1] = (pairs[1][0], d2t)
    bad = BinaryMulticomplex(INTEGERS, 2, dict(C.ranks), tuple(pairs))
    reasons = [f.reason for f in validate_multicomplex(bad).failures]
    assert any("commute" in r for r in reasons)


def test_diagonal_directions():
    assert diagonal_directions(twisted121()) == frozenset()
    C = line_complex(INTEGERS, (1, 2, 1), Z([[1], [0]]), Z([[0, 1]]),
                     d1_tilde=Z([[1, 0]]))
    assert diagonal_directions(C) == frozenset()


def test_delta_embed():
    ident = line_complex(INTEGERS, (1, 1, 0), Matrix.zeros(INTEGERS, 1, 0), Z([[1]]))
    D = delta_embed(ident)
    assert D.d(1, (1,), False) == D.d(1, (1,), True) == Z([[1]])
    assert 1 in diagonal_directions(D)
    zero = BinaryMulticomplex.build(INTEGERS, 1, {})
    assert validate_multicomplex(delta_embed(zero)).passed
    assert validate_multicomplex(delta_embed(twisted121())).passed


def test_delta_embed_direction_two_only():
    C = tensor(twisted121(), twisted121())
    D = delta_embed(C, 2)
    assert diagonal_directions(D) == frozenset({2})
    assert validate_multicomplex(D).passed


def test_delta_embed_rejects_non_acyclic():
    C = line_complex(INTEGERS, (1, 1, 0), Matrix.zeros(INTEGERS, 1, 0), Z([[2]]))
    with pytest.raises(ValidationError) as exc:
        delta_embed(C)
    assert not exc.value.report.passed
    with pytest.raises(DimensionMismatch):
        delta_embed(C, 2)


def test_direct_sum(diag121):
    zero = BinaryMulticomplex.build(INTEGERS, 1, {})
    assert direct_sum(diag121, zero) == diag121
    S = direct_sum(diag121, diag121)
    assert [S.rank((k,)) for k in range(3)] == [2, 4, 2]
    assert validate_multicomplex(S).passed
    bad = line_complex(INTEGERS, (1, 1, 0), Matrix.zeros(INTEGERS, 1, 0), Z([[2]]))
    assert not validate_multicomplex(direct_sum(diag121, bad)).passed
    with pytest.raises(DimensionMismatch):
        direct_sum(diag121, free_module(INTEGERS, 1))


@pytest.mark.parametrize("dim", [1, 2])
def test_direct_sum_passes_iff_both(dim):
    A = random_acyclic_binary(3, dim, 3, 2)
    B = random_acyclic_binary(4, dim, 3, 2)
    assert validate_multicomplex(direct_sum(A, B)).passed
    x = next(x for x, m in A.maps(1, False).items() if m.rows and m.cols)
    broken = A.map_differentials(
        lambda i, t, y, m: m.with_entry(0, 0, m[0, 0] + 1) if (i, t, y) == (1, False, x) else m)
    assert not validate_multicomplex(direct_sum(broken, B)).passed
    assert not validate_multicomplex(direct_sum(B, broken)).passed


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("dim", [0, 1, 2])
def test_random_acyclic_binary(seed, dim):
    C = random_acyclic_binary(seed, dim, 4, 3)
    assert validate_multicomplex(C).passed
    assert C == random_acyclic_binary(seed, dim, 4, 3)
    assert all(r <= 4 for r in C.ranks.values())


def test_random_acyclic_binary_localized():
    C = random_acyclic_binary(5, 2, 4, 2, localized(3))
    assert C.ring == localized(3) and validate_multicomplex(C).passed


@pytest.mark.parametrize("seed", range(10))
def test_corruption_verdict_matches_oracle(seed):
    C = random_acyclic_binary(seed, 1, 4, 2)
    rng = random.Random(seed)
    spots = [(t, x) for t in (False, True) for x, m in C.maps(1, t).items() if m.rows and m.cols]
    t, x = rng.choice(spots)
    m = C.d(1, x, t)
    i, j = rng.randrange(m.rows), rng.randrange(m.cols)
    bad = C.map_differentials(
        lambda k, tt, y, mm: mm.with_entry(i, j, mm[i, j] + 1) if (tt, y) == (t, x) else mm)
    ok = validate_multicomplex(bad).passed
    a, b = bad.d(1, (2,), t), bad.d(1, (1,), t)
    assert ok == oracle.line_is_exact(a, b, INTEGERS)


def test_check_line_never_rejects_an_exact_line():
    rng = random.Random(11)
    from kwitness.selftest import random_line
    seen = 0
    for _ in range(200):
        a, b, ring = random_line(rng)
        if oracle.line_is_exact(a, b, ring):
            seen += 1
            failures, witness = check_line(a, b)
            assert not failures and witness.replay(a, b)
    assert seen > 20
