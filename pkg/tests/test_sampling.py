import itertools
import random
from fractions import Fraction

import pytest

from kwitness.complexes import line_complex, random_acyclic_binary
from kwitness.nil import nilpotency_index, validate_nil
from kwitness.rings import INTEGERS, localized
from kwitness.sampling import commutant_basis, commutant_nilpotent_sample, generate_instance, random_nilpotent

from conftest import Z


@pytest.mark.parametrize("seed", range(20))
def test_random_nilpotent_bounds(seed):
    rng = random.Random(seed)
    r = rng.randint(1, 6)
    nu = random_nilpotent(rng, INTEGERS, r, entry_bound=9)
    assert nu.power(r).is_zero()
    assert nu.max_abs_entry() <= 9
    if r >= 2:
        assert not nu.is_zero()


def test_random_nilpotent_localized_has_fractions():
    R = localized(3)
    samples = [random_nilpotent(random.Random(s), R, 4) for s in range(20)]
    assert all(m.power(4).is_zero() for m in samples)
    assert any(isinstance(a, Fraction) for m in samples for row in m.data for a in row)


def test_diagonal_line_commutant(diag121):
    found = commutant_nilpotent_sample(diag121, 0, 30)
    assert found[0].is_zero_endomorphism()
    betas = set()
    for N in found[1:]:
        assert validate_nil(N).passed
        nu = N.nil[(1,)]
        if N.nil[(0,)].is_zero() and N.nil[(2,)].is_zero() and nu[0, 0] == nu[1, 0] == nu[1, 1] == 0:
            betas.add(nu[0, 1])
    assert betas and 0 not in betas


def test_diagonal_line_commutant_by_brute_force(diag121):
    # ν1 = [[a,b],[c,d]], ν0 = [e], ν2 = [f]; solve the commutation system directly
    sols = []
    for a, b, c, d, e, f in itertools.product(range(-1, 2), repeat=6):
        n1 = Z([[a, b], [c, d]])
        if (n1 @ diag121.d(1, (2,), False) == diag121.d(1, (2,), False) @ Z([[f]])
                and diag121.d(1, (1,), False) @ n1 == Z([[e]]) @ diag121.d(1, (1,), False)):
            sols.append((a, b, c, d, e, f))
    # a = f, c = 0, d = e, b free
    assert all(s[0] == s[5] and s[2] == 0 and s[3] == s[4] for s in sols)
    assert len(commutant_basis(diag121)) == 3


def test_twisted_commutant_is_zero():
    C = line_complex(INTEGERS, (1, 2, 1), Z([[1], [0]]), Z([[0, 1]]), Z([[0], [1]]), Z([[1, 0]]))
    found = commutant_nilpotent_sample(C, 0, 30)
    assert len(found) == 1 and found[0].is_zero_endomorphism()


def test_zero_trials():
    C = random_acyclic_binary(1, 1, 3, 2)
    found = commutant_nilpotent_sample(C, 0, 0)
    assert len(found) == 1 and found[0].is_zero_endomorphism()


@pytest.mark.parametrize("seed", range(6))
def test_samples_validate_and_are_deterministic(seed):
    C = random_acyclic_binary(seed, 2, 4, 2)
    a = commutant_nilpotent_sample(C, seed, 9)
    assert a == commutant_nilpotent_sample(C, seed, 9)
    for N in a:
        assert N.base == C and validate_nil(N).passed


@pytest.mark.parametrize("dim", [0, 1, 2])
def test_generate_instance(dim):
    N = generate_instance(7, 0, dim, 4)
    assert N == generate_instance(7, 0, dim, 4)
    assert validate_nil(N).passed
    assert max(nilpotency_index(m) for m in N.nil.values()) >= 2
