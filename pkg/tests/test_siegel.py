import itertools
import random

import mpmath
import pytest
from flint import arb
from hypothesis import given, strategies as st

from gelfond.errors import NotIntegral, ShapeError
from gelfond.exact import mat_vec
from gelfond.numfield import house
from gelfond.siegel import annihilates, flatten_OK_system, siegel_int, siegel_OK, sup_norm


def brute_min_sup(A, N, box):
    best = None
    for v in itertools.product(range(-box, box + 1), repeat=N):
        if any(v) and all(x == 0 for x in mat_vec(A, v)):
            s = max(abs(x) for x in v)
            best = s if best is None else min(best, s)
    return best


def test_siegel_int_example():
    sol = siegel_int([[2, 3]])
    assert sol.vector == [3, -2]
    assert float(sol.claimed_bound.mid()) == 6
    assert sol.bound_satisfied


def test_siegel_int_shape():
    with pytest.raises(ShapeError):
        siegel_int([[1, 2], [3, 4]])


@given(st.integers(1, 5).flatmap(lambda M: st.tuples(st.just(M), st.integers(M + 1, 8))), st.randoms(use_true_random=False))
def test_siegel_int_certificate(shape, rnd):
    M, N = shape
    A = [[rnd.randint(-10, 10) for _ in range(N)] for _ in range(M)]
    sol = siegel_int(A)
    x = sol.vector
    assert any(x) and all(v == 0 for v in mat_vec(A, x))
    assert sol.bound_satisfied
    abound = max(1, max(abs(v) for r in A for v in r))
    with mpmath.workdps(40):
        bound = mpmath.mpf(N * abound) ** (mpmath.mpf(M) / (N - M))
        assert sol.claimed_bound.overlaps(arb(mpmath.nstr(bound, 35)))
    assert sup_norm(x) ** (N - M) <= (N * abound) ** M


@pytest.mark.parametrize("A", [[[2, 3]], [[1, 1, 1]], [[1, 2, 3], [0, 1, 4]], [[3, -5, 7, 2]]])
def test_siegel_int_examples_are_minimal(A):
    sol = siegel_int(A)
    assert brute_min_sup(A, len(A[0]), 6) == sup_norm(sol.vector)


def test_siegel_int_accept_filter():
    A = [[1, -1, 0, 0]]
    sol = siegel_int(A, accept=lambda v: v[2] == 0 and v[3] == 0)
    assert sol.vector[2:] == [0, 0] and sol.vector[0] == sol.vector[1] != 0


def test_flatten_blocks(sqrt2):
    t = sqrt2.theta
    assert flatten_OK_system([[t]]) == [[0, 2], [1, 0]]
    with pytest.raises(NotIntegral):
        flatten_OK_system([[t / 2, t]])


def _random_system(field, p, q, rng):
    h = field.degree
    return [[field.element([rng.randint(-4, 4) for _ in range(h)]) for _ in range(q)] for _ in range(p)]


@pytest.mark.parametrize("poly", [[-2, 0, 1], [-2, 0, 0, 1]])
def test_siegel_OK_random(poly, request):
    from gelfond.numfield import make_field

    field = make_field(poly)
    rng = random.Random(7)
    for _ in range(6):
        q = rng.randint(2, 4)
        p = rng.randint(1, q - 1)
        B = _random_system(field, p, q, rng)
        sol = siegel_OK(B)
        assert any(not e.is_zero() for e in sol.vector)
        assert annihilates(B, sol.vector)
        for e in sol.vector:
            if not e.is_zero():
                assert house(e).upper <= sol.claimed_bound.upper()
