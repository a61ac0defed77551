import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ciresolve import linalg


def det_mod(m, p):
    """Leibniz determinant, independent of any elimination."""
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = 1
        for i in range(n):
            prod *= int(m[i][perm[i]])
        total += sign * prod
    return total % p


def rank_by_minors(a, p):
    rows, cols = a.shape
    for k in range(min(rows, cols), 0, -1):
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                if det_mod(a[np.ix_(rs, cs)], p):
                    return k
    return 0


def all_vectors(n, p):
    return [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=n)]


def matrices(p, max_dim=4):
    return st.integers(1, max_dim).flatmap(
        lambda m: st.integers(1, max_dim).flatmap(
            lambda n: st.lists(st.integers(0, p - 1), min_size=m * n, max_size=m * n).map(
                lambda xs: np.array(xs, dtype=np.int64).reshape(m, n)
            )
        )
    )


def test_rank_example():
    assert linalg.rank(np.array([[1, 2], [2, 4]]), 5) == 1


def test_rank_of_empty_and_zero():
    assert linalg.rank(np.zeros((0, 3), dtype=np.int64), 7) == 0
    assert linalg.rank(np.zeros((3, 3), dtype=np.int64), 7) == 0


@pytest.mark.parametrize("p,shape", [(2, (3, 3)), (3, (2, 3)), (3, (3, 2)), (2, (2, 4))])
def test_exhaustive_rank_nullity_against_minors(p, shape):
    m, n = shape
    for entries in itertools.product(range(p), repeat=m * n):
        a = np.array(entries, dtype=np.int64).reshape(m, n)
        r = linalg.rank(a, p)
        assert r == rank_by_minors(a, p)
        k = linalg.kernel_basis(a, p)
        assert k.shape == (n, n - r)
        assert not np.any(linalg.matmul(a, k, p))
        assert linalg.rank(k, p) == n - r


def test_exhaustive_gf3_square_rank():
    counts = {}
    for entries in itertools.product(range(3), repeat=9):
        a = np.array(entries, dtype=np.int64).reshape(3, 3)
        counts[linalg.rank(a, 3)] = counts.get(linalg.rank(a, 3), 0) + 1
    # |GL_3(F_3)| = (27-1)(27-3)(27-9) = 11232; rank-1 count (q^3-1)^2/(q-1) = 338
    assert counts[3] == 11232
    assert counts[1] == 338
    assert counts[0] == 1
    assert sum(counts.values()) == 3**9


@settings(max_examples=60, deadline=None)
@given(matrices(5))
def test_kernel_counts_solutions_by_enumeration(a):
    p = 5
    n = a.shape[1]
    if n > 3:
        a = a[:, :3]
        n = 3
    solutions = [v for v in all_vectors(n, p) if not np.any(linalg.matmul(a, v.reshape(-1, 1), p))]
    r = linalg.rank(a, p)
    assert len(solutions) == p ** (n - r)


@settings(max_examples=60, deadline=None)
@given(matrices(3, 3), st.data())
def test_solve_is_lexicographically_least(a, data):
    p = 3
    n = a.shape[1]
    x0 = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n)), dtype=np.int64)
    b = linalg.matmul(a, x0.reshape(-1, 1), p)[:, 0]
    x = linalg.solve(a, b, p)
    assert np.array_equal(linalg.matmul(a, x.reshape(-1, 1), p)[:, 0], b)
    candidates = [tuple(v) for v in all_vectors(n, p) if np.array_equal(linalg.matmul(a, v.reshape(-1, 1), p)[:, 0], b)]
    assert tuple(x) == min(candidates)


def test_solve_inconsistent_raises():
    with pytest.raises(linalg.NoSolution):
        linalg.solve(np.array([[1, 0], [0, 0]]), np.array([0, 1]), 5)


def test_solve_matrix_rhs():
    a = np.array([[1, 1, 0], [0, 1, 1]])
    b = np.array([[1, 0], [1, 2]])
    x = linalg.solve(a, b, 7)
    assert np.array_equal(linalg.matmul(a, x, 7), b % 7)


@settings(max_examples=40, deadline=None)
@given(matrices(7, 5))
def test_rref_properties(a):
    p = 7
    red, r, piv = linalg.rref(a, p)
    assert r == len(piv) == linalg.rank(a, p)
    assert piv == sorted(piv)
    for i, c in enumerate(piv):
        assert red[i, c] == 1
        assert np.count_nonzero(red[:, c]) == 1
    assert not np.any(red[r:])
    # same row space
    assert linalg.rank(np.vstack([a % p, red]), p) == r


@pytest.mark.parametrize("p,shape,density", [(5, (80, 90), 0.1), (7, (70, 70), 0.5), (2, (65, 100), 0.3), (3, (120, 40), 0.05)])
def test_flint_and_numpy_backends_agree(p, shape, density):
    rng = np.random.default_rng(sum(shape) + p)
    a = rng.integers(0, p, size=shape)
    a[rng.random(shape) > density] = 0
    num = linalg.rref(a, p, backend="numpy")
    fl = linalg.rref(a, p, backend="flint")
    assert np.array_equal(num[0], fl[0])
    assert num[1] == fl[1]
    assert num[2] == fl[2]
    assert linalg.rank(a, p) == num[1]


def test_matmul_no_overflow_for_large_prime():
    p = 2**31 - 1
    a = np.full((2, 5), p - 1, dtype=np.int64)
    b = np.full((5, 1), p - 1, dtype=np.int64)
    # (p-1)^2 * 5 = 5 mod p
    assert np.array_equal(linalg.matmul(a, b, p), np.full((2, 1), 5))


def test_kernel_of_zero_row_matrix_is_identity():
    k = linalg.kernel_basis(np.zeros((0, 3), dtype=np.int64), 5)
    assert np.array_equal(k, np.eye(3, dtype=np.int64))
