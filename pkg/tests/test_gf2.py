from __future__ import annotations

import random

import pytest

from cachepriv import gf2


def gaussian_binomial(n: int, k: int) -> int:
    """Number of k-dimensional subspaces of GF(2)^n."""
    num = den = 1
    for i in range(k):
        num *= (1 << (n - i)) - 1
        den *= (1 << (k - i)) - 1
    return num // den


def brute_span(rows) -> set[int]:
    out = {0}
    for r in rows:
        out |= {x ^ r for x in out}
    return out


def test_reduced_basis_is_reduced():
    rng = random.Random(2)
    for _ in range(200):
        rows = [rng.getrandbits(8) for _ in range(rng.randrange(1, 6))]
        basis = gf2.reduced_basis(rows)
        for pb, row in basis.items():
            assert row & pb
            for other_pb, other in basis.items():
                if other_pb != pb:
                    assert not other & pb


def test_reduce_vector_is_canonical():
    # same coset -> same residual, regardless of basis build order
    rng = random.Random(3)
    for _ in range(100):
        rows = [rng.getrandbits(10) for _ in range(4)]
        basis = gf2.reduced_basis(rows)
        shuffled = rows[:]
        rng.shuffle(shuffled)
        basis2 = gf2.reduced_basis(shuffled)
        v = rng.getrandbits(10)
        offset = random.Random(v).choice(sorted(brute_span(rows)))
        assert gf2.reduce_vector(v, basis) == gf2.reduce_vector(v ^ offset, basis2)


def test_in_span_matches_brute_force():
    rng = random.Random(7)
    for _ in range(100):
        rows = [rng.getrandbits(6) for _ in range(3)]
        basis = gf2.reduced_basis(rows)
        span = brute_span(rows)
        for v in range(64):
            assert gf2.in_span(v, basis) == (v in span)


def test_rank():
    assert gf2.rank([0b001, 0b010, 0b011]) == 2
    assert gf2.rank([]) == 0
    assert gf2.rank([0]) == 0
    assert gf2.rank([0b100, 0b010, 0b001]) == 3


def test_rref_canonical_under_row_ops():
    rng = random.Random(13)
    for _ in range(100):
        rows = [rng.getrandbits(8) for _ in range(4)]
        mixed = rows[:]
        # random invertible row operations preserve the rowspan
        for _ in range(10):
            i, j = rng.randrange(4), rng.randrange(4)
            if i != j:
                mixed[i] ^= mixed[j]
        rng.shuffle(mixed)
        assert gf2.rref(rows) == gf2.rref(mixed)


def test_solve_combination_recovers_target():
    rng = random.Random(17)
    for _ in range(200):
        n_cols = 8
        rows = [rng.getrandbits(n_cols) for _ in range(5)]
        picks = [rng.randrange(2) for _ in range(5)]
        target = 0
        for c, r in zip(picks, rows):
            if c:
                target ^= r
        coeffs = gf2.solve_combination(rows, target, n_cols)
        assert coeffs is not None
        built = 0
        for c, r in zip(coeffs, rows):
            if c:
                built ^= r
        assert built == target


def test_solve_combination_none_outside_span():
    rows = [0b0011, 0b0101]
    assert gf2.solve_combination(rows, 0b1000, 4) is None
    assert gf2.solve_combination(rows, 0b0110, 4) == (1, 1)


def test_random_full_rank():
    rng = random.Random(19)
    for _ in range(50):
        rows = gf2.random_full_rank(3, 5, rng)
        assert gf2.rank(rows) == 3
    with pytest.raises(ValueError):
        gf2.random_full_rank(6, 5, rng)


def test_iter_subspaces_counts():
    assert sum(1 for _ in gf2.iter_subspaces(3, 2)) == gaussian_binomial(3, 2) == 7
    assert sum(1 for _ in gf2.iter_subspaces(4, 2)) == gaussian_binomial(4, 2) == 35
    assert sum(1 for _ in gf2.iter_subspaces(6, 4)) == gaussian_binomial(6, 4) == 651
    assert list(gf2.iter_subspaces(4, 0)) == [()]


def test_iter_subspaces_distinct_and_full_rank():
    seen = set()
    for rows in gf2.iter_subspaces(5, 3):
        assert gf2.rank(rows) == 3
        span = frozenset(brute_span(rows))
        assert span not in seen
        seen.add(span)
    assert len(seen) == gaussian_binomial(5, 3)


def test_span_elements():
    rows = (0b011, 0b101)
    assert sorted(gf2.span_elements(rows)) == sorted(brute_span(rows))
    assert gf2.span_elements(()) == [0]
