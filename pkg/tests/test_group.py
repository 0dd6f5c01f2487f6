import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bicoset.errors import DomainError, ResourceError
from bicoset.group import (IDENTITY, PSL2, canon_array, enumerate_group, group_order, inv_array,
                           mul_array)

PRIMES = [5, 7, 11, 13, 29]


def test_canonicalize_examples():
    G = PSL2(5)
    assert G.canonicalize(4, 0, 0, 4) == IDENTITY
    assert G.canonicalize(1, 0, 0, 1) == IDENTITY
    assert G.canonicalize(3, 1, 0, 2) == (2, 4, 0, 3)
    with pytest.raises(DomainError):
        G.canonicalize(1, 1, 1, 1)


def test_mul_inv_examples():
    G = PSL2(5)
    assert G.mul(G.unipotent(3), G.unipotent(4)) == G.unipotent(2)
    assert G.inv(G.unipotent(2)) == G.unipotent(-2)
    assert G.unipotent(0) == IDENTITY


@pytest.mark.parametrize("p", PRIMES)
def test_unipotent_addition(p):
    G = PSL2(p)
    r = np.random.default_rng(p)
    for x, y in r.integers(0, p, size=(100, 2)).tolist():
        assert G.mul(G.unipotent(x), G.unipotent(y)) == G.unipotent(x + y)


def test_trace_examples():
    G = PSL2(5)
    assert G.trace_pm(IDENTITY) == 2 and G.trace_is_pm2(IDENTITY)
    assert G.trace_pm((2, 4, 2, 2)) == 1
    assert not G.trace_is_pm2((2, 4, 2, 2))
    for p in PRIMES:
        H = PSL2(p)
        assert all(H.trace_is_pm2(H.unipotent(x)) for x in range(1, p))


def test_element_order_examples():
    G = PSL2(5)
    assert G.element_order(IDENTITY) == 1
    assert G.element_order(G.unipotent(1)) == 5
    assert G.element_order((2, 4, 2, 2)) == 3
    assert PSL2(29).element_order(PSL2(29).unipotent(1)) == 29


@pytest.mark.parametrize("p,n", [(5, 60), (7, 168), (11, 660), (29, 12180)])
def test_enumeration_size(p, n):
    idx = enumerate_group(p)
    assert len(idx) == n == group_order(p)
    keys = idx.keys
    assert np.all(np.diff(keys) > 0)  # sorted and distinct
    G = PSL2(p)
    sample = idx.elements[np.random.default_rng(0).integers(0, n, 200)]
    for row in sample.tolist():
        a, b, c, d = row
        assert (a * d - b * c) % p == 1
        assert G.canonicalize(*row) == tuple(row)


def test_enumeration_cap():
    with pytest.raises(ResourceError):
        enumerate_group(29, cap=1000)


def test_index_lookup_roundtrip(index11):
    G = index11.group
    r = np.random.default_rng(1)
    for _ in range(50):
        g = G.random_element(r)
        assert index11.element(index11.index(g)) == g
    with pytest.raises(KeyError):
        index11.index((0, 0, 0, 0))


def test_permutations(index11):
    G = index11.group
    s = G.random_element(np.random.default_rng(3))
    L, R, I = index11.left_perm(s), index11.right_perm(s), index11.inverse_perm()
    n = len(index11)
    for perm in (L, R, I):
        assert np.array_equal(np.sort(perm), np.arange(n))
    for i in (0, 17, 400):
        g = index11.element(i)
        assert index11.element(L[i]) == G.mul(s, g)
        assert index11.element(R[i]) == G.mul(g, s)
        assert index11.element(I[i]) == G.inv(g)


def test_vectorized_matches_scalar(index11):
    G = index11.group
    E = index11.elements
    r = np.random.default_rng(5)
    i, j = r.integers(0, len(E), 100), r.integers(0, len(E), 100)
    M = mul_array(E[i], E[j], 11)
    V = inv_array(E[i], 11)
    for k in range(100):
        g, h = tuple(E[i[k]].tolist()), tuple(E[j[k]].tolist())
        assert tuple(M[k].tolist()) == G.mul(g, h)
        assert tuple(V[k].tolist()) == G.inv(g)
    neg = (11 - E[i]) % 11
    assert np.array_equal(canon_array(neg, 11), E[i])


@pytest.mark.parametrize("p", PRIMES)
def test_group_laws_random_triples(p):
    G = PSL2(p)
    r = np.random.default_rng(p)
    for _ in range(1000):
        g, h, k = (G.random_element(r) for _ in range(3))
        assert G.mul(G.mul(g, h), k) == G.mul(g, G.mul(h, k))
        assert G.mul(g, IDENTITY) == g == G.mul(IDENTITY, g)
        assert G.mul(g, G.inv(g)) == IDENTITY


@settings(max_examples=200)
@given(st.sampled_from(PRIMES), st.integers(0, 2**32))
def test_canonicalize_sign_invariant(p, seed):
    G = PSL2(p)
    g = G.random_element(np.random.default_rng(seed))
    assert G.canonicalize(*g) == g
    assert G.canonicalize(*G.neg(g)) == g
    assert g <= tuple(G.neg(g))


@settings(max_examples=200)
@given(st.sampled_from(PRIMES), st.integers(0, 2**32), st.integers(0, 10**6))
def test_trace_class_invariants(p, seed, x):
    G = PSL2(p)
    r = np.random.default_rng(seed)
    g, h = G.random_element(r), G.random_element(r)
    assert G.trace_pm(G.mul(g, h)) == G.trace_pm(G.mul(h, g))
    u = G.unipotent(x)
    assert G.trace_pm(G.mul(G.mul(u, g), G.inv(u))) == G.trace_pm(g)


@settings(max_examples=100)
@given(st.sampled_from(PRIMES), st.integers(0, 2**32))
def test_order_power_is_identity(p, seed):
    G = PSL2(p)
    g = G.random_element(np.random.default_rng(seed))
    n = G.element_order(g)
    assert G.power(g, n) == IDENTITY
    assert n == 1 or G.power(g, n - 1) != IDENTITY
    assert group_order(p) % n == 0
    assert G.power(g, -1) == G.inv(g)
