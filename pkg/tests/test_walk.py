import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bicoset.errors import DomainError, ResourceError
from bicoset.group import IDENTITY, PSL2, enumerate_group
from bicoset.walk import (Distribution, Stepper, build_subgroup_family, commutator_law_check, convolve_step,
                          coset_partition, custom_family, flattening_curve, max_coset_mass, point_mass,
                          symmetrize, uniform, uniform_on, walk_power)

from conftest import cert_for


def test_uniform_on(index5):
    cert = cert_for(5, 3)
    chi = uniform_on(cert.S0, index5)
    assert chi.l2() == pytest.approx(len(cert.S0) ** -0.5)
    assert chi.total() == pytest.approx(1, abs=1e-12)
    doubled = uniform_on([IDENTITY, IDENTITY, cert.S0[0]], index5)
    assert doubled[IDENTITY] == pytest.approx(2 / 3)
    with pytest.raises(DomainError):
        uniform_on([], index5)


def test_convolution_identity_and_step(index5):
    cert = cert_for(5, 3)
    delta = point_mass(IDENTITY, index5)
    chi = convolve_step(delta, cert.S0)
    assert np.allclose(chi.mass, uniform_on(cert.S0, index5).mass)
    chi2 = convolve_step(chi, cert.S0)
    assert chi2.l2() < chi.l2()
    assert chi2.total() == pytest.approx(1, abs=1e-12)


def test_convolution_definition(index11, rng):
    # nu(g) = mean_s mu(s^-1 g)
    G = index11.group
    mu = Distribution(index11, rng.random(len(index11)))
    mu.mass /= mu.mass.sum()
    gen = [G.random_element(rng) for _ in range(3)]
    nu = convolve_step(mu, gen)
    for i in (0, 9, 321):
        g = index11.element(i)
        expect = np.mean([mu[G.mul(G.inv(s), g)] for s in gen])
        assert nu.mass[i] == pytest.approx(expect, abs=1e-15)


def test_uniform_fixed_point(index11):
    u = uniform(index11)
    cert = cert_for(11, 3)
    assert np.abs(convolve_step(u, cert.S0).mass - u.mass).max() < 1e-12


def test_symmetrize(index11, rng):
    G = index11.group
    g = G.random_element(rng)
    s = symmetrize(point_mass(g, index11))
    assert s[g] == pytest.approx(0.5) and s[G.inv(g)] == pytest.approx(0.5)
    mu = Distribution(index11, rng.random(len(index11)))
    mu.mass /= mu.mass.sum()
    sym = symmetrize(mu)
    assert np.allclose(symmetrize(sym).mass, sym.mass)
    assert sym.l2() <= mu.l2() + 1e-15


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 12))
def test_walk_invariants(seed, steps):
    index = enumerate_group(11)
    cert = cert_for(11, 3)
    H = custom_family(cert.H1.elements, index)
    r = np.random.default_rng(seed)
    mu = Distribution(index, r.random(len(index)) ** 4)
    mu.mass /= mu.mass.sum()
    step = Stepper(index, cert.S0)
    prev_norm = mu.l2()
    prev_mass = max_coset_mass(mu, H).value
    for _ in range(steps):
        mu = step(mu)
        assert mu.mass.min() >= 0
        assert abs(mu.total() - 1) < 1e-12
        assert mu.l2() <= prev_norm + 1e-12
        m = max_coset_mass(mu, H).value
        assert m <= prev_mass + 1e-12
        prev_norm, prev_mass = mu.l2(), m


def test_flattening_p29():
    cert = cert_for(29, 3)
    curve = flattening_curve(cert, 40)
    norms = [n for _, n, _ in curve.rows]
    assert norms[0] == pytest.approx(0.5)
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))
    assert curve.mix_step == 7  # frozen
    assert curve.rows[-1][2] == pytest.approx(1, abs=1e-6)
    buf = io.StringIO()
    curve.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "l,l2_norm,uniform_ratio" and len(lines) == 41


def test_flattening_cap():
    with pytest.raises(ResourceError):
        flattening_curve(cert_for(29, 3), 3, cap=1000)


@pytest.mark.parametrize("p,kind,count,order", [
    (5, "borel", 6, 10), (5, "split_torus_normalizer", 5, 4), (5, "nonsplit_torus_normalizer", 10, 6),
    (11, "borel", 12, 55), (11, "split_torus_normalizer", 66, 10), (11, "nonsplit_torus_normalizer", 55, 12),
    (29, "borel", 30, 406),
])
def test_subgroup_families(p, kind, count, order):
    fam = build_subgroup_family(kind, p)
    assert len(fam.members) == count
    assert {len(m) for m in fam.members} == {order}
    if kind != "borel" and p > 5:
        # self-normalizing, so |G|/|N| conjugates; at p = 5 the split one is V4 inside A4
        assert count == p * (p * p - 1) // 2 // order
    G = PSL2(p)
    r = np.random.default_rng(p)
    for k in r.integers(0, count, 4).tolist():
        els = fam.elements(k)
        S = set(els)
        assert IDENTITY in S
        for _ in range(50):
            a, b = els[r.integers(len(els))], els[r.integers(len(els))]
            assert G.mul(a, G.inv(b)) in S


def test_family_errors():
    with pytest.raises(DomainError):
        build_subgroup_family("exceptional", 5)


def test_coset_mass_examples(index11, rng):
    fam = build_subgroup_family("borel", 11, index11)
    u = max_coset_mass(uniform(index11), fam)
    assert u.value == pytest.approx(55 / 660)
    g = index11.group.random_element(rng)
    pm = max_coset_mass(point_mass(g, index11), fam)
    assert pm.value == pytest.approx(1)
    member = fam.members[pm.member]
    key = index11.index(pm.coset_key)
    labels = coset_partition(index11, member)
    assert labels[key] == labels[index11.index(g)]


def test_coset_partition_counts(index11):
    fam = build_subgroup_family("nonsplit_torus_normalizer", 11, index11)
    labels = coset_partition(index11, fam.members[0])
    assert np.bincount(labels).tolist() == [12] * 55


def test_borel_coset_mass_p29():
    cert = cert_for(29, 3)
    index = enumerate_group(29)
    mu = walk_power(cert, 10, index)
    rep = max_coset_mass(mu, build_subgroup_family("borel", 29, index))
    assert rep.value < 1
    assert rep.value <= rep.pointwise_bound
    assert rep.subgroup_order == 406
    assert rep.value == pytest.approx(0.033802032470703125)  # frozen


def test_commutator_law():
    G5 = PSL2(5)
    ok, witness = commutator_law_check(G5, list(enumerate_group(5)), 1000)
    assert not ok
    a, b, c, d = witness
    assert G5.commutator(G5.commutator(a, b), G5.commutator(c, d)) != IDENTITY
    G11 = PSL2(11)
    for kind in ("borel", "nonsplit_torus_normalizer"):
        fam = build_subgroup_family(kind, 11)
        assert commutator_law_check(G11, fam.elements(0), 1000)[0]
