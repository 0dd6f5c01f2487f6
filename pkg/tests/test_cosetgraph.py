import io

import networkx as nx
import numpy as np
import pytest

from bicoset.cosetgraph import (BipartiteGraph, CosetId, base_vertex, build_graph, complete_bipartite,
                                coset_key, even_cycle, girth, girth_bruteforce, girth_lower_bound_algebraic,
                                neighbors)
from bicoset.errors import ResourceError
from bicoset.group import IDENTITY, enumerate_group
from bicoset.subgroups import product_free_depth

from conftest import cert_for

INSTANCES = [(5, 3), (11, 3), (17, 3), (29, 3), (7, 4), (23, 4)]
# frozen girths for the first x found by the scan search (x = 1 in every case)
GIRTH = {(5, 3): 4, (11, 3): 10, (17, 3): 8, (29, 3): 14, (7, 4): 6, (23, 4): 8, (53, 3): 18}


def test_coset_key_well_defined(rng):
    cert = cert_for(29, 3)
    G = cert.group
    for h in cert.H1.elements:
        assert coset_key(h, cert.H1) == coset_key(IDENTITY, cert.H1) == IDENTITY
    for _ in range(100):
        g = G.random_element(rng)
        k = coset_key(g, cert.H1)
        assert all(coset_key(G.mul(g, h), cert.H1) == k for h in cert.H1.elements)
        assert k in {G.mul(g, h) for h in cert.H1.elements}


def test_left_key_count_p5(index5):
    cert = cert_for(5, 3)
    assert len({coset_key(g, cert.H1) for g in index5}) == 20


def test_neighbors_regular_and_symmetric(rng):
    cert = cert_for(29, 3)
    G = cert.group
    root = base_vertex(cert)
    assert CosetId("R", coset_key(IDENTITY, cert.H2)) in neighbors(root, cert)
    for _ in range(100):
        g = G.random_element(rng)
        for v in (CosetId("L", coset_key(g, cert.H1)), CosetId("R", coset_key(g, cert.H2))):
            nb = neighbors(v, cert)
            assert len(set(nb)) == cert.d
            assert all(v in neighbors(u, cert) for u in nb)


def test_edge_criterion(rng):
    cert = cert_for(11, 3)
    G = cert.group
    S = set(cert.S)
    for _ in range(200):
        g1, g2 = G.random_element(rng), G.random_element(rng)
        if rng.random() < 0.5:  # force plenty of adjacent pairs
            g2 = G.mul(g1, cert.S[rng.integers(len(cert.S))])
        left = {G.mul(g1, h) for h in cert.H1.elements}
        right = {G.mul(g2, h) for h in cert.H2.elements}
        assert bool(left & right) == (G.mul(G.inv(g1), g2) in S)


@pytest.mark.parametrize("p,d", [(5, 3), (11, 3), (7, 4)])
def test_build_graph_shape(p, d):
    cert = cert_for(p, d)
    g = build_graph(cert)
    n = p * (p * p - 1) // 2 // d
    assert g.left_count == g.right_count == n
    assert g.edge_count == n * d
    assert set(g.left_degrees().tolist()) == {d} == set(g.right_degrees().tolist())
    e = {tuple(x) for x in g.edges().tolist()}
    assert len(e) == g.edge_count
    assert {(i, j) for j in range(n) for i in g.right_neighbors(j).tolist()} == e


def test_build_graph_keys_match_oracle():
    cert = cert_for(11, 3)
    idx = enumerate_group(11)
    g = build_graph(cert, index=idx)
    lkeys = [idx.element(i) for i in g.meta["left_keys"]]
    rkeys = [idx.element(i) for i in g.meta["right_keys"]]
    rpos = {k: j for j, k in enumerate(rkeys)}
    for i in (0, 5, 100):
        oracle = {rpos[v.key] for v in neighbors(CosetId("L", lkeys[i]), cert)}
        assert oracle == set(g.left_neighbors(i).tolist())


def test_build_graph_cap():
    with pytest.raises(ResourceError, match="implicit"):
        build_graph(cert_for(29, 3), index_cap=100)


def test_edge_list_export():
    g = build_graph(cert_for(5, 3))
    buf = io.StringIO()
    g.write_edge_list(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# bipartite p=5 d=3 x=1 left=20 right=20"
    assert len(lines) == 61
    assert all(line.startswith("L") and " R" in line for line in lines[1:])


def test_fixtures():
    assert girth_bruteforce(complete_bipartite(3)) == 4
    assert girth_bruteforce(even_cycle(7)) == 14
    assert girth_bruteforce(BipartiteGraph.from_edges(2, 2, [(0, 0), (1, 1), (0, 1)])) is None


@pytest.mark.parametrize("p,d", INSTANCES + [(53, 3)])
def test_girth_frozen_and_depth_bound(p, d):
    cert = cert_for(p, d)
    assert cert.x == 1
    gval = girth(cert)
    assert gval == GIRTH[(p, d)]
    assert gval % 2 == 0 and gval >= 4
    L = product_free_depth(cert, 16)
    assert gval > 2 * L
    assert girth_lower_bound_algebraic(cert) <= gval


@pytest.mark.parametrize("p,d", [(5, 3), (11, 3), (7, 4)])
def test_girth_matches_independent_oracles(p, d):
    cert = cert_for(p, d)
    graph = build_graph(cert)
    bf = girth_bruteforce(graph)
    nxg = nx.Graph()
    nxg.add_edges_from((f"L{i}", f"R{j}") for i, j in graph.edges().tolist())
    assert girth(cert) == bf == nx.girth(nxg)


def test_girth_cap_reports_bound():
    with pytest.raises(ResourceError) as exc:
        girth(cert_for(29, 3), bfs_cap=50)
    assert exc.value.bound is not None and exc.value.bound <= GIRTH[(29, 3)]


def test_translation_invariance_p5(rng, index5):
    # relabel cosets by a left translation and compare neighbourhood fingerprints
    cert = cert_for(5, 3)
    G = cert.group
    t = G.random_element(rng)

    def fingerprint(shift):
        out = []
        for g in index5:
            v = CosetId("L", coset_key(G.mul(shift, g), cert.H1))
            nb = neighbors(v, cert)
            out.append((len(nb), sorted(len(neighbors(u, cert)) for u in nb)))
        return sorted(out)

    assert fingerprint(IDENTITY) == fingerprint(t)
    keys = {coset_key(g, cert.H1) for g in index5}
    moved = {coset_key(G.mul(t, g), cert.H1) for g in keys}
    assert moved == keys


def test_translation_is_automorphism_p5(rng, index5):
    cert = cert_for(5, 3)
    G = cert.group
    graph = build_graph(cert, index=index5)
    lkeys = [index5.element(i) for i in graph.meta["left_keys"]]
    rkeys = [index5.element(i) for i in graph.meta["right_keys"]]
    lpos = {k: i for i, k in enumerate(lkeys)}
    rpos = {k: j for j, k in enumerate(rkeys)}
    edges = {tuple(e) for e in graph.edges().tolist()}
    for _ in range(5):
        t = G.random_element(rng)
        moved = {(lpos[coset_key(G.mul(t, lkeys[i]), cert.H1)], rpos[coset_key(G.mul(t, rkeys[j]), cert.H2)])
                 for i, j in edges}
        assert moved == edges
