"""The bipartite coset graph on G/H1 + G/H2 and its girth.

Cosets are named by their lexicographically smallest element, so the
neighbour oracle needs nothing beyond group multiplication and the girth
search can run without enumerating G.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceError
from .group import GroupIndex, IDENTITY, ProjMat, enumerate_group
from .subgroups import CyclicSubgroup, PairCertificate, product_free_depth

DEFAULT_BFS_CAP = 10**8
DEFAULT_GRAPH_CAP = 4 * 10**6


@dataclass(frozen=True, order=True)
class CosetId:
    side: str  # "L" for G/H1, "R" for G/H2
    key: ProjMat


def coset_key(g: ProjMat, H: CyclicSubgroup) -> ProjMat:
    G = H.group
    return min(G.mul(g, h) for h in H.elements)


def neighbors(v: CosetId, cert: PairCertificate) -> list[CosetId]:
    """The d cosets on the other side meeting ``v``."""
    G = cert.group
    if v.side == "L":
        return [CosetId("R", coset_key(G.mul(v.key, h), cert.H2)) for h in cert.H1.elements]
    return [CosetId("L", coset_key(G.mul(v.key, h), cert.H1)) for h in cert.H2.elements]


def base_vertex(cert: PairCertificate) -> CosetId:
    return CosetId("L", coset_key(IDENTITY, cert.H1))


@dataclass
class BipartiteGraph:
    """Biregular bipartite graph in CSR form, left side first."""

    left_count: int
    right_count: int
    left_indptr: np.ndarray
    left_indices: np.ndarray
    right_indptr: np.ndarray
    right_indices: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, left_count: int, right_count: int, edges, meta=None) -> "BipartiteGraph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        lo = np.lexsort((edges[:, 1], edges[:, 0]))
        ro = np.lexsort((edges[:, 0], edges[:, 1]))
        lptr = np.concatenate([[0], np.cumsum(np.bincount(edges[:, 0], minlength=left_count))])
        rptr = np.concatenate([[0], np.cumsum(np.bincount(edges[:, 1], minlength=right_count))])
        return cls(left_count, right_count, lptr, edges[lo, 1], rptr, edges[ro, 0], dict(meta or {}))

    @property
    def edge_count(self) -> int:
        return len(self.left_indices)

    @property
    def vertex_count(self) -> int:
        return self.left_count + self.right_count

    def left_degrees(self) -> np.ndarray:
        return np.diff(self.left_indptr)

    def right_degrees(self) -> np.ndarray:
        return np.diff(self.right_indptr)

    def left_neighbors(self, i: int) -> np.ndarray:
        return self.left_indices[self.left_indptr[i]:self.left_indptr[i + 1]]

    def right_neighbors(self, j: int) -> np.ndarray:
        return self.right_indices[self.right_indptr[j]:self.right_indptr[j + 1]]

    def edges(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.left_count), self.left_degrees())
        return np.stack([rows, self.left_indices], axis=-1)

    def adjacency_lists(self) -> list[list[int]]:
        """Neighbour lists on vertices 0..n-1, right vertex j numbered left_count + j."""
        nl = self.left_count
        adj = [(self.left_neighbors(i) + nl).tolist() for i in range(nl)]
        adj += [self.right_neighbors(j).tolist() for j in range(self.right_count)]
        return adj

    def write_edge_list(self, fh) -> None:
        m = self.meta
        fh.write(f"# bipartite p={m.get('p')} d={m.get('d')} x={m.get('x')} "
                 f"left={self.left_count} right={self.right_count}\n")
        for i, j in self.edges().tolist():
            fh.write(f"L{i} R{j}\n")


def complete_bipartite(n: int) -> BipartiteGraph:
    return BipartiteGraph.from_edges(n, n, [(i, j) for i in range(n) for j in range(n)])


def even_cycle(n: int) -> BipartiteGraph:
    """C_2n: left i meets right i and right i-1."""
    return BipartiteGraph.from_edges(n, n, [(i, j % n) for i in range(n) for j in (i, i - 1)])


def coset_labels(index: GroupIndex, H: CyclicSubgroup) -> tuple[np.ndarray, np.ndarray]:
    """(label per group element, key index per coset) for the cosets gH.

    The key index is the smallest index in the coset, i.e. its
    lexicographically minimal element.
    """
    keys = None
    for h in H.elements:
        perm = index.right_perm(h)
        keys = perm if keys is None else np.minimum(keys, perm)
    reps, labels = np.unique(keys, return_inverse=True)
    return labels, reps


def build_graph(cert: PairCertificate, index_cap: int = DEFAULT_GRAPH_CAP,
                index: GroupIndex | None = None) -> BipartiteGraph:
    """Explicit CSR graph: each g in G contributes the edge (gH1, gH2)."""
    n = cert.group.order
    if 2 * n // cert.d > index_cap:
        raise ResourceError(f"explicit graph needs {2 * n // cert.d} vertices, cap is {index_cap};"
                            f" use the implicit girth search instead")
    index = index or enumerate_group(cert.p)
    left, lreps = coset_labels(index, cert.H1)
    right, rreps = coset_labels(index, cert.H2)
    g = BipartiteGraph.from_edges(len(lreps), len(rreps), np.stack([left, right], axis=-1),
                                  {"p": cert.p, "d": cert.d, "x": cert.x})
    g.meta["left_keys"] = lreps
    g.meta["right_keys"] = rreps
    return g


def girth(cert: PairCertificate, bfs_cap: int = DEFAULT_BFS_CAP) -> int:
    """Exact girth from one BFS around the base coset H1.

    G acts transitively on each side and every cycle has a left vertex, so
    the shortest cycle through H1 is a shortest cycle overall.  A non-tree
    edge between different root branches closes a cycle through the root.
    """
    root = base_vertex(cert)
    # vertex -> (depth, branch, parent)
    info = {root: (0, -1, None)}
    frontier = [root]
    depth = 0
    while frontier:
        best = None
        nxt = []
        for u in frontier:
            du, bu, pu = info[u]
            for j, v in enumerate(neighbors(u, cert)):
                if v == pu:
                    continue
                seen = info.get(v)
                if seen is None:
                    info[v] = (du + 1, j if u == root else bu, u)
                    nxt.append(v)
                    continue
                dv, bv, _ = seen
                if bv != bu:
                    length = du + dv + 1
                else:
                    length = du + dv + 1 - 2 * _lca_depth(info, u, v)
                best = length if best is None else min(best, length)
        if best is not None:
            return best
        depth += 1
        if len(info) > bfs_cap:
            raise ResourceError(f"BFS visited {len(info)} cosets, cap is {bfs_cap}",
                                bound=2 * depth + 2)
        frontier = nxt
    raise ResourceError("component of the base coset is a tree", bound=None)


def _lca_depth(info, u, v) -> int:
    anc = set()
    while u is not None:
        anc.add(u)
        u = info[u][2]
    while v not in anc:
        v = info[v][2]
    return info[v][0]


def girth_bruteforce(graph: BipartiteGraph) -> int | None:
    """Girth by BFS from every vertex; no symmetry assumed."""
    adj = graph.adjacency_lists()
    best = None
    for s in range(len(adj)):
        dist = {s: 0}
        parent = {s: -1}
        q = deque([s])
        while q:
            u = q.popleft()
            if best is not None and 2 * dist[u] >= best:
                break
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    q.append(v)
                elif parent[u] != v:
                    c = dist[u] + dist[v] + 1
                    if best is None or c < best:
                        best = c
    return best


def girth_lower_bound_algebraic(cert: PairCertificate, L_max: int = 16, work_cap: int | None = None) -> int:
    """2 L + 2 with L the product-free depth; never exceeds the girth."""
    kw = {} if work_cap is None else {"work_cap": work_cap}
    return 2 * product_free_depth(cert, L_max, **kw) + 2
