"""Norms of averaging operators restricted to mean-zero functions.

Two operators are involved: the normalized adjacency operator of the
bipartite coset graph, and the (generally non-symmetric) Cayley averaging
operator ``A(G; S) f(g) = mean_{s in S} f(s g)``.  Both preserve the
mean-zero subspace, so the restricted norm is the top singular value of
``A P`` with ``P`` the projection onto that subspace.  We compute it either
densely (small dimension) or by power iteration on ``A^T A`` with
re-projection every step.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .cosetgraph import BipartiteGraph, build_graph
from .errors import DomainError, NonConvergenceError, ResourceError
from .group import GroupIndex, enumerate_group
from .subgroups import PairCertificate

DEFAULT_DENSE_CAP = 4000
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200_000
_STABLE_STEPS = 10


def project_l20(v: np.ndarray, parts) -> np.ndarray:
    """Subtract the mean on each consecutive block of sizes ``parts``."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != sum(parts):
        raise DomainError(f"vector of length {v.shape[0]} does not match parts {tuple(parts)}")
    out = v.copy()
    start = 0
    for n in parts:
        block = out[start:start + n]
        block -= block.mean(axis=0)
        start += n
    return out


class BipartiteOperator:
    """Normalized adjacency of a bipartite graph; left vertices come first."""

    def __init__(self, graph: BipartiteGraph):
        self.graph = graph
        nl, nr = graph.left_count, graph.right_count
        e = graph.edges()
        dl = graph.left_degrees()[e[:, 0]].astype(float)
        dr = graph.right_degrees()[e[:, 1]].astype(float)
        rows = np.concatenate([e[:, 0], nl + e[:, 1]])
        cols = np.concatenate([nl + e[:, 1], e[:, 0]])
        vals = np.concatenate([1.0 / dl, 1.0 / dr])
        self.matrix = sp.csr_matrix((vals, (rows, cols)), shape=(nl + nr, nl + nr))
        self.matrix_t = self.matrix.T.tocsr()
        self.parts = (nl, nr)

    @property
    def dim(self) -> int:
        return sum(self.parts)

    @property
    def dense_size(self) -> int:
        return max(self.parts)

    def dense_blocks(self):
        """(left <- right, right <- left) blocks; the norm is the larger one on l2_0."""
        nl = self.parts[0]
        A = self.matrix
        degs = np.concatenate([self.graph.left_degrees(), self.graph.right_degrees()])
        if degs.min() == degs.max():
            # regular: the blocks are transposes and commute with the projections
            return [A[:nl, nl:]]
        return [A[:nl, nl:], A[nl:, :nl]]


class CayleyOperator:
    """f -> mean over the multiset S of f(s g), on dense vectors over a GroupIndex."""

    def __init__(self, index: GroupIndex, S):
        self.index = index
        self.S = list(S)
        if not self.S:
            raise DomainError("empty generating multiset")
        n = len(index)
        rows = np.tile(np.arange(n), len(self.S))
        cols = np.concatenate([index.left_perm(s) for s in self.S])
        vals = np.full(len(rows), 1.0 / len(self.S))
        # duplicate (row, col) pairs are summed, which keeps multiplicities
        self.matrix = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        self.matrix_t = self.matrix.T.tocsr()
        self.parts = (n,)

    @property
    def dim(self) -> int:
        return len(self.index)

    dense_size = dim

    def dense_blocks(self):
        return [self.matrix]


@dataclass
class NormResult:
    value: float
    method: str
    iterations: int
    residual: float


def _dense_norm(op) -> NormResult:
    best = 0.0
    for block in op.dense_blocks():
        B = block.toarray()
        BP = B - B.mean(axis=1, keepdims=True)  # right-multiply by the projection
        best = max(best, float(scipy.linalg.svdvals(BP, check_finite=False)[0]))
    return NormResult(best, "dense", 0, 0.0)


def _arpack_norm(op, tol: float, max_iter: int, seed: int) -> NormResult:
    """Largest eigenvalue of P A^T A P by implicitly restarted Lanczos."""
    A, At, parts = op.matrix, op.matrix_t, op.parts

    def mv(v):
        v = np.asarray(v).ravel()
        return project_l20(At @ (A @ project_l20(v, parts)), parts)

    L = sla.LinearOperator((op.dim, op.dim), matvec=mv, dtype=float)
    v0 = project_l20(np.random.default_rng(seed).standard_normal(op.dim), parts)
    if np.linalg.norm(mv(v0)) <= 1e-14 * np.linalg.norm(v0):
        # a random mean-zero vector is annihilated: the operator vanishes on l2_0
        return NormResult(0.0, "arpack", 0, 0.0)
    try:
        vals, vecs = sla.eigsh(L, k=1, which="LA", tol=tol, maxiter=max_iter, v0=v0)
    except sla.ArpackNoConvergence as exc:
        raise NonConvergenceError("ARPACK did not converge", float("nan"), float("nan"), max_iter) from exc
    theta = float(vals[0])
    residual = float(np.linalg.norm(mv(vecs[:, 0]) - theta * vecs[:, 0]))
    return NormResult(math.sqrt(max(theta, 0.0)), "arpack", 0, residual)


def _power_norm(op, tol: float, max_iter: int, seed: int) -> NormResult:
    A, At, parts = op.matrix, op.matrix_t, op.parts
    for attempt in range(3):
        rng = np.random.default_rng(seed + attempt)
        v = project_l20(rng.standard_normal(op.dim), parts)
        v /= np.linalg.norm(v)
        theta_prev = None
        stable = 0
        for it in range(1, max_iter + 1):
            w = project_l20(At @ (A @ v), parts)
            theta = float(v @ w)
            nw = float(np.linalg.norm(w))
            if nw == 0.0:
                break
            if theta_prev is not None and abs(theta - theta_prev) <= tol * max(abs(theta), 1e-300):
                stable += 1
            else:
                stable = 0
            theta_prev = theta
            if stable >= _STABLE_STEPS:
                residual = float(np.linalg.norm(w - theta * v))
                return NormResult(math.sqrt(max(theta, 0.0)), "power", it, residual)
            v = w / nw
        else:
            residual = float(np.linalg.norm(w - theta * v))
            raise NonConvergenceError(f"power iteration did not settle in {max_iter} steps",
                                      math.sqrt(max(theta, 0.0)), residual, max_iter)
        # the start vector fell into the kernel; try another seed
    return NormResult(0.0, "power", 0, 0.0)


def operator_norm_l20(op, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                      method: str = "auto", dense_cap: int = DEFAULT_DENSE_CAP,
                      seed: int = 0) -> NormResult:
    """Norm of the operator on mean-zero functions.

    ``method`` is "dense", "power", "arpack" or "auto" (dense while the
    matrices handed to LAPACK are at most ``dense_cap`` on a side).
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if method == "auto":
        method = "dense" if op.dense_size <= dense_cap else "power"
    if method == "dense":
        if op.dense_size > dense_cap:
            raise ResourceError(f"dense size {op.dense_size} exceeds the dense cap {dense_cap}")
        return _dense_norm(op)
    if method == "power":
        return _power_norm(op, tol, max_iter, seed)
    if method == "arpack":
        return _arpack_norm(op, tol, max_iter, seed)
    raise DomainError(f"unknown method {method!r}")


# -- the reduction chain -----------------------------------------------------

@dataclass
class SpectralReport:
    norm_bipartite_a0: float
    norm_cayley_s_a0: float
    norm_cayley_s0_a0: float
    method: str
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return asdict(self)


class SpectralContext:
    """Lazily built operators for one certificate, shared by the checks below."""

    def __init__(self, cert: PairCertificate, index: GroupIndex | None = None,
                 graph: BipartiteGraph | None = None, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, dense_cap: int = DEFAULT_DENSE_CAP,
                 method: str = "auto", seed: int = 0):
        self.cert = cert
        self._index = index
        self._graph = graph
        self.kw = dict(tol=tol, max_iter=max_iter, dense_cap=dense_cap, method=method, seed=seed)
        self._norms: dict[str, NormResult] = {}

    @property
    def index(self) -> GroupIndex:
        if self._index is None:
            self._index = enumerate_group(self.cert.p)
        return self._index

    @property
    def graph(self) -> BipartiteGraph:
        if self._graph is None:
            self._graph = build_graph(self.cert, index=self.index)
        return self._graph

    def norm(self, which: str) -> NormResult:
        if which not in self._norms:
            if which == "bipartite":
                op = BipartiteOperator(self.graph)
            elif which == "S":
                op = CayleyOperator(self.index, self.cert.S)
            elif which == "S0":
                op = CayleyOperator(self.index, self.cert.S0)
            else:
                raise DomainError(which)
            self._norms[which] = operator_norm_l20(op, **self.kw)
        return self._norms[which]

    def report(self) -> SpectralReport:
        rs = [self.norm(k) for k in ("bipartite", "S", "S0")]
        methods = {r.method for r in rs}
        return SpectralReport(rs[0].value, rs[1].value, rs[2].value,
                              methods.pop() if len(methods) == 1 else "mixed",
                              sum(r.iterations for r in rs), max(r.residual for r in rs))


@dataclass
class InequalityCheck:
    ok: bool
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def verify_coset2cayley(ctx: SpectralContext, tol: float = 1e-9) -> InequalityCheck:
    """||A0(G; H1, H2)||^2 <= ||A0(G; S)||."""
    lhs = ctx.norm("bipartite").value ** 2
    rhs = ctx.norm("S").value
    return InequalityCheck(lhs <= rhs + tol, lhs, rhs)


def convexity_weights(d: int) -> tuple[float, float]:
    return (d - 1) ** 2 / d**2, (2 * d - 1) / d**2


def convexity_bound(ctx: SpectralContext, tol: float = 1e-9) -> InequalityCheck:
    """||A0(G; S)|| <= |S0|/|S| ||A0(G; S0)|| + (|S| - |S0|)/|S|."""
    a, b = convexity_weights(ctx.cert.d)
    rhs = a * ctx.norm("S0").value + b
    lhs = ctx.norm("S").value
    return InequalityCheck(lhs <= rhs + tol, lhs, rhs)


@dataclass
class MultiplicityReport:
    p: int
    required: int
    clusters: list  # (center, size)
    frobenius_trace: float
    row_norm_sum: float

    @property
    def min_size(self) -> int:
        return min(s for _, s in self.clusters)

    @property
    def ok(self) -> bool:
        return self.min_size >= self.required


def cluster_eigenvalues(values, tol: float) -> list[tuple[float, int]]:
    """Chain sorted values whose consecutive gaps are within ``tol``."""
    values = np.sort(np.asarray(values))
    out = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            out.append((float(values[start:i].mean()), i - start))
            start = i
    return out


def eigenvalue_multiplicity_check(cert: PairCertificate, cluster_tol: float = 1e-6,
                                  dense_cap: int = DEFAULT_DENSE_CAP,
                                  index: GroupIndex | None = None) -> MultiplicityReport:
    """Spectrum of A0(G; S0)^T A0(G; S0) on mean-zero functions, clustered."""
    index = index or enumerate_group(cert.p)
    n = len(index)
    if n > dense_cap:
        raise ResourceError(f"|G| = {n} exceeds the dense cap {dense_cap}")
    A = CayleyOperator(index, cert.S0).matrix.toarray()
    Q = scipy.linalg.null_space(np.ones((1, n)))
    AQ = A @ Q
    eig = scipy.linalg.eigvalsh(AQ.T @ AQ)
    frob = float(np.trace(A.T @ A))
    rows = float((A**2).sum(axis=1).sum())
    return MultiplicityReport(cert.p, (cert.p - 1) // 2, cluster_eigenvalues(eig, cluster_tol), frob, rows)
