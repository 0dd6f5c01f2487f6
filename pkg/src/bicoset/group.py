"""PSL_2(F_p) with sign-canonical 2x2 matrices.

An element is a tuple ``(a, b, c, d)`` (row major, ``ad - bc = 1``).  Of the
two lifts ``M`` and ``-M`` we keep the lexicographically smaller one, which is
the lift whose first nonzero entry lies in ``[1, (p-1)/2]``.  Tuples compare,
hash and sort by that canonical form, so they can go straight into sets.

:class:`GroupIndex` enumerates the whole group into a sorted int64 array for
the dense computations (spectra, random walks, explicit coset graphs).
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError
from .field import FieldCtx

ProjMat = tuple  # tuple[int, int, int, int]

IDENTITY: ProjMat = (1, 0, 0, 1)

DEFAULT_INDEX_CAP = 2 * 10**7


def group_order(p: int) -> int:
    return p * (p * p - 1) // 2


class PSL2:
    """Scalar arithmetic in PSL_2(F_p) on canonical tuples."""

    def __init__(self, p: int):
        self.field = FieldCtx(p)
        self.p = self.field.p
        self._half = (self.p - 1) // 2

    def __repr__(self):
        return f"PSL2({self.p})"

    def __eq__(self, other):
        return isinstance(other, PSL2) and other.p == self.p

    def __hash__(self):
        return hash(("PSL2", self.p))

    @property
    def order(self) -> int:
        return group_order(self.p)

    identity = IDENTITY

    def _canon(self, a, b, c, d) -> ProjMat:
        # first nonzero entry decides the lexicographic comparison against -M
        h = self._half
        for e in (a, b, c, d):
            if e:
                if e <= h:
                    return (a, b, c, d)
                p = self.p
                return ((p - a) % p, (p - b) % p, (p - c) % p, (p - d) % p)
        raise DomainError("zero matrix")

    def canonicalize(self, a, b, c, d) -> ProjMat:
        p = self.p
        a, b, c, d = a % p, b % p, c % p, d % p
        if (a * d - b * c) % p != 1:
            raise DomainError(f"determinant of {(a, b, c, d)} is not 1 mod {p}")
        return self._canon(a, b, c, d)

    def neg(self, g: ProjMat) -> tuple:
        """The other SL_2 lift of ``g`` (not canonical)."""
        p = self.p
        return tuple((p - e) % p for e in g)

    def mul(self, g: ProjMat, h: ProjMat) -> ProjMat:
        a, b, c, d = g
        e, f, k, m = h
        p = self.p
        return self._canon((a * e + b * k) % p, (a * f + b * m) % p,
                           (c * e + d * k) % p, (c * f + d * m) % p)

    def inv(self, g: ProjMat) -> ProjMat:
        a, b, c, d = g
        p = self.p
        return self._canon(d, (p - b) % p, (p - c) % p, a)

    def prod(self, elements) -> ProjMat:
        out = IDENTITY
        for g in elements:
            out = self.mul(out, g)
        return out

    def power(self, g: ProjMat, n: int) -> ProjMat:
        if n < 0:
            g, n = self.inv(g), -n
        out = IDENTITY
        while n:
            if n & 1:
                out = self.mul(out, g)
            g = self.mul(g, g)
            n >>= 1
        return out

    def conj(self, g: ProjMat, h: ProjMat) -> ProjMat:
        """g h g^-1"""
        return self.mul(self.mul(g, h), self.inv(g))

    def commutator(self, g: ProjMat, h: ProjMat) -> ProjMat:
        """[g, h] = g h g^-1 h^-1"""
        return self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))

    def unipotent(self, x: int) -> ProjMat:
        return self._canon(1, x % self.p, 0, 1)

    def trace_pm(self, g: ProjMat) -> int:
        """The trace class {t, -t} named by its smaller member."""
        t = (g[0] + g[3]) % self.p
        return min(t, (self.p - t) % self.p)

    def trace_is_pm2(self, g: ProjMat) -> bool:
        return (g[0] + g[3]) % self.p in (2, self.p - 2)

    def element_order(self, g: ProjMat) -> int:
        # every element order divides p, (p-1)/2 or (p+1)/2
        x = g
        for n in range(1, self.p + 2):
            if x == IDENTITY:
                return n
            x = self.mul(x, g)
        raise AssertionError(f"order of {g} exceeds p + 1")  # pragma: no cover

    def random_element(self, rng) -> ProjMat:
        p = self.p
        while True:
            a, b, c = (int(v) for v in rng.integers(0, p, size=3))
            if c:
                d = rng.integers(0, p).item()
                b = (a * d - 1) * pow(c, p - 2, p) % p
                return self._canon(a, b, c, d)
            if a:
                return self._canon(a, b, 0, pow(a, p - 2, p))


# -- vectorized helpers -----------------------------------------------------

def canon_array(M: np.ndarray, p: int) -> np.ndarray:
    """Canonicalize an (..., 4) int64 array of SL_2 matrices in place."""
    h = (p - 1) // 2
    first = np.where(M[..., 0] != 0, M[..., 0],
                     np.where(M[..., 1] != 0, M[..., 1],
                              np.where(M[..., 2] != 0, M[..., 2], M[..., 3])))
    flip = first > h
    M[flip] = (p - M[flip]) % p
    return M


def mul_array(X: np.ndarray, Y: np.ndarray, p: int, canon: bool = True) -> np.ndarray:
    """Entrywise product of broadcastable (..., 4) matrix arrays."""
    a, b, c, d = X[..., 0], X[..., 1], X[..., 2], X[..., 3]
    e, f, k, m = Y[..., 0], Y[..., 1], Y[..., 2], Y[..., 3]
    out = np.stack([(a * e + b * k) % p, (a * f + b * m) % p,
                    (c * e + d * k) % p, (c * f + d * m) % p], axis=-1)
    return canon_array(out, p) if canon else out


def inv_array(X: np.ndarray, p: int, canon: bool = True) -> np.ndarray:
    out = np.stack([X[..., 3], (p - X[..., 1]) % p, (p - X[..., 2]) % p, X[..., 0]], axis=-1)
    return canon_array(out, p) if canon else out


def is_identity_array(X: np.ndarray, p: int) -> np.ndarray:
    """True where X is +I or -I (canonical or not)."""
    return ((X[..., 1] == 0) & (X[..., 2] == 0)
            & (((X[..., 0] == 1) & (X[..., 3] == 1)) | ((X[..., 0] == p - 1) & (X[..., 3] == p - 1))))


def encode(M: np.ndarray, p: int) -> np.ndarray:
    """Order-preserving int64 key of canonical matrices (needs p**4 < 2**63)."""
    return ((M[..., 0] * p + M[..., 1]) * p + M[..., 2]) * p + M[..., 3]


class GroupIndex:
    """All of PSL_2(F_p), sorted lexicographically, with vectorized lookups.

    ``elements[i]`` is the i-th canonical matrix as an int64 row.  Index order
    equals lexicographic order, so the minimum index in a set of elements
    names its lexicographically smallest member.
    """

    def __init__(self, p: int, elements: np.ndarray):
        self.p = p
        self.group = PSL2(p)
        self.elements = elements
        self.keys = encode(elements, p)
        self._identity = self.index(IDENTITY)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"GroupIndex(p={self.p}, size={len(self)})"

    def __iter__(self):
        for row in self.elements.tolist():
            yield tuple(row)

    def element(self, i: int) -> ProjMat:
        return tuple(self.elements[i].tolist())

    @property
    def identity_index(self) -> int:
        return self._identity

    def indices(self, M: np.ndarray) -> np.ndarray:
        """Indices of canonical matrices given as an (..., 4) array."""
        keys = encode(np.asarray(M, dtype=np.int64), self.p)
        pos = np.searchsorted(self.keys, keys)
        return pos

    def index(self, g: ProjMat) -> int:
        i = int(self.indices(np.array(g, dtype=np.int64)))
        if i >= len(self) or self.keys[i] != encode(np.array(g, dtype=np.int64), self.p):
            raise KeyError(g)
        return i

    def as_array(self, elements) -> np.ndarray:
        return np.array([tuple(g) for g in elements], dtype=np.int64).reshape(-1, 4)

    def left_perm(self, s: ProjMat) -> np.ndarray:
        """``perm[i]`` is the index of ``s * g_i``."""
        S = np.array(s, dtype=np.int64)
        return self.indices(mul_array(S, self.elements, self.p))

    def right_perm(self, h: ProjMat) -> np.ndarray:
        """``perm[i]`` is the index of ``g_i * h``."""
        H = np.array(h, dtype=np.int64)
        return self.indices(mul_array(self.elements, H, self.p))

    def inverse_perm(self) -> np.ndarray:
        return self.indices(inv_array(self.elements, self.p))


def index_cap_from_env(default: int = DEFAULT_INDEX_CAP) -> int:
    return int(os.environ.get("BICOSET_INDEX_CAP", default))


def enumerate_group(p: int, cap: int | None = None) -> GroupIndex:
    """Every element of PSL_2(F_p) exactly once, sorted lexicographically."""
    cap = index_cap_from_env() if cap is None else cap
    FieldCtx(p)
    n = group_order(p)
    if n > cap:
        raise ResourceError(f"|PSL2(F_{p})| = {n} exceeds the enumeration cap {cap}")
    return _enumerate_cached(p)


@lru_cache(maxsize=4)
def _enumerate_cached(p: int) -> GroupIndex:
    inv = np.array([0] + [pow(i, p - 2, p) for i in range(1, p)], dtype=np.int64)
    ar = np.arange(p, dtype=np.int64)
    half = (p - 1) // 2
    chunks = []
    # c = 0: a != 0, d = a^-1, b free; canonical iff a <= (p-1)/2
    a, b = np.meshgrid(ar[1:half + 1], ar, indexing="ij")
    a, b = a.ravel(), b.ravel()
    chunks.append(np.stack([a, b, np.zeros_like(a), inv[a]], axis=-1))
    # c != 0: a, d free, b = (ad - 1) / c
    a, d = np.meshgrid(ar, ar, indexing="ij")
    a, d = a.ravel(), d.ravel()
    for c in range(1, p):
        b = (a * d - 1) % p * inv[c] % p
        first = np.where(a != 0, a, np.where(b != 0, b, c))
        keep = first <= half
        chunks.append(np.stack([a[keep], b[keep], np.full(int(keep.sum()), c, dtype=np.int64), d[keep]],
                               axis=-1))
    M = np.concatenate(chunks)
    M = M[np.argsort(encode(M, p), kind="stable")]
    assert len(M) == group_order(p)
    return GroupIndex(p, M)
