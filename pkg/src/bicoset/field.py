"""Arithmetic in F_p and in F_p[x].

Field elements are plain ints in ``[0, p)``.  Polynomials are tuples of
coefficients in ascending degree with no trailing zeros; the empty tuple is
the zero polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

FpPoly = tuple  # tuple[int, ...]

P_MAX = 1 << 31

# Deterministic for n < 3_215_031_751.
_MR_BASES = (2, 3, 5, 7)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 2**31."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    s, m = 0, n - 1
    while m % 2 == 0:
        s += 1
        m //= 2
    for a in _MR_BASES:
        x = pow(a, m, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldCtx:
    p: int

    def __post_init__(self):
        p = self.p
        if not isinstance(p, (int, np.integer)) or p < 5 or p >= P_MAX:
            raise DomainError(f"p must be an odd prime with 5 <= p < 2**31, got {p!r}")
        if not is_prime(int(p)):
            raise DomainError(f"{p} is not prime")
        object.__setattr__(self, "p", int(p))

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise DomainError("0 has no inverse in F_p")
        return pow(a, self.p - 2, self.p)

    def legendre(self, a) -> int:
        """Return 0, +1 or -1 by Euler's criterion."""
        a %= self.p
        if a == 0:
            return 0
        t = pow(a, (self.p - 1) // 2, self.p)
        return 1 if t == 1 else -1

    def find_nonresidue(self) -> int:
        a = 2
        while self.legendre(a) != -1:
            a += 1
        return a

    def sqrt(self, a):
        """A square root of ``a`` or None (Tonelli-Shanks)."""
        p = self.p
        a %= p
        if a == 0:
            return 0
        if self.legendre(a) != 1:
            return None
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = self.find_nonresidue()
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r


# -- polynomials ------------------------------------------------------------

def _trim(coeffs) -> FpPoly:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def poly(coeffs, p: int) -> FpPoly:
    return _trim(c % p for c in coeffs)


def degree(f: FpPoly) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(f) - 1


def poly_add(f: FpPoly, g: FpPoly, p: int) -> FpPoly:
    n = max(len(f), len(g))
    return _trim(((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p
                 for i in range(n))


def poly_sub(f: FpPoly, g: FpPoly, p: int) -> FpPoly:
    return poly_add(f, poly_scale(g, p - 1, p), p)


def poly_scale(f: FpPoly, c: int, p: int) -> FpPoly:
    c %= p
    if c == 0:
        return ()
    return tuple(a * c % p for a in f)


def poly_mul(f: FpPoly, g: FpPoly, p: int) -> FpPoly:
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return _trim(c % p for c in out)


def poly_eval(f: FpPoly, x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def poly_eval_all(f: FpPoly, p: int) -> np.ndarray:
    """Values of ``f`` at every x in F_p, as an int64 array of length p."""
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(f):
        acc = (acc * xs + c) % p
    return acc


def poly_divmod_linear(f: FpPoly, r: int, p: int) -> tuple[FpPoly, int]:
    """Synthetic division of ``f`` by ``(x - r)``; returns (quotient, remainder)."""
    if not f:
        return (), 0
    q = [0] * (len(f) - 1)
    acc = 0
    for i in range(len(f) - 1, -1, -1):
        acc = (acc * r + f[i]) % p
        if i > 0:
            q[i - 1] = acc
    return _trim(q), acc


def poly_roots(f: FpPoly, p: int) -> set[int]:
    """All roots of ``f`` in F_p by exhaustive evaluation."""
    if not f:
        raise DomainError("the zero polynomial vanishes everywhere; handle it before root finding")
    if len(f) == 1:
        return set()
    return set(np.flatnonzero(poly_eval_all(f, p) == 0).tolist())
