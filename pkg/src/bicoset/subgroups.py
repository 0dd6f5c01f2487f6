"""Cyclic subgroups H_1 = H, H_2 = u(x) H u(-x) and the search for good x.

The subgroup H sits inside the non-split torus of PSL_2(F_p), so every
non-identity element has nonzero lower-left entry and trace different from
+-2.  A parameter x is good to depths (L1, L2) when

* H_1 and H_2 meet trivially,
* no product of at most L1 elements of S_0 = (H_1 - 1)(H_2 - 1) lies in H_1,
* every tuple of S_0-words of length l <= L2 on which the word ``w``
  collapses to the identity has two slots sharing a prefix or a suffix (the
  precise pairing is read off the letters of ``w``).

Two independent ways of finding such x are offered: checking each x directly
(:func:`direct_check`) and sieving out every x that is a root of one of the
trace polynomials attached to those conditions (:func:`sieve_bad_x`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError
from .field import (FpPoly, poly, poly_add, poly_eval, poly_mul, poly_roots,
                    poly_scale, poly_sub)
from .group import (IDENTITY, PSL2, ProjMat, inv_array,
                    is_identity_array, mul_array)

DEFAULT_WORK_CAP = 5 * 10**7
DEFAULT_TUPLE_BUDGET = 1 << 22
_CHUNK = 1 << 13


# -- subgroups ---------------------------------------------------------------

@dataclass(frozen=True)
class CyclicSubgroup:
    group: PSL2 = field(compare=False, repr=False)
    generator: ProjMat
    order: int
    elements: tuple  # elements[k] = generator**k

    @classmethod
    def from_generator(cls, group: PSL2, g: ProjMat) -> "CyclicSubgroup":
        elements = [IDENTITY]
        x = g
        while x != IDENTITY:
            elements.append(x)
            x = group.mul(x, g)
        return cls(group, g, len(elements), tuple(elements))

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def nonidentity(self) -> tuple:
        return self.elements[1:]

    def __contains__(self, g):
        return g in set(self.elements)

    def conjugate(self, g: ProjMat) -> "CyclicSubgroup":
        G = self.group
        gi = G.inv(g)
        return CyclicSubgroup(G, G.mul(G.mul(g, self.generator), gi), self.order,
                              tuple(G.mul(G.mul(g, h), gi) for h in self.elements))


def build_nonsplit_torus(group: PSL2 | int) -> CyclicSubgroup:
    """The image of {[[a, b e], [b, a]] : a^2 - e b^2 = 1}, cyclic of order (p+1)/2.

    ``e`` is the least quadratic non-residue; the generator is the first
    element of full order in lexicographic order of (a, b).
    """
    G = group if isinstance(group, PSL2) else PSL2(group)
    F, p = G.field, G.p
    eps = F.find_nonresidue()
    eps_inv = F.inv(eps)
    target = (p + 1) // 2
    for a in range(p):
        t = (a * a - 1) * eps_inv % p
        if t == 0:
            continue
        r = F.sqrt(t)
        if r is None:
            continue
        for b in sorted({r, (p - r) % p}):
            g = G.canonicalize(a, b * eps, b, a)
            if G.element_order(g) == target:
                return CyclicSubgroup.from_generator(G, g)
    raise AssertionError("non-split torus has no generator")  # pragma: no cover


def subgroup_of_order(T: CyclicSubgroup, d: int) -> CyclicSubgroup:
    if d < 3:
        raise DomainError(f"d must be at least 3, got {d}")
    if T.order % d:
        raise DomainError(f"d = {d} must divide (p+1)/2 = {T.order} for p = {T.p}")
    G = T.group
    return CyclicSubgroup.from_generator(G, G.power(T.generator, T.order // d))


# -- words -------------------------------------------------------------------

@dataclass(frozen=True)
class WordSpec:
    """A reduced word; letters are (variable, exponent) with 0-based variables."""

    letters: tuple
    rank: int

    def __post_init__(self):
        for (a, e), (b, f) in zip(self.letters, self.letters[1:]):
            if a == b and e == -f:
                raise DomainError("word is not reduced")
        for a, e in self.letters:
            if not 0 <= a < self.rank or e not in (1, -1):
                raise DomainError(f"bad letter {(a, e)} for rank {self.rank}")

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "WordSpec":
        return WordSpec(tuple((a, -e) for a, e in reversed(self.letters)), self.rank)

    def __mul__(self, other: "WordSpec") -> "WordSpec":
        out = list(self.letters)
        for a, e in other.letters:
            if out and out[-1] == (a, -e):
                out.pop()
            else:
                out.append((a, e))
        return WordSpec(tuple(out), max(self.rank, other.rank))

    @classmethod
    def var(cls, a: int, rank: int, e: int = 1) -> "WordSpec":
        return cls(((a, e),), rank)

    def prefix_pairs(self) -> set:
        """Pairs {a, b}, a != b, with x_a^-1 x_b occurring in the word."""
        return {frozenset((a, b)) for (a, e), (b, f) in zip(self.letters, self.letters[1:])
                if e == -1 and f == 1 and a != b}

    def suffix_pairs(self) -> set:
        """Pairs {a, b}, a != b, with x_a x_b^-1 occurring in the word."""
        return {frozenset((a, b)) for (a, e), (b, f) in zip(self.letters, self.letters[1:])
                if e == 1 and f == -1 and a != b}

    def __str__(self):
        return " ".join(f"x{a + 1}" + ("" if e == 1 else "^-1") for a, e in self.letters)


def commutator_word(u: WordSpec, v: WordSpec) -> WordSpec:
    """[u, v] = u v u^-1 v^-1"""
    return u * v * u.inverse() * v.inverse()


def _double_commutator() -> WordSpec:
    x = [WordSpec.var(a, 8) for a in range(8)]
    q = [x[2 * i] * x[2 * i + 1].inverse() for i in range(4)]
    return commutator_word(commutator_word(q[0], q[1]), commutator_word(q[2], q[3]))


DOUBLE_COMMUTATOR = _double_commutator()


def evaluate_word(group: PSL2, w: WordSpec, args) -> ProjMat:
    if len(args) != w.rank:
        raise DomainError(f"word of rank {w.rank} needs {w.rank} arguments, got {len(args)}")
    invs = [group.inv(g) for g in args]
    out = IDENTITY
    for a, e in w.letters:
        out = group.mul(out, args[a] if e == 1 else invs[a])
    return out


# -- pairs -------------------------------------------------------------------

@dataclass
class PairCertificate:
    p: int
    d: int
    x: int
    H1: CyclicSubgroup
    H2: CyclicSubgroup
    S0: list
    S: list
    checked_no_loop_depth: int = 0
    word_check: dict = field(default_factory=lambda: {"kind": "none", "l": 0})
    intersection_trivial: bool = True

    @property
    def group(self) -> PSL2:
        return self.H1.group

    def to_dict(self) -> dict:
        return {
            "p": self.p, "d": self.d, "x": self.x,
            "H1": {"generator": list(self.H1.generator), "elements": [list(g) for g in self.H1.elements]},
            "H2": {"generator": list(self.H2.generator), "elements": [list(g) for g in self.H2.elements]},
            "S0": [list(g) for g in self.S0],
            "S": [list(g) for g in self.S],
            "checked_no_loop_depth": self.checked_no_loop_depth,
            "word_check": dict(self.word_check),
            "intersection_trivial": self.intersection_trivial,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PairCertificate":
        G = PSL2(data["p"])
        H1 = CyclicSubgroup.from_generator(G, tuple(data["H1"]["generator"]))
        H2 = CyclicSubgroup.from_generator(G, tuple(data["H2"]["generator"]))
        return cls(data["p"], data["d"], data["x"], H1, H2,
                   [tuple(g) for g in data["S0"]], [tuple(g) for g in data["S"]],
                   data["checked_no_loop_depth"], dict(data["word_check"]),
                   data["intersection_trivial"])


@dataclass(frozen=True)
class Rejection:
    x: int
    overlap: tuple


def make_pair(H: CyclicSubgroup, x: int) -> PairCertificate | Rejection:
    G = H.group
    x %= G.p
    u, ui = G.unipotent(x), G.unipotent(-x)
    H2 = CyclicSubgroup(G, G.mul(G.mul(u, H.generator), ui), H.order,
                        tuple(G.mul(G.mul(u, h), ui) for h in H.elements))
    overlap = set(H.nonidentity) & set(H2.nonidentity)
    if overlap:
        return Rejection(x, tuple(sorted(overlap)))
    S0 = [G.mul(h1, h2) for h1 in H.nonidentity for h2 in H2.nonidentity]
    S = [G.mul(h1, h2) for h1 in H.elements for h2 in H2.elements]
    assert len(set(S)) == H.order ** 2
    return PairCertificate(G.p, H.order, x, H, H2, S0, S)


def product_free_depth(cert: PairCertificate, L_max: int, work_cap: int = DEFAULT_WORK_CAP) -> int:
    """Largest L <= L_max with no product of l <= L elements of S0 in H1."""
    if L_max < 1:
        raise DomainError("L_max must be at least 1")
    G = cert.group
    H1 = set(cert.H1.elements)
    S0 = list(dict.fromkeys(cert.S0))
    level = set(S0)
    work = 0
    for l in range(1, L_max + 1):
        if level & H1:
            return l - 1
        if l == L_max:
            break
        work += len(level) * len(S0)
        if work > work_cap:
            raise ResourceError(f"product enumeration past length {l} exceeds work cap {work_cap};"
                                f" use a smaller L_max", bound=l)
        level = {G.mul(g, s) for g in level for s in S0}
    return L_max


# -- trace polynomials -------------------------------------------------------

PolyMat = tuple  # (a, b, c, d) of FpPoly


def polymat_const(g) -> PolyMat:
    return tuple((e,) if e else () for e in g)


def polymat_unipotent(sign: int, p: int) -> PolyMat:
    return ((1,), (0, sign % p), (), (1,))


def polymat_mul(X: PolyMat, Y: PolyMat, p: int) -> PolyMat:
    a, b, c, d = X
    e, f, k, m = Y
    return (poly_add(poly_mul(a, e, p), poly_mul(b, k, p), p),
            poly_add(poly_mul(a, f, p), poly_mul(b, m, p), p),
            poly_add(poly_mul(c, e, p), poly_mul(d, k, p), p),
            poly_add(poly_mul(c, f, p), poly_mul(d, m, p), p))


def polymat_det(X: PolyMat, p: int) -> FpPoly:
    a, b, c, d = X
    return poly_sub(poly_mul(a, d, p), poly_mul(b, c, p), p)


def _alternating_product(hs, p: int) -> PolyMat:
    """h_1 u(x) h_2 u(-x) h_3 u(x) ... with a unipotent after each h."""
    U, Ui = polymat_unipotent(1, p), polymat_unipotent(-1, p)
    out = polymat_const(IDENTITY)
    for j, h in enumerate(hs):
        out = polymat_mul(out, polymat_const(h), p)
        out = polymat_mul(out, U if j % 2 == 0 else Ui, p)
    return out


def word_polymat(hs, form: str, p: int) -> PolyMat:
    """f(x) = h_1 u(x) h_2 u(-x) ... h_2k u(-x) [h_2k+1] as a polynomial matrix.

    Each h is used through its canonical (lexicographically smaller) lift.
    """
    hs = list(hs)
    if form == "first":
        if not hs or len(hs) % 2:
            raise DomainError("form 'first' needs 2k >= 2 elements")
        return _alternating_product(hs, p)
    if form == "second":
        if len(hs) % 2 == 0:
            raise DomainError("form 'second' needs 2k + 1 elements")
        return polymat_mul(_alternating_product(hs[:-1], p), polymat_const(hs[-1]), p)
    raise DomainError(f"unknown form {form!r}")


def trace_polynomial(hs, form: str, p: int) -> FpPoly:
    a, _, _, d = word_polymat(hs, form, p)
    return poly_add(a, d, p)


def pm2_roots(t: FpPoly, p: int):
    """Roots of t - 2 and t + 2, or None when either is identically zero."""
    out = set()
    for c in (2, p - 2):
        q = poly_sub(t, (c,), p)
        if not q:
            return None
        out |= poly_roots(q, p)
    return out


# -- sieve -------------------------------------------------------------------

def default_depths(p: int, d: int, rank: int = 8, eps: float = 0.1) -> tuple[int, int]:
    """(L1, L2) = floor(log p / ((2 + eps) log(d - 1))) and the same over rank."""
    base = (2 + eps) * math.log(d - 1)
    return int(math.log(p) / base), int(math.log(p) / (base * rank))


def sieve_bound(d: int, L1: int, L2: int, w: WordSpec) -> int:
    return (4 * d * d + 4 * L1 * L1 * d * (d - 1) ** (2 * L1)
            + 4 * len(w) * L2 * L2 * (d - 1) ** (2 * L2 * w.rank))


@dataclass
class SieveResult:
    bad: set
    intersection: set
    loop: set
    word: set
    bound: int
    tuples: int


def _conjugation_entries(h, p: int):
    """Entries of u(x) h u(-x) as polynomials in x."""
    a, b, c, d = h
    return ((a, c), (b, (d - a) % p, (-c) % p), (c,), (d, (-c) % p))


def _solve_system(polys, p: int) -> set:
    polys = [tuple(q) for q in polys]
    nonzero = [q for q in polys if q]
    if not nonzero:
        return set(range(p))
    cand = poly_roots(min(nonzero, key=len), p)
    if not cand:
        return cand
    return {x for x in cand if all(poly_eval(q, x, p) == 0 for q in nonzero)}


def intersection_sieve(H: CyclicSubgroup) -> set:
    """x with u(x) h2 u(-x) = +-h1 for some h1, h2 in H - 1."""
    p = H.p
    bad = set()
    for h2 in H.nonidentity:
        ent = [poly(e, p) for e in _conjugation_entries(h2, p)]
        for h1 in H.nonidentity:
            for s in (1, -1):
                target = [(s * e) % p for e in h1]
                bad |= _solve_system([poly_sub(q, (t,), p) for q, t in zip(ent, target)], p)
    return bad


def _direct_solutions(hs, h0, p: int) -> set:
    G = PSL2(p)
    out = set()
    for x in range(p):
        u, ui = G.unipotent(x), G.unipotent(-x)
        g = IDENTITY
        for j, h in enumerate(hs):
            g = G.mul(G.mul(g, h), u if j % 2 == 0 else ui)
        if g == h0:
            out.add(x)
    return out


def loop_sieve(H: CyclicSubgroup, L1: int, budget: int = DEFAULT_TUPLE_BUDGET) -> tuple[set, int]:
    """x admitting g_1 ... g_l = h_0 (l <= L1) according to Tr(h_0^-1 f(x)) = +-2."""
    G, p, d = H.group, H.p, H.order
    count = sum(d * (d - 1) ** (2 * l) for l in range(1, L1 + 1))
    if count > budget:
        raise ResourceError(f"loop sieve needs {count} tuples, budget is {budget}")
    h0_invs = [G.inv(h) for h in H.elements]
    bad = set()
    for l in range(1, L1 + 1):
        for hs in itertools.product(H.nonidentity, repeat=2 * l):
            a, b, c, dd = _alternating_product(hs, p)
            for h0, (e, f, k, m) in zip(H.elements, h0_invs):
                # trace of h0^-1 f(x)
                t = poly_add(poly_add(poly_scale(a, e, p), poly_scale(c, f, p), p),
                             poly_add(poly_scale(b, k, p), poly_scale(dd, m, p), p), p)
                roots = pm2_roots(t, p)
                bad |= roots if roots is not None else _direct_solutions(hs, h0, p)
    return bad, count


def _slot_products(H: CyclicSubgroup, l: int) -> tuple[np.ndarray, np.ndarray]:
    """All h_1 u(x) h_2 u(-x) ... h_2l u(-x) over (H - 1)^(2l), evaluated at every x.

    Returns (values, digits): values has shape (K, p, 4) of SL_2 lifts,
    digits[k] lists the chosen positions in H - 1 (first position most
    significant).
    """
    p = H.p
    hs = np.array(H.nonidentity, dtype=np.int64)
    xs = np.arange(p, dtype=np.int64)
    U = np.stack([np.ones(p, np.int64), xs, np.zeros(p, np.int64), np.ones(p, np.int64)], axis=-1)
    Ui = np.stack([np.ones(p, np.int64), (-xs) % p, np.zeros(p, np.int64), np.ones(p, np.int64)], axis=-1)
    vals = np.broadcast_to(np.array(IDENTITY, np.int64), (1, p, 4))
    for i in range(2 * l):
        vals = mul_array(vals[:, None, :, :], hs[None, :, None, :], p, canon=False).reshape(-1, p, 4)
        vals = mul_array(vals, U if i % 2 == 0 else Ui, p, canon=False)
    m = len(hs)
    K = m ** (2 * l)
    digits = np.array(np.unravel_index(np.arange(K), (m,) * (2 * l))).T.reshape(K, 2 * l)
    return vals, digits


def _admissible_mask(idx: np.ndarray, prefix_diff, suffix_diff, w: WordSpec) -> np.ndarray:
    ok = np.ones(len(idx), dtype=bool)
    for pair in w.prefix_pairs():
        a, b = sorted(pair)
        ok &= prefix_diff[idx[:, a], idx[:, b]]
    for pair in w.suffix_pairs():
        a, b = sorted(pair)
        ok &= suffix_diff[idx[:, a], idx[:, b]]
    return ok


def _evaluate_word_batch(w: WordSpec, vals, invs, idx, p: int):
    out = None
    for a, e in w.letters:
        m = (vals if e == 1 else invs)[idx[:, a]]
        out = m if out is None else mul_array(out, m, p, canon=False)
    return out


def word_sieve(H: CyclicSubgroup, L2: int, w: WordSpec,
               budget: int = DEFAULT_TUPLE_BUDGET) -> tuple[set, int]:
    """x where Tr(w(f_1(x), ..., f_r(x))) = +-2 for some admissible tuple, l <= L2."""
    p, m, r = H.p, H.order - 1, w.rank
    count = sum(m ** (2 * l * r) for l in range(1, L2 + 1))
    if count > budget:
        raise ResourceError(f"word sieve needs {count} tuples, budget is {budget}")
    bad = np.zeros(p, dtype=bool)
    for l in range(1, L2 + 1):
        vals, digits = _slot_products(H, l)
        invs = inv_array(vals, p, canon=False)
        pre = 2 * math.ceil(l / 2)
        suf = 2 * (l // 2)
        prefix_diff = (digits[:, None, :pre] != digits[None, :, :pre]).any(axis=-1)
        suffix_diff = (digits[:, None, suf:] != digits[None, :, suf:]).any(axis=-1)
        K = len(vals)
        total = K ** r
        for start in range(0, total, _CHUNK):
            flat = np.arange(start, min(total, start + _CHUNK))
            idx = np.array(np.unravel_index(flat, (K,) * r)).T
            idx = idx[_admissible_mask(idx, prefix_diff, suffix_diff, w)]
            if not len(idx):
                continue
            M = _evaluate_word_batch(w, vals, invs, idx, p)
            t = (M[..., 0] + M[..., 3]) % p
            bad |= ((t == 2) | (t == p - 2)).any(axis=0)
    return set(np.flatnonzero(bad).tolist()), count


def sieve_bad_x(H: CyclicSubgroup, L1: int, L2: int, w: WordSpec = DOUBLE_COMMUTATOR,
                budget: int = DEFAULT_TUPLE_BUDGET) -> SieveResult:
    """Every x that might violate one of the conditions, as a union of root sets."""
    inter = intersection_sieve(H)
    loop, n_loop = loop_sieve(H, L1, budget)
    word, n_word = word_sieve(H, L2, w, budget - n_loop)
    return SieveResult(inter | loop | word, inter, loop, word,
                       sieve_bound(H.order, L1, L2, w), n_loop + n_word)


# -- direct checks -----------------------------------------------------------

@dataclass
class WordCheckReport:
    l: int
    mode: str
    tuples_tested: int
    identity_hits: int
    counterexamples: list

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def check_word_condition(cert: PairCertificate, w: WordSpec, l: int, mode: str = "exhaustive",
                         samples: int = 10000, budget: int = DEFAULT_TUPLE_BUDGET,
                         seed: int = 0) -> WordCheckReport:
    """Test the word condition on tuples of S0-products of length l.

    A tuple where ``w`` evaluates to the identity must have some pair a != b
    from the prefix pairs of ``w`` agreeing on the first ceil(l/2) factors,
    or some suffix pair agreeing on factors floor(l/2)+1 .. l.
    """
    if l == 0:
        return WordCheckReport(0, mode, 0, 0, [])
    G, p, r = cert.group, cert.p, w.rank
    S0 = np.array(cert.S0, dtype=np.int64)
    n = len(S0)
    Q = n ** l
    prods = S0
    for _ in range(l - 1):
        prods = mul_array(prods[:, None, :], S0[None, :, :], p).reshape(-1, 4)
    digits = np.array(np.unravel_index(np.arange(Q), (n,) * l)).T.reshape(Q, l)
    invs = inv_array(prods, p)
    head = math.ceil(l / 2)
    tail = l // 2
    pre_pairs = [tuple(sorted(q)) for q in w.prefix_pairs()]
    suf_pairs = [tuple(sorted(q)) for q in w.suffix_pairs()]

    if mode == "exhaustive":
        total = Q ** r
        if total > budget:
            raise ResourceError(f"exhaustive word check needs {total} tuples, budget is {budget}")
        batches = (np.array(np.unravel_index(np.arange(s, min(total, s + _CHUNK)), (Q,) * r)).T
                   for s in range(0, total, _CHUNK))
    elif mode == "randomized":
        total = samples
        rng = np.random.default_rng(seed)
        batches = (rng.integers(0, Q, size=(min(_CHUNK, samples - s), r))
                   for s in range(0, samples, _CHUNK))
    else:
        raise DomainError(f"unknown mode {mode!r}")

    hits = 0
    bad = []
    for idx in batches:
        M = _evaluate_word_batch(w, prods, invs, idx, p)
        rows = idx[is_identity_array(M, p)]
        hits += len(rows)
        for row in rows:
            dg = digits[row]
            concl = any((dg[a, :head] == dg[b, :head]).all() for a, b in pre_pairs)
            concl = concl or any((dg[a, tail:] == dg[b, tail:]).all() for a, b in suf_pairs)
            if not concl:
                bad.append([[cert.S0[j] for j in dg[a]] for a in range(r)])
    return WordCheckReport(l, mode, total, hits, bad)


@dataclass
class DirectVerdict:
    x: int
    ok: bool
    reason: str = ""
    cert: PairCertificate | None = None


def direct_check(H: CyclicSubgroup, x: int, L1: int, L2: int, w: WordSpec = DOUBLE_COMMUTATOR,
                 samples: int = 10000, budget: int = DEFAULT_TUPLE_BUDGET, seed: int = 0,
                 work_cap: int = DEFAULT_WORK_CAP) -> DirectVerdict:
    cert = make_pair(H, x)
    if isinstance(cert, Rejection):
        return DirectVerdict(x, False, "intersection")
    if L1 >= 1:
        depth = product_free_depth(cert, L1, work_cap)
        if depth < L1:
            return DirectVerdict(x, False, "loop", cert)
    cert.checked_no_loop_depth = L1
    for l in range(1, L2 + 1):
        n = len(cert.S0) ** (l * w.rank)
        mode = "exhaustive" if n <= budget else "randomized"
        rep = check_word_condition(cert, w, l, mode, samples, budget, seed)
        if not rep.ok:
            return DirectVerdict(x, False, "word", cert)
        cert.word_check = ({"kind": mode, "l": l} if mode == "exhaustive"
                           else {"kind": mode, "l": l, "samples": samples})
    return DirectVerdict(x, True, "", cert)


def check_order(p: int, d: int) -> None:
    """DomainError unless d >= 3 and d divides (p+1)/2."""
    if d < 3:
        raise DomainError(f"d = {d} is too small; the construction needs d >= 3")
    if ((p + 1) // 2) % d:
        raise DomainError(f"{d} does not divide (p+1)/2 = {(p + 1) // 2}; "
                          f"pick a prime p with p = -1 mod {2 * d}")


class SearchExhausted(Exception):
    def __init__(self, message, census):
        super().__init__(message)
        self.census = census


def search(p: int, d: int, mode: str = "sieve", L1: int | None = None, L2: int | None = None,
           w: WordSpec = DOUBLE_COMMUTATOR, seed: int = 0, samples: int = 10000,
           budget: int = DEFAULT_TUPLE_BUDGET) -> tuple[PairCertificate, dict]:
    """First x in 1, 2, ... (or a seeded random order) passing the selected checks.

    Returns the certificate and a summary dict (depths, bad-set census, slack).
    """
    G = PSL2(p)
    check_order(p, d)
    H = subgroup_of_order(build_nonsplit_torus(G), d)
    dl1, dl2 = default_depths(p, d, w.rank)
    L1 = dl1 if L1 is None else L1
    L2 = dl2 if L2 is None else L2
    bound = sieve_bound(d, L1, L2, w)
    info = {"mode": mode, "l1": L1, "l2": L2, "bad_set_bound": bound, "slack": p - bound}

    if mode == "sieve":
        res = sieve_bad_x(H, L1, L2, w, budget)
        info["census"] = {"intersection": len(res.intersection), "loop": len(res.loop),
                          "word": len(res.word), "bad": len(res.bad)}
        good = [x for x in range(1, p) if x not in res.bad]
        if not good:
            raise SearchExhausted(f"every x in F_{p} is sieved out at depths ({L1}, {L2})", info["census"])
        cert = make_pair(H, good[0])
        assert isinstance(cert, PairCertificate)
        cert.checked_no_loop_depth = L1
        cert.word_check = {"kind": "sieved", "l": L2}
        return cert, info

    if mode == "scan":
        order = range(1, p)
    elif mode == "random":
        order = np.random.default_rng(seed).permutation(np.arange(1, p)).tolist()
    else:
        raise DomainError(f"unknown search mode {mode!r}")
    census = {"intersection": 0, "loop": 0, "word": 0}
    for x in order:
        v = direct_check(H, x, L1, L2, w, samples, budget, seed)
        if v.ok:
            info["census"] = census
            return v.cert, info
        census[v.reason] += 1
    raise SearchExhausted(f"no x in F_{p} passes direct checks at depths ({L1}, {L2})", census)
