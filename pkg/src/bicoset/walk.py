"""Random walks driven by S0 on PSL_2(F_p): L2 flattening and subgroup non-concentration."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, ResourceError
from .group import IDENTITY, PSL2, GroupIndex, ProjMat, enumerate_group, inv_array, mul_array
from .subgroups import PairCertificate, build_nonsplit_torus

DEFAULT_WALK_CAP = 2 * 10**7
MIX_FACTOR = 1.5


@dataclass
class Distribution:
    index: GroupIndex = field(repr=False)
    mass: np.ndarray

    def total(self) -> float:
        return math.fsum(self.mass)

    def l2(self) -> float:
        return math.sqrt(math.fsum(self.mass * self.mass))

    def __getitem__(self, g: ProjMat) -> float:
        return float(self.mass[self.index.index(g)])


def uniform_on(elements, index: GroupIndex) -> Distribution:
    elements = list(elements)
    if not elements:
        raise DomainError("cannot take the uniform measure on an empty list")
    mass = np.zeros(len(index))
    np.add.at(mass, index.indices(index.as_array(elements)), 1.0 / len(elements))
    return Distribution(index, mass)


def point_mass(g: ProjMat, index: GroupIndex) -> Distribution:
    return uniform_on([g], index)


def uniform(index: GroupIndex) -> Distribution:
    return Distribution(index, np.full(len(index), 1.0 / len(index)))


class Stepper:
    """Left-multiplication permutations for a fixed generator list, computed once."""

    def __init__(self, index: GroupIndex, gen):
        gen = list(gen)
        if not gen:
            raise DomainError("empty generator list")
        self.index = index
        self.perms = [index.left_perm(s) for s in gen]

    def __call__(self, mu: Distribution) -> Distribution:
        nu = np.zeros_like(mu.mass)
        for perm in self.perms:
            nu[perm] += mu.mass
        return Distribution(mu.index, nu / len(self.perms))


def convolve_step(mu: Distribution, gen) -> Distribution:
    """nu(g) = mean over s of mu(s^-1 g): push mu forward along g -> s g."""
    return Stepper(mu.index, gen)(mu)


def symmetrize(mu: Distribution) -> Distribution:
    inv = mu.index.inverse_perm()
    return Distribution(mu.index, (mu.mass + mu.mass[inv]) / 2)


@dataclass
class FlatteningCurve:
    order: int
    rows: list  # (l, l2_norm, uniform_ratio)
    mix_step: int | None

    def write_csv(self, fh) -> None:
        w = csv.writer(fh)
        w.writerow(["l", "l2_norm", "uniform_ratio"])
        for l, n, r in self.rows:
            w.writerow([l, repr(n), repr(r)])


def _walk_index(p: int, cap: int, index: GroupIndex | None) -> GroupIndex:
    if index is not None:
        return index
    n = PSL2(p).order
    if n > cap:
        raise ResourceError(f"|G| = {n} exceeds the walk cap {cap}")
    return enumerate_group(p)


def flattening_curve(cert: PairCertificate, steps: int, index: GroupIndex | None = None,
                     cap: int = DEFAULT_WALK_CAP) -> FlatteningCurve:
    """||chi_S0^{*l}||_2 for l = 1..steps, with the first l within 1.5x of uniform."""
    index = _walk_index(cert.p, cap, index)
    step = Stepper(index, cert.S0)
    floor = 1.0 / math.sqrt(len(index))
    mu = point_mass(IDENTITY, index)
    rows = []
    mix = None
    for l in range(1, steps + 1):
        mu = step(mu)
        n = mu.l2()
        rows.append((l, n, n / floor))
        if mix is None and n <= MIX_FACTOR * floor:
            mix = l
    return FlatteningCurve(len(index), rows, mix)


def walk_power(cert: PairCertificate, l: int, index: GroupIndex | None = None,
               cap: int = DEFAULT_WALK_CAP) -> Distribution:
    index = _walk_index(cert.p, cap, index)
    step = Stepper(index, cert.S0)
    mu = point_mass(IDENTITY, index)
    for _ in range(l):
        mu = step(mu)
    return mu


# -- subgroups of PSL_2 -----------------------------------------------------

@dataclass
class SubgroupFamily:
    kind: str
    members: list  # sorted index arrays, one per subgroup
    index: GroupIndex = field(repr=False)

    def elements(self, i: int) -> list:
        return [self.index.element(j) for j in self.members[i]]

    @property
    def order(self) -> int:
        return len(self.members[0])


def _borel_members(index: GroupIndex) -> list:
    p = index.p
    a, b, c, d = (index.elements[:, k] for k in range(4))
    out = [np.flatnonzero(c == 0)]
    for x in range(p):
        # g fixes [x : 1] iff a x + b = x (c x + d)
        out.append(np.flatnonzero((a * x + b - x * ((c * x + d) % p)) % p == 0))
    return out


def normalizer(index: GroupIndex, t: ProjMat) -> np.ndarray:
    """Indices of n with n <t> n^-1 = <t>."""
    G = index.group
    cyc = [IDENTITY]
    x = t
    while x != IDENTITY:
        cyc.append(x)
        x = G.mul(x, t)
    cyc_idx = index.indices(index.as_array(cyc))
    E = index.elements
    conj = mul_array(mul_array(E, np.array(t), index.p), inv_array(E, index.p), index.p)
    return np.flatnonzero(np.isin(index.indices(conj), cyc_idx))


def conjugates(index: GroupIndex, member: np.ndarray, chunk: int = 1 << 20) -> list:
    """All distinct g H g^-1 as sorted index arrays."""
    p = index.p
    H = index.elements[member]
    E = index.elements
    Einv = inv_array(E, p)
    seen = set()
    out = []
    step = max(1, chunk // len(member))
    for s in range(0, len(E), step):
        g, gi = E[s:s + step, None, :], Einv[s:s + step, None, :]
        C = index.indices(mul_array(mul_array(g, H[None, :, :], p), gi, p))
        C.sort(axis=1)
        for row in np.unique(C, axis=0):
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(row)
    return out


def _split_torus_generator(G: PSL2) -> ProjMat:
    F, p = G.field, G.p
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return G.canonicalize(g, 0, 0, F.inv(g))
    return G.canonicalize(p - 1, 0, 0, p - 1)  # p = 3 only


def _prime_factors(n: int) -> list:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def build_subgroup_family(kind: str, p: int, index: GroupIndex | None = None,
                          cap: int = DEFAULT_WALK_CAP) -> SubgroupFamily:
    """Borel subgroups, or all conjugates of a split / non-split torus normalizer."""
    index = _walk_index(p, cap, index)
    G = index.group
    if kind == "borel":
        members = _borel_members(index)
    elif kind == "split_torus_normalizer":
        members = conjugates(index, normalizer(index, _split_torus_generator(G)))
    elif kind == "nonsplit_torus_normalizer":
        members = conjugates(index, normalizer(index, build_nonsplit_torus(G).generator))
    else:
        raise DomainError(f"unknown subgroup family {kind!r}")
    return SubgroupFamily(kind, members, index)


def custom_family(elements, index: GroupIndex) -> SubgroupFamily:
    return SubgroupFamily("custom", [np.sort(index.indices(index.as_array(elements)))], index)


def _generators(index: GroupIndex, member: np.ndarray) -> list:
    G = index.group
    gens: list = []
    span = {IDENTITY}
    for i in member:
        g = index.element(int(i))
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = G.mul(x, s)
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        if len(span) == len(member):
            break
    return gens


def coset_partition(index: GroupIndex, member: np.ndarray) -> np.ndarray:
    """Label of the left coset gH for every g (orbits of right multiplication by H)."""
    n = len(index)
    rows, cols = [], []
    for s in _generators(index, member):
        rows.append(np.arange(n))
        cols.append(index.right_perm(s))
    if not rows:
        return np.arange(n)
    r, c = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


@dataclass
class CosetMass:
    value: float
    member: int
    coset_key: ProjMat
    subgroup_order: int
    pointwise_bound: float  # max_g mu(g) * |H|

    def to_dict(self) -> dict:
        return {"value": self.value, "member": self.member, "coset_key": list(self.coset_key),
                "subgroup_order": self.subgroup_order, "pointwise_bound": self.pointwise_bound}


def max_coset_mass(mu: Distribution, fam: SubgroupFamily) -> CosetMass:
    best = None
    peak = float(mu.mass.max())
    for k, member in enumerate(fam.members):
        labels = coset_partition(fam.index, member)
        masses = np.bincount(labels, weights=mu.mass)
        j = int(masses.argmax())
        if best is None or masses[j] > best.value:
            key = int(np.flatnonzero(labels == j).min())
            best = CosetMass(float(masses[j]), k, fam.index.element(key), len(member), peak * len(member))
    return best


def commutator_law_check(group: PSL2, H, samples: int = 1000, seed: int = 0) -> tuple[bool, tuple | None]:
    """Whether [[h1, h2], [h3, h4]] = 1 on ``samples`` random 4-tuples from H.

    Returns (holds, first violating tuple or None).
    """
    H = list(H)
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(H), size=(samples, 4))
    for i, j, k, m in picks.tolist():
        t = (H[i], H[j], H[k], H[m])
        c = group.commutator(group.commutator(t[0], t[1]), group.commutator(t[2], t[3]))
        if c != IDENTITY:
            return False, t
    return True, None
