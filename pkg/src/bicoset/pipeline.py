"""End-to-end verification of one (p, d, x) instance, phase by phase."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field
from importlib.resources import files

from . import cosetgraph, spectral, walk
from .errors import DomainError, NonConvergenceError, ResourceError
from .field import is_prime
from .group import PSL2, enumerate_group, group_order
from .subgroups import (PairCertificate, Rejection, SearchExhausted, build_nonsplit_torus, check_order,
                        default_depths, make_pair, product_free_depth, search, subgroup_of_order)

PHASES = ("search", "structure", "girth_bound", "girth", "spectral", "walk")


@dataclass
class Settings:
    mode: str = "sieve"
    l1: int | None = None
    l2: int | None = None
    tol: float = spectral.DEFAULT_TOL
    max_iter: int = spectral.DEFAULT_MAX_ITER
    dense_cap: int = spectral.DEFAULT_DENSE_CAP
    bfs_cap: int = cosetgraph.DEFAULT_BFS_CAP
    steps: int = 100
    coset_l: int = 10
    seed: int = 0


@dataclass
class VerifyReport:
    p: int
    d: int
    x: int | None = None
    group_order: int = 0
    search: dict | None = None
    intersection_trivial: bool | None = None
    h1_order: int | None = None
    h2_order: int | None = None
    graph: dict | None = None
    girth: int | None = None
    girth_algebraic_bound: int | None = None
    girth_theorem_ratio: float | None = None
    spectral: dict | None = None
    coset2cayley_ok: bool | None = None
    coset2cayley_slack: float | None = None
    convexity_ok: bool | None = None
    convexity_slack: float | None = None
    walk: dict | None = None
    timings: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "VerifyReport":
        return cls(**data)

    def outcome(self) -> dict:
        """Everything except timings and search provenance."""
        out = self.to_dict()
        out.pop("timings")
        out.pop("search")
        return out


def resolve_certificate(p: int, d: int, x: int | None, settings: Settings) -> tuple[PairCertificate, dict]:
    """Run the search, or build the pair for a given x (DomainError if it is degenerate)."""
    if x is None:
        return search(p, d, mode=settings.mode, L1=settings.l1, L2=settings.l2, seed=settings.seed)
    G = PSL2(p)
    check_order(p, d)
    if not 0 <= x < p:
        raise DomainError(f"x = {x} is not in [0, {p})")
    cert = make_pair(subgroup_of_order(build_nonsplit_torus(G), d), x)
    if isinstance(cert, Rejection):
        raise DomainError(f"H1 and H2 share a nontrivial element at x = {x}")
    l1, l2 = default_depths(p, d)
    return cert, {"mode": "given", "l1": l1 if settings.l1 is None else settings.l1,
                  "l2": l2 if settings.l2 is None else settings.l2}


class _Phase:
    def __init__(self, report: VerifyReport, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.report.timings[self.name] = time.perf_counter() - self.t0
        if exc_type is not None and issubclass(exc_type, (ResourceError, NonConvergenceError)):
            self.report.skipped[self.name] = str(exc)
            return True
        return False


def verify(p: int, d: int, x: int | None = None, settings: Settings | None = None) -> VerifyReport:
    """Search (unless x is given), then girth, spectral chain and walk summary.

    Precondition failures raise DomainError; a phase that hits a resource cap
    is recorded in ``skipped`` and the report is still returned.
    """
    s = settings or Settings()
    rep = VerifyReport(p=p, d=d, group_order=group_order(p))
    with _Phase(rep, "search"):
        cert, info = resolve_certificate(p, d, x, s)
    rep.x = cert.x
    rep.search = info
    rep.intersection_trivial = cert.intersection_trivial
    rep.h1_order, rep.h2_order = cert.H1.order, cert.H2.order

    index = None
    graph = None
    with _Phase(rep, "structure"):
        index = enumerate_group(p)
        graph = cosetgraph.build_graph(cert, index=index)
        ld, rd = graph.left_degrees(), graph.right_degrees()
        rep.graph = {"left": graph.left_count, "right": graph.right_count, "edges": graph.edge_count,
                     "regular_degree": int(ld[0]) if len(set(ld.tolist()) | set(rd.tolist())) == 1 else None}

    with _Phase(rep, "girth_bound"):
        rep.girth_algebraic_bound = 2 * product_free_depth(cert, 16) + 2
    with _Phase(rep, "girth"):
        rep.girth = cosetgraph.girth(cert, bfs_cap=s.bfs_cap)
        rep.girth_theorem_ratio = rep.girth * math.log(d - 1) / math.log(rep.group_order)

    with _Phase(rep, "spectral"):
        ctx = spectral.SpectralContext(cert, index=index, graph=graph, tol=s.tol, max_iter=s.max_iter,
                                       dense_cap=s.dense_cap, seed=s.seed)
        rep.spectral = ctx.report().to_dict()
        c2c = spectral.verify_coset2cayley(ctx)
        conv = spectral.convexity_bound(ctx)
        rep.coset2cayley_ok, rep.coset2cayley_slack = c2c.ok, c2c.slack
        rep.convexity_ok, rep.convexity_slack = conv.ok, conv.slack

    with _Phase(rep, "walk"):
        if index is None:
            index = enumerate_group(p)
        curve = walk.flattening_curve(cert, s.steps, index=index)
        mu = walk.walk_power(cert, s.coset_l, index=index)
        mass = walk.max_coset_mass(mu, walk.build_subgroup_family("borel", p, index=index))
        rep.walk = {"steps": s.steps, "mix_step": curve.mix_step,
                    "final_uniform_ratio": curve.rows[-1][2] if curve.rows else None,
                    "coset_l": s.coset_l, "max_borel_coset_mass": mass.value,
                    "borel_coset_key": list(mass.coset_key), "pointwise_bound": mass.pointwise_bound}
    return rep


SCAN_COLUMNS = ("p", "order", "x", "girth", "girth_bound",
                "norm_bipartite_a0", "norm_cayley_s_a0", "norm_cayley_s0_a0")


def scan_primes(d: int, p_min: int, p_max: int) -> list[int]:
    """Primes p in [p_min, p_max] with d | (p+1)/2."""
    if d < 3:
        raise DomainError(f"d = {d} is too small; the construction needs d >= 3")
    return [p for p in range(max(p_min, 5), p_max + 1) if is_prime(p) and ((p + 1) // 2) % d == 0]


def scan_row(p: int, d: int, settings: Settings | None = None) -> dict:
    """One scan table row; cells whose phase hit a cap are left as None."""
    s = settings or Settings()
    row = dict.fromkeys(SCAN_COLUMNS)
    row["p"], row["order"] = p, group_order(p)
    try:
        cert, _ = resolve_certificate(p, d, None, s)
    except SearchExhausted:
        return row
    row["x"] = cert.x
    try:
        row["girth_bound"] = 2 * product_free_depth(cert, 16) + 2
    except ResourceError:
        pass
    try:
        row["girth"] = cosetgraph.girth(cert, bfs_cap=s.bfs_cap)
    except ResourceError:
        pass
    try:
        ctx = spectral.SpectralContext(cert, tol=s.tol, max_iter=s.max_iter, dense_cap=s.dense_cap, seed=s.seed)
        rep = ctx.report()
        row["norm_bipartite_a0"] = rep.norm_bipartite_a0
        row["norm_cayley_s_a0"] = rep.norm_cayley_s_a0
        row["norm_cayley_s0_a0"] = rep.norm_cayley_s0_a0
    except (ResourceError, NonConvergenceError):
        pass
    return row


def write_scan(rows, fh) -> None:
    w = csv.DictWriter(fh, fieldnames=SCAN_COLUMNS)
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in r.items()})


def load_schema(name: str) -> dict:
    """A JSON schema shipped with the package: ``"search"`` or ``"verify_report"``."""
    return json.loads(files("bicoset").joinpath("schemas", f"{name}.schema.json").read_text())
