"""Graphs, complete bipartite edge-coverings, and the ordered t-partite
machinery behind the chain antirealiser certificates.

``compute_lbc`` finds the exact local complete bipartite covering number by
a budget search over an explicitly enumerated biclique pool.  The pool is
generated from maximal bicliques and all their trims (sub-bicliques), which
is the full biclique family; a property test compares the budget search
against an unrestricted reference at tiny sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadDecomposition,
    InputError,
    NotDecreasing,
    SearchSpaceTooLarge,
    UnknownElement,
)

DEFAULT_GRAPH_CAP = 2_000_000


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edge_set: frozenset[frozenset[str]]

    def __init__(self, vertices, edges):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise InputError("duplicate vertex id")
        known = set(vertices)
        norm = set()
        for e in edges:
            u, v = tuple(e)
            if u == v:
                raise InputError(f"loop on {u!r}")
            if u not in known or v not in known:
                raise UnknownElement(f"edge ({u!r}, {v!r}) uses unknown vertices")
            norm.add(frozenset((u, v)))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edge_set", frozenset(norm))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[str, str]]:
        idx = {v: i for i, v in enumerate(self.vertices)}
        return sorted(
            (tuple(sorted(e, key=lambda x: idx[x])) for e in self.edge_set),
            key=lambda e: (idx[e[0]], idx[e[1]]),
        )

    def adjacent(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self.edge_set


@dataclass(frozen=True)
class BicliqueCovering:
    """List of (left, right) vertex-set pairs, each spanning a biclique."""

    bicliques: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]


def make_covering(pairs) -> BicliqueCovering:
    return BicliqueCovering(
        tuple((tuple(sorted(l)), tuple(sorted(r))) for l, r in pairs)
    )


@dataclass(frozen=True)
class CoveringReport:
    valid: bool
    witness: tuple[str, str] | None  # missing edge or non-edge inside a biclique
    reason: str | None
    multiplicity: dict[str, int]
    max_multiplicity: int


def verify_covering(g: Graph, c: BicliqueCovering) -> CoveringReport:
    mu = {v: 0 for v in g.vertices}
    covered = set()
    for left, right in c.bicliques:
        members = set(left) | set(right)
        if set(left) & set(right):
            u = sorted(set(left) & set(right))[0]
            return CoveringReport(False, (u, u), "sides overlap", mu, 0)
        for v in members:
            if v not in mu:
                raise UnknownElement(f"covering uses unknown vertex {v!r}")
        for u in left:
            for v in right:
                if not g.adjacent(u, v):
                    return CoveringReport(
                        False, (u, v), "non-edge inside a listed biclique", mu, 0
                    )
                covered.add(frozenset((u, v)))
        for v in members:
            mu[v] += 1
    missing = g.edge_set - covered
    if missing:
        idx = {v: i for i, v in enumerate(g.vertices)}
        witness = tuple(sorted(min(missing, key=sorted), key=lambda x: idx[x]))
        return CoveringReport(False, witness, "edge not covered", mu, 0)
    return CoveringReport(True, None, None, mu, max(mu.values(), default=0))


def enumerate_bicliques(g: Graph, cap: int = DEFAULT_GRAPH_CAP):
    """All complete bipartite subgraphs (L, R), both sides nonempty.

    Generated as every nonempty L with R ranging over nonempty subsets of
    the common neighborhood of L; the unordered pair {L, R} is deduplicated.
    Equivalently: every trim of every maximal biclique.
    """
    n = g.n
    idx = {v: i for i, v in enumerate(g.vertices)}
    adj = [0] * n
    for e in g.edge_set:
        u, v = tuple(e)
        adj[idx[u]] |= 1 << idx[v]
        adj[idx[v]] |= 1 << idx[u]
    seen = set()
    out = []
    full = (1 << n) - 1
    for left in range(1, 1 << n):
        common = full
        m = left
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            common &= adj[i]
        common &= ~left
        if not common:
            continue
        sub = common
        right = sub
        while right:
            key = frozenset((left, right)) if left != right else frozenset((left,))
            if key not in seen:
                seen.add(key)
                out.append((left, right))
                if len(out) > cap:
                    raise SearchSpaceTooLarge(
                        f"biclique enumeration exceeds cap {cap}"
                    )
            right = (right - 1) & sub
    out.sort()
    return out


def compute_lbc(g: Graph, cap: int = DEFAULT_GRAPH_CAP):
    """Exact local complete bipartite covering number with a witness covering.

    Budget search: for increasing z, look for a covering in which every
    vertex belongs to at most z bicliques, using the same capacity-covering
    DFS as the local-dimension solver (a biclique on d vertices covers at
    most floor(d^2/4) edges, the bipartite Turan bound).
    """
    from .search import cover_with_capacity, turan_edges

    edges = g.edges()
    if not edges:
        return 0, make_covering([])
    idx = {v: i for i, v in enumerate(g.vertices)}
    pool = enumerate_bicliques(g, cap)
    pair_index = {frozenset(e): k for k, e in enumerate(edges)}
    items = []
    for left, right in pool:
        use_mask = left | right
        cover_mask = 0
        li = left
        while li:
            i = (li & -li).bit_length() - 1
            li &= li - 1
            rj = right
            while rj:
                j = (rj & -rj).bit_length() - 1
                rj &= rj - 1
                k = pair_index.get(frozenset((g.vertices[i], g.vertices[j])))
                if k is not None:
                    cover_mask |= 1 << k
        items.append((use_mask, cover_mask))
    n = g.n
    z = 1
    while True:
        chosen = cover_with_capacity(
            len(edges), items, [z] * n, lambda d: turan_edges(d, 2)
        )
        if chosen is not None:
            pairs = []
            for k in chosen:
                left, right = pool[k]
                pairs.append((
                    [g.vertices[i] for i in range(n) if left >> i & 1],
                    [g.vertices[i] for i in range(n) if right >> i & 1],
                ))
            return z, make_covering(pairs)
        z += 1
        if z > len(edges):
            raise AssertionError("budget search failed to terminate")


def make_Hn(n: int) -> Graph:
    """Bipartite incomparability graph of the split of the n-chain:
    vertices i' and j'', edges (i', j'') exactly when i > j."""
    if n < 1:
        raise InputError("n must be positive")
    vertices = [f"{i}'" for i in range(1, n + 1)] + [
        f"{j}''" for j in range(1, n + 1)
    ]
    edges = [
        (f"{i}'", f"{j}''")
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i > j
    ]
    return Graph(vertices, edges)


def hn_covering_number_readings(n: int) -> tuple[int, int]:
    """The two readings of the published difference-graph covering formula.

    The formula min(k : C(2k, k) >= steps + 1) is stated for a difference
    graph with a given number of steps; H_n has n-1 steps.  Returned as
    (literal reading with steps = n, shifted reading with steps = n-1); the
    shifted reading is the one that matches the exact solver on small cases.
    """
    def smallest(target):
        k = 0
        while math.comb(2 * k, k) < target:
            k += 1
        return k

    return smallest(n + 1), smallest(n)


# -- ordered t-partite structures -----------------------------------------


def enumerate_ordered_tpartite(n: int, t: int, cap: int = DEFAULT_GRAPH_CAP):
    """Every vertex subset of [n] with a partition into at most t blocks that
    are consecutive within the subset, yielded exactly once.

    A structure with blocks B_1 < ... < B_k corresponds to the monotone
    partial map of the n-chain sending B_i to value i; the correspondence
    preserves separated-pair sets (cross-block pairs).
    """
    if t < 2:
        raise InputError("t must be at least 2")
    if 2 ** n * n ** (t - 1) > cap:
        raise SearchSpaceTooLarge(
            f"2^n * n^(t-1) = {2 ** n * n ** (t - 1)} exceeds cap {cap}"
        )
    blocks: list[list[int]] = []

    def rec(i):
        if i == n:
            yield tuple(tuple(b) for b in blocks)
            return
        # skip element i
        yield from rec(i + 1)
        # join current block
        if blocks:
            blocks[-1].append(i)
            yield from rec(i + 1)
            blocks[-1].pop()
        # open a new block
        if len(blocks) < t:
            blocks.append([i])
            yield from rec(i + 1)
            blocks.pop()

    yield from rec(0)


def tpartite_to_map(p, blocks):
    """Monotone partial map of a chain poset matching a block structure."""
    from .maps import MonotonePartialMap, chain_order

    order = chain_order(p)
    assign = {}
    for b, block in enumerate(blocks):
        for i in block:
            assign[order[i]] = b + 1
    return MonotonePartialMap(assign, max(2, len(blocks)))


def turan_length_profile(k: int, t: int, ell: int) -> int:
    """Number of edges of length ``ell`` in the compressed Turan ordered
    t-partite graph on k vertices (k = tq + r with 0 <= r < t):
    (t-1)*ell below length q, (t-1)*q at length q, and k - ell above."""
    if k < 1 or t < 2:
        raise BadDecomposition("need k >= 1 and t >= 2")
    if not 1 <= ell <= k - 1:
        raise BadDecomposition(f"length {ell} outside 1..{k - 1}")
    q, r = divmod(k, t)
    if ell < q:
        return (t - 1) * ell
    if ell == q:
        return (t - 1) * q
    return t * q + r - ell  # == k - ell


def max_decreasing_weight_subgraph(n: int, t: int, weight, kmax: int):
    """For each vertex count k <= kmax, the maximum of the weighted edge sum
    over ordered t-partite subgraphs of [n] with k vertices, where the edge
    weight depends only on length and is monotone decreasing.

    By the compression observation the maximum is attained on a compressed
    Turan graph, so only the length profile is evaluated.
    """
    kmax = min(kmax, n)
    weights = [None] + [Fraction(weight(ell)) for ell in range(1, max(kmax, 2))]
    for ell in range(1, kmax - 1):
        if weights[ell] < weights[ell + 1]:
            raise NotDecreasing(
                f"weight({ell}) < weight({ell + 1}) is not allowed"
            )
    out = {}
    for k in range(1, kmax + 1):
        total = Fraction(0)
        for ell in range(1, k):
            total += turan_length_profile(k, t, ell) * weights[ell]
        out[k] = total
    return out


def brute_max_weight_subgraph(n: int, t: int, weight, kmax: int,
                              cap: int = DEFAULT_GRAPH_CAP):
    """Reference maximiser over all ordered t-partite structures (oracle)."""
    best = {k: Fraction(0) for k in range(1, min(kmax, n) + 1)}
    for blocks in enumerate_ordered_tpartite(n, t, cap):
        k = sum(len(b) for b in blocks)
        if not 1 <= k <= kmax:
            continue
        total = Fraction(0)
        for bi in range(len(blocks)):
            for bj in range(bi + 1, len(blocks)):
                for x in blocks[bi]:
                    for y in blocks[bj]:
                        total += Fraction(weight(abs(y - x)))
        if total > best[k]:
            best[k] = total
    return best
