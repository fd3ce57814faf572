"""Monotone partial maps, weighted realisers, antirealisers, and verification.

All weights are exact rationals; verification never touches floating point.
A realiser is valid when every ordered separation demand (x, y) with x not
>= y receives total weight at least 1 from maps sending x strictly below y.
An antirealiser (I, D) is valid when no monotone partial map separates more
I-mass than the D-mass of its domain; its value then lower-bounds the
fractional local t-dimension.

One reduction used by the unbounded-t solvers is recorded here as a lemma:
any monotone partial map into an arbitrary chain can be refined, fiber by
fiber, into a monotone partial injection into the |P|-element chain without
shrinking its separated-pair set or changing its domain.  Hence every
parameter defined over an arbitrary chain codomain equals its value with
codomain fixed to the |P|-chain, and optimal local realisers may be sought
among partial injections.  ``tests/test_maps.py`` checks this equivalence
exhaustively at small sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DNotNormalized,
    InputError,
    KindMismatch,
    NotMonotone,
    SearchSpaceTooLarge,
    UnknownElement,
)
from .poset import Poset, incomparable_pairs

DEFAULT_MAP_CAP = 2_000_000

INTEGER_LOCAL = "integer-local"
INTEGER_TOTAL = "integer-total"
FRACTIONAL_LOCAL = "fractional-local"
FRACTIONAL_TOTAL = "fractional-total"
KINDS = (INTEGER_LOCAL, INTEGER_TOTAL, FRACTIONAL_LOCAL, FRACTIONAL_TOTAL)


class MonotonePartialMap:
    """Partial function from poset elements to the chain {1..t}."""

    __slots__ = ("items", "t")

    def __init__(self, assignments, t: int):
        if t < 2:
            raise InputError("chain size t must be at least 2")
        items = tuple(sorted(dict(assignments).items()))
        for _, v in items:
            if not 1 <= v <= t:
                raise InputError(f"value {v} outside chain 1..{t}")
        self.items = items
        self.t = t

    @property
    def assign(self) -> dict[str, int]:
        return dict(self.items)

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(e for e, _ in self.items)

    def value(self, elem: str) -> int:
        for e, v in self.items:
            if e == elem:
                return v
        raise UnknownElement(f"{elem!r} not in domain")

    def restrict(self, subset) -> "MonotonePartialMap":
        keep = set(subset)
        return MonotonePartialMap(
            {e: v for e, v in self.items if e in keep}, self.t
        )

    def __eq__(self, other):
        return (
            isinstance(other, MonotonePartialMap)
            and self.items == other.items
            and self.t == other.t
        )

    def __hash__(self):
        return hash((self.items, self.t))

    def __repr__(self):
        body = " ".join(f"{e}->{v}" for e, v in self.items)
        return f"<pmap t={self.t} {body}>"


def is_monotone(p: Poset, m: MonotonePartialMap) -> bool:
    idx = [(p.index(e), v) for e, v in m.items]
    for i, vi in idx:
        for j, vj in idx:
            if i != j and p.leq_idx(i, j) and vi > vj:
                return False
    return True


def separated_pairs(p: Poset, m: MonotonePartialMap):
    """All demands (x, y) with x not >= y, both in dom(m), m(x) < m(y)."""
    if not is_monotone(p, m):
        raise NotMonotone(f"{m!r} is not monotone on the poset")
    out = []
    for x, vx in m.items:
        for y, vy in m.items:
            if vx < vy and not p.leq(y, x):
                out.append((x, y))
    return out


@dataclass(frozen=True)
class WeightedRealiser:
    """Weighted family of monotone partial maps.

    Duplicate maps are merged on construction: weights are summed for the
    fractional kinds, while the integer kinds keep plain set semantics
    (weight stays 1).
    """

    maps: tuple[tuple[MonotonePartialMap, Fraction], ...]
    t: int
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown realiser kind {self.kind!r}")
        for m, w in self.maps:
            if m.t != self.t:
                raise KindMismatch("map chain size differs from realiser t")
            if w < 0:
                raise InputError("weights must be nonnegative")
            if self.is_integer and w != 1:
                raise InputError("integer realisers carry weight 1 everywhere")

    @property
    def is_integer(self) -> bool:
        return self.kind.startswith("integer")

    @property
    def is_local(self) -> bool:
        return self.kind.endswith("local")

    def total_weight(self) -> Fraction:
        return sum((w for _, w in self.maps), Fraction(0))


def make_realiser(maps_with_weights, t: int, kind: str) -> WeightedRealiser:
    merged: dict[MonotonePartialMap, Fraction] = {}
    order: list[MonotonePartialMap] = []
    integer = kind.startswith("integer")
    for m, w in maps_with_weights:
        w = Fraction(w)
        if m not in merged:
            merged[m] = w if not integer else Fraction(1)
            order.append(m)
        elif not integer:
            merged[m] += w
    return WeightedRealiser(tuple((m, merged[m]) for m in order), t, kind)


def integer_realiser(maps, t: int, local: bool = True) -> WeightedRealiser:
    kind = INTEGER_LOCAL if local else INTEGER_TOTAL
    return make_realiser(((m, Fraction(1)) for m in maps), t, kind)


@dataclass(frozen=True)
class MultiplicityReport:
    valid: bool
    violation: tuple[str, str] | None
    multiplicity: dict[str, Fraction]
    max_multiplicity: Fraction
    total_weight: Fraction
    hansel_sum: Fraction | None  # sum over x of t^(-mu(x)), integer-local only


def verify_realiser(p: Poset, r: WeightedRealiser) -> MultiplicityReport:
    """Check coverage of every demand; report multiplicities or a witness.

    The violation witness is the first uncovered demand in the deterministic
    ``incomparable_pairs`` order, independent of any internal parallelism.
    """
    demands = incomparable_pairs(p)
    coverage = {d: Fraction(0) for d in demands}
    mu = {e: Fraction(0) for e in p.elements}
    for m, w in r.maps:
        if r.kind.endswith("total") and m.domain != set(p.elements):
            raise KindMismatch("total realiser contains a partial map")
        for x, y in separated_pairs(p, m):
            coverage[(x, y)] += w
        for e in m.domain:
            if e not in mu:
                raise UnknownElement(f"map uses {e!r}, not a poset element")
            mu[e] += w
    violation = next((d for d in demands if coverage[d] < 1), None)
    max_mu = max(mu.values(), default=Fraction(0)) if mu else Fraction(0)
    hansel = None
    if r.kind == INTEGER_LOCAL:
        hansel = sum(
            (Fraction(1, r.t ** int(mu[e])) for e in p.elements), Fraction(0)
        )
    return MultiplicityReport(
        valid=violation is None,
        violation=violation,
        multiplicity=mu,
        max_multiplicity=max_mu,
        total_weight=r.total_weight(),
        hansel_sum=hansel,
    )


# -- antirealisers ---------------------------------------------------------


@dataclass(frozen=True)
class Antirealiser:
    """Dual certificate (I, D) lower-bounding fractional local t-dimension.

    ``D is None`` marks the total-map variant: the weight I alone, with the
    constraint that no *total* monotone map separates I-mass above 1; that
    variant lower-bounds fractional t-dimension instead.
    """

    t: int
    I: tuple[tuple[str, str, Fraction], ...]
    D: tuple[tuple[str, Fraction], ...] | None

    @property
    def is_local(self) -> bool:
        return self.D is not None

    def i_map(self) -> dict[tuple[str, str], Fraction]:
        return {(x, y): w for x, y, w in self.I}

    def d_map(self) -> dict[str, Fraction]:
        return dict(self.D) if self.D is not None else {}

    def value(self) -> Fraction:
        return sum((w for _, _, w in self.I), Fraction(0))


def make_antirealiser(p: Poset, t: int, i_entries, d_entries=None) -> Antirealiser:
    """Validate and normalise an antirealiser against its poset.

    Entries of I sitting on pairs with x >= y are rejected outright: they
    indicate malformed input rather than harmless noise.
    """
    demands = set(incomparable_pairs(p))
    i_clean = []
    for x, y, w in i_entries:
        w = Fraction(w)
        if w < 0:
            raise InputError("I weights must be nonnegative")
        if (x, y) not in demands:
            if x not in p.elements or y not in p.elements:
                raise UnknownElement(f"I entry on unknown pair ({x!r}, {y!r})")
            raise InputError(f"I entry on a relation pair ({x!r}, {y!r})")
        if w:
            i_clean.append((x, y, w))
    d_clean = None
    if d_entries is not None:
        d_norm = {}
        for e, w in dict(d_entries).items():
            if e not in p.elements:
                raise UnknownElement(f"D entry on unknown element {e!r}")
            w = Fraction(w)
            if w < 0:
                raise InputError("D weights must be nonnegative")
            d_norm[e] = w
        total = sum(d_norm.values(), Fraction(0))
        if total != 1:
            raise DNotNormalized(f"sum of D is {total}, expected 1")
        d_clean = tuple(sorted(d_norm.items()))
    return Antirealiser(t, tuple(sorted(i_clean)), d_clean)


@dataclass(frozen=True)
class AntirealiserReport:
    valid: bool
    value: Fraction | None
    witness: MonotonePartialMap | None
    mode: str


def verify_antirealiser(p: Poset, a: Antirealiser, mode: str = "brute",
                        map_cap: int = DEFAULT_MAP_CAP) -> AntirealiserReport:
    """Certify an antirealiser by exhausting its constraint family.

    ``brute`` enumerates every monotone partial map (local variant) or every
    total monotone map (total variant).  ``ordered-tpartite`` applies only to
    local antirealisers of chains and walks the ordered <=t-partite vertex
    structures instead, which carry exactly the separation patterns of
    monotone partial maps.
    """
    i_map = a.i_map()
    if a.is_local:
        d_map = a.d_map()
        if mode == "ordered-tpartite":
            _require_chain(p)
            witness = _check_tpartite(p, a.t, i_map, d_map, map_cap)
        elif mode == "brute":
            witness = _check_brute_local(p, a.t, i_map, d_map, map_cap)
        else:
            raise InputError(f"unknown verification mode {mode!r}")
    else:
        if mode != "brute":
            raise InputError("total antirealisers only support brute mode")
        witness = _check_brute_total(p, a.t, i_map, map_cap)
    if witness is not None:
        return AntirealiserReport(False, None, witness, mode)
    return AntirealiserReport(True, a.value(), None, mode)


def _check_brute_local(p, t, i_map, d_map, map_cap):
    for m in enumerate_monotone_pmaps(p, t, useful_only=True, map_cap=map_cap):
        sep = sum((i_map.get(d, Fraction(0)) for d in separated_pairs(p, m)),
                  Fraction(0))
        dom = sum((d_map.get(e, Fraction(0)) for e in m.domain), Fraction(0))
        if sep > dom:
            return m
    return None


def _check_brute_total(p, t, i_map, map_cap):
    for m in enumerate_monotone_total_maps(p, t, map_cap=map_cap):
        sep = sum((i_map.get(d, Fraction(0)) for d in separated_pairs(p, m)),
                  Fraction(0))
        if sep > 1:
            return m
    return None


def _check_tpartite(p, t, i_map, d_map, map_cap):
    from .graphs import enumerate_ordered_tpartite

    order = chain_order(p)
    n = p.n
    for blocks in enumerate_ordered_tpartite(n, t, cap=map_cap):
        sep = Fraction(0)
        dom = Fraction(0)
        for bi, block in enumerate(blocks):
            for xi in block:
                dom += d_map.get(order[xi], Fraction(0))
            for bj in range(bi + 1, len(blocks)):
                for xi in block:
                    for yj in blocks[bj]:
                        sep += i_map.get((order[xi], order[yj]), Fraction(0))
        if sep > dom:
            assign = {}
            for bi, block in enumerate(blocks):
                for xi in block:
                    assign[order[xi]] = bi + 1
            return MonotonePartialMap(assign, t)
    return None


def chain_order(p: Poset) -> list[str]:
    """Elements of a chain poset listed from bottom to top."""
    _require_chain(p)
    return sorted(p.elements, key=lambda e: -bin(p.up[p.index(e)]).count("1"))


def _require_chain(p: Poset):
    n = p.n
    for i in range(n):
        for j in range(n):
            if not (p.leq_idx(i, j) or p.leq_idx(j, i)):
                raise InputError("ordered-tpartite mode requires a chain")


# -- enumeration -----------------------------------------------------------


def enumerate_monotone_pmaps(p: Poset, t: int, useful_only: bool = False,
                             map_cap: int = DEFAULT_MAP_CAP):
    """Yield every monotone partial map P -> {1..t} exactly once.

    Order is lexicographic over value vectors indexed by element position,
    with 0 standing for "outside the domain".  ``useful_only`` drops maps
    that separate no demand (constants, singletons, the empty map).
    """
    n = p.n
    if (t + 1) ** n > map_cap:
        raise SearchSpaceTooLarge(
            f"(t+1)^n = {(t + 1) ** n} candidate maps exceeds cap {map_cap}"
        )
    if t < 2:
        raise InputError("chain size t must be at least 2")
    values = [0] * n
    elements = p.elements

    def compatible(i, v):
        for j in range(i):
            w = values[j]
            if w == 0:
                continue
            if p.leq_idx(j, i) and w > v:
                return False
            if p.leq_idx(i, j) and v > w:
                return False
        return True

    def emit():
        m = MonotonePartialMap(
            {elements[i]: values[i] for i in range(n) if values[i]}, t
        )
        if useful_only and not _separates_something(p, values):
            return None
        return m

    def rec(i):
        if i == n:
            m = emit()
            if m is not None:
                yield m
            return
        for v in range(t + 1):
            if v == 0 or compatible(i, v):
                values[i] = v
                yield from rec(i + 1)
        values[i] = 0

    yield from rec(0)


def _separates_something(p, values):
    n = len(values)
    for i in range(n):
        if not values[i]:
            continue
        for j in range(n):
            if values[j] and values[i] < values[j] and not p.leq_idx(j, i):
                return True
    return False


def enumerate_monotone_total_maps(p: Poset, t: int, useful_only: bool = False,
                                  map_cap: int = DEFAULT_MAP_CAP):
    """Yield every total monotone map P -> {1..t}, lexicographically.

    Enumeration is a pruned DFS, so the cap counts maps actually yielded,
    not raw t^n candidates.
    """
    if t < 2:
        raise InputError("chain size t must be at least 2")
    n = p.n
    values = [0] * n
    count = 0
    elements = p.elements

    def compatible(i, v):
        for j in range(i):
            if p.leq_idx(j, i) and values[j] > v:
                return False
            if p.leq_idx(i, j) and v > values[j]:
                return False
        return True

    def rec(i):
        nonlocal count
        if i == n:
            if useful_only and not _separates_something(p, values):
                return
            count += 1
            if count > map_cap:
                raise SearchSpaceTooLarge(
                    f"total-map enumeration exceeds cap {map_cap}"
                )
            yield MonotonePartialMap(
                {elements[k]: values[k] for k in range(n)}, t
            )
            return
        for v in range(1, t + 1):
            if compatible(i, v):
                values[i] = v
                yield from rec(i + 1)
        values[i] = 0

    yield from rec(0)


def enumerate_monotone_pinjections(p: Poset, map_cap: int = DEFAULT_MAP_CAP):
    """Monotone partial injections into the |P|-chain, as refinement targets.

    These are exactly the pairs (subset S, linear extension of P|S), encoded
    with values 1..|S|.  By the refinement lemma in the module docstring they
    carry every separated-pair set that any local realiser map can have, at
    identical domains, so local solvers over an unbounded codomain may search
    this pool instead.
    """
    from .poset import linear_extensions, suborder

    n = p.n
    if 2 ** n > map_cap:
        raise SearchSpaceTooLarge(f"2^{n} subsets exceeds cap {map_cap}")
    count = 0
    t = max(n, 2)
    for mask in range(1, 1 << n):
        elems = [p.elements[i] for i in range(n) if mask >> i & 1]
        if len(elems) < 2:
            continue
        sub = suborder(p, elems)
        for ext in linear_extensions(sub):
            count += 1
            if count > map_cap:
                raise SearchSpaceTooLarge(
                    f"partial-injection enumeration exceeds cap {map_cap}"
                )
            yield MonotonePartialMap(
                {sub.elements[e]: k + 1 for k, e in enumerate(ext)}, t
            )


# -- realiser transformations ----------------------------------------------


def restrict_realiser(r: WeightedRealiser, subset) -> WeightedRealiser:
    """Restrict every map to the subset; empty restrictions are dropped."""
    keep = set(subset)
    restricted = []
    for m, w in r.maps:
        rm = m.restrict(keep)
        if rm.items:
            restricted.append((rm, w))
    return make_realiser(restricted, r.t, r.kind)


def product_realiser(rp: WeightedRealiser, rq: WeightedRealiser,
                     prod: Poset) -> WeightedRealiser:
    """Lift realisers of the factors through the projections of a product."""
    if rp.t != rq.t or rp.kind != rq.kind:
        raise KindMismatch("product needs matching t and kind")
    proj = prod.extras.get("product")
    if proj is None:
        raise InputError("poset lacks product projection metadata")
    lifted = []
    for m, w in rp.maps:
        assign = m.assign
        lifted.append((
            MonotonePartialMap(
                {e: assign[x] for e, (x, _) in proj.items() if x in assign},
                rp.t,
            ),
            w,
        ))
    for m, w in rq.maps:
        assign = m.assign
        lifted.append((
            MonotonePartialMap(
                {e: assign[y] for e, (_, y) in proj.items() if y in assign},
                rq.t,
            ),
            w,
        ))
    return make_realiser(lifted, rp.t, rp.kind)


def compose_with_chain_realiser(r: WeightedRealiser, t: int) -> WeightedRealiser:
    """Compose a realiser targeting the s-chain with the recursive local
    t-realiser of that chain, multiplying multiplicities by ceil(log_t s).

    For s <= t the recursive realiser is a single injective total map, so
    composition degenerates to a relabeling of values.
    """
    from .constructions import chain_realiser
    from .errors import BadChainSizes

    s = r.t
    if t < 2 or s < 2:
        raise BadChainSizes(f"need codomain sizes s={s} >= 2 and t={t} >= 2")
    stage = chain_realiser(s, t, kind="local")
    chain_names = [str(i) for i in range(1, s + 1)]
    composed = []
    for m, w in r.maps:
        for g, _ in stage.maps:
            g_assign = g.assign
            assign = {}
            for e, v in m.items:
                gv = g_assign.get(chain_names[v - 1])
                if gv is not None:
                    assign[e] = gv
            if assign:
                composed.append((MonotonePartialMap(assign, t), w))
    return make_realiser(composed, t, r.kind)
