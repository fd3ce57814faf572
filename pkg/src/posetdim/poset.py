"""Finite posets and the order-theoretic transformations used everywhere else.

A poset stores its ground set as an ordered tuple of opaque string ids and
its order relation as one bitmask per element (``up[i]`` has bit j set iff
element i <= element j).  Reflexivity, antisymmetry and transitivity are
checked at construction, after which instances are immutable and safe to
share.  Full matrices are fine here: target instances have at most a few
dozen elements.

``extras`` carries provenance metadata (e.g. the primed correspondence of a
split, or the factor projections of a product) that later constructions need;
it never participates in equality or hashing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .errors import (
    BadDescriptor,
    CycleDetected,
    DuplicateElement,
    EmptyPoset,
    LayerOutOfRange,
    NotTwoLevel,
    UnknownElement,
)

ISO_CAP = 12


@dataclass(frozen=True)
class Poset:
    elements: tuple[str, ...]
    up: tuple[int, ...]  # up[i] bit j set iff elements[i] <= elements[j]
    extras: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise EmptyPoset("posets are nonempty by definition")
        if len(set(self.elements)) != n:
            raise DuplicateElement("element ids must be pairwise distinct")
        _check_order(self.elements, self.up)
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(self.elements)})

    # -- basic queries ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.elements)

    def index(self, elem: str) -> int:
        try:
            return self._index[elem]
        except KeyError:
            raise UnknownElement(f"unknown element {elem!r}") from None

    def leq(self, x: str, y: str) -> bool:
        return bool(self.up[self.index(x)] >> self.index(y) & 1)

    def leq_idx(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def down(self) -> tuple[int, ...]:
        """Transposed relation: bit j of down[i] iff j <= i."""
        n = self.n
        out = [0] * n
        for i in range(n):
            row = self.up[i]
            while row:
                j = (row & -row).bit_length() - 1
                out[j] |= 1 << i
                row &= row - 1
        return tuple(out)

    def covers(self) -> list[tuple[str, str]]:
        """Cover pairs (x, y): x < y with nothing strictly between."""
        n = self.n
        out = []
        for i in range(n):
            for j in range(n):
                if i != j and self.leq_idx(i, j):
                    between = any(
                        k != i and k != j and self.leq_idx(i, k) and self.leq_idx(k, j)
                        for k in range(n)
                    )
                    if not between:
                        out.append((self.elements[i], self.elements[j]))
        return out

    def minimal_elements(self) -> list[str]:
        down = self.down()
        return [e for i, e in enumerate(self.elements) if down[i] == 1 << i]

    def maximal_elements(self) -> list[str]:
        return [e for i, e in enumerate(self.elements) if self.up[i] == 1 << i]

    def strict_pairs(self) -> list[tuple[str, str]]:
        return [
            (self.elements[i], self.elements[j])
            for i in range(self.n)
            for j in range(self.n)
            if i != j and self.leq_idx(i, j)
        ]


def _check_order(elements, up):
    n = len(elements)
    if len(up) != n:
        raise ValueError("relation size does not match ground set")
    full = (1 << n) - 1
    for i in range(n):
        if up[i] & ~full:
            raise ValueError("relation references unknown indices")
        if not up[i] >> i & 1:
            raise ValueError(f"relation not reflexive at {elements[i]!r}")
    for i in range(n):
        row = up[i]
        j_iter = row
        while j_iter:
            j = (j_iter & -j_iter).bit_length() - 1
            j_iter &= j_iter - 1
            if j != i and up[j] >> i & 1:
                raise CycleDetected(
                    f"antisymmetry fails on {elements[i]!r}, {elements[j]!r}"
                )
            if up[j] & ~row:
                raise ValueError("relation not transitive")


def _closure(n: int, adj: list[int]) -> list[int]:
    """Reflexive-transitive closure by iterated boolean matrix squaring."""
    rows = [adj[i] | (1 << i) for i in range(n)]
    while True:
        nxt = list(rows)
        for i in range(n):
            row = rows[i]
            acc = row
            j_iter = row
            while j_iter:
                j = (j_iter & -j_iter).bit_length() - 1
                j_iter &= j_iter - 1
                acc |= rows[j]
            nxt[i] = acc
        if nxt == rows:
            return rows
        rows = nxt


def build_poset(elements, covers, extras=None) -> Poset:
    """Poset from a cover (or any acyclic) relation; rejects cycles."""
    elements = tuple(elements)
    if len(set(elements)) != len(elements):
        raise DuplicateElement("duplicate element id")
    if not elements:
        raise EmptyPoset("empty ground set")
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    adj = [0] * n
    for lo, hi in covers:
        if lo not in index or hi not in index:
            raise UnknownElement(f"cover ({lo!r}, {hi!r}) uses unknown elements")
        if lo == hi:
            raise CycleDetected(f"self-loop on {lo!r}")
        adj[index[lo]] |= 1 << index[hi]
    rows = _closure(n, adj)
    for i in range(n):
        row = rows[i]
        j_iter = row & ~(1 << i)
        while j_iter:
            j = (j_iter & -j_iter).bit_length() - 1
            j_iter &= j_iter - 1
            if rows[j] >> i & 1:
                raise CycleDetected(
                    f"cycle through {elements[i]!r} and {elements[j]!r}"
                )
    return Poset(elements, tuple(rows), extras or {})


# -- builtin constructors -------------------------------------------------


def chain(n: int) -> Poset:
    _positive(n)
    names = tuple(str(i) for i in range(1, n + 1))
    up = tuple(((1 << n) - 1) >> i << i for i in range(n))
    return Poset(names, up, {"builtin": f"chain:{n}"})


def antichain(n: int) -> Poset:
    _positive(n)
    names = tuple(str(i) for i in range(1, n + 1))
    return Poset(names, tuple(1 << i for i in range(n)), {"builtin": f"antichain:{n}"})


def _subset_name(bits: int) -> str:
    return "".join(str(i + 1) for i in range(bits.bit_length()) if bits >> i & 1)


def boolean_lattice(n: int) -> Poset:
    _positive(n)
    if n > 9:
        raise BadDescriptor("subset naming uses single digits; bool:n needs n <= 9")
    names = sorted(range(1 << n), key=lambda b: (bin(b).count("1"), _subset_name(b)))
    up = []
    for b in names:
        mask = 0
        for j, c in enumerate(names):
            if b & ~c == 0:
                mask |= 1 << j
        up.append(mask)
    return Poset(
        tuple(_subset_name(b) for b in names), tuple(up), {"builtin": f"bool:{n}"}
    )


def layers(n: int, lo: int, hi: int) -> Poset:
    """Suborder of the Boolean lattice induced by the layers lo and hi."""
    _positive(n)
    if not 1 <= lo <= hi <= n:
        raise LayerOutOfRange(f"need 1 <= {lo} <= {hi} <= {n}")
    if n > 9:
        raise BadDescriptor("subset naming uses single digits; layers needs n <= 9")
    sets = [b for b in range(1 << n) if bin(b).count("1") == lo]
    if hi != lo:
        sets += [b for b in range(1 << n) if bin(b).count("1") == hi]
    sets.sort(key=lambda b: (bin(b).count("1"), _subset_name(b)))
    up = []
    for b in sets:
        mask = 0
        for j, c in enumerate(sets):
            if b & ~c == 0:
                mask |= 1 << j
        up.append(mask)
    extras = {
        "builtin": f"layers:{n}:{lo}:{hi}",
        "base_size": n,
        "layer_sizes": (lo, hi),
    }
    return Poset(tuple(_subset_name(b) for b in sets), tuple(up), extras)


def standard_example(n: int) -> Poset:
    """S_n: singletons and co-singletons of [n] ordered by inclusion."""
    if n < 2:
        raise BadDescriptor("std:n needs n >= 2")
    p = layers(n, 1, n - 1)
    p.extras["builtin"] = f"std:{n}"
    return p


def product(p: Poset, q: Poset) -> Poset:
    """Componentwise order on pairs, with projection metadata retained."""
    names = []
    proj = {}
    for x in p.elements:
        for y in q.elements:
            name = f"({x},{y})"
            proj[name] = (x, y)
            names.append(name)
    nq = q.n
    up = []
    for i in range(p.n):
        for j in range(q.n):
            mask = 0
            for k in range(p.n):
                if not p.leq_idx(i, k):
                    continue
                row = q.up[j]
                while row:
                    m = (row & -row).bit_length() - 1
                    row &= row - 1
                    mask |= 1 << (k * nq + m)
            up.append(mask)
    return Poset(tuple(names), tuple(up), {"product": proj})


def suborder(p: Poset, subset) -> Poset:
    keep = [e for e in p.elements if e in set(subset)]
    unknown = set(subset) - set(p.elements)
    if unknown:
        raise UnknownElement(f"not elements of the poset: {sorted(unknown)}")
    if not keep:
        raise EmptyPoset("suborder on the empty set")
    idx = [p.index(e) for e in keep]
    up = []
    for i in idx:
        mask = 0
        for jj, j in enumerate(idx):
            if p.leq_idx(i, j):
                mask |= 1 << jj
        up.append(mask)
    return Poset(tuple(keep), tuple(up))


def dual(p: Poset) -> Poset:
    return Poset(p.elements, p.down(), dict(p.extras))


def split(p: Poset) -> Poset:
    """Kimble's split: minimal copies x' under maximal copies y'' iff x <= y."""
    n = p.n
    names = tuple(f"{e}'" for e in p.elements) + tuple(f"{e}''" for e in p.elements)
    up = []
    for i in range(n):  # primed copy of element i
        up.append((1 << i) | (p.up[i] << n))
    for i in range(n):  # double-primed copy
        up.append(1 << (n + i))
    correspondence = {e: (f"{e}'", f"{e}''") for e in p.elements}
    return Poset(names, tuple(up), {"split_of": p, "split_pairs": correspondence})


def incomparable_pairs(p: Poset) -> list[tuple[str, str]]:
    """Every ordered pair (x, y), x != y, with x not >= y.

    This is the full separation-demand list: both orientations of each
    incomparable pair plus the (lower, upper) orientation of strict pairs.
    """
    out = []
    for i, x in enumerate(p.elements):
        for j, y in enumerate(p.elements):
            if i != j and not p.leq_idx(j, i):
                out.append((x, y))
    return out


def two_level_parts(p: Poset) -> tuple[list[str], list[str]]:
    """Minimal part A and maximal part B of a two-level poset."""
    mins = set(p.minimal_elements())
    maxs = set(p.maximal_elements())
    if mins & maxs or mins | maxs != set(p.elements):
        raise NotTwoLevel(
            "need disjoint minimal/maximal roles covering every element"
        )
    a = [e for e in p.elements if e in mins]
    b = [e for e in p.elements if e in maxs]
    return a, b


def bipartite_incomparability_graph(p: Poset):
    """Graph on A + B with an edge ab whenever a is not below b."""
    from .graphs import Graph

    a, b = two_level_parts(p)
    edges = [(x, y) for x in a for y in b if not p.leq(x, y)]
    return Graph(tuple(a) + tuple(b), edges)


# -- isomorphism (test helper) --------------------------------------------


def is_isomorphic(p: Poset, q: Poset) -> bool:
    """Backtracking isomorphism test, capped at ISO_CAP elements."""
    if p.n != q.n:
        return False
    n = p.n
    if n > ISO_CAP:
        from .errors import SearchSpaceTooLarge

        raise SearchSpaceTooLarge(f"isomorphism check capped at {ISO_CAP}, got {n}")
    down_p, down_q = p.down(), q.down()

    def sig(up, down, i):
        return (bin(up[i]).count("1"), bin(down[i]).count("1"))

    sp = sorted(sig(p.up, down_p, i) for i in range(n))
    sq = sorted(sig(q.up, down_q, i) for i in range(n))
    if sp != sq:
        return False
    if n <= 7:
        for perm in permutations(range(n)):
            if _perm_ok(p, q, perm):
                return True
        return False
    return _iso_backtrack(p, q, down_p, down_q, [None] * n, 0)


def _perm_ok(p, q, perm):
    for i in range(p.n):
        for j in range(p.n):
            if p.leq_idx(i, j) != q.leq_idx(perm[i], perm[j]):
                return False
    return True


def _iso_backtrack(p, q, down_p, down_q, image, i):
    n = p.n
    if i == n:
        return True
    used = set(image[:i])
    for cand in range(n):
        if cand in used:
            continue
        if bin(p.up[i]).count("1") != bin(q.up[cand]).count("1"):
            continue
        if bin(down_p[i]).count("1") != bin(down_q[cand]).count("1"):
            continue
        ok = True
        for j in range(i):
            if p.leq_idx(i, j) != q.leq_idx(cand, image[j]) or p.leq_idx(
                j, i
            ) != q.leq_idx(image[j], cand):
                ok = False
                break
        if ok:
            image[i] = cand
            if _iso_backtrack(p, q, down_p, down_q, image, i + 1):
                return True
            image[i] = None
    return False


def automorphisms(p: Poset, group_cap: int = 1000):
    """All order automorphisms as index permutations.

    Used only to prune symmetric branches in the solvers; if the group is
    larger than ``group_cap`` (e.g. big antichains) only the identity is
    returned and the solvers run unreduced.
    """
    n = p.n
    down = p.down()
    sig = [
        (bin(p.up[i]).count("1"), bin(down[i]).count("1")) for i in range(n)
    ]
    found: list[tuple[int, ...]] = []
    image = [None] * n

    def rec(i):
        if len(found) > group_cap:
            return
        if i == n:
            found.append(tuple(image))
            return
        used = set(image[:i])
        for cand in range(n):
            if cand in used or sig[i] != sig[cand]:
                continue
            ok = True
            for j in range(i):
                if p.leq_idx(i, j) != p.leq_idx(cand, image[j]) or p.leq_idx(
                    j, i
                ) != p.leq_idx(image[j], cand):
                    ok = False
                    break
            if ok:
                image[i] = cand
                rec(i + 1)
                image[i] = None

    rec(0)
    if len(found) > group_cap:
        return [tuple(range(n))]
    return found


def linear_extensions(p: Poset):
    """All linear extensions, as tuples of element indices, lexicographic."""
    n = p.n
    down = p.down()
    out = []
    prefix = []
    placed = 0

    def rec():
        nonlocal placed
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for i in range(n):
            if placed >> i & 1:
                continue
            if down[i] & ~placed & ~(1 << i):
                continue  # some strictly smaller element not yet placed
            prefix.append(i)
            placed |= 1 << i
            rec()
            placed &= ~(1 << i)
            prefix.pop()

    rec()
    return out


# -- descriptor parsing ----------------------------------------------------


def builtin(spec: str) -> Poset:
    """Poset from a builtin descriptor.

    Grammar: ``chain:n``, ``antichain:n``, ``bool:n``, ``layers:n:l:k``,
    ``std:n``, and the composites ``split:(D)``, ``dual:(D)``,
    ``product:(D1,D2)`` where D is again a descriptor.
    """
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    if head in ("split", "dual", "product"):
        if not (rest.startswith("(") and rest.endswith(")")):
            raise BadDescriptor(f"composite descriptor needs parentheses: {spec!r}")
        inner = rest[1:-1]
        if head == "product":
            parts = _split_top(inner)
            if len(parts) != 2:
                raise BadDescriptor(f"product takes two descriptors: {spec!r}")
            return product(builtin(parts[0]), builtin(parts[1]))
        if head == "split":
            return split(builtin(inner))
        return dual(builtin(inner))
    args = rest.split(":") if rest else []
    try:
        nums = [int(a) for a in args]
    except ValueError:
        raise BadDescriptor(f"non-integer size in {spec!r}") from None
    if any(a <= 0 for a in nums):
        raise BadDescriptor(f"sizes must be positive in {spec!r}")
    if head == "chain" and len(nums) == 1:
        return chain(nums[0])
    if head == "antichain" and len(nums) == 1:
        return antichain(nums[0])
    if head == "bool" and len(nums) == 1:
        return boolean_lattice(nums[0])
    if head == "layers" and len(nums) == 3:
        return layers(*nums)
    if head == "std" and len(nums) == 1:
        return standard_example(nums[0])
    raise BadDescriptor(f"unrecognised descriptor {spec!r}")


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _positive(n: int):
    if n < 1:
        raise BadDescriptor("size parameters must be positive")
    if n > 64:
        raise BadDescriptor("builtin sizes capped at 64 elements per layer")
