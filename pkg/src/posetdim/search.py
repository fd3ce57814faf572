"""Exact covering searches shared by the integer solvers.

Two problems live here, both over an explicit pool of items that each carry
a capacity-use mask (which ground slots they occupy) and a cover mask (which
demands they satisfy):

* minimum-cardinality set cover (t-dimension), by greedy upper bound plus
  depth-first branch and bound on the least-coverable demand;
* cover-with-capacities feasibility (local t-dimension and lbc budgets),
  by depth-first search with per-slot remaining capacity.

Both branch on the demand with the fewest usable candidates and try
candidates in pool order, so the certificate found is the deterministic
lexicographically-first one.  Pruning uses the Turan counting bound: an item
occupying d slots can satisfy at most the edge count of the complete
t-partite Turan graph on d vertices, and a capacity profile with m_k slots
of residual capacity >= k can satisfy at most sum_k turan(m_k) further
demands (a majorization argument over item sizes).
"""

from __future__ import annotations


def turan_edges(d: int, t: int) -> int:
    """Edge count of the Turan graph T(d, t)."""
    if d <= 1:
        return 0
    q, r = divmod(d, t)
    return d * (d - 1) // 2 - (t - r) * q * (q - 1) // 2 - r * (q + 1) * q // 2


def _popcount(x: int) -> int:
    return bin(x).count("1")


class SearchStats:
    __slots__ = ("nodes", "pool_size")

    def __init__(self, pool_size=0):
        self.nodes = 0
        self.pool_size = pool_size


def _capacity_potential(caps, bound_fn):
    """Upper bound on how many further demands any item family can satisfy
    under the residual capacities (layered Turan/majorization bound)."""
    total = 0
    k = 1
    while True:
        m = sum(1 for c in caps if c >= k)
        if m <= 1:
            return total
        total += bound_fn(m)
        k += 1


def cover_with_capacity(n_demands, items, caps, bound_fn, stats=None,
                        node_cap=None):
    """Find item indices covering all demands with every slot used at most
    its capacity, or None if impossible.  ``items`` is a list of
    (use_mask, cover_mask) pairs.

    A greedy probe (max new coverage first) runs before the exhaustive DFS;
    within the DFS, candidates for the most constrained demand are tried in
    descending coverage order with index tie-break, so the produced witness
    is deterministic.
    """
    full = (1 << n_demands) - 1
    if full == 0:
        return []
    # candidate lists per demand, presorted by coverage size then index
    order = sorted(range(len(items)),
                   key=lambda k: (-_popcount(items[k][1]), k))
    by_demand = [[] for _ in range(n_demands)]
    for k in order:
        m = items[k][1]
        while m:
            d = (m & -m).bit_length() - 1
            m &= m - 1
            by_demand[d].append(k)
    caps = list(caps)
    avail = 0
    for i, c in enumerate(caps):
        if c >= 1:
            avail |= 1 << i
    chosen: list[int] = []
    failed: set[tuple[int, tuple[int, ...]]] = set()

    def apply(use, delta):
        nonlocal avail
        m = use
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            caps[i] += delta
            if caps[i] >= 1:
                avail |= 1 << i
            else:
                avail &= ~(1 << i)

    def greedy_probe(uncovered):
        picked = []
        while uncovered:
            best_k, best_gain = -1, 0
            for k, (use, cover) in enumerate(items):
                if use & ~avail:
                    continue
                gain = _popcount(cover & uncovered)
                if gain > best_gain:
                    best_k, best_gain = k, gain
            if best_k < 0:
                for k in picked:
                    apply(items[k][0], +1)
                return None
            picked.append(best_k)
            apply(items[best_k][0], -1)
            uncovered &= ~items[best_k][1]
        for k in picked:
            apply(items[k][0], +1)
        return picked

    probe = greedy_probe(full)
    if probe is not None:
        return probe

    def rec(uncovered):
        if stats is not None:
            stats.nodes += 1
            if node_cap is not None and stats.nodes > node_cap:
                from .errors import SearchSpaceTooLarge

                raise SearchSpaceTooLarge(
                    f"feasibility search exceeded {node_cap} nodes"
                )
        if not uncovered:
            return True
        if _capacity_potential(caps, bound_fn) < _popcount(uncovered):
            return False
        key = (uncovered, tuple(caps))
        if key in failed:
            return False
        # branch on the uncovered demand with the fewest usable items
        best_cands = None
        m = uncovered
        while m:
            d = (m & -m).bit_length() - 1
            m &= m - 1
            cands = [k for k in by_demand[d] if not items[k][0] & ~avail]
            if best_cands is None or len(cands) < len(best_cands):
                best_cands = cands
                if not cands:
                    break
        if not best_cands:
            failed.add(key)
            return False
        for k in best_cands:
            use, cover = items[k]
            apply(use, -1)
            chosen.append(k)
            if rec(uncovered & ~cover):
                return True
            chosen.pop()
            apply(use, +1)
        failed.add(key)
        return False

    if rec(full):
        return chosen
    return None


def min_set_cover(n_demands, covers, lower_bound=0, stats=None, node_cap=None,
                  orbit_minimal=None):
    """Exact minimum set cover over cover masks; returns (size, indices).

    Greedy first for an incumbent, then branch and bound on the demand with
    the fewest candidates, with the fractional bound
    ceil(remaining / max_cover_size).

    ``orbit_minimal`` optionally flags, per candidate, whether it has the
    least index in its orbit under a symmetry group of the instance.  The
    lexicographically minimal optimal cover starts with an orbit-minimal
    map, so the root may branch over those only, each branch flooring the
    indices allowed deeper in the tree.
    """
    full = (1 << n_demands) - 1
    if full == 0:
        return 0, []
    by_demand = [[] for _ in range(n_demands)]
    for k, cover in enumerate(covers):
        m = cover
        while m:
            d = (m & -m).bit_length() - 1
            m &= m - 1
            by_demand[d].append(k)
    if any(not cands for cands in by_demand):
        from .errors import Infeasible

        raise Infeasible("a demand is covered by no candidate")

    # greedy incumbent: max new coverage, lowest index on ties
    uncovered = full
    greedy: list[int] = []
    while uncovered:
        best_k, best_gain = -1, 0
        for k, cover in enumerate(covers):
            gain = _popcount(cover & uncovered)
            if gain > best_gain:
                best_k, best_gain = k, gain
        greedy.append(best_k)
        uncovered &= ~covers[best_k]
    incumbent = list(greedy)
    best_size = len(greedy)
    max_cover = max(_popcount(c) for c in covers)
    chosen: list[int] = []
    seen_fail: dict[tuple[int, int], int] = {}

    def rec(uncovered, floor):
        nonlocal best_size, incumbent
        if stats is not None:
            stats.nodes += 1
            if node_cap is not None and stats.nodes > node_cap:
                from .errors import SearchSpaceTooLarge

                raise SearchSpaceTooLarge(
                    f"set-cover search exceeded {node_cap} nodes"
                )
        if not uncovered:
            if len(chosen) < best_size:
                best_size = len(chosen)
                incumbent = list(chosen)
            return
        if len(chosen) + -(-_popcount(uncovered) // max_cover) >= best_size:
            return
        prior = seen_fail.get((uncovered, floor))
        if prior is not None and prior <= len(chosen):
            return
        if len(chosen) + 2 == best_size:
            # the single remaining map must cover everything left
            best_d, _ = _pick_demand(uncovered, by_demand)
            for k in by_demand[best_d]:
                if k >= floor and covers[k] & uncovered == uncovered:
                    chosen.append(k)
                    rec(0, floor)
                    chosen.pop()
                    break
            seen_fail[(uncovered, floor)] = len(chosen)
            return
        _, best_cands = _pick_demand(uncovered, by_demand)
        for k in best_cands:
            if k < floor:
                continue
            chosen.append(k)
            rec(uncovered & ~covers[k], floor)
            chosen.pop()
            if best_size <= max(lower_bound, len(chosen) + 1):
                break  # cannot improve below the sound lower bound
        seen_fail[(uncovered, floor)] = len(chosen)

    if best_size > max(lower_bound, 0):
        if orbit_minimal is not None:
            for k0, cover in enumerate(covers):
                if not orbit_minimal[k0]:
                    continue
                chosen.append(k0)
                rec(full & ~cover, k0 + 1)
                chosen.pop()
                if best_size <= max(lower_bound, 1):
                    break
        else:
            rec(full, 0)
    return best_size, incumbent


def _pick_demand(uncovered, by_demand):
    best_d, best_cands = -1, None
    m = uncovered
    while m:
        d = (m & -m).bit_length() - 1
        m &= m - 1
        if best_cands is None or len(by_demand[d]) < len(best_cands):
            best_d, best_cands = d, by_demand[d]
    return best_d, best_cands
