"""Explicit realiser/antirealiser constructions and the transfer lemmas.

Nothing here is trusted: every emitted family is meant to be re-verified
through the generic verifiers, and the tests do exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .enclosures import (
    DEFAULT_PRECISION_BITS,
    Interval,
    e_interval,
    euler_gamma_interval,
    ln_interval,
)
from .errors import (
    BadKind,
    EnclosureTooWide,
    InputError,
    NotASplit,
    NotTwoLevel,
    PreconditionViolated,
    SearchSpaceTooLarge,
)
from .graphs import (
    BicliqueCovering,
    CoveringReport,
    Graph,
    make_covering,
    turan_length_profile,
    verify_covering,
)
from .maps import (
    FRACTIONAL_LOCAL,
    FRACTIONAL_TOTAL,
    Antirealiser,
    MonotonePartialMap,
    WeightedRealiser,
    integer_realiser,
    make_antirealiser,
    make_realiser,
)
from .poset import Poset, incomparable_pairs, layers, two_level_parts

DEFAULT_CONSTRUCTION_CAP = 2_000_000


# -- chains ------------------------------------------------------------------


def chain_realiser(n: int, t: int, kind: str = "local") -> WeightedRealiser:
    """Realisers of the n-chain.

    ``local``: the recursive segment construction.  The chain is padded to
    the next power of t, each level j contributes one partial map per
    segment of size t^j (sending its t sub-blocks to 1..t), and the result
    is restricted back to the first n positions; every element lands in
    exactly ceil(log_t n) maps.

    ``total``: the staircase family of ceil((n-1)/(t-1)) total maps, map j
    walking the window [j(t-1)+1, (j+1)(t-1)+1] across the chain, clamped
    to 1 and t outside.
    """
    if n < 1 or t < 2:
        raise InputError("need n >= 1 and t >= 2")
    names = [str(i) for i in range(1, n + 1)]
    if kind == "local":
        k = 0
        power = 1
        while power < n:
            power *= t
            k += 1
        maps = []
        for level in range(1, k + 1):
            seg = t**level
            block = t ** (level - 1)
            for start in range(0, power, seg):
                assign = {}
                for pos in range(start, min(start + seg, n)):
                    assign[names[pos]] = (pos - start) // block + 1
                if assign:
                    maps.append(MonotonePartialMap(assign, t))
        return integer_realiser(maps, t, local=True)
    if kind == "total":
        count = -(-(n - 1) // (t - 1)) if n > 1 else 0
        maps = []
        for j in range(count):
            assign = {
                names[pos]: min(max(pos + 1 - j * (t - 1), 1), t)
                for pos in range(n)
            }
            maps.append(MonotonePartialMap(assign, t))
        return integer_realiser(maps, t, local=False)
    raise BadKind(f"unknown chain realiser kind {kind!r}")


def antichain_realiser(n: int, t: int, kind: str = "digit-local") -> WeightedRealiser:
    """Realisers of the n-antichain.

    ``digit-local``: two total maps per base-t digit of an injective
    labeling (the digit and its reversal), multiplicity 2*ceil(log_t n).
    ``sperner-total-2``: label elements by distinct floor(m/2)-subsets of
    [m] for the least adequate m and use one coordinate map per ground
    element; t must be 2.
    """
    if n < 1 or t < 2:
        raise InputError("need n >= 1 and t >= 2")
    names = [str(i) for i in range(1, n + 1)]
    if kind == "digit-local":
        digits = 0
        power = 1
        while power < n:
            power *= t
            digits += 1
        maps = []
        for d in range(digits):
            lo = {names[x]: (x // t**d) % t + 1 for x in range(n)}
            hi = {names[x]: t - (x // t**d) % t for x in range(n)}
            maps.append(MonotonePartialMap(lo, t))
            maps.append(MonotonePartialMap(hi, t))
        return integer_realiser(maps, t, local=True)
    if kind == "sperner-total-2":
        if t != 2:
            raise BadKind("sperner-total-2 requires t = 2")
        m = sperner_upper_threshold(n)
        labels = _ksubsets_prefix(m, m // 2, n)
        maps = []
        for i in range(1, m + 1):
            assign = {
                names[x]: 2 if i in labels[x] else 1 for x in range(n)
            }
            maps.append(MonotonePartialMap(assign, 2))
        return integer_realiser(maps, 2, local=False)
    raise BadKind(f"unknown antichain realiser kind {kind!r}")


def _ksubsets_prefix(m: int, k: int, count: int):
    """First ``count`` k-subsets of [m] in lexicographic order."""
    from itertools import combinations

    out = []
    for combo in combinations(range(1, m + 1), k):
        out.append(set(combo))
        if len(out) == count:
            return out
    if count == 0:
        return []
    raise PreconditionViolated(f"not enough {k}-subsets of [{m}]")


def sperner_upper_threshold(n: int) -> int:
    """min(m : C(m, floor(m/2)) >= n)."""
    m = 0
    while math.comb(m, m // 2) < n:
        m += 1
    return m


def sperner_bounds(n: int) -> tuple[int, int]:
    """The two Sperner-type thresholds bracketing the local 2-dimension of
    the n-antichain: lower min(m : C(m+1, floor((m+1)/2)) >= n+1), upper
    min(m : C(m, floor(m/2)) >= n).  A single element needs no maps at all,
    so n = 1 short-circuits to (0, 0)."""
    if n < 1:
        raise InputError("n must be positive")
    if n == 1:
        return 0, 0
    m = 0
    while math.comb(m + 1, (m + 1) // 2) < n + 1:
        m += 1
    return m, sperner_upper_threshold(n)


# -- the F-set fractional chain realiser (exact t-dimension of chains) -------


@dataclass(frozen=True)
class FSet:
    """The n-1 monotone surjections n -> t with small consecutive middle
    fibers; every cover pair of the chain is separated by exactly t-1 of
    them, so weight 1/(t-1) apiece realises the chain fractionally."""

    n: int
    t: int
    fiber_sizes: tuple[tuple[int, ...], ...]

    def functions(self) -> list[MonotonePartialMap]:
        names = [str(i) for i in range(1, self.n + 1)]
        out = []
        for sizes in self.fiber_sizes:
            assign = {}
            pos = 0
            for value, size in enumerate(sizes, start=1):
                for _ in range(size):
                    assign[names[pos]] = value
                    pos += 1
            out.append(MonotonePartialMap(assign, self.t))
        return out


def fset(n: int, t: int) -> FSet:
    """Enumerate the F-set by its three defining properties."""
    if not n > t >= 2:
        raise PreconditionViolated("fset needs n > t >= 2")
    sizes_list = []

    def rec(prefix, remaining):
        slot = len(prefix)
        if slot == t:
            if remaining == 0 and _fibers_ok(prefix, t):
                sizes_list.append(tuple(prefix))
            return
        lo = 1
        hi = remaining - (t - slot - 1)
        if hi < lo:
            return
        cap = hi if slot in (0, t - 1) else min(hi, 2)
        for size in range(lo, cap + 1):
            prefix.append(size)
            rec(prefix, remaining - size)
            prefix.pop()

    rec([], n)
    sizes_list.sort()
    fs = FSet(n, t, tuple(sizes_list))
    if len(fs.fiber_sizes) != n - 1:
        raise AssertionError(
            f"F-set size {len(fs.fiber_sizes)} != n-1 = {n - 1}"
        )
    return fs


def _fibers_ok(sizes, t) -> bool:
    big = [i for i, s in enumerate(sizes) if s >= 2]
    if any(s > 2 for s in sizes[1:-1]):
        return False
    return not big or big[-1] - big[0] == len(big) - 1


def fset_fractional_chain_realiser(n: int, t: int):
    """The F-set and the fractional t-realiser it spans (total weight
    (n-1)/(t-1)); n = t degenerates to the identity with weight 1."""
    if n == t >= 2:
        names = [str(i) for i in range(1, n + 1)]
        ident = MonotonePartialMap({names[i]: i + 1 for i in range(n)}, t)
        fs = FSet(n, t, (tuple([1] * n),))
        return fs, make_realiser([(ident, Fraction(1))], t, FRACTIONAL_TOTAL)
    fs = fset(n, t)
    weight = Fraction(1, t - 1)
    real = make_realiser(
        [(m, weight) for m in fs.functions()], t, FRACTIONAL_TOTAL
    )
    _check_fset_separations(fs)
    return fs, real


def _check_fset_separations(fs: FSet):
    """Every cover pair of the chain must be separated by exactly t-1
    members (equivalently each x_i, x_{i+1} share a fiber in n-t of them)."""
    n, t = fs.n, fs.t
    funcs = fs.functions()
    names = [str(i) for i in range(1, n + 1)]
    for i in range(n - 1):
        separated = sum(
            1 for m in funcs if m.value(names[i]) < m.value(names[i + 1])
        )
        if separated != t - 1:
            raise AssertionError(
                f"cover pair {i + 1} separated {separated} times, wanted {t - 1}"
            )


def fset_fij(n: int, t: int, i: int, j: int) -> int:
    """Closed form for the number of F-set members with f(x_i) = f(x_{i+1})
    = y_j (the four-case bookkeeping behind |F| = n-1)."""
    if not (1 <= i <= n - 1 and 1 <= j <= t):
        raise InputError("indices out of range")
    if j == 1:
        return n - t + 1 - i if i <= n - t else 0
    if j == t:
        return i - t + 1 if i >= t else 0
    return 1 if j <= i <= n - t + j - 1 else 0


def five_chain_fractional_local_realiser() -> WeightedRealiser:
    """The explicit six-map fractional local 2-realiser of the 5-chain with
    maximum local weight 5/2."""
    half = Fraction(1, 2)
    one = Fraction(1)
    table = [
        ({"1": 1, "2": 1, "3": 1, "4": 2, "5": 2}, half),
        ({"1": 1, "2": 1, "3": 2, "4": 2, "5": 2}, half),
        ({"1": 1, "2": 1, "3": 2}, half),
        ({"3": 1, "4": 2, "5": 2}, half),
        ({"1": 1, "2": 2}, one),
        ({"4": 1, "5": 2}, one),
    ]
    return make_realiser(
        [(MonotonePartialMap(a, 2), w) for a, w in table], 2, FRACTIONAL_LOCAL
    )


# -- chain antirealiser (harmonic weights) -----------------------------------


@dataclass(frozen=True)
class ChainAntirealiserSpec:
    n: int
    t: int
    scale: Fraction  # the rational c actually used
    ln_t: Interval


@dataclass(frozen=True)
class ChainAntirealiserCertificate:
    spec: ChainAntirealiserSpec
    antirealiser: Antirealiser
    valid: bool
    value: Fraction
    ideal_value: Interval
    closed_form_bound: Interval
    per_size_checks: tuple[tuple[int, Fraction, Fraction], ...]


def chain_fractional_antirealiser(
    n: int, t: int, precision_bits: int = DEFAULT_PRECISION_BITS
) -> ChainAntirealiserCertificate:
    """Uniform-D antirealiser of the n-chain with I(e) = c / length(e).

    The scale uses a certified rational lower enclosure L of ln t, c =
    2/((2L+1) n) >= the ideal scale.  Validity reduces, via compression and
    the Turan exchange, to the per-size inequality

        sum_lengths profile(k, t, l) / l  <=  k (L + 1/2)   for k = 2..n,

    which is checked in exact rationals; the certificate records every
    comparison.  The reported value is c n (H_n - 1); the ideal value and
    the closed-form bound log_{sqrt(e) t} n - (2 - 2 gamma)/(2 ln t + 1)
    are reported as enclosures.
    """
    if n < 2 or t < 2:
        raise PreconditionViolated("need n >= 2 and t >= 2")
    lnt = ln_interval(t, precision_bits)
    c = Fraction(2) / ((2 * lnt.lo + 1) * n)
    names = [str(i) for i in range(1, n + 1)]
    from .poset import chain as chain_poset

    p = chain_poset(n)
    i_entries = [
        (names[a], names[b], c / (b - a))
        for a in range(n)
        for b in range(a + 1, n)
    ]
    d_entries = {e: Fraction(1, n) for e in names}
    anti = make_antirealiser(p, t, i_entries, d_entries)

    checks = []
    valid = True
    threshold_scale = lnt.lo + Fraction(1, 2)
    for k in range(2, n + 1):
        lhs = sum(
            (Fraction(turan_length_profile(k, t, ell), ell) for ell in range(1, k)),
            Fraction(0),
        )
        rhs = k * threshold_scale
        checks.append((k, lhs, rhs))
        if lhs > rhs:
            valid = False
    if not valid:
        raise EnclosureTooWide(
            "ln t enclosure too coarse to certify the antirealiser; "
            "raise precision_bits"
        )

    harmonic = sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))
    value = c * n * (harmonic - 1)
    ideal_value = (Interval(Fraction(2), Fraction(2)) * (harmonic - 1)) * (
        (lnt * 2 + 1).reciprocal()
    )
    gamma = euler_gamma_interval(min(precision_bits, 128))
    ln_n = ln_interval(n, precision_bits)
    closed = (ln_n * 2 - 2 + gamma * 2) * (lnt * 2 + 1).reciprocal()
    spec = ChainAntirealiserSpec(n, t, c, lnt)
    return ChainAntirealiserCertificate(
        spec, anti, True, value, ideal_value, closed, tuple(checks)
    )


# -- antichain fractional certificates ----------------------------------------


def antichain_fractional_certificates(
    n: int, t: int, cap: int = DEFAULT_CONSTRUCTION_CAP
):
    """Fractional certificates for the n-antichain: weight (2t/(t-1)) t^-n
    on every nonconstant total map (each demand covered with weight exactly
    1), and the uniform antirealiser of value (2t/(t-1))(1 - 1/n)."""
    if n < 2 or t < 2:
        raise PreconditionViolated("need n >= 2 and t >= 2")
    if t**n > cap:
        raise SearchSpaceTooLarge(f"t^n = {t ** n} exceeds cap {cap}")
    names = [str(i) for i in range(1, n + 1)]
    from .poset import antichain as antichain_poset

    p = antichain_poset(n)
    weight = Fraction(2 * t, t - 1) * Fraction(1, t**n)
    maps = []
    for code in range(t**n):
        digits = []
        rest = code
        for _ in range(n):
            digits.append(rest % t + 1)
            rest //= t
        if len(set(digits)) == 1:
            continue
        maps.append(
            (MonotonePartialMap(dict(zip(names, digits)), t), weight)
        )
    realiser = make_realiser(maps, t, FRACTIONAL_TOTAL)
    i_value = Fraction(2 * t, (t - 1) * n * n)
    anti = make_antirealiser(
        p,
        t,
        [(x, y, i_value) for x in names for y in names if x != y],
        {e: Fraction(1, n) for e in names},
    )
    return realiser, anti


# -- hypercube layer certificates ---------------------------------------------


def cube1k_certificates(n: int, k: int, cap: int = DEFAULT_CONSTRUCTION_CAP):
    """Certificates for the suborder of singletons and k-sets of [n].

    Realiser: for every 2-coloring f of [n] with exactly m = n/(k+1) top
    elements, the monotone extension f'(A) = max f over A, weighted
    1/C((k+1)(m-1), m-1); every demand (A, x) with x outside A is covered
    with weight exactly 1 and all other demands with weight >= 1.
    Antirealiser: I(A, x) = k!/(m (km)^k) on those demands.
    """
    ell = k + 1
    if k < 1 or n % ell != 0:
        raise PreconditionViolated("need k >= 1 and (k+1) | n")
    m = n // ell
    if m < 2:
        raise PreconditionViolated("need m = n/(k+1) >= 2")
    if math.comb(n, m) > cap:
        raise SearchSpaceTooLarge(f"C({n},{m}) exceeds cap {cap}")
    p = layers(n, 1, k) if k > 1 else layers(n, 1, 1)
    weight = Fraction(1, math.comb(ell * (m - 1), m - 1))
    from itertools import combinations

    maps = []
    for tops in combinations(range(1, n + 1), m):
        top_set = set(tops)
        assign = {}
        for e in p.elements:
            members = {int(ch) for ch in e}
            assign[e] = 2 if members & top_set else 1
        maps.append((MonotonePartialMap(assign, 2), weight))
    realiser = make_realiser(maps, 2, FRACTIONAL_TOTAL)

    i_value = Fraction(math.factorial(k), m * (k * m) ** k)
    i_entries = []
    for a in p.elements:
        if len(a) != k:
            continue
        members = {int(ch) for ch in a}
        for x in p.elements:
            if len(x) == 1 and int(x) not in members:
                i_entries.append((a, x, i_value))
    anti = make_antirealiser(p, 2, i_entries, None)
    return realiser, anti


def cube1k_weight_limit(k: int) -> Fraction:
    """The limit (1 - 1/(k+1))^-k (k+1) of the realiser's total weight,
    which is rational for integer k."""
    ell = k + 1
    return Fraction(ell) * Fraction(ell, ell - 1) ** (ell - 1)


# -- split and two-level transfers --------------------------------------------


def split_transfer(kind: str, realiser: WeightedRealiser, p: Poset):
    """Move realisers between a poset P and its split (t = 2 throughout).

    ``int-forward`` takes a local 2-realiser of P and returns one of
    split(P), padding with Sperner antichain realisers of the primed and
    double-primed copies plus the level map.  ``int-backward`` takes a local
    2-realiser of split(P) back to P, reading x high where the map puts x'
    high and x low where it puts x'' low.  ``frac-backward`` carries a
    fractional 2-realiser of split(P) to one of P with identical total
    weight via f'(x) = max of f over the primed down-set of x.

    ``p`` is always the base poset; the split and its primed correspondence
    are rebuilt canonically, and backward inputs must live on those names.
    """
    from .poset import split as split_poset

    if realiser.t != 2:
        raise InputError("split transfers are defined for t = 2")
    q = split_poset(p)
    pairs = q.extras["split_pairs"]
    if kind == "int-forward":
        maps = []
        for m, _ in realiser.maps:
            assign = {}
            for e, v in m.items:
                primed, doubled = pairs[e]
                if v == 2:
                    assign[primed] = 2
                else:
                    assign[doubled] = 1
            if assign:
                maps.append(MonotonePartialMap(assign, 2))
        n = p.n
        anti = antichain_realiser(n, 2, kind="sperner-total-2")
        primed_names = [pairs[e][0] for e in p.elements]
        doubled_names = [pairs[e][1] for e in p.elements]
        chain_names = [str(i) for i in range(1, n + 1)]
        for m, _ in anti.maps:
            maps.append(MonotonePartialMap(
                {primed_names[i]: m.value(chain_names[i]) for i in range(n)}, 2
            ))
            maps.append(MonotonePartialMap(
                {doubled_names[i]: m.value(chain_names[i]) for i in range(n)}, 2
            ))
        level = {e: 1 for e in primed_names}
        level.update({e: 2 for e in doubled_names})
        maps.append(MonotonePartialMap(level, 2))
        return integer_realiser(maps, 2, local=True)

    split_names = set(q.elements)
    for m, _ in realiser.maps:
        if not m.domain <= split_names:
            raise NotASplit(
                "realiser does not live on the primed copies of the base poset"
            )
    if kind == "int-backward":
        maps = []
        for m, _ in realiser.maps:
            assign = m.assign
            new = {}
            for e in p.elements:
                primed, doubled = pairs[e]
                if assign.get(primed) == 2:
                    new[e] = 2
                elif assign.get(doubled) == 1:
                    new[e] = 1
            if new:
                maps.append(MonotonePartialMap(new, 2))
        return integer_realiser(maps, 2, local=True)
    if kind == "frac-backward":
        if realiser.is_integer:
            raise InputError("frac-backward expects a fractional realiser")
        down = p.down()
        merged = []
        for m, w in realiser.maps:
            assign = m.assign
            new = {}
            for i, e in enumerate(p.elements):
                below = down[i]
                top = 1
                mm = below
                while mm:
                    j = (mm & -mm).bit_length() - 1
                    mm &= mm - 1
                    v = assign.get(pairs[p.elements[j]][0])
                    if v is not None and v > top:
                        top = v
                new[e] = top
            merged.append((MonotonePartialMap(new, 2), w))
        return make_realiser(merged, 2, FRACTIONAL_TOTAL)
    raise BadKind(f"unknown split transfer kind {kind!r}")


def two_level_transfer(direction: str, p: Poset, payload):
    """Translate between local 2-realisers of a two-level poset and complete
    bipartite edge-coverings of its incomparability graph."""
    from .poset import bipartite_incomparability_graph

    a_part, b_part = two_level_parts(p)
    g = bipartite_incomparability_graph(p)
    if direction == "realiser-to-covering":
        realiser: WeightedRealiser = payload
        if realiser.t != 2:
            raise InputError("two-level transfer is defined for t = 2")
        bicliques = []
        for m, _ in realiser.maps:
            assign = m.assign
            left = [a for a in a_part if assign.get(a) == 2]
            right = [b for b in b_part if assign.get(b) == 1]
            if left and right:
                bicliques.append((left, right))
        return make_covering(bicliques)
    if direction == "covering-to-realiser":
        from .errors import InvalidCovering

        covering: BicliqueCovering = payload
        report = verify_covering(g, covering)
        if not report.valid:
            raise InvalidCovering(f"{report.reason}: witness {report.witness}")
        maps = []
        for left, right in covering.bicliques:
            if set(left) <= set(a_part) and set(right) <= set(b_part):
                side_a, side_b = left, right
            elif set(left) <= set(b_part) and set(right) <= set(a_part):
                side_a, side_b = right, left
            else:
                raise InvalidCovering(
                    "biclique sides must each sit inside one level"
                )
            assign = {a: 2 for a in side_a}
            assign.update({b: 1 for b in side_b})
            if assign:
                maps.append(MonotonePartialMap(assign, 2))
        for part in (a_part, b_part):
            anti = antichain_realiser(len(part), 2, kind="sperner-total-2")
            chain_names = [str(i) for i in range(1, len(part) + 1)]
            for m, _ in anti.maps:
                maps.append(MonotonePartialMap(
                    {part[i]: m.value(chain_names[i]) for i in range(len(part))},
                    2,
                ))
        level = {a: 1 for a in a_part}
        level.update({b: 2 for b in b_part})
        maps.append(MonotonePartialMap(level, 2))
        return integer_realiser(maps, 2, local=True)
    raise BadKind(f"unknown transfer direction {direction!r}")


def outdegree_bound(
    p: Poset, precision_bits: int = DEFAULT_PRECISION_BITS
) -> tuple[int, Interval]:
    """Maximum outdegree and an enclosure of e*(outdegree + 2), the
    fractional 2-dimension bound."""
    outdeg = max(bin(row).count("1") - 1 for row in p.up)
    return outdeg, e_interval(precision_bits) * (outdeg + 2)
