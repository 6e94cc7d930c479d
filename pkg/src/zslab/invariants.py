"""Exact computation of classical and weighted zero-sum invariants.

Each invariant is 1 + (the maximum length of a sequence avoiding its defining
zero-sum event).  Avoidance is closed under taking subsequences, so a DFS over
multisets as nondecreasing rank tuples, pruned the moment the event becomes
reachable, visits every maximal avoiding sequence; the longest one found is
the certificate.  Reachable weighted sums are carried down the DFS as bitmask
tables so each extension costs one incremental block update.

Termination needs no theorem input: for any nonempty weight set, applying the
definition of the classical Davenport constant to a*S for one fixed weight a
bounds the weighted constant by D(G) <= |G|, and for the exact-n event with
exp(G) | n*a0 a term of multiplicity n forces the event, so avoiding
sequences have bounded length.
"""

from __future__ import annotations

from dataclasses import dataclass

from zslab.budget import BudgetClock, SearchBudget
from zslab.errors import InvalidInput, ResourceLimit
from zslab.groups import (
    AUTOMORPHISM_BUDGET,
    Group,
    all_subgroups,
    automorphisms,
    d_star,
    orbit_minima,
    quotient_structure,
    torsion_subgroup,
    whole_subgroup,
)
from zslab.sequences import GroupSequence
from zslab.weights import WeightSet, sigma_table

DAVENPORT_CLASSICAL = "davenport_classical"
DAVENPORT_WEIGHTED = "davenport_weighted"
EGZ_WEIGHTED = "egz_weighted"


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    seconds: float


@dataclass(frozen=True)
class InvariantResult:
    group: Group
    weights: WeightSet
    kind: str
    value: int
    certificate: GroupSequence
    stats: SearchStats
    n: int | None = None

    def check_certificate(self) -> bool:
        """Re-check that the certificate has length value-1 and avoids the event."""
        if len(self.certificate) != self.value - 1:
            return False
        terms = self.certificate.terms()
        if self.kind == EGZ_WEIGHTED:
            return not _hits_exact_n(self.group, self.weights, terms, self.n)
        return not _hits_union(self.group, self.weights, terms)


def _addend_lists(group: Group, weights: WeightSet) -> list[tuple[int, ...]]:
    """For each rank g, the distinct ranks {a*g : a in A}."""
    res = weights.reduced(group.exponent)
    return [tuple(sorted({group.scalar(a, g) for a in res})) for g in group.elements()]


def _hits_union(group: Group, weights: WeightSet, terms) -> bool:
    addends = _addend_lists(group, weights)
    reach = 0
    for s in terms:
        new = reach
        for t in addends[s]:
            new |= group.shift_mask(reach, t) | (1 << t)
        if new & 1:
            return True
        reach = new
    return False


def _hits_exact_n(group: Group, weights: WeightSet, terms, n: int) -> bool:
    table = sigma_table(weights, GroupSequence.from_ranks(group, terms), n)
    return bool(table[n] & 1)


def _first_candidates(group: Group, perms) -> list[int]:
    if not perms:
        return list(group.elements())
    mins = orbit_minima(group, perms)
    return sorted({m for m in mins})


def _davenport_aut_perms(group: Group, prune: bool):
    if not prune or group.order > AUTOMORPHISM_BUDGET:
        return []
    return automorphisms(group)


def davenport_weighted(
    group: Group,
    weights: WeightSet,
    budget: SearchBudget | None = None,
    prune: bool = True,
) -> InvariantResult:
    """Minimal length forcing a weighted zero-sum over nontrivial subsequences.

    DFS over nondecreasing rank tuples carrying the reachable-sum mask; a
    branch is cut as soon as zero becomes reachable.  With pruning, the first
    element is restricted to representatives of the automorphism orbits.
    """
    clock = BudgetClock(budget)
    addends = _addend_lists(group, weights)
    shift = group.shift_mask
    order = group.order
    # avoiding sequences are strictly shorter than D(G) <= |G|; cap defensively
    hard_cap = order
    best: list[int] = []
    first = _first_candidates(group, _davenport_aut_perms(group, prune))

    def extend(seq: list[int], start: int, reach: int):
        if len(seq) > len(best):
            best[:] = seq
        if len(seq) >= hard_cap:
            raise ResourceLimit(
                "avoiding sequence exceeded the classical bound; implementation bug",
                lower=len(best) + 1,
            )
        candidates = range(start, order) if seq else first
        for g in candidates:
            clock.tick()
            new = reach
            for t in addends[g]:
                new |= shift(reach, t) | (1 << t)
            if new & 1:
                continue
            seq.append(g)
            extend(seq, g, new)
            seq.pop()

    try:
        extend([], 0, 0)
    except ResourceLimit as exc:
        exc.lower = len(best) + 1
        exc.upper = order
        raise
    cert = GroupSequence.from_ranks(group, best)
    return InvariantResult(
        group,
        weights,
        DAVENPORT_WEIGHTED,
        len(best) + 1,
        cert,
        SearchStats(clock.nodes, clock.seconds),
    )


def davenport_classical(
    group: Group, budget: SearchBudget | None = None, prune: bool = True
) -> InvariantResult:
    """The classical Davenport constant (weight set {1})."""
    res = davenport_weighted(group, WeightSet.of(1), budget, prune)
    return InvariantResult(
        res.group, res.weights, DAVENPORT_CLASSICAL, res.value, res.certificate, res.stats
    )


def _egz_perms(group: Group, weights: WeightSet, n: int, prune: bool):
    """Avoidance-preserving element permutations for the exact-n search.

    Automorphisms always preserve the event; translation by t in G[d] shifts
    the n-term sums by n*a0*t, so it preserves avoidance exactly when
    d | n*a0.
    """
    if not prune or group.order > AUTOMORPHISM_BUDGET:
        return []
    perms = list(automorphisms(group))
    d = weights.d(group.exponent)
    if (n * weights.a0) % d == 0:
        for t in torsion_subgroup(group, d).elements:
            if t:
                row = tuple(group.add(t, g) for g in group.elements())
                perms.append(row)
    return perms


def egz_weighted(
    group: Group,
    weights: WeightSet,
    n: int | None = None,
    budget: SearchBudget | None = None,
    prune: bool = True,
) -> InvariantResult:
    """Minimal length forcing a weighted zero-sum over exactly-n-term subsequences.

    Same DFS skeleton as the Davenport search with an exact-count mask table
    carried down and one incremental block update per added term.
    """
    if n is None:
        n = group.order
    if n < group.order:
        raise InvalidInput(f"n must be at least the group order ({group.order}), got {n}")
    clock = BudgetClock(budget)
    addends = _addend_lists(group, weights)
    shift = group.shift_mask
    order = group.order
    # a term repeated n times yields the event whenever exp | n*a; use the
    # generic cap |G|*(n-1) + (n-1) as a defensive bound on avoiding length
    hard_cap = order * n
    best: list[int] = []
    first = _first_candidates(group, _egz_perms(group, weights, n, prune))

    def extend(seq: list[int], start: int, table: list[int]):
        if len(seq) > len(best):
            best[:] = seq
        if len(seq) >= hard_cap:
            raise ResourceLimit("avoiding sequence exceeded the defensive cap")
        candidates = range(start, order) if seq else first
        depth = len(seq)
        for g in candidates:
            clock.tick()
            new = table.copy()
            for k in range(min(depth, n - 1), -1, -1):
                src = table[k]
                if src:
                    acc = 0
                    for t in addends[g]:
                        acc |= shift(src, t)
                    new[k + 1] |= acc
            if new[n] & 1:
                continue
            seq.append(g)
            extend(seq, g, new)
            seq.pop()

    root = [0] * (n + 1)
    root[0] = 1
    try:
        extend([], 0, root)
    except ResourceLimit as exc:
        exc.lower = len(best) + 1
        exc.upper = None
        raise
    cert = GroupSequence.from_ranks(group, best)
    return InvariantResult(
        group,
        weights,
        EGZ_WEIGHTED,
        len(best) + 1,
        cert,
        SearchStats(clock.nodes, clock.seconds),
        n=n,
    )


def lower_bound_sequence(
    group: Group, weights: WeightSet, dav: InvariantResult | None = None
) -> GroupSequence:
    """The Davenport certificate concatenated with |G|-1 zeros.

    Avoids a zero weighted |G|-sum, exhibiting the lower bound
    |G| + D_A(G) - 1 for the exact-|G| invariant.
    """
    if dav is None:
        dav = davenport_weighted(group, weights)
    zeros = GroupSequence(group, {0: group.order - 1})
    return dav.certificate.concat(zeros)


# ---------------------------------------------------------------------------
# cached values on abstract structures (the theorem checks lean on these)

_VALUE_CACHE: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}


def davenport_value(group: Group, weights: WeightSet) -> int:
    """Memoized weighted Davenport value keyed by abstract structure."""
    key = (group.factors, weights.raw)
    val = _VALUE_CACHE.get(key)
    if val is None:
        val = davenport_weighted(group, weights).value
        _VALUE_CACHE[key] = val
    return val


@dataclass(frozen=True)
class SubgroupBound:
    subgroup_factors: tuple[int, ...]
    quotient_factors: tuple[int, ...]
    value_sub: int
    value_quot: int
    holds: bool
    margin: int


@dataclass(frozen=True)
class BoundsReport:
    group: Group
    weights: WeightSet
    value_weighted: int
    value_classical: int
    weighted_le_classical: bool
    rows: tuple[SubgroupBound, ...]

    @property
    def ok(self) -> bool:
        return self.weighted_le_classical and all(r.holds for r in self.rows)


def check_bounds(group: Group, weights: WeightSet, budget=None) -> BoundsReport:
    """Verify the weighted-vs-classical bound and subgroup superadditivity.

    Asserts D_A(G) <= D(G) and, for every subgroup H,
    D_A(G) >= D_A(H) + D_A(G/H) - 1, reporting the margins.
    """
    d_w = davenport_weighted(group, weights, budget).value
    d_c = davenport_classical(group, budget).value
    whole = whole_subgroup(group)
    rows = []
    for sub in all_subgroups(group):
        sub_grp = sub.as_group()
        quot_grp = quotient_structure(group, sub, whole)
        v_sub = davenport_value(sub_grp, weights)
        v_quot = davenport_value(quot_grp, weights)
        margin = d_w - (v_sub + v_quot - 1)
        rows.append(
            SubgroupBound(sub_grp.factors, quot_grp.factors, v_sub, v_quot, margin >= 0, margin)
        )
    return BoundsReport(group, weights, d_w, d_c, d_w <= d_c, tuple(rows))


def sanity_classical_bounds(group: Group, value_classical: int) -> bool:
    """d*(G) < D(G) <= |G| for nontrivial groups (D = 1 for the trivial one)."""
    if group.is_trivial:
        return value_classical == 1
    return d_star(group) < value_classical <= group.order
