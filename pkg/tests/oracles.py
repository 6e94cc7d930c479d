"""Brute-force reference implementations, kept independent of the search code.

These enumerate subsequences, weight assignments and plain multisets directly;
nothing here shares the dynamic-programming or DFS machinery under test.
"""

from __future__ import annotations

import itertools

from zslab.groups import Group
from zslab.sequences import GroupSequence, SetPartition
from zslab.weights import WeightSet


def weighted_sums_of_terms(group: Group, weights: WeightSet, terms) -> set[int]:
    """All weighted sums of one fixed, fully used term tuple."""
    sums = {0}
    for s in terms:
        sums = {group.add(x, group.scalar(a, s)) for x in sums for a in weights.raw}
    return sums


def naive_sigma_exact_n(weights: WeightSet, seq: GroupSequence, n: int) -> set[int]:
    """Union over every n-position subsequence of all its weight assignments."""
    terms = seq.terms()
    out: set[int] = set()
    for positions in itertools.combinations(range(len(terms)), n):
        out |= weighted_sums_of_terms(seq.group, weights, [terms[p] for p in positions])
    return out


def naive_sigma_union(weights: WeightSet, seq: GroupSequence) -> set[int]:
    """Weighted sums over all nontrivial subsequences."""
    out: set[int] = set()
    for n in range(1, len(seq) + 1):
        out |= naive_sigma_exact_n(weights, seq, n)
    return out


def naive_exact_n_union(sp: SetPartition, n: int) -> set[int]:
    """Union of full block sumsets over every n-subset of blocks."""
    group = sp.group
    out: set[int] = set()
    for chosen in itertools.combinations(range(len(sp.blocks)), n):
        sums = {0}
        for i in chosen:
            sums = {group.add(x, a) for x in sums for a in sp.block_elements(i)}
        out |= sums
    return out


def sums_with_explicit_weight_sequence(group: Group, w_terms, terms) -> set[int]:
    """Weighted sums pairing sub-multisets of an explicit weight sequence with terms.

    Enumerates every |terms|-permutation of positions of the weight sequence,
    i.e. the textbook definition with a materialized weight sequence.
    """
    out: set[int] = set()
    for assignment in itertools.permutations(range(len(w_terms)), len(terms)):
        total = 0
        for s, wi in zip(terms, assignment):
            total = group.add(total, group.scalar(w_terms[wi], s))
        out.add(total)
    return out


def all_multisets(group: Group, length: int):
    """Every multiset of the given length, as nondecreasing rank tuples."""
    return itertools.combinations_with_replacement(group.elements(), length)


def has_weighted_zero_sum(group: Group, weights: WeightSet, ranks) -> bool:
    """Whether some nonempty subsequence has a weighted sum of zero."""
    reach: set[int] = set()
    for s in ranks:
        orbit = {group.scalar(a, s) for a in weights.raw}
        reach = reach | orbit | {group.add(x, t) for x in reach for t in orbit}
        if 0 in reach:
            return True
    return 0 in reach


def has_weighted_zero_nsum(group: Group, weights: WeightSet, ranks, n: int) -> bool:
    """Whether some exactly-n-term subsequence has a weighted sum of zero."""
    if len(ranks) < n:
        return False
    layers: list[set[int]] = [{0}] + [set() for _ in range(n)]
    for s in ranks:
        orbit = {group.scalar(a, s) for a in weights.raw}
        for k in range(min(n - 1, n), -1, -1):
            if layers[k]:
                layers[k + 1] |= {group.add(x, t) for x in layers[k] for t in orbit}
    return 0 in layers[n]


def oracle_davenport(group: Group, weights: WeightSet, cap: int | None = None):
    """Minimal length forcing a weighted zero-sum, by plain multiset enumeration.

    Returns (value, one maximal avoiding tuple).  ``cap`` guards the scan; the
    value is always at most |G|.
    """
    cap = cap if cap is not None else group.order + 1
    best_avoiding: tuple[int, ...] = ()
    for length in range(1, cap + 1):
        avoiding = None
        for ranks in all_multisets(group, length):
            if not has_weighted_zero_sum(group, weights, ranks):
                avoiding = ranks
                break
        if avoiding is None:
            return length, best_avoiding
        best_avoiding = avoiding
    raise AssertionError("oracle cap exceeded")


def oracle_egz(group: Group, weights: WeightSet, n: int, cap: int | None = None):
    """Minimal length forcing a weighted zero n-sum, by plain multiset enumeration."""
    cap = cap if cap is not None else n + group.order + 1
    best_avoiding: tuple[int, ...] = ()
    for length in range(n, cap + 1):
        avoiding = None
        for ranks in all_multisets(group, length):
            if not has_weighted_zero_nsum(group, weights, ranks, n):
                avoiding = ranks
                break
        if avoiding is None:
            return length, best_avoiding
        best_avoiding = avoiding
    raise AssertionError("oracle cap exceeded")
