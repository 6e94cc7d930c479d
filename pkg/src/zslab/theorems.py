"""Machine verification of the structural decomposition theorem and its lemma suite.

The central object is a decomposition witness: a subgroup H together with
coset representatives and nested subsequences that pin down the exact-n
weighted sum set of a long sequence as a shifted, H-periodic set generated by
a short carrier subsequence.  ``find_decomposition`` searches for one witness
in canonical order and every returned witness is re-verified condition by
condition with direct set computations; the remaining functions check the
supporting inequalities and constructive lemmas on concrete instances.

Verdict semantics: these are proved statements, so a "violation" verdict is
always an implementation-bug signal carrying a replayable instance, never a
mathematical finding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from zslab.budget import BudgetClock, SearchBudget
from zslab.errors import InvalidInput, ResourceLimit, TheoremViolation
from zslab.groups import (
    Group,
    Subgroup,
    automorphisms,
    bits,
    d_star,
    image_subgroup,
    quotient,
    quotient_structure,
    stabilizer,
    subgroups_within,
    torsion_subgroup,
    whole_subgroup,
)
from zslab.invariants import davenport_value
from zslab.sequences import GroupSequence, SetPartition, exact_count_table
from zslab.weights import WeightSet, orbit_ranks, sigma_exact_n, sigma_table


# ---------------------------------------------------------------------------
# instances and witnesses


@dataclass(frozen=True)
class TheoremInstance:
    """A sequence over a coset of a subgroup inside an ambient group.

    ``inner`` plays the role of the group the decomposition lives in; the
    ambient group only supplies the coset gamma+inner carrying the sequence
    and the coset delta+inner absorbing the weight orbits.
    """

    ambient: Group
    inner: Subgroup
    gamma: int
    delta: int
    n: int
    weights: WeightSet
    seq: GroupSequence

    def __post_init__(self):
        g0 = self.ambient
        if self.inner.group != g0 or self.seq.group != g0:
            raise InvalidInput("instance parts live in different ambient groups")
        if self.weights.gcd != 1:
            raise InvalidInput("instance requires gcd(A) = 1")
        if self.n < self.inner.order:
            raise InvalidInput("n must be at least the inner subgroup order")
        coset = self.inner.coset_mask(self.gamma)
        delta_coset = self.inner.coset_mask(self.delta)
        for s in self.seq.support():
            if not coset >> s & 1:
                raise InvalidInput("sequence term outside the carrier coset")
            for t in orbit_ranks(self.weights, g0, s):
                if not delta_coset >> t & 1:
                    raise InvalidInput("weight orbit of a term escapes the target coset")
        if len(self.seq) < self.n + self.inner_davenport - 1:
            raise InvalidInput("sequence shorter than the length hypothesis")

    @property
    def inner_davenport(self) -> int:
        return davenport_value(self.inner.as_group(), self.weights)

    def to_record(self) -> dict:
        return {
            "ambient": list(self.ambient.factors),
            "inner": list(self.inner.elements),
            "gamma": self.gamma,
            "delta": self.delta,
            "n": self.n,
            "weights": list(self.weights.raw),
            "seq": self.seq.canonical(),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TheoremInstance":
        from zslab.sequences import parse_sequence

        g0 = Group(tuple(rec["ambient"]))
        return cls(
            g0,
            Subgroup(g0, tuple(rec["inner"])),
            rec["gamma"],
            rec["delta"],
            rec["n"],
            WeightSet(tuple(rec["weights"])),
            parse_sequence(g0, rec["seq"]),
        )


@dataclass(frozen=True)
class DecompositionWitness:
    """Subgroup, coset representatives and nested subsequences certifying the decomposition."""

    subgroup: Subgroup
    alpha: int
    beta: int
    s_prime: GroupSequence
    s_dprime: GroupSequence
    s_zero: GroupSequence
    r: int

    def to_record(self) -> dict:
        return {
            "subgroup": list(self.subgroup.elements),
            "alpha": self.alpha,
            "beta": self.beta,
            "s_prime": self.s_prime.canonical(),
            "s_dprime": self.s_dprime.canonical(),
            "s_zero": self.s_zero.canonical(),
            "r": self.r,
        }


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class LemmaReport:
    """Outcome of one lemma check: witness found / inequality holds / violation."""

    lemma: str
    instance: dict
    verdict: str  # "witness" | "holds" | "violation"
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return self.verdict != "violation"

    def to_record(self) -> dict:
        return {
            "lemma": self.lemma,
            "verdict": self.verdict,
            "instance": self.instance,
            "witness": self.witness,
        }


# ---------------------------------------------------------------------------
# multiset enumeration helpers


def multiset_combinations(pairs, k: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Sub-multisets of size k as (rank, count) tuples, lexicographic on expanded terms."""
    pairs = [p for p in pairs if p[1] > 0]

    def rec(i: int, need: int):
        if need == 0:
            yield ()
            return
        if i == len(pairs):
            return
        rank, avail = pairs[i]
        rest = sum(m for _, m in pairs[i + 1 :])
        lo = max(0, need - rest)
        for take in range(min(avail, need), lo - 1, -1):
            head = ((rank, take),) if take else ()
            for tail in rec(i + 1, need - take):
                yield head + tail

    return rec(0, k)


def _seq_from_pairs(group: Group, pairs) -> GroupSequence:
    return GroupSequence(group, dict(pairs))


# ---------------------------------------------------------------------------
# witness verification (independent of the search)


def verify_witness(inst: TheoremInstance, w: DecompositionWitness) -> list[ConditionCheck]:
    """Re-verify all seven witness conditions by direct set computation."""
    g0 = inst.ambient
    A = inst.weights
    S = inst.seq
    H = w.subgroup
    checks: list[ConditionCheck] = []

    d_h = davenport_value(H.as_group(), A)
    d_quot = davenport_value(quotient_structure(g0, H, inst.inner), A)
    d_inner = inst.inner_davenport
    q = inst.inner.order // H.order

    coset_alpha = H.coset_mask(w.alpha)
    coset_beta = H.coset_mask(w.beta)
    ok = (
        w.s_prime.divides(S)
        and w.s_dprime.divides(w.s_prime)
        and w.s_zero.divides(S)
        and all(coset_alpha >> s & 1 for s in w.s_prime.support())
        and all(coset_alpha >> s & 1 for s in w.s_dprime.support())
        and all(
            coset_beta >> t & 1
            for s in w.s_prime.support()
            for t in orbit_ranks(A, g0, s)
        )
    )
    checks.append(ConditionCheck("coset_confinement", ok))

    bound = min(len(S), len(S) - (q - 2))
    checks.append(
        ConditionCheck(
            "prime_size", len(w.s_prime) >= bound, f"{len(w.s_prime)} >= {bound}"
        )
    )

    want = H.order + d_h - 1
    checks.append(
        ConditionCheck("core_length", len(w.s_dprime) == want, f"{len(w.s_dprime)} == {want}")
    )

    goal_small = sigma_exact_n(A, w.s_dprime, H.order).mask == H.coset_mask(
        g0.scalar(H.order, w.beta)
    )
    checks.append(ConditionCheck("core_fills_coset", goal_small))

    full = sigma_exact_n(A, S, inst.n).mask
    k = H.order + w.r
    rhs = g0.shift_mask(
        sigma_exact_n(A, w.s_zero, k).mask, g0.scalar(inst.n - k, w.beta)
    )
    periodic = all(g0.shift_mask(full, h) == full for h in H.elements)
    contains = bool(full >> g0.scalar(inst.n, w.beta) & 1)
    checks.append(
        ConditionCheck(
            "global_shift",
            full == rhs and periodic and contains,
            f"eq={full == rhs} periodic={periodic} contains={contains}",
        )
    )

    carrier_core = S.remove(w.s_prime).concat(w.s_dprime)
    want_len = H.order + w.r + d_h + d_quot - 2
    checks.append(
        ConditionCheck(
            "carrier",
            carrier_core.divides(w.s_zero)
            and len(w.s_zero) == want_len
            and want_len <= H.order + w.r + d_inner - 1,
            f"{len(w.s_zero)} == {want_len}",
        )
    )

    checks.append(
        ConditionCheck(
            "outside_count",
            w.r == len(S) - len(w.s_prime) and w.r <= max(0, q - 2),
            f"r={w.r}",
        )
    )
    return checks


# ---------------------------------------------------------------------------
# witness search


def find_decomposition(
    inst: TheoremInstance, budget: SearchBudget | None = None
) -> DecompositionWitness:
    """Search for a decomposition witness in canonical order.

    Subgroups ascend by order, coset representatives and beta candidates by
    rank, core subsequences and carrier extensions lexicographically.  The
    first witness passing a direct re-verification of all conditions is
    returned; full exhaustion without one is a bug signal.
    """
    clock = BudgetClock(budget)
    g0 = inst.ambient
    A = inst.weights
    S = inst.seq
    a0 = A.a0
    res = A.reduced(g0.exponent)
    n = inst.n
    full = sigma_table(A, S, n)[n]
    carrier_coset = [g0.add(inst.gamma, g) for g in inst.inner.elements]

    for H in subgroups_within(g0, inst.inner.elements):
        clock.tick()
        if any(g0.shift_mask(full, h) != full for h in H.elements):
            continue  # the sum set must be H-periodic
        d_h = davenport_value(H.as_group(), A)
        d_quot = davenport_value(quotient_structure(g0, H, inst.inner), A)
        q = inst.inner.order // H.order
        need_prime = min(len(S), len(S) - (q - 2))
        core_len = H.order + d_h - 1
        ext_len = d_quot - 1
        for alpha, members in H.cosets(carrier_coset):
            clock.tick()
            if any(g0.scalar(a - a0, alpha) not in H for a in res):
                continue  # weight orbits of this coset do not share a beta coset
            prime_pairs = tuple((s, S.mult(s)) for s in members if S.mult(s))
            prime_len = sum(m for _, m in prime_pairs)
            if prime_len < max(need_prime, core_len):
                continue
            r = len(S) - prime_len
            if r > max(0, q - 2):
                continue
            s_prime = _seq_from_pairs(g0, prime_pairs)
            outside = S.remove(s_prime)
            # the weighted |H|-sums of any core candidate stay in this coset
            required = H.coset_mask(g0.scalar(H.order * a0, alpha))
            cores = []
            for core in multiset_combinations(prime_pairs, core_len):
                clock.tick()
                cand = _seq_from_pairs(g0, core)
                if sigma_table(A, cand, H.order)[H.order] == required:
                    cores.append((core, cand))
            if not cores:
                continue
            beta_candidates = sorted(
                g0.add(g0.scalar(a0, alpha), h) for h in H.elements
            )
            for beta in beta_candidates:
                if not full >> g0.scalar(n, beta) & 1:
                    continue
                shift_back = g0.scalar(n - H.order - r, beta)
                for core, cand in cores:
                    left_pairs = _subtract_pairs(prime_pairs, core)
                    for ext in multiset_combinations(left_pairs, ext_len):
                        clock.tick()
                        s_zero = outside.concat(cand).concat(_seq_from_pairs(g0, ext))
                        part = sigma_table(A, s_zero, H.order + r)[H.order + r]
                        if g0.shift_mask(part, shift_back) == full:
                            witness = DecompositionWitness(
                                H, alpha, beta, s_prime, cand, s_zero, r
                            )
                            bad = [c for c in verify_witness(inst, witness) if not c.ok]
                            if bad:
                                raise TheoremViolation(
                                    f"witness failed re-verification: {bad}",
                                    payload=inst.to_record(),
                                )
                            return witness
    raise TheoremViolation(
        "no decomposition witness found at full exhaustion", payload=inst.to_record()
    )


def _subtract_pairs(pairs, taken):
    taken_map = dict(taken)
    return tuple((r, m - taken_map.get(r, 0)) for r, m in pairs if m - taken_map.get(r, 0) > 0)


def admitting_subgroups(inst: TheoremInstance, budget: SearchBudget | None = None) -> list[int]:
    """Orders of all subgroups that admit a witness (existence per subgroup only)."""
    out = []
    for H in subgroups_within(inst.ambient, inst.inner.elements):
        try:
            w = _find_for_subgroup(inst, H, budget)
        except ResourceLimit:
            raise
        if w is not None:
            out.append(H.order)
    return out


def _find_for_subgroup(inst, H, budget):
    """First witness using the given subgroup, or None (same canonical order)."""
    sub = TheoremInstance(
        inst.ambient, inst.inner, inst.gamma, inst.delta, inst.n, inst.weights, inst.seq
    )
    # reuse the main search restricted to one subgroup by monkey-free filtering
    clock = BudgetClock(budget)
    g0 = sub.ambient
    A = sub.weights
    S = sub.seq
    a0 = A.a0
    res = A.reduced(g0.exponent)
    n = sub.n
    full = sigma_table(A, S, n)[n]
    if any(g0.shift_mask(full, h) != full for h in H.elements):
        return None
    d_h = davenport_value(H.as_group(), A)
    d_quot = davenport_value(quotient_structure(g0, H, sub.inner), A)
    q = sub.inner.order // H.order
    need_prime = min(len(S), len(S) - (q - 2))
    core_len = H.order + d_h - 1
    ext_len = d_quot - 1
    carrier_coset = [g0.add(sub.gamma, g) for g in sub.inner.elements]
    for alpha, members in H.cosets(carrier_coset):
        clock.tick()
        if any(g0.scalar(a - a0, alpha) not in H for a in res):
            continue
        prime_pairs = tuple((s, S.mult(s)) for s in members if S.mult(s))
        prime_len = sum(m for _, m in prime_pairs)
        if prime_len < max(need_prime, core_len):
            continue
        r = len(S) - prime_len
        if r > max(0, q - 2):
            continue
        s_prime = _seq_from_pairs(g0, prime_pairs)
        outside = S.remove(s_prime)
        required = H.coset_mask(g0.scalar(H.order * a0, alpha))
        for beta in sorted(g0.add(g0.scalar(a0, alpha), h) for h in H.elements):
            if not full >> g0.scalar(n, beta) & 1:
                continue
            shift_back = g0.scalar(n - H.order - r, beta)
            for core in multiset_combinations(prime_pairs, core_len):
                clock.tick()
                cand = _seq_from_pairs(g0, core)
                if sigma_table(A, cand, H.order)[H.order] != required:
                    continue
                left_pairs = _subtract_pairs(prime_pairs, core)
                for ext in multiset_combinations(left_pairs, ext_len):
                    s_zero = outside.concat(cand).concat(_seq_from_pairs(g0, ext))
                    part = sigma_table(A, s_zero, H.order + r)[H.order + r]
                    if g0.shift_mask(part, shift_back) == full:
                        return DecompositionWitness(H, alpha, beta, s_prime, cand, s_zero, r)
    return None


# ---------------------------------------------------------------------------
# consequences of the decomposition


def check_multiplicity_consequence(inst: TheoremInstance, w: DecompositionWitness) -> bool:
    """Bounded multiplicities on the d-torsion force a nontrivial witness subgroup.

    If every d-torsion element has multiplicity at most |S| - |inner| + 1 and
    the inner subgroup is nontrivial, the witness subgroup must be nontrivial;
    vacuously true otherwise.
    """
    g0 = inst.ambient
    d = inst.weights.d(g0.exponent)
    limit = len(inst.seq) - inst.inner.order + 1
    hyp = all(
        inst.seq.mult(g) <= limit for g in torsion_subgroup(g0, d).elements
    )
    if not hyp or inst.inner.order == 1:
        return True
    return w.subgroup.order > 1


def verify_corollary_nonempty(
    group: Group, weights: WeightSet, n: int, seq: GroupSequence
) -> bool:
    """n*G intersects the exact-n weighted sum set of every long-enough sequence."""
    if n < group.order:
        raise InvalidInput("n must be at least the group order")
    if len(seq) < n + davenport_value(group, weights) - 1:
        raise InvalidInput("sequence shorter than the length hypothesis")
    ng = image_subgroup(group, n)
    return bool(sigma_exact_n(weights, seq, n).mask & ng.mask)


def verify_corollary_structure(
    group: Group, weights: WeightSet, n: int, seq: GroupSequence
) -> LemmaReport:
    """Either the weighted n-sums fill the group, or the sequence is coset-concentrated.

    The second branch exhibits (alpha, beta, proper H, S') with
    |S'| >= |S| - |G/H| + 2, all terms of S' in alpha+H and every weight
    orbit inside beta+H.
    """
    if weights.gcd != 1:
        raise InvalidInput("corollary requires gcd(A) = 1")
    if n < group.order:
        raise InvalidInput("n must be at least the group order")
    if len(seq) < n + davenport_value(group, weights) - 1:
        raise InvalidInput("sequence shorter than the length hypothesis")
    instance = {
        "group": list(group.factors),
        "weights": list(weights.raw),
        "n": n,
        "seq": seq.canonical(),
    }
    full = sigma_exact_n(weights, seq, n)
    if full.mask == group.full_mask:
        return LemmaReport("corollary_structure", instance, "holds", {"branch": "full"})
    a0 = weights.a0
    res = weights.reduced(group.exponent)
    for H in subgroups_within(group, group.elements()):
        if H.is_whole:
            continue
        for alpha, members in H.cosets():
            if any(group.scalar(a - a0, alpha) not in H for a in res):
                continue
            size = sum(seq.mult(s) for s in members)
            if size >= len(seq) - group.order // H.order + 2:
                return LemmaReport(
                    "corollary_structure",
                    instance,
                    "witness",
                    {
                        "branch": "concentrated",
                        "subgroup": list(H.elements),
                        "alpha": alpha,
                        "beta": group.scalar(a0, alpha),
                        "size": size,
                    },
                )
    return LemmaReport("corollary_structure", instance, "violation")


# ---------------------------------------------------------------------------
# inequality statements


def check_dgm_bound(sp: SetPartition, n: int) -> LemmaReport:
    """Sum-set union size bound in terms of quotient multiplicities.

    With H the stabilizer of the exact-n union, the union has at least
    (sum over G/H of min(n, image multiplicity) - n + 1) * |H| elements.
    """
    if not 1 <= n <= len(sp.blocks):
        raise InvalidInput("block count out of range")
    group = sp.group
    union = exact_count_table(group, sp.blocks, n)[n]
    H = stabilizer(group, union)
    qm = quotient(group, H)
    counts: dict[int, int] = {}
    for b in sp.blocks:
        for t in bits(qm.map_mask(b)):
            counts[t] = counts.get(t, 0) + 1
    bound = (sum(min(n, c) for c in counts.values()) - n + 1) * H.order
    holds = union.bit_count() >= bound
    instance = {
        "group": list(group.factors),
        "blocks": [bits(b) for b in sp.blocks],
        "n": n,
    }
    return LemmaReport(
        "dgm_bound",
        instance,
        "holds" if holds else "violation",
        {"union_size": union.bit_count(), "bound": bound, "stabilizer": list(H.elements)},
    )


def check_kneser(group: Group, sets) -> LemmaReport:
    """Sumset size bound modulo the stabilizer of the full sumset."""
    masks = [group.mask_of(s) if not isinstance(s, int) else s for s in sets]
    if not masks or any(m == 0 for m in masks):
        raise InvalidInput("all summand sets must be nonempty")
    total = masks[0]
    for m in masks[1:]:
        total = group.sumset_mask(total, m)
    H = stabilizer(group, total)
    qm = quotient(group, H)
    images = [qm.map_mask(m) for m in masks]
    lhs_mask = images[0]
    for m in images[1:]:
        lhs_mask = qm.target.sumset_mask(lhs_mask, m)
    lhs = lhs_mask.bit_count()
    rhs = sum(m.bit_count() for m in images) - len(masks) + 1
    instance = {"group": list(group.factors), "sets": [bits(m) for m in masks]}
    return LemmaReport(
        "kneser",
        instance,
        "holds" if lhs >= rhs else "violation",
        {"lhs": lhs, "rhs": rhs, "stabilizer": list(H.elements)},
    )


# ---------------------------------------------------------------------------
# constructive statements (witness searches)


def _setpartitions_of(group: Group, terms: tuple[int, ...], n: int):
    """All partitions of the term multiset into exactly n distinct-element blocks.

    Block order is canonicalized by only opening the next empty block, so each
    unordered partition appears at least once and rarely more.
    """
    blocks: list[set[int]] = [set() for _ in range(n)]

    def rec(i: int):
        if i == len(terms):
            if all(blocks):
                yield tuple(group.mask_of(b) for b in blocks)
            return
        remaining = len(terms) - i
        empty = sum(1 for b in blocks if not b)
        if empty > remaining:
            return
        opened_empty = False
        for j in range(n):
            b = blocks[j]
            if not b:
                if opened_empty:
                    continue
                opened_empty = True
            if terms[i] in b:
                continue
            b.add(terms[i])
            yield from rec(i + 1)
            b.discard(terms[i])

    yield from rec(0)


def check_ccd_statement(
    seq: GroupSequence,
    sub_seq: GroupSequence,
    n: int,
    max_order: int = 6,
    max_length: int = 8,
) -> LemmaReport:
    """Tiny-scale witness search for the setpartition sumset growth statement.

    Looks for a subsequence of the same length as ``sub_seq`` carrying an
    n-setpartition whose blockwise sumset either reaches min(|G|, |S'|-n+1)
    elements, or is periodic with almost all of the sequence in one coset.
    """
    group = seq.group
    if group.order > max_order or len(seq) > max_length:
        raise ResourceLimit("instance exceeds the tiny-scale budget")
    if not sub_seq.divides(seq):
        raise InvalidInput("second sequence must divide the first")
    if n < d_star(group):
        raise InvalidInput("n must be at least d*(G)")
    if not sub_seq.h() <= n <= len(sub_seq):
        raise InvalidInput("no n-setpartition of the subsequence exists")
    instance = {
        "group": list(group.factors),
        "seq": seq.canonical(),
        "sub": sub_seq.canonical(),
        "n": n,
    }
    target = min(group.order, len(sub_seq) - n + 1)
    proper = [
        H
        for H in subgroups_within(group, group.elements())
        if 1 < H.order < group.order
    ]
    for chosen in multiset_combinations(seq.pairs(), len(sub_seq)):
        cand = _seq_from_pairs(group, chosen)
        if cand.h() > n:
            continue
        for blocks in _setpartitions_of(group, cand.terms(), n):
            total = SetPartition(group, blocks).blockwise_sumset()
            size = total.bit_count()
            if size >= target:
                return LemmaReport(
                    "ccd_statement",
                    instance,
                    "witness",
                    {"branch": "growth", "blocks": [bits(b) for b in blocks], "size": size},
                )
            for H in proper:
                if any(group.shift_mask(total, h) != total for h in H.elements):
                    continue
                best_in = max(
                    sum(seq.mult(s) for s in members) for _, members in H.cosets()
                )
                e = len(seq) - best_in
                if e <= group.order // H.order - 2 and size >= (e + 1) * H.order:
                    return LemmaReport(
                        "ccd_statement",
                        instance,
                        "witness",
                        {
                            "branch": "periodic",
                            "subgroup": list(H.elements),
                            "blocks": [bits(b) for b in blocks],
                            "outside": e,
                        },
                    )
    return LemmaReport("ccd_statement", instance, "violation")


def check_coset_lemma(
    group: Group, weights: WeightSet, K: Subgroup, beta: int, g1: int, g2: int
) -> LemmaReport:
    """Weight orbits trapped in one coset force d-torsion alignment.

    If A*g1 and A*g2 both sit in beta+K then d*g1 and d*g2 lie in K and
    g1 - g2 lies in K, so a common coset representative exists.
    """
    m = group.exponent
    if weights.gcd_with(m) != 1:
        raise InvalidInput("requires gcd(A u {exponent}) = 1")
    coset = K.coset_mask(beta)
    for g in (g1, g2):
        for t in orbit_ranks(weights, group, g):
            if not coset >> t & 1:
                raise InvalidInput("weight orbit escapes beta+K")
    d = weights.d(m)
    ok = (
        group.scalar(d, g1) in K
        and group.scalar(d, g2) in K
        and group.sub(g1, g2) in K
    )
    instance = {
        "group": list(group.factors),
        "weights": list(weights.raw),
        "K": list(K.elements),
        "beta": beta,
        "g1": g1,
        "g2": g2,
    }
    return LemmaReport(
        "coset_lemma",
        instance,
        "holds" if ok else "violation",
        {"d": d, "alpha": K.coset_rep(g1)},
    )


def check_confusing_lemma(
    ambient: Group,
    H: Subgroup,
    G: Subgroup,
    alpha: int,
    beta: int,
    weights: WeightSet,
    seq: GroupSequence,
) -> LemmaReport:
    """Find a nontrivial weighted subsequence sum landing in r*beta + H.

    Needs all terms in alpha+G, the weight orbit of alpha inside beta+H, and
    length at least the weighted Davenport value of G/H.
    """
    if not set(H.elements) <= set(G.elements):
        raise InvalidInput("H must be contained in G")
    coset_g = G.coset_mask(alpha)
    for s in seq.support():
        if not coset_g >> s & 1:
            raise InvalidInput("sequence term outside alpha+G")
    coset_h = H.coset_mask(beta)
    for t in orbit_ranks(weights, ambient, alpha):
        if not coset_h >> t & 1:
            raise InvalidInput("weight orbit of alpha escapes beta+H")
    need = davenport_value(quotient_structure(ambient, H, G), weights)
    if len(seq) < need:
        raise InvalidInput("sequence shorter than the quotient Davenport value")
    instance = {
        "group": list(ambient.factors),
        "H": list(H.elements),
        "G": list(G.elements),
        "alpha": alpha,
        "beta": beta,
        "weights": list(weights.raw),
        "seq": seq.canonical(),
    }
    res = weights.reduced(ambient.exponent)
    for r in range(1, len(seq) + 1):
        target = H.coset_mask(ambient.scalar(r, beta))
        for chosen in multiset_combinations(seq.pairs(), r):
            terms = []
            for rank, m in chosen:
                terms.extend([rank] * m)
            for ws in itertools.product(res, repeat=r):
                total = 0
                for s, a in zip(terms, ws):
                    total = ambient.add(total, ambient.scalar(a, s))
                if target >> total & 1:
                    return LemmaReport(
                        "confusing_lemma",
                        instance,
                        "witness",
                        {"terms": terms, "weights": list(ws), "sum": total, "r": r},
                    )
    return LemmaReport("confusing_lemma", instance, "violation")


def keylemma_search(
    sp: SetPartition, K: Subgroup, budget: SearchBudget | None = None
) -> LemmaReport:
    """Find a subgroup H <= K and block selections saturating an H-coset.

    Given blocks of size >= 2 each inside a single K-coset, with at least
    |K| - 1 blocks, produces nontrivial H <= K, a selection of |H| - 1 blocks
    whose sumset has exactly |H| elements, and a large sub-setpartition whose
    blocks each sit inside a single H-coset.  Follows the proof skeleton:
    greedy block selection when the total sumset fills a K-coset, otherwise
    recursion into the stabilizer.
    """
    group = sp.group
    if K.is_trivial:
        raise InvalidInput("K must be nontrivial")
    if len(sp.blocks) < K.order - 1:
        raise InvalidInput("needs at least |K| - 1 blocks")
    for b in sp.blocks:
        if b.bit_count() < 2:
            raise InvalidInput("all blocks must have at least two elements")
        rep = bits(b)[0]
        if b & ~K.coset_mask(rep):
            raise InvalidInput("every block must sit inside a single K-coset")
    instance = {
        "group": list(group.factors),
        "blocks": [bits(b) for b in sp.blocks],
        "K": list(K.elements),
    }
    clock = BudgetClock(budget)

    def rec(indices: tuple[int, ...], kk: Subgroup):
        clock.tick()
        total = 1  # mask of {0}
        for i in indices:
            total = group.sumset_mask(total, sp.blocks[i])
        if total.bit_count() == kk.order:
            chosen: list[int] = []
            partial = 1
            avail = list(indices)
            while len(chosen) < kk.order - 1:
                pick = None
                if partial.bit_count() < kk.order:
                    for i in avail:
                        grown = group.sumset_mask(partial, sp.blocks[i])
                        if grown.bit_count() > partial.bit_count():
                            pick = i
                            break
                if pick is None:
                    pick = avail[0]
                avail.remove(pick)
                chosen.append(pick)
                partial = group.sumset_mask(partial, sp.blocks[pick])
            return kk, indices, tuple(chosen)
        H = stabilizer(group, total)
        if H.is_trivial or H.order >= kk.order or any(h not in K for h in H.elements):
            return None
        aligned = tuple(
            i
            for i in indices
            if not sp.blocks[i] & ~H.coset_mask(bits(sp.blocks[i])[0])
        )
        if len(aligned) < H.order - 1:
            return None
        return rec(aligned, H)

    result = rec(tuple(range(len(sp.blocks))), K)
    if result is None:
        return LemmaReport("keylemma", instance, "violation")
    H, prime_idx, core_idx = result
    # re-verify the four conclusions against the original setpartition
    core_sum = sp.subpartition(core_idx).blockwise_sumset()
    ok = (
        H.order > 1
        and all(h in K for h in H.elements)
        and len(core_idx) == H.order - 1
        and core_sum.bit_count() == H.order
        and len(prime_idx)
        >= min(len(sp.blocks), len(sp.blocks) - K.order // H.order + 2)
        and all(
            not sp.blocks[i] & ~H.coset_mask(bits(sp.blocks[i])[0]) for i in prime_idx
        )
    )
    witness = {
        "subgroup": list(H.elements),
        "prime_blocks": list(prime_idx),
        "core_blocks": list(core_idx),
        "core_sum": bits(core_sum),
    }
    return LemmaReport(
        "keylemma", instance, "witness" if ok else "violation", witness
    )
