"""Integer weight sets and weighted subsequence-sum sets.

A weight set A acts on a group element g through its orbit {a*g : a in A}.
All weighted sum sets are computed from A alone: quantifying over weight
sequences with support A and ample multiplicity is equivalent to choosing
weights independently from A, so no weight sequence is ever materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

from zslab.errors import InvalidInput, PreconditionViolation
from zslab.groups import Group
from zslab.sequences import ElementSet, GroupSequence, exact_count_table


@dataclass(frozen=True)
class WeightSet:
    """A nonempty set of integer weights with its derived gcd data."""

    raw: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(sorted(set(int(a) for a in self.raw)))
        if not vals:
            raise InvalidInput("weight set must be nonempty")
        object.__setattr__(self, "raw", vals)

    @classmethod
    def of(cls, *weights) -> "WeightSet":
        return cls(tuple(weights))

    @property
    def a0(self) -> int:
        """Designated base weight: minimal absolute value, ties to positive."""
        return min(self.raw, key=lambda a: (abs(a), 0 if a > 0 else 1))

    @property
    def gcd(self) -> int:
        return reduce(math.gcd, self.raw)

    def reduced(self, m: int) -> tuple[int, ...]:
        """Residues of the weights mod m, deduplicated and sorted."""
        if m < 1:
            raise InvalidInput("modulus must be positive")
        return tuple(sorted({a % m for a in self.raw}))

    def d(self, m: int) -> int:
        """gcd((A - a0) u {m}); independent of the choice of base weight."""
        a0 = self.a0
        return reduce(math.gcd, [a - a0 for a in self.raw] + [m])

    def gcd_with(self, m: int) -> int:
        """gcd(A u {m}): the coset-lemma hypothesis, kept separate from gcd(A)."""
        return math.gcd(self.gcd, m)

    def canonical(self) -> str:
        return ",".join(str(a) for a in self.raw)

    def __repr__(self):
        return f"WeightSet({{{self.canonical()}}})"


def parse_weights(text: str) -> WeightSet:
    """Parse a weight-set literal such as ``1,-1`` or ``1,2,3``."""
    try:
        return WeightSet(tuple(int(p) for p in text.split(",")))
    except ValueError as exc:
        raise InvalidInput(f"bad weight set literal {text!r}: {exc}") from None


def orbit_ranks(weights: WeightSet, group: Group, g: int) -> tuple[int, ...]:
    """Sorted distinct ranks of {a*g : a in A}."""
    return tuple(sorted({group.scalar(a, g) for a in weights.reduced(group.exponent)}))


def weight_orbit(weights: WeightSet, group: Group, g: int) -> ElementSet:
    """The orbit A*g = {a*g : a in A} of one element."""
    return ElementSet(group, group.mask_of(orbit_ranks(weights, group, g)))


def orbit_blocks(weights: WeightSet, seq: GroupSequence) -> list[int]:
    """One orbit mask A*s per term of the sequence, with multiplicity."""
    group = seq.group
    per_rank = {}
    blocks = []
    for rank, m in seq.pairs():
        bm = per_rank.get(rank)
        if bm is None:
            bm = group.mask_of(orbit_ranks(weights, group, rank))
            per_rank[rank] = bm
        blocks.extend([bm] * m)
    return blocks


def sigma_table(weights: WeightSet, seq: GroupSequence, n_max=None) -> list[int]:
    """Masks of weighted sums over exactly-k-term subsequences, k = 0..n_max."""
    if n_max is None:
        n_max = len(seq)
    return exact_count_table(seq.group, orbit_blocks(weights, seq), n_max)


def sigma_exact_n(weights: WeightSet, seq: GroupSequence, n: int) -> ElementSet:
    """All weighted sums over exactly-n-term subsequences of the sequence."""
    if not 1 <= n <= len(seq):
        raise InvalidInput(f"term count {n} out of range 1..{len(seq)}")
    return ElementSet(seq.group, sigma_table(weights, seq, n)[n])


def sigma_le_n(weights: WeightSet, seq: GroupSequence, n: int) -> ElementSet:
    """Weighted sums over subsequences of between 1 and n terms."""
    if not 1 <= n <= len(seq):
        raise InvalidInput(f"term count {n} out of range 1..{len(seq)}")
    table = sigma_table(weights, seq, n)
    mask = 0
    for k in range(1, n + 1):
        mask |= table[k]
    return ElementSet(seq.group, mask)


def sigma_ge_n(weights: WeightSet, seq: GroupSequence, n: int) -> ElementSet:
    """Weighted sums over subsequences of at least n terms."""
    if not 1 <= n <= len(seq):
        raise InvalidInput(f"term count {n} out of range 1..{len(seq)}")
    table = sigma_table(weights, seq)
    mask = 0
    for k in range(n, len(seq) + 1):
        mask |= table[k]
    return ElementSet(seq.group, mask)


def sigma_all(weights: WeightSet, seq: GroupSequence) -> ElementSet:
    """Weighted sums over all nontrivial subsequences (empty for the empty sequence)."""
    if len(seq) == 0:
        return ElementSet(seq.group, 0)
    return sigma_le_n(weights, seq, len(seq))


def check_translation_identity(
    weights: WeightSet, seq: GroupSequence, n: int, g: int
) -> bool:
    """Exact set identity between the n-term sums of g+S and the shifted sums of S.

    Requires g in G[d] for d = gcd((A - a0) u {exponent}); holds for every
    valid input, so a False return signals an implementation bug.
    """
    group = seq.group
    if not 1 <= n <= len(seq):
        raise InvalidInput(f"term count {n} out of range 1..{len(seq)}")
    d = weights.d(group.exponent)
    if group.scalar(d, g) != 0:
        raise PreconditionViolation(
            f"element {g} is not {d}-torsion in {group.label()}"
        )
    lhs = sigma_exact_n(weights, seq.translate(g), n).mask
    shift = group.scalar(n * weights.a0, g)
    rhs = group.shift_mask(sigma_exact_n(weights, seq, n).mask, shift)
    return lhs == rhs
