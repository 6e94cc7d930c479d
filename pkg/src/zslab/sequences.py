"""Sequences (multisets) over a group, setpartitions, and exact-count sumset unions.

A sequence is an unordered multiset of element ranks; a setpartition is an
ordered list of nonempty element sets (kept as bitmasks).  Block order inside
a setpartition matters only for reproducibility, never for any set-valued
result.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from zslab.errors import InvalidInput
from zslab.groups import Group, QuotientMap, bits


@dataclass(frozen=True)
class ElementSet:
    """A subset of a group as a characteristic bitmask indexed by rank."""

    group: Group
    mask: int

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, rank: int) -> bool:
        return bool(self.mask >> rank & 1)

    def elements(self) -> list[int]:
        return bits(self.mask)

    def __or__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.group, self.mask | other.mask)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.group, self.mask & other.mask)

    def __bool__(self) -> bool:
        return self.mask != 0


class GroupSequence:
    """An immutable multiset of group elements, the object all invariants quantify over."""

    __slots__ = ("group", "_mult", "length")

    def __init__(self, group: Group, mult):
        counts = {}
        for rank, m in sorted(dict(mult).items()):
            rank = int(rank)
            m = int(m)
            if m < 0:
                raise InvalidInput("multiplicities must be nonnegative")
            if not 0 <= rank < group.order:
                raise InvalidInput(f"rank {rank} out of range for {group.label()}")
            if m:
                counts[rank] = m
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "_mult", counts)
        object.__setattr__(self, "length", sum(counts.values()))

    def __setattr__(self, *a):
        raise AttributeError("GroupSequence is immutable")

    @classmethod
    def from_ranks(cls, group: Group, ranks) -> "GroupSequence":
        return cls(group, Counter(int(r) for r in ranks))

    @classmethod
    def empty(cls, group: Group) -> "GroupSequence":
        return cls(group, {})

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other):
        return (
            isinstance(other, GroupSequence)
            and self.group == other.group
            and self._mult == other._mult
        )

    def __hash__(self):
        return hash((self.group, tuple(self._mult.items())))

    def __repr__(self):
        return f"GroupSequence({self.group.label()}, {self.canonical()!r})"

    def mult(self, rank: int) -> int:
        return self._mult.get(rank, 0)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(self._mult.items())

    def support(self) -> tuple[int, ...]:
        return tuple(self._mult)

    def h(self) -> int:
        """Maximum multiplicity of a term (0 for the empty sequence)."""
        return max(self._mult.values(), default=0)

    def terms(self) -> tuple[int, ...]:
        """All terms with multiplicity, ascending."""
        out = []
        for rank, m in self._mult.items():
            out.extend([rank] * m)
        return tuple(out)

    def sum_rank(self) -> int:
        """The sum of all terms (0 for the empty sequence)."""
        total = 0
        for rank, m in self._mult.items():
            total = self.group.add(total, self.group.scalar(m, rank))
        return total

    def divides(self, other: "GroupSequence") -> bool:
        """Subsequence test: multiplicity-wise containment."""
        return self.group == other.group and all(
            m <= other.mult(rank) for rank, m in self._mult.items()
        )

    def concat(self, other: "GroupSequence") -> "GroupSequence":
        if other.group != self.group:
            raise InvalidInput("cannot concatenate sequences over different groups")
        merged = Counter(self._mult)
        merged.update(other._mult)
        return GroupSequence(self.group, merged)

    def remove(self, other: "GroupSequence") -> "GroupSequence":
        """The subsequence left after deleting ``other`` (which must divide self)."""
        if not other.divides(self):
            raise InvalidInput("can only remove a subsequence")
        merged = Counter(self._mult)
        merged.subtract(other._mult)
        return GroupSequence(self.group, merged)

    def translate(self, g: int) -> "GroupSequence":
        add = self.group.add
        return GroupSequence(self.group, {add(g, r): m for r, m in self._mult.items()})

    def scale(self, w: int) -> "GroupSequence":
        out: Counter = Counter()
        for r, m in self._mult.items():
            out[self.group.scalar(w, r)] += m
        return GroupSequence(self.group, out)

    def map(self, qm: QuotientMap) -> "GroupSequence":
        if qm.source != self.group:
            raise InvalidInput("quotient map source does not match the sequence group")
        out: Counter = Counter()
        for r, m in self._mult.items():
            out[qm.apply(r)] += m
        return GroupSequence(qm.target, out)

    def canonical(self) -> str:
        """Canonical serialized form: sorted rank:multiplicity pairs."""
        return ",".join(f"{r}:{m}" for r, m in self._mult.items())


def seq_stats(seq: GroupSequence) -> tuple[int, tuple[int, ...], int]:
    """(length, support, maximum multiplicity)."""
    return (len(seq), seq.support(), seq.h())


_TUPLE_TERM = re.compile(r"^\(([-\d,\s]*)\)(?:\^(\d+))?$")


def parse_sequence(group: Group, text: str) -> GroupSequence:
    """Parse a sequence literal.

    Supported forms: ``[0,0,1]`` (element ranks), ``(0,1)^2;(1,0)`` (coordinate
    tuples with optional exponents), and the canonical ``0:2,1:1``.
    """
    text = text.strip()
    if not text or text == "[]":
        return GroupSequence.empty(group)
    try:
        if text.startswith("["):
            if not text.endswith("]"):
                raise InvalidInput(f"unterminated rank list {text!r}")
            body = text[1:-1].strip()
            ranks = [int(p) for p in body.split(",")] if body else []
            return GroupSequence.from_ranks(group, ranks)
        if text.startswith("("):
            counts: Counter = Counter()
            for part in text.split(";"):
                m = _TUPLE_TERM.match(part.strip())
                if not m:
                    raise InvalidInput(f"bad sequence term {part!r}")
                coords = [int(p) for p in m.group(1).split(",")]
                counts[group.rank_of(coords)] += int(m.group(2) or 1)
            return GroupSequence(group, counts)
        if ":" in text:
            counts = Counter()
            for part in text.split(","):
                rank, _, m = part.partition(":")
                counts[int(rank)] += int(m)
            return GroupSequence(group, counts)
        return GroupSequence.from_ranks(group, (int(p) for p in text.split(",")))
    except ValueError as exc:
        raise InvalidInput(f"bad sequence literal {text!r}: {exc}") from None


# ---------------------------------------------------------------------------
# setpartitions


@dataclass(frozen=True)
class SetPartition:
    """An ordered list of nonempty element sets over one group (blocks as masks)."""

    group: Group
    blocks: tuple[int, ...]

    def __post_init__(self):
        for b in self.blocks:
            if b == 0:
                raise InvalidInput("setpartition blocks must be nonempty")
            if b >> self.group.order:
                raise InvalidInput("block mask exceeds the group order")

    @classmethod
    def from_sets(cls, group: Group, blocks) -> "SetPartition":
        return cls(group, tuple(group.mask_of(b) for b in blocks))

    def __len__(self) -> int:
        return len(self.blocks)

    def block_elements(self, i: int) -> list[int]:
        return bits(self.blocks[i])

    def partitioned_sequence(self) -> GroupSequence:
        """The sequence of all block elements, with multiplicity across blocks."""
        counts: Counter = Counter()
        for b in self.blocks:
            for r in bits(b):
                counts[r] += 1
        return GroupSequence(self.group, counts)

    def translate(self, g: int) -> "SetPartition":
        return SetPartition(
            self.group, tuple(self.group.shift_mask(b, g) for b in self.blocks)
        )

    def map(self, qm: QuotientMap) -> "SetPartition":
        return SetPartition(qm.target, tuple(qm.map_mask(b) for b in self.blocks))

    def blockwise_sumset(self) -> int:
        """Mask of the single sumset A_1 + ... + A_n of all blocks."""
        if not self.blocks:
            return 1  # the empty sum is {0}
        out = self.blocks[0]
        for b in self.blocks[1:]:
            out = self.group.sumset_mask(out, b)
        return out

    def subpartition(self, indices) -> "SetPartition":
        return SetPartition(self.group, tuple(self.blocks[i] for i in indices))


def n_setpartition(seq: GroupSequence, n: int) -> SetPartition | None:
    """A setpartition of ``seq`` into exactly n nonempty blocks, or None.

    Exists iff h(S) <= n <= |S|.  Construction: terms are dealt round-robin
    into the n blocks, equal terms consecutively so they land in distinct
    blocks; elements ordered by descending multiplicity then ascending rank.
    """
    if n < 1:
        raise InvalidInput("block count must be positive")
    if not seq.h() <= n <= len(seq):
        return None
    blocks: list[set[int]] = [set() for _ in range(n)]
    i = 0
    for rank, m in sorted(seq.pairs(), key=lambda p: (-p[1], p[0])):
        for _ in range(m):
            blocks[i].add(rank)
            i = (i + 1) % n
    return SetPartition.from_sets(seq.group, blocks)


def exact_count_table(group: Group, blocks, n_max: int) -> list[int]:
    """Masks of sums reachable by picking one element from exactly k blocks.

    Entry k of the result collects, over every k-subset of the given blocks,
    every sum of one element per chosen block; entry 0 is {0}.
    """
    table = [0] * (n_max + 1)
    table[0] = 1
    shift = group.shift_mask
    seen = 0
    for bmask in blocks:
        elems = bits(bmask)
        for k in range(min(seen, n_max - 1), -1, -1):
            src = table[k]
            if src:
                acc = 0
                for a in elems:
                    acc |= shift(src, a)
                table[k + 1] |= acc
        seen += 1
    return table


def sp_exact_n_union(sp: SetPartition, n: int) -> ElementSet:
    """Union over all length-n sub-setpartitions of the sumset of their blocks."""
    if not 1 <= n <= len(sp.blocks):
        raise InvalidInput(f"block count {n} out of range 1..{len(sp.blocks)}")
    return ElementSet(sp.group, exact_count_table(sp.group, sp.blocks, n)[n])
