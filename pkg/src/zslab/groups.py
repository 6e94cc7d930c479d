"""Finite abelian groups in invariant-factor form.

A group is a direct sum C_{n1} + ... + C_{nr} of cyclic groups with
n1 | n2 | ... | nr.  Elements are identified by their mixed-radix rank, an
integer in [0, order): coordinate i is a residue mod ni and
rank = c1 + n1*(c2 + n2*(c3 + ...)).  Subsets of a group travel as integer
bitmasks indexed by rank, which keeps membership tests, shifts and the
sumset dynamic programming cheap.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property

from zslab.errors import InvalidInput, ResourceLimit

#: Largest group order for which complete subgroup enumeration is attempted.
SUBGROUP_ENUMERATION_BUDGET = 64

#: Largest group order for which the automorphism group is enumerated.
AUTOMORPHISM_BUDGET = 16


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def normalize_factors(factors) -> tuple[int, ...]:
    """Invariant factors of a direct sum of cyclic groups of the given orders.

    Repeated (gcd, lcm) exchanges on adjacent entries converge to the unique
    divisibility chain with the same elementary divisors; unit factors are
    dropped except for the trivial group, which is represented as (1,).
    """
    vals = []
    for f in factors:
        f = int(f)
        if f < 1:
            raise InvalidInput(f"cyclic factor must be a positive integer, got {f}")
        if f > 1:
            vals.append(f)
    changed = True
    while changed:
        changed = False
        vals.sort()
        for i in range(len(vals) - 1):
            a, b = vals[i], vals[i + 1]
            if b % a:
                g = math.gcd(a, b)
                vals[i], vals[i + 1] = g, a * b // g
                changed = True
    vals = [v for v in vals if v > 1]
    return tuple(vals) if vals else (1,)


class Group:
    """A finite abelian group with invariant factors ``n1 | n2 | ... | nr``."""

    def __init__(self, factors):
        factors = tuple(int(f) for f in factors)
        if not factors:
            raise InvalidInput("a group needs at least one cyclic factor")
        for f in factors:
            if f < 1:
                raise InvalidInput(f"cyclic factor must be a positive integer, got {f}")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise InvalidInput(f"factors {factors} do not form a divisibility chain")
        if len(factors) > 1 and 1 in factors:
            raise InvalidInput("unit factors are only allowed for the trivial group")
        self.factors = factors
        self.order = math.prod(factors)
        self.exponent = factors[-1]

    def __eq__(self, other):
        return isinstance(other, Group) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        return f"Group({list(self.factors)})"

    def __reduce__(self):
        return (Group, (self.factors,))

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def label(self) -> str:
        return "x".join(f"C{n}" for n in self.factors)

    # ----- element coding ------------------------------------------------

    def elements(self) -> range:
        return range(self.order)

    def coords(self, rank: int) -> tuple[int, ...]:
        if not 0 <= rank < self.order:
            raise InvalidInput(f"rank {rank} out of range for {self.label()}")
        out = []
        for n in self.factors:
            rank, c = divmod(rank, n)
            out.append(c)
        return tuple(out)

    def rank_of(self, coords) -> int:
        coords = tuple(coords)
        if len(coords) != len(self.factors):
            raise InvalidInput(
                f"expected {len(self.factors)} coordinates for {self.label()}, got {len(coords)}"
            )
        rank = 0
        stride = 1
        for c, n in zip(coords, self.factors):
            rank += (int(c) % n) * stride
            stride *= n
        return rank

    # ----- arithmetic on ranks -------------------------------------------

    @cached_property
    def _coord_list(self):
        out = []
        for rank in range(self.order):
            r = rank
            cs = []
            for n in self.factors:
                r, c = divmod(r, n)
                cs.append(c)
            out.append(tuple(cs))
        return out

    @cached_property
    def _add_rows(self):
        return [None] * self.order

    def _row(self, g: int):
        row = self._add_rows[g]
        if row is None:
            gc = self._coord_list[g]
            row = [
                self.rank_of([a + b for a, b in zip(gc, self._coord_list[x])])
                for x in range(self.order)
            ]
            self._add_rows[g] = row
        return row

    def add(self, a: int, b: int) -> int:
        return self._row(a)[b]

    @cached_property
    def _neg_row(self):
        return [self.rank_of([-c for c in self._coord_list[x]]) for x in range(self.order)]

    def neg(self, a: int) -> int:
        return self._neg_row[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg_row[b])

    def scalar(self, k: int, a: int) -> int:
        """k*a for any integer k, reduced coordinate-wise."""
        return self.rank_of([k * c for c in self._coord_list[a]])

    def element_order(self, a: int) -> int:
        o = 1
        for c, n in zip(self._coord_list[a], self.factors):
            o = math.lcm(o, n // math.gcd(c, n))
        return o

    # ----- bitmask helpers -------------------------------------------------

    @property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    def mask_of(self, ranks) -> int:
        mask = 0
        for r in ranks:
            if not 0 <= r < self.order:
                raise InvalidInput(f"rank {r} out of range for {self.label()}")
            mask |= 1 << r
        return mask

    def shift_mask(self, mask: int, g: int) -> int:
        """The set mask translated by element g."""
        row = self._row(g)
        out = 0
        while mask:
            low = mask & -mask
            out |= 1 << row[low.bit_length() - 1]
            mask ^= low
        return out

    def sumset_mask(self, m1: int, m2: int) -> int:
        """Sumset of two subsets given as masks."""
        if m1.bit_count() > m2.bit_count():
            m1, m2 = m2, m1
        out = 0
        for g in bits(m1):
            out |= self.shift_mask(m2, g)
        return out


def make_group(factors) -> Group:
    """Build a group from arbitrary cyclic orders, normalizing to the chain form."""
    factors = tuple(factors)
    if not factors:
        raise InvalidInput("empty factor sequence")
    return Group(normalize_factors(factors))


_GROUP_SPEC = re.compile(r"^c(\d+)$")


def parse_group(text: str) -> Group:
    """Parse a group spec string such as ``C2``, ``C2xC4`` (case-insensitive)."""
    parts = text.replace(" ", "").lower().split("x")
    factors = []
    for part in parts:
        m = _GROUP_SPEC.match(part)
        if not m:
            raise InvalidInput(f"bad group spec {text!r}; expected e.g. 'C2' or 'C2xC4'")
        factors.append(int(m.group(1)))
    return make_group(factors)


def d_star(group: Group) -> int:
    """Sum of (ni - 1) over the invariant factors."""
    return sum(n - 1 for n in group.factors)


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its full element set inside an ambient group."""

    group: Group
    elements: tuple[int, ...]
    generators: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        if not elems or elems[0] != 0:
            raise InvalidInput("a subgroup must contain the identity")
        eset = frozenset(elems)
        add = self.group.add
        for a in elems:
            for b in elems:
                if add(a, b) not in eset:
                    raise InvalidInput("element set is not closed under addition")
        object.__setattr__(self, "_eset", eset)
        object.__setattr__(self, "mask", self.group.mask_of(elems))
        if self.generators is None:
            object.__setattr__(self, "generators", _greedy_generators(self.group, elems))

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.group.order // len(self.elements)

    @property
    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    @property
    def is_whole(self) -> bool:
        return len(self.elements) == self.group.order

    def __contains__(self, rank: int) -> bool:
        return rank in self._eset

    def coset_rep(self, x: int) -> int:
        """Minimal rank in the coset x + H."""
        add = self.group.add
        return min(add(x, h) for h in self.elements)

    def coset_mask(self, x: int) -> int:
        return self.group.shift_mask(self.mask, x)

    def cosets(self, domain=None) -> list[tuple[int, tuple[int, ...]]]:
        """(representative, members) pairs partitioning ``domain`` (default: the whole group).

        Representatives are the minimal rank in each coset; output sorted by representative.
        """
        if domain is None:
            domain = self.group.elements()
        buckets: dict[int, list[int]] = {}
        for x in domain:
            buckets.setdefault(self.coset_rep(x), []).append(x)
        return [(rep, tuple(sorted(v))) for rep, v in sorted(buckets.items())]

    def as_group(self) -> Group:
        """Abstract invariant-factor structure of this subgroup."""
        return structure_from_torsion(
            lambda e: sum(1 for h in self.elements if self.group.scalar(e, h) == 0),
            len(self.elements),
        )


def _greedy_generators(group: Group, elements) -> tuple[int, ...]:
    """A small generating set, picked greedily by descending element order."""
    target = set(elements)
    gens: list[int] = []
    have = {0}
    for h in sorted(elements, key=lambda x: (-group.element_order(x), x)):
        if h in have:
            continue
        gens.append(h)
        have = _closure(group, have, h)
        if len(have) == len(target):
            break
    return tuple(gens)


def _closure(group: Group, base: set[int], g: int) -> set[int]:
    """Closure of a subgroup ``base`` together with one extra generator."""
    add = group.add
    out = set()
    mult = 0
    for _ in range(group.element_order(g)):
        for h in base:
            out.add(add(h, mult))
        mult = add(mult, g)
    return out


def trivial_subgroup(group: Group) -> Subgroup:
    return Subgroup(group, (0,), generators=())


def whole_subgroup(group: Group) -> Subgroup:
    return Subgroup(group, tuple(group.elements()))


def torsion_subgroup(group: Group, d: int) -> Subgroup:
    """Kernel of multiplication by d: all g with d*g = 0."""
    if d < 0:
        raise InvalidInput("torsion parameter must be nonnegative")
    elems = tuple(g for g in group.elements() if group.scalar(d, g) == 0)
    return Subgroup(group, elems)


def image_subgroup(group: Group, d: int) -> Subgroup:
    """Image of multiplication by d: the set {d*g}."""
    if d < 0:
        raise InvalidInput("image parameter must be nonnegative")
    elems = tuple(sorted({group.scalar(d, g) for g in group.elements()}))
    return Subgroup(group, elems)


def subgroups_within(group: Group, elements) -> list[Subgroup]:
    """All subgroups of the (closed) element set, found by generator closure.

    Canonical order: by order, then lexicographically on the sorted element
    ranks.  Generators recorded are the discovery chain of each subgroup.
    """
    pool = sorted(set(elements))
    seen: dict[tuple[int, ...], tuple[int, ...]] = {(0,): ()}
    queue = [((0,), ())]
    while queue:
        sig, gens = queue.pop()
        base = set(sig)
        for g in pool:
            if g in base:
                continue
            new = _closure(group, base, g)
            new_sig = tuple(sorted(new))
            if new_sig not in seen:
                seen[new_sig] = gens + (g,)
                queue.append((new_sig, gens + (g,)))
    out = [Subgroup(group, sig, generators=gens) for sig, gens in seen.items()]
    out.sort(key=lambda s: (s.order, s.elements))
    return out


def all_subgroups(group: Group, max_order: int = SUBGROUP_ENUMERATION_BUDGET) -> list[Subgroup]:
    """Complete, duplicate-free subgroup list including the trivial and whole groups."""
    if group.order > max_order:
        raise ResourceLimit(
            f"subgroup enumeration budget is order <= {max_order}, got {group.order}"
        )
    return subgroups_within(group, group.elements())


def stabilizer(group: Group, subset) -> Subgroup:
    """The stabilizer {g : g + A = A} of a nonempty subset (iterable of ranks or mask)."""
    mask = subset if isinstance(subset, int) else group.mask_of(subset)
    if mask == 0:
        raise InvalidInput("stabilizer of the empty set is undefined")
    elems = tuple(g for g in group.elements() if group.shift_mask(mask, g) == mask)
    return Subgroup(group, elems)


# ---------------------------------------------------------------------------
# abstract structure reconstruction


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def structure_from_torsion(count_killed, total: int) -> Group:
    """Invariant-factor structure of a finite abelian group of order ``total``,
    reconstructed from the sizes of its p-power torsion subgroups.

    ``count_killed(e)`` must return the number of elements killed by e.  The
    p-type partition is recovered from log_p |G[p^k]|, whose increments are
    the conjugate partition.
    """
    if total == 1:
        return Group((1,))
    type_by_prime: dict[int, list[int]] = {}
    for p in _prime_factors(total):
        s_prev = 0
        conj = []
        k = 1
        while True:
            cnt = count_killed(p**k)
            v = 0
            while cnt % p == 0:
                cnt //= p
                v += 1
            if cnt != 1:
                raise InvalidInput("torsion counts are not consistent with an abelian group")
            if v == s_prev:
                break
            conj.append(v - s_prev)
            s_prev = v
            k += 1
        lam = [sum(1 for c in conj if c >= i) for i in range(1, conj[0] + 1)] if conj else []
        type_by_prime[p] = lam
    width = max(len(l) for l in type_by_prime.values())
    desc = []
    for j in range(width):
        f = 1
        for p, lam in type_by_prime.items():
            if j < len(lam):
                f *= p ** lam[j]
        desc.append(f)
    factors = tuple(reversed(desc))
    grp = Group(factors)
    if grp.order != total:
        raise InvalidInput("torsion counts are not consistent with an abelian group")
    return grp


def quotient_structure(group: Group, sub: Subgroup, over: Subgroup) -> Group:
    """Abstract structure of over/sub for nested subgroups sub <= over."""
    sset = set(sub.elements)
    total = len(over.elements) // len(sub.elements)

    def killed(e):
        return sum(1 for g in over.elements if group.scalar(e, g) in sset) // len(sub.elements)

    return structure_from_torsion(killed, total)


# ---------------------------------------------------------------------------
# quotient maps


def smith_diagonalize(rows):
    """Diagonalize an integer matrix with tracked row operations.

    Returns (U, diag) with U unimodular such that the column lattice of the
    input equals, after the change of basis U, the lattice spanned by
    diag(d1, ..., dr) with d1 | d2 | ... (column operations are untracked:
    they do not change the column lattice).
    """
    a = [list(map(int, row)) for row in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]

    def row_sub(i, j, q):
        ai, aj = a[i], a[j]
        for k in range(ncols):
            ai[k] -= q * aj[k]
        ui, uj = u[i], u[j]
        for k in range(nrows):
            ui[k] -= q * uj[k]

    t = 0
    while t < min(nrows, ncols):
        if not any(a[i][j] for i in range(t, nrows) for j in range(t, ncols)):
            break
        while True:
            best = None
            for i in range(t, nrows):
                for j in range(t, ncols):
                    v = a[i][j]
                    if v and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            bi, bj = best
            if bi != t:
                a[t], a[bi] = a[bi], a[t]
                u[t], u[bi] = u[bi], u[t]
            if bj != t:
                for row in a:
                    row[t], row[bj] = row[bj], row[t]
            if a[t][t] < 0:
                for k in range(ncols):
                    a[t][k] = -a[t][k]
                for k in range(nrows):
                    u[t][k] = -u[t][k]
            clean = True
            for i in range(t + 1, nrows):
                if a[i][t]:
                    row_sub(i, t, a[i][t] // a[t][t])
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, ncols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        clean = False
            if not clean:
                continue
            # pivot must divide everything that remains
            offender = None
            for i in range(t + 1, nrows):
                if any(a[i][j] % a[t][t] for j in range(t + 1, ncols)):
                    offender = i
                    break
            if offender is None:
                break
            row_sub(t, offender, -1)
        t += 1
    diag = [a[i][i] if i < ncols else 0 for i in range(nrows)]
    return u, diag


@dataclass(frozen=True)
class QuotientMap:
    """Total homomorphism table from a group onto the quotient by a subgroup."""

    source: Group
    kernel: Subgroup
    target: Group
    table: tuple[int, ...]

    def __post_init__(self):
        zero_pre = tuple(g for g in self.source.elements() if self.table[g] == 0)
        if zero_pre != self.kernel.elements:
            raise InvalidInput("quotient table kernel does not match the subgroup")
        if len(set(self.table)) != self.target.order:
            raise InvalidInput("quotient table is not surjective")

    def apply(self, rank: int) -> int:
        return self.table[rank]

    def map_mask(self, mask: int) -> int:
        out = 0
        tab = self.table
        while mask:
            low = mask & -mask
            out |= 1 << tab[low.bit_length() - 1]
            mask ^= low
        return out

    @cached_property
    def representatives(self) -> tuple[int, ...]:
        """Minimal-rank source representative of each target element."""
        reps = [None] * self.target.order
        for g in range(self.source.order):
            t = self.table[g]
            if reps[t] is None:
                reps[t] = g
        return tuple(reps)


def quotient(group: Group, sub: Subgroup) -> QuotientMap:
    """Quotient map of a group by a subgroup, with target in invariant-factor form."""
    if sub.group != group:
        raise InvalidInput("subgroup belongs to a different group")
    r = len(group.factors)
    cols = []
    for i, n in enumerate(group.factors):
        col = [0] * r
        col[i] = n
        cols.append(col)
    for h in sub.generators:
        cols.append(list(group.coords(h)))
    rows = [[col[i] for col in cols] for i in range(r)]
    u, diag = smith_diagonalize(rows)
    keep = [i for i, d in enumerate(diag) if d > 1]
    target = Group(tuple(diag[i] for i in keep) or (1,))
    table = []
    for g in range(group.order):
        c = group.coords(g)
        ys = [sum(u[i][j] * c[j] for j in range(r)) for i in keep]
        table.append(target.rank_of([y % diag[i] for y, i in zip(ys, keep)]))
    return QuotientMap(group, sub, target, tuple(table))


# ---------------------------------------------------------------------------
# automorphisms


def automorphisms(group: Group, max_order: int = AUTOMORPHISM_BUDGET) -> list[tuple[int, ...]]:
    """All automorphisms as rank permutations (enumeration capped by group order).

    A candidate is determined by the images of the standard generators; the
    image of the i-th generator must lie in the ni-torsion subgroup, and the
    induced map is kept when bijective.
    """
    if group.order > max_order:
        raise ResourceLimit(
            f"automorphism enumeration budget is order <= {max_order}, got {group.order}"
        )
    pools = [torsion_subgroup(group, n).elements for n in group.factors]
    perms = []
    for images in itertools.product(*pools):
        table = [0]
        for img, n in zip(images, group.factors):
            mult = 0
            new = []
            for _ in range(n):
                new.extend(group.add(t, mult) for t in table)
                mult = group.add(mult, img)
            table = new
        if len(set(table)) == group.order:
            perms.append(tuple(table))
    return perms


def orbit_minima(group: Group, perms) -> tuple[int, ...]:
    """For each rank, the minimal rank in its orbit under the given permutations."""
    mins = [None] * group.order
    for start in range(group.order):
        if mins[start] is not None:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            g = frontier.pop()
            for perm in perms:
                h = perm[g]
                if h not in orbit:
                    orbit.add(h)
                    frontier.append(h)
        low = min(orbit)
        for g in orbit:
            mins[g] = low
    return tuple(mins)
