"""Set families over [n] as bit words, and their comparability digraphs.

A set F of [n] is stored as an int whose bit i-1 is set iff i is in F.
Families keep their members in canonical order: by cardinality, then by
numeric value of the word.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .errors import FamilyFormatError, ParameterError

logger = logging.getLogger(__name__)

MAX_N = 64


def set_key(word: int):
    return (word.bit_count(), word)


def word_from_elements(elements: Iterable[int]) -> int:
    word = 0
    for e in elements:
        word |= 1 << (e - 1)
    return word


def elements_of(word: int) -> list:
    out = []
    i = 1
    while word:
        if word & 1:
            out.append(i)
        word >>= 1
        i += 1
    return out


def format_set(word: int) -> str:
    if word == 0:
        return "-"
    return ",".join(str(e) for e in elements_of(word))


@dataclass(frozen=True)
class Family:
    """Deduplicated family of subsets of [n] in canonical order.

    Build one with :meth:`from_sets`; the plain constructor expects ``sets``
    to be canonical already and rejects anything else.
    """

    n: int
    sets: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ParameterError(f"ground set size must be in 1..{MAX_N}, got {self.n}")
        limit = 1 << self.n
        keys = [set_key(s) for s in self.sets]
        for s in self.sets:
            if not 0 <= s < limit:
                raise ParameterError(f"set word {s} has elements outside [1, {self.n}]")
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise ParameterError("sets are not in strict canonical order; use Family.from_sets")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.sets)})

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[int]) -> "Family":
        return cls(n, tuple(sorted(set(sets), key=set_key)))

    @classmethod
    def from_elements(cls, n: int, sets: Iterable[Iterable[int]]) -> "Family":
        return cls.from_sets(n, (word_from_elements(s) for s in sets))

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __contains__(self, word):
        return word in self._index

    def index(self, word: int) -> int:
        return self._index[word]

    def union(self, other: Iterable[int]) -> "Family":
        return Family.from_sets(self.n, list(self.sets) + list(other))

    def as_elements(self) -> list:
        return [elements_of(s) for s in self.sets]


def load_family(text: str) -> Family:
    """Parse the family file format.

    Line 1 is ``n=<decimal>``; every other non-empty, non-comment line is a
    set written as ``-`` (empty) or strictly increasing comma-separated
    elements of 1..n. Duplicate sets are logged and collapsed.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FamilyFormatError("empty family file: missing 'n=' header")
    header = lines[0]
    if not header.startswith("n="):
        raise FamilyFormatError(f"malformed header {header!r}; expected 'n=<decimal>'")
    try:
        n = int(header[2:])
    except ValueError:
        raise FamilyFormatError(f"malformed header {header!r}; expected 'n=<decimal>'") from None
    if not 1 <= n <= MAX_N:
        raise FamilyFormatError(f"n={n} outside supported range 1..{MAX_N}")

    seen = set()
    words = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line == "-":
            word = 0
        else:
            try:
                elems = [int(tok) for tok in line.split(",")]
            except ValueError:
                raise FamilyFormatError(f"line {lineno}: cannot parse {line!r}") from None
            for e in elems:
                if not 1 <= e <= n:
                    raise FamilyFormatError(f"line {lineno}: element {e} out of range 1..{n}")
            if any(a >= b for a, b in zip(elems, elems[1:])):
                raise FamilyFormatError(f"line {lineno}: elements must be strictly increasing")
            word = word_from_elements(elems)
        if word in seen:
            logger.warning("duplicate set %s on line %d dropped", format_set(word), lineno)
            continue
        seen.add(word)
        words.append(word)
    return Family.from_sets(n, words)


def dump_family(fam: Family) -> str:
    """Serialize in canonical order with LF endings."""
    out = [f"n={fam.n}"]
    out.extend(format_set(s) for s in fam.sets)
    return "\n".join(out) + "\n"


class ComparabilityDigraph:
    """Directed comparability graph of a family.

    There is an arc from A to B iff B is a proper subset of A, so
    ``outdeg`` counts members strictly below and ``indeg`` members strictly
    above. Vertices are family indices.

    Construction buckets members by cardinality. For a member of size q and a
    bucket of size p < q it either enumerates the C(q, p) subsets or scans
    the bucket, whichever is smaller, so the worst case is O(|F|^2) subset
    tests and two adjacent levels cost O(|F| * n).
    """

    def __init__(self, fam: Family):
        self.family = fam
        sets = fam.sets
        buckets = {}
        for i, s in enumerate(sets):
            buckets.setdefault(s.bit_count(), []).append(i)
        index = fam._index
        below = [[] for _ in sets]
        above = [[] for _ in sets]
        for i, s in enumerate(sets):
            q = s.bit_count()
            bits = [1 << b for b in range(fam.n) if s >> b & 1]
            for p, bucket in buckets.items():
                if p >= q:
                    continue
                if comb(q, p) <= len(bucket):
                    for sub in combinations(bits, p):
                        j = index.get(sum(sub))
                        if j is not None:
                            below[i].append(j)
                else:
                    below[i].extend(j for j in bucket if sets[j] & s == sets[j])
            below[i].sort()
            for j in below[i]:
                above[j].append(i)
        self.below = tuple(tuple(b) for b in below)
        self.above = tuple(tuple(sorted(a)) for a in above)
        self.outdeg = tuple(len(b) for b in self.below)
        self.indeg = tuple(len(a) for a in self.above)
        self.comp_id = self._components()

    def _components(self):
        parent = list(range(len(self.below)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, nbrs in enumerate(self.below):
            for j in nbrs:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
        # label components by their smallest vertex, renumbered densely
        labels = {}
        out = []
        for i in range(len(parent)):
            r = find(i)
            out.append(labels.setdefault(r, len(labels)))
        return tuple(out)

    def __len__(self):
        return len(self.below)

    @property
    def num_arcs(self) -> int:
        return sum(self.outdeg)

    @property
    def num_components(self) -> int:
        return len(set(self.comp_id))

    def arcs(self):
        for i, nbrs in enumerate(self.below):
            for j in nbrs:
                yield i, j

    def components(self) -> list:
        """Vertex index lists, one per component, in order of first vertex."""
        comps = {}
        for v, c in enumerate(self.comp_id):
            comps.setdefault(c, []).append(v)
        return [comps[c] for c in sorted(comps)]

    @cached_property
    def down_mask(self) -> tuple:
        return tuple(sum(1 << j for j in b) for b in self.below)

    @cached_property
    def up_mask(self) -> tuple:
        return tuple(sum(1 << j for j in a) for a in self.above)


def build_digraph(fam: Family) -> ComparabilityDigraph:
    return ComparabilityDigraph(fam)


def _as_digraph(obj) -> ComparabilityDigraph:
    return obj if isinstance(obj, ComparabilityDigraph) else ComparabilityDigraph(obj)


def count_k_chains(fam, k: int) -> int:
    """Number of k-element subfamilies totally ordered by proper inclusion.

    ``fam`` may be a Family or an already built digraph. Dynamic programming
    over the canonical (topological) order: ``ending[t][v]`` is the number of
    t-chains whose top is v.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    dg = _as_digraph(fam)
    ending = [1] * len(dg)
    for _ in range(k - 1):
        ending = [sum(ending[j] for j in dg.below[v]) for v in range(len(dg))]
    return sum(ending)


def count_fan_copies(fam, s: int, direction: str = "down") -> int:
    """Copies of the wedge (down) or vee (up) with s leaves.

    The wedge count is the sum over members of C(outdeg, s); the vee count
    uses indegrees. For s = 1 both give the number of containments.
    """
    if s < 1:
        raise ParameterError("s must be at least 1")
    dg = _as_digraph(fam)
    if direction == "down":
        degs = dg.outdeg
    elif direction == "up":
        degs = dg.indeg
    else:
        raise ParameterError(f"direction must be 'up' or 'down', got {direction!r}")
    return sum(comb(d, s) for d in degs)


def chain_ranks(fam) -> list:
    """Length of the longest chain of members ending at each member."""
    dg = _as_digraph(fam)
    rank = [1] * len(dg)
    for v in range(len(dg)):
        if dg.below[v]:
            rank[v] = 1 + max(rank[j] for j in dg.below[v])
    return rank


def longest_chain(fam) -> int:
    ranks = chain_ranks(fam)
    return max(ranks, default=0)


def antichain_partition(fam) -> list:
    """Peel off minimal elements repeatedly.

    Block i holds the members whose longest chain from below has length i,
    which is exactly the set of minimal elements left after removing blocks
    1..i-1. Returns a list of Family objects.
    """
    dg = _as_digraph(fam)
    f = dg.family
    ranks = chain_ranks(dg)
    blocks = [[] for _ in range(max(ranks, default=0))]
    for v, r in enumerate(ranks):
        blocks[r - 1].append(f.sets[v])
    return [Family.from_sets(f.n, b) for b in blocks]


def subfamily(fam: Family, indices: Sequence[int]) -> Family:
    return Family.from_sets(fam.n, (fam.sets[i] for i in indices))
