"""Poset patterns and weak-copy search inside set families.

A weak copy of P in a family is a |P|-element subfamily G admitting a
bijection phi: P -> G with phi(x) a subset of phi(y) whenever x < y in P.
Incomparable pattern elements may land on comparable sets. Copies are
counted as subfamilies, never as embeddings.
"""

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .core_family import _as_digraph, longest_chain
from .errors import BudgetExceeded, ParameterError, PosetSpecError

DEFAULT_BUDGET = 10**8
GENERIC_SIZE_CAP = 8


@dataclass(frozen=True)
class Poset:
    """Strict partial order on elements 0..size-1; ``lt[i][j]`` means i < j."""

    size: int
    lt: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.size < 1:
            raise PosetSpecError("a poset needs at least one element")
        if len(self.lt) != self.size or any(len(row) != self.size for row in self.lt):
            raise PosetSpecError("relation table must be size x size")
        r = range(self.size)
        for i in r:
            if self.lt[i][i]:
                raise PosetSpecError("relation is not irreflexive")
            for j in r:
                if self.lt[i][j]:
                    if any(self.lt[j][m] and not self.lt[i][m] for m in r):
                        raise PosetSpecError("relation is not transitive")

    @classmethod
    def from_pairs(cls, size, pairs, name=""):
        """Build from (lower, upper) pairs over 0..size-1, taking the transitive closure."""
        rel = [[False] * size for _ in range(size)]
        for a, b in pairs:
            if not (0 <= a < size and 0 <= b < size):
                raise PosetSpecError(f"pair ({a}, {b}) outside 0..{size - 1}")
            rel[a][b] = True
        for m in range(size):
            for i in range(size):
                if rel[i][m]:
                    for j in range(size):
                        if rel[m][j]:
                            rel[i][j] = True
        if any(rel[i][i] for i in range(size)):
            raise PosetSpecError("cover relation contains a cycle")
        return cls(size, tuple(tuple(row) for row in rel), name)

    def below(self, i):
        return [j for j in range(self.size) if self.lt[j][i]]

    def above(self, i):
        return [j for j in range(self.size) if self.lt[i][j]]

    def comparable(self, i, j):
        return self.lt[i][j] or self.lt[j][i]

    def __str__(self):
        return self.name or f"poset({self.size})"


def _chain(k):
    return Poset.from_pairs(k, [(i, i + 1) for i in range(k - 1)], f"chain:{k}")


def _wedge(r):
    # element 0 sits above the r leaves
    return Poset.from_pairs(r + 1, [(i, 0) for i in range(1, r + 1)], f"wedge:{r}")


def _vee(r):
    return Poset.from_pairs(r + 1, [(0, i) for i in range(1, r + 1)], f"vee:{r}")


def _levels(sizes):
    pairs = []
    start = []
    total = 0
    for a in sizes:
        start.append(total)
        total += a
    for lvl in range(len(sizes) - 1):
        lo = range(start[lvl], start[lvl] + sizes[lvl])
        hi = range(start[lvl + 1], start[lvl + 1] + sizes[lvl + 1])
        pairs.extend((i, j) for i in lo for j in hi)
    name = "levels:" + ",".join(str(a) for a in sizes)
    return Poset.from_pairs(total, pairs, name)


def _custom(body, spec):
    size = None
    if ":" in body:
        head, body = body.split(":", 1)
        size = _positive(head, spec)
    pairs = []
    for tok in filter(None, (t.strip() for t in body.split(";"))):
        if "<" not in tok:
            raise PosetSpecError(f"{spec!r}: cover pair {tok!r} must look like 'i<j'")
        a, b = tok.split("<", 1)
        pairs.append((_positive(a, spec) - 1, _positive(b, spec) - 1))
    top = max((max(a, b) + 1 for a, b in pairs), default=0)
    if size is None:
        size = top
    if size < top:
        raise PosetSpecError(f"{spec!r}: pair element exceeds declared size {size}")
    if size < 1:
        raise PosetSpecError(f"{spec!r}: empty custom poset")
    return Poset.from_pairs(size, pairs, spec)


def _positive(tok, spec):
    try:
        v = int(tok)
    except ValueError:
        raise PosetSpecError(f"{spec!r}: {tok!r} is not an integer") from None
    if v < 1:
        raise PosetSpecError(f"{spec!r}: parameters must be at least 1")
    return v


def make_poset(spec: str) -> Poset:
    """Parse ``chain:k``, ``wedge:r``, ``vee:r``, ``levels:a1,...,as`` or
    ``custom:[size:]i<j;...`` (1-based elements, closed transitively)."""
    if not isinstance(spec, str) or ":" not in spec:
        raise PosetSpecError(f"malformed poset spec {spec!r}")
    kind, body = spec.split(":", 1)
    kind = kind.strip().lower()
    body = body.strip()
    if kind == "chain":
        return _chain(_positive(body, spec))
    if kind == "wedge":
        return _wedge(_positive(body, spec))
    if kind == "vee":
        return _vee(_positive(body, spec))
    if kind == "levels":
        sizes = [_positive(t, spec) for t in body.split(",")]
        return _levels(sizes)
    if kind == "custom":
        return _custom(body, spec)
    raise PosetSpecError(f"unknown poset kind {kind!r} in {spec!r}")


def height(p: Poset) -> int:
    """Maximum size of a totally ordered subset."""
    order = sorted(range(p.size), key=lambda i: len(p.below(i)))
    longest = [1] * p.size
    for i in order:
        for j in p.below(i):
            longest[i] = max(longest[i], longest[j] + 1)
    return max(longest)


def shape(p: Poset):
    """Classify p as ('chain', k), ('wedge', r), ('vee', r), ('antichain', r) or None.

    Two-element chains are reported as chains.
    """
    n = p.size
    if height(p) == n:
        return ("chain", n)
    if not any(any(row) for row in p.lt):
        return ("antichain", n)
    for t in range(n):
        rest = [i for i in range(n) if i != t]
        if any(p.comparable(i, j) for i in rest for j in rest if i < j):
            continue
        if all(p.lt[i][t] for i in rest):
            return ("wedge", n - 1)
        if all(p.lt[t][i] for i in rest):
            return ("vee", n - 1)
    return None


class _Search:
    """Backtracking embedding engine over an indexed universe of sets.

    ``up[v]``/``down[v]`` are bitmasks of universe indices strictly above /
    below v. ``allowed`` restricts images to a subfamily. Elements placed
    later are constrained by every already placed comparable element.
    """

    def __init__(self, p, up, down, allowed, fixed=None, budget=DEFAULT_BUDGET):
        self.p = p
        self.up = up
        self.down = down
        self.allowed = allowed
        self.fixed = dict(fixed or {})
        self.budget = budget
        self.nodes = 0
        self.order = self._placement_order()
        self.twin_prev = self._twins()

    def _placement_order(self):
        p = self.p
        placed = list(self.fixed)
        rest = [i for i in range(p.size) if i not in self.fixed]
        while rest:
            # most constrained next: comparabilities with placed elements,
            # then total comparabilities
            best = max(
                rest,
                key=lambda i: (
                    sum(p.comparable(i, j) for j in placed),
                    sum(p.comparable(i, j) for j in range(p.size)),
                    -i,
                ),
            )
            placed.append(best)
            rest.remove(best)
        return placed[len(self.fixed):]

    def _twins(self):
        p = self.p
        sig = {}
        prev = {}
        pos = {e: k for k, e in enumerate(self.order)}
        for i in range(p.size):
            if i in self.fixed:
                continue
            key = (tuple(p.below(i)), tuple(p.above(i)))
            if key in sig and pos[sig[key]] < pos[i]:
                prev[i] = sig[key]
            sig[key] = i
        return prev

    def _candidates(self, e, phi):
        p = self.p
        mask = self.allowed
        for x, v in phi.items():
            if p.lt[x][e]:
                mask &= self.up[v]
            elif p.lt[e][x]:
                mask &= self.down[v]
        for v in phi.values():
            mask &= ~(1 << v)
        t = self.twin_prev.get(e)
        if t is not None:
            mask &= ~((1 << (phi[t] + 1)) - 1)
        return mask

    def _walk(self, depth, phi, image, on_full):
        if depth == len(self.order):
            return on_full(image)
        e = self.order[depth]
        mask = self._candidates(e, phi)
        while mask:
            low = mask & -mask
            mask ^= low
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(self.budget, self._partial())
            v = low.bit_length() - 1
            phi[e] = v
            if self._walk(depth + 1, phi, image | low, on_full):
                del phi[e]
                return True
            del phi[e]
        return False

    def _initial(self):
        phi = dict(self.fixed)
        image = 0
        for v in phi.values():
            if not self.allowed >> v & 1 or image >> v & 1:
                return None, None
            image |= 1 << v
        for x, vx in phi.items():
            for y, vy in phi.items():
                if self.p.lt[x][y] and not self.up[vx] >> vy & 1:
                    return None, None
        return phi, image

    def _partial(self):
        return len(getattr(self, "_images", ()))

    def exists(self) -> bool:
        phi, image = self._initial()
        if phi is None:
            return False
        return self._walk(0, phi, image, lambda img: True)

    def count(self) -> int:
        self._images = set()
        phi, image = self._initial()
        if phi is None:
            return 0

        def record(img):
            self._images.add(img)
            return False

        self._walk(0, phi, image, record)
        return len(self._images)


def _check_generic_size(p):
    if p.size > GENERIC_SIZE_CAP:
        raise ParameterError(
            f"pattern has {p.size} elements; generic copy search is capped at {GENERIC_SIZE_CAP}"
        )


def count_copies(p: Poset, fam, budget: int = DEFAULT_BUDGET, fast: bool = True) -> int:
    """Number of weak copies of ``p`` in ``fam`` (a Family or its digraph).

    Chains, wedges, vees and antichains use closed forms unless
    ``fast=False``; anything else runs the backtracking search, which raises
    :class:`BudgetExceeded` after ``budget`` nodes.
    """
    dg = _as_digraph(fam)
    if fast:
        sh = shape(p)
        if sh is not None:
            return _count_by_shape(sh, dg)
    _check_generic_size(p)
    full = (1 << len(dg)) - 1
    return _Search(p, dg.up_mask, dg.down_mask, full, budget=budget).count()


def _count_by_shape(sh, dg):
    from .core_family import count_fan_copies, count_k_chains

    kind, r = sh
    if kind == "chain":
        return count_k_chains(dg, r)
    if kind == "wedge":
        return count_fan_copies(dg, r, "down")
    if kind == "vee":
        return count_fan_copies(dg, r, "up")
    return comb(len(dg), r)


def contains_copy(p: Poset, fam, budget: int = DEFAULT_BUDGET, fast: bool = True) -> bool:
    dg = _as_digraph(fam)
    if fast:
        sh = shape(p)
        if sh is not None:
            return not _free_by_shape(sh, dg)
    _check_generic_size(p)
    full = (1 << len(dg)) - 1
    return _Search(p, dg.up_mask, dg.down_mask, full, budget=budget).exists()


def _free_by_shape(sh, dg):
    kind, r = sh
    if kind == "chain":
        return longest_chain(dg) <= r - 1
    if kind == "wedge":
        return max(dg.outdeg, default=0) <= r - 1
    if kind == "vee":
        return max(dg.indeg, default=0) <= r - 1
    return len(dg) < r


def is_free(fam, forbidden: Sequence[Poset], budget: int = DEFAULT_BUDGET, fast: bool = True) -> bool:
    """True iff ``fam`` has no weak copy of any poset in ``forbidden``.

    Degree and longest-chain tests decide wedges, vees and chains; other
    patterns fall back to an existence search.
    """
    dg = _as_digraph(fam)
    return not any(contains_copy(p, dg, budget, fast) for p in forbidden)


def copy_through(p: Poset, up, down, allowed: int, v: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether some weak copy of ``p`` inside ``allowed`` uses universe index v.

    Used for incremental freeness: if ``allowed`` minus v is p-free, adding v
    creates a copy iff this returns True.
    """
    for e in range(p.size):
        if _Search(p, up, down, allowed, fixed={e: v}, budget=budget).exists():
            return True
    return False


def count_in_universe(p: Poset, up, down, allowed: int, budget: int = DEFAULT_BUDGET) -> int:
    return _Search(p, up, down, allowed, budget=budget).count()
