"""Checkable versions of the augmentation and repair arguments for
{wedge_k, vee_l}-free families.

Degrees below refer to the comparability digraph: ``outdeg(F)`` counts
members strictly inside F, ``indeg(F)`` members strictly containing F.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .core_family import ComparabilityDigraph, Family, _as_digraph, build_digraph, count_fan_copies, longest_chain
from .errors import PreconditionError


def _require_free(dg, k, l, p4=False):
    if max(dg.outdeg, default=0) > k - 1:
        raise PreconditionError(f"family contains a wedge with {k} leaves")
    if max(dg.indeg, default=0) > l - 1:
        raise PreconditionError(f"family contains a vee with {l} leaves")
    if p4 and longest_chain(dg) >= 4:
        raise PreconditionError("family contains a 4-chain")


def problematic_sets(fam, k: int, l: int) -> Family:
    """Members with (k-1)(l-1) < (l-1)*outdeg + (k-1)*indeg."""
    dg = _as_digraph(fam)
    _require_free(dg, k, l)
    bound = (k - 1) * (l - 1)
    f = dg.family
    keep = [
        f.sets[v]
        for v in range(len(dg))
        if (l - 1) * dg.outdeg[v] + (k - 1) * dg.indeg[v] > bound
    ]
    return Family.from_sets(f.n, keep)


def _neighborhood_words(dg, v):
    f = dg.family
    F = f.sets[v]
    return {(f.sets[u] & ~F) | f.sets[d] for u in dg.above[v] for d in dg.below[v]}


def neighborhood_family(fam, F: int) -> Family:
    """All sets (U minus F) plus D over members U strictly above and D strictly below F."""
    dg = _as_digraph(fam)
    f = dg.family
    if F not in f:
        raise PreconditionError("set is not a member of the family")
    v = f.index(F)
    if not dg.outdeg[v] or not dg.indeg[v]:
        raise PreconditionError("set needs at least one member below and one above")
    return Family.from_sets(f.n, _neighborhood_words(dg, v))


@dataclass(frozen=True)
class BipartiteGraph:
    """Parts A and B with edges given as (a, b) pairs."""

    A: tuple
    B: tuple
    edges: frozenset

    def __post_init__(self):
        a_set, b_set = set(self.A), set(self.B)
        for a, b in self.edges:
            if a not in a_set or b not in b_set:
                raise PreconditionError(f"edge ({a!r}, {b!r}) leaves the declared parts")

    def neighbors_of_b(self):
        nb = {b: [] for b in self.B}
        for a, b in self.edges:
            nb[b].append(a)
        return nb

    def degree_a(self):
        deg = {a: 0 for a in self.A}
        for a, _ in self.edges:
            deg[a] += 1
        return deg


@dataclass(frozen=True)
class HallResult:
    """``matching`` maps each B vertex to its partner in A.

    ``violation`` is ``(vertex, condition)`` with condition 1 (isolated) or
    2 (degree below the mean degree of its neighbours); it is None when both
    conditions hold. ``covers_b`` records whether the matching saturates B.
    """

    conditions_hold: bool
    matching: dict
    covers_b: bool
    violation: Optional[tuple] = None


def hall_conditions(g: BipartiteGraph):
    """First B vertex breaking a condition, as (vertex, 1 or 2), else None."""
    nb = g.neighbors_of_b()
    deg_a = g.degree_a()
    for b in g.B:
        d = len(nb[b])
        if d == 0:
            return (b, 1)
        if Fraction(d) < Fraction(sum(deg_a[a] for a in nb[b]), d):
            return (b, 2)
    return None


def max_matching(g: BipartiteGraph) -> dict:
    """Maximum matching by repeated augmenting paths, as {b: a}."""
    nb = g.neighbors_of_b()
    for b in nb:
        nb[b].sort(key=repr)
    match_a = {}

    def augment(b, seen):
        for a in nb[b]:
            if a in seen:
                continue
            seen.add(a)
            if a not in match_a or augment(match_a[a], seen):
                match_a[a] = b
                return True
        return False

    for b in g.B:
        augment(b, set())
    return {b: a for a, b in match_a.items()}


def average_hall(g: BipartiteGraph) -> HallResult:
    """Check both conditions of the averaged Hall criterion, then match.

    The matching is computed regardless, so a run where the conditions hold
    but B is not saturated would expose a counterexample.
    """
    violation = hall_conditions(g)
    m = max_matching(g)
    return HallResult(violation is None, m, len(m) == len(g.B), violation)


@dataclass
class AugmentationReport:
    f1: Family
    added: Family
    lemma51_ok: bool
    lemma52_ok: bool
    g1_conditions_ok: Optional[bool]
    matching_ok: Optional[bool]
    counterexample: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return all(x is not False for x in (self.lemma51_ok, self.lemma52_ok, self.g1_conditions_ok, self.matching_ok))


def random_bipartite_graph(rng: random.Random) -> BipartiteGraph:
    """Random graph with 1..6 B vertices, at least as many A vertices, and a
    random edge density in [0.3, 0.9)."""
    b = rng.randint(1, 6)
    a = rng.randint(b, 9)
    prob = rng.uniform(0.3, 0.9)
    A = tuple(f"a{i}" for i in range(a))
    B = tuple(f"b{j}" for j in range(b))
    edges = frozenset((x, y) for x in A for y in B if rng.random() < prob)
    return BipartiteGraph(A, B, edges)


def augmentation_graph(dg: ComparabilityDigraph, f1_vertices) -> BipartiteGraph:
    """Problematic sets (part B) against the new sets of their neighbourhoods (part A)."""
    f = dg.family
    edges = set()
    for v in f1_vertices:
        for w in _neighborhood_words(dg, v):
            if w not in f:
                edges.add((w, f.sets[v]))
    A = tuple(sorted({a for a, _ in edges}))
    B = tuple(f.sets[v] for v in f1_vertices)
    return BipartiteGraph(A, B, frozenset(edges))


def augment_and_verify(fam, k: int, l: int, require_p4_free: bool = True) -> AugmentationReport:
    """Add every neighbourhood family of a problematic set and check what
    the argument promises.

    (a) the augmented family has max in/out degree below k^2 l^2;
    (b) there are at least as many new sets as problematic sets;
    (c) with a 4-chain-free input, the bipartite graph between them meets
        both averaged Hall conditions;
    (d) that graph has a matching saturating the problematic sets.
    (c) and (d) are None when the input is not required to be 4-chain-free.
    """
    dg = _as_digraph(fam)
    f = dg.family
    _require_free(dg, k, l, p4=require_p4_free)
    bound = (k - 1) * (l - 1)
    f1_vertices = [
        v for v in range(len(dg)) if (l - 1) * dg.outdeg[v] + (k - 1) * dg.indeg[v] > bound
    ]
    new_words = set()
    for v in f1_vertices:
        new_words |= _neighborhood_words(dg, v)
    added = sorted(w for w in new_words if w not in f)
    augmented = build_digraph(f.union(added))
    cap = k * k * l * l
    lemma51 = max(augmented.outdeg, default=0) < cap and max(augmented.indeg, default=0) < cap
    lemma52 = len(f1_vertices) <= len(added)

    g1_ok = matching_ok = None
    counter = {}
    if require_p4_free:
        g = augmentation_graph(dg, f1_vertices)
        res = average_hall(g)
        g1_ok = res.conditions_hold
        matching_ok = res.covers_b
        if res.violation is not None:
            counter["g1_violation"] = {"set": res.violation[0], "condition": res.violation[1]}
    if not lemma51:
        worst = max(range(len(augmented)), key=lambda v: max(augmented.outdeg[v], augmented.indeg[v]))
        counter["lemma51_vertex"] = augmented.family.sets[worst]
    if not (lemma51 and lemma52 and g1_ok is not False and matching_ok is not False):
        counter["family"] = f
    return AugmentationReport(
        Family.from_sets(f.n, (f.sets[v] for v in f1_vertices)),
        Family.from_sets(f.n, added),
        lemma51,
        lemma52,
        g1_ok,
        matching_ok,
        counter or None,
    )


@dataclass(frozen=True)
class ComponentReport:
    """One component of the repaired family.

    ``edges`` counts containments among the original members of the
    component, ``vertices`` the component size after repair.
    """

    vertices: int
    edges: int
    repaired: bool
    added: Optional[int] = None

    @property
    def ratio_ok(self) -> bool:
        return 2 * self.edges <= 3 * self.vertices


def find_s_components(dg: ComparabilityDigraph) -> list:
    """Components shaped like two sets below a centre below two sets.

    Returns (A, B, V, D, E) word tuples, bottoms and tops each in canonical
    order.
    """
    f = dg.family
    out = []
    for comp in dg.components():
        if len(comp) != 5:
            continue
        if sum(dg.outdeg[v] for v in comp) != 8:
            continue
        centres = [v for v in comp if dg.outdeg[v] == 2 and dg.indeg[v] == 2]
        if len(centres) != 1:
            continue
        c = centres[0]
        a, b = dg.below[c]
        d, e = dg.above[c]
        out.append((f.sets[a], f.sets[b], f.sets[c], f.sets[d], f.sets[e]))
    return out


def interval_sets(low: int, high: int):
    """Sets strictly between ``low`` and ``high``, in canonical order."""
    free = high & ~low
    bits = [1 << i for i in range(free.bit_length()) if free >> i & 1]
    for r in range(1, len(bits)):
        yield from sorted(low | sum(combo) for combo in combinations(bits, r))


def s_component_repair(fam):
    """Give each five-set S component one extra set strictly between its
    first bottom and first top, other than the centre.

    Returns ``(repaired_family, reports)`` with one :class:`ComponentReport`
    per component of the repaired family.
    """
    dg = _as_digraph(fam)
    f = dg.family
    _require_free(dg, 4, 4)
    new_sets = {}
    for A, _B, V, D, _E in find_s_components(dg):
        pick = next((x for x in interval_sets(A, D) if x != V), None)
        if pick is None:
            raise PreconditionError(f"no set strictly between {A} and {D} other than the centre")
        new_sets[pick] = A
    repaired = f.union(new_sets)
    rdg = build_digraph(repaired)
    original = set(f.sets)
    reports = []
    for comp in rdg.components():
        words = [rdg.family.sets[v] for v in comp]
        old = [v for v in comp if rdg.family.sets[v] in original]
        edges = sum(1 for v in old for u in rdg.below[v] if rdg.family.sets[u] in original)
        extra = [w for w in words if w not in original]
        reports.append(ComponentReport(len(comp), edges, bool(extra), extra[0] if extra else None))
    return repaired, reports


@dataclass(frozen=True)
class TopLayerReport:
    top: Family
    indeg_zero: bool
    independent: bool
    counting_ok: bool
    wedge_count: int

    @property
    def ok(self) -> bool:
        return self.indeg_zero and self.independent and self.counting_ok and self.wedge_count == len(self.top)


def top_layer_bound_check(fam, k: int, l: int) -> TopLayerReport:
    """Members with outdeg k-1: nothing contains them, no two are related,
    and (k-1)|A| <= (l-1)(|F| - |A|)."""
    dg = _as_digraph(fam)
    f = dg.family
    _require_free(dg, k, l)
    top = [v for v in range(len(dg)) if dg.outdeg[v] == k - 1]
    top_set = set(top)
    indeg_zero = all(dg.indeg[v] == 0 for v in top)
    independent = not any(u in top_set for v in top for u in dg.below[v])
    counting = (k - 1) * len(top) <= (l - 1) * (len(f) - len(top))
    wedges = count_fan_copies(dg, k - 1, "down")
    return TopLayerReport(
        Family.from_sets(f.n, (f.sets[v] for v in top)), indeg_zero, independent, counting, wedges
    )


def random_free_family(n: int, k: int, l: int, seed, proposals: int = 60, base=(), local: float = 0.7) -> Family:
    """Seeded {wedge_k, vee_l}-free family on the three levels around n//2.

    Proposes sets of size n//2 - 1, n//2 or n//2 + 1 and keeps each one that
    preserves freeness. With probability ``local`` a proposal is an existing
    member with one element toggled, otherwise a uniform random set. Three
    levels cannot hold a 4-chain. ``base`` seeds the family with sets assumed
    free already.
    """
    rng = random.Random(seed)
    half = n // 2
    sizes = [s for s in (half - 1, half, half + 1) if 0 <= s <= n]
    members = set(base)
    below = {m: {x for x in members if x != m and x & m == x} for m in members}
    above = {m: {x for x in members if x != m and x & m == m} for m in members}
    for _ in range(proposals):
        if members and rng.random() < local:
            # flip one element of an existing member to grow dense clusters
            w = rng.choice(sorted(members)) ^ (1 << rng.randrange(n))
            if w.bit_count() not in sizes:
                continue
        else:
            w = sum(1 << i for i in rng.sample(range(n), rng.choice(sizes)))
        if w in members:
            continue
        lo = {x for x in members if x & w == x}
        hi = {x for x in members if x & w == w}
        if len(lo) > k - 1 or len(hi) > l - 1:
            continue
        if any(len(below[x]) >= k - 1 for x in hi) or any(len(above[x]) >= l - 1 for x in lo):
            continue
        members.add(w)
        below[w], above[w] = lo, hi
        for x in hi:
            below[x].add(w)
        for x in lo:
            above[x].add(w)
    return Family.from_sets(n, members)


def planted_s_family(n: int, seed, components: int = 2, proposals: int = 40) -> Family:
    """{wedge_4, vee_4}-free family seeded with S components, then grown at random."""
    rng = random.Random(seed)
    half = n // 2
    base = []
    for _ in range(components):
        centre = sum(1 << i for i in rng.sample(range(n), half))
        inside = [i for i in range(n) if centre >> i & 1]
        outside = [i for i in range(n) if not centre >> i & 1]
        if len(inside) < 2 or len(outside) < 2:
            break
        x, y = rng.sample(inside, 2)
        u, v = rng.sample(outside, 2)
        comp = [centre, centre & ~(1 << x), centre & ~(1 << y), centre | 1 << u, centre | 1 << v]
        trial = Family.from_sets(n, base + comp)
        dg = build_digraph(trial)
        if max(dg.outdeg) <= 3 and max(dg.indeg) <= 3 and len(trial) == len(base) + 5:
            base.extend(comp)
    return random_free_family(n, 4, 4, rng.random(), proposals, base=base)
