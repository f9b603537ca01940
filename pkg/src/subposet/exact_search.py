"""Exact La(n, forbidden, target) by branch and bound over 2^[n].

Candidate sets are taken in canonical order and each node branches on
including or excluding the next candidate. Candidates that already clash
with the included sets are dropped for good (freeness is monotone), and a
node is cut when the target count of "included + surviving candidates",
an admissible bound because copy counts only grow with the family, cannot
beat the incumbent.

The search splits at the root by the first included set. Each root branch
is solved independently from the same greedy incumbent, so value, witness
and node count do not depend on how many workers run the branches.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Optional

from .core_family import Family, set_key
from .errors import ParameterError
from .posets import DEFAULT_BUDGET, Poset, copy_through, count_in_universe, shape

logger = logging.getLogger(__name__)

MAX_SEARCH_N = 6


@dataclass(frozen=True)
class SearchProblem:
    """``budget`` is a node limit per root branch; ``symmetry=None`` turns
    orbit reduction on for n >= 5."""

    n: int
    forbidden: tuple
    target: Poset
    budget: int = 10**7
    workers: int = 1
    symmetry: Optional[bool] = None

    def __post_init__(self):
        object.__setattr__(self, "forbidden", tuple(self.forbidden))
        if not 1 <= self.n <= MAX_SEARCH_N:
            raise ParameterError(f"exact search supports 1 <= n <= {MAX_SEARCH_N}, got n={self.n}")
        if self.budget < 1 or self.workers < 1:
            raise ParameterError("budget and workers must be positive")

    @property
    def use_symmetry(self) -> bool:
        return self.n >= 5 if self.symmetry is None else self.symmetry


@dataclass(frozen=True)
class SearchResult:
    value: int
    witness: Family
    nodes_explored: int
    exhausted: bool


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Universe:
    """All subsets of [n] in canonical order with strict up/down masks."""

    def __init__(self, n):
        self.n = n
        self.words = sorted(range(1 << n), key=set_key)
        size = len(self.words)
        self.down = [0] * size
        self.up = [0] * size
        for i, a in enumerate(self.words):
            for j, b in enumerate(self.words):
                if i != j and a & b == b:
                    self.down[i] |= 1 << j
                    self.up[j] |= 1 << i

    def longest_chain(self, mask):
        rank = {}
        best = 0
        for v in _bits(mask):
            r = 1 + max((rank[u] for u in _bits(self.down[v] & mask)), default=0)
            rank[v] = r
            best = max(best, r)
        return best

    def chain_count(self, mask, k):
        ending = {v: 1 for v in _bits(mask)}
        for _ in range(k - 1):
            ending = {v: sum(ending[u] for u in _bits(self.down[v] & mask)) for v in ending}
        return sum(ending.values())


def _make_compatible(uni, p, budget):
    """Return f(members, v): adding v to the p-free ``members`` keeps it p-free."""
    sh = shape(p)
    if sh is None:
        return lambda members, v: not copy_through(p, uni.up, uni.down, members | 1 << v, v, budget)
    kind, r = sh
    if kind == "chain":
        def ok(members, v):
            lo = uni.longest_chain(members & uni.down[v])
            hi = uni.longest_chain(members & uni.up[v])
            return lo + 1 + hi <= r - 1
    elif kind == "wedge":
        def ok(members, v):
            if (uni.down[v] & members).bit_count() > r - 1:
                return False
            return all((uni.down[u] & members).bit_count() <= r - 2 for u in _bits(uni.up[v] & members))
    elif kind == "vee":
        def ok(members, v):
            if (uni.up[v] & members).bit_count() > r - 1:
                return False
            return all((uni.up[u] & members).bit_count() <= r - 2 for u in _bits(uni.down[v] & members))
    else:
        def ok(members, v):
            return members.bit_count() + 1 <= r - 1
    return ok


def _make_counter(uni, p, budget):
    sh = shape(p)
    if sh is None:
        return lambda mask: count_in_universe(p, uni.up, uni.down, mask, budget)
    kind, r = sh
    if kind == "chain":
        return lambda mask: uni.chain_count(mask, r)
    if kind == "wedge":
        return lambda mask: sum(comb((uni.down[v] & mask).bit_count(), r) for v in _bits(mask))
    if kind == "vee":
        return lambda mask: sum(comb((uni.up[v] & mask).bit_count(), r) for v in _bits(mask))
    return lambda mask: comb(mask.bit_count(), r)


class _Exhausted(Exception):
    pass


class _Solver:
    def __init__(self, problem):
        self.problem = problem
        self.uni = _Universe(problem.n)
        self.checks = [_make_compatible(self.uni, p, DEFAULT_BUDGET) for p in problem.forbidden]
        self.count = _make_counter(self.uni, problem.target, DEFAULT_BUDGET)
        self.nodes = 0

    def compatible(self, members, v):
        return all(ok(members, v) for ok in self.checks)

    def greedy(self):
        members = 0
        for v in range(len(self.uni.words)):
            if self.compatible(members, v):
                members |= 1 << v
        return self.count(members), tuple(_bits(members))

    def root_branches(self):
        """First-included candidate indices; None stands for the empty family."""
        if self.problem.use_symmetry:
            # {1..j} has the least value among j-sets, so any family can be
            # permuted to start with it
            reps = {}
            for i, w in enumerate(self.uni.words):
                reps.setdefault(w.bit_count(), i)
            firsts = sorted(reps.values())
        else:
            firsts = list(range(len(self.uni.words)))
        return [None] + firsts

    def solve_branch(self, first, best):
        """Best (value, enc) within the branch, starting from incumbent ``best``."""
        self.nodes = 0
        self.best = best
        self.exhausted = True
        if first is None:
            self.nodes = 1
            self._offer(self.count(0), ())
            return self.best, self.nodes, True
        if not self.compatible(0, first):
            self.nodes = 1
            return self.best, self.nodes, True
        members = 1 << first
        rest = [v for v in range(first + 1, len(self.uni.words)) if self.compatible(members, v)]
        try:
            self._dfs(members, rest)
        except _Exhausted:
            self.exhausted = False
        return self.best, self.nodes, self.exhausted

    def _offer(self, value, enc):
        bv, be = self.best
        if value > bv or (value == bv and enc < be):
            self.best = (value, enc)

    def _dfs(self, members, rest):
        self.nodes += 1
        if self.nodes > self.problem.budget:
            raise _Exhausted
        mask = members
        for v in rest:
            mask |= 1 << v
        bound = self.count(mask)
        bv, be = self.best
        if bound < bv:
            return
        enc = tuple(_bits(members))
        if bound == bv and be <= enc:
            return
        if not rest:
            self._offer(bound, enc)
            return
        v, tail = rest[0], rest[1:]
        grown = members | 1 << v
        self._dfs(grown, [u for u in tail if self.compatible(grown, u)])
        self._dfs(members, tail)

    def witness(self, enc):
        return Family.from_sets(self.problem.n, (self.uni.words[i] for i in enc))


def _run_branch(args):
    problem, first, best = args
    solver = _Solver(problem)
    return solver.solve_branch(first, best)


def la_exact(problem: SearchProblem) -> SearchResult:
    """Maximum target count over forbidden-free families in 2^[n].

    When ``exhausted`` is False some branch ran out of budget and the value
    is only a lower bound attained by the witness.
    """
    solver = _Solver(problem)
    incumbent = solver.greedy()
    branches = solver.root_branches()
    jobs = [(problem, first, incumbent) for first in branches]
    if problem.workers > 1:
        with ProcessPoolExecutor(max_workers=problem.workers) as pool:
            results = list(pool.map(_run_branch, jobs))
    else:
        results = [solver.solve_branch(first, incumbent) for _, first, _ in jobs]
    candidates = [incumbent] + [r[0] for r in results]
    value, enc = min(candidates, key=lambda c: (-c[0], c[1]))
    nodes = sum(r[1] for r in results)
    exhausted = all(r[2] for r in results)
    logger.debug("la_exact n=%d value=%d nodes=%d", problem.n, value, nodes)
    return SearchResult(value, solver.witness(enc), nodes, exhausted)

