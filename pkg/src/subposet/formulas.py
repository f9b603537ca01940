"""Closed-form counts and constants, all exact (ints and Fractions)."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from .errors import ParameterError


def chain_count_levels(n: int, sizes: Sequence[int]) -> int:
    """Chains F_k < ... < F_1 in 2^[n] with |F_i| = sizes[i-1].

    ``sizes`` must be strictly decreasing; the count is the product of
    C(l_{i-1}, l_i) with l_0 = n.
    """
    sizes = list(sizes)
    if not sizes:
        raise ParameterError("need at least one level size")
    prev = n
    total = 1
    for i, s in enumerate(sizes):
        if i == 0 and not 0 <= s <= n:
            raise ParameterError(f"level size {s} outside 0..{n}")
        if i > 0 and not 0 <= s < prev:
            raise ParameterError(f"level sizes must be strictly decreasing: {sizes}")
        total *= comb(prev, s)
        prev = s
    return total


def erdos_bound(n: int, k: int) -> int:
    """Sum of the k largest binomial coefficients C(n, .)."""
    if not 1 <= k <= n + 1:
        raise ParameterError(f"need 1 <= k <= n+1, got n={n}, k={k}")
    base = (n - k) // 2
    return sum(comb(n, base + i) for i in range(1, k + 1))


def level_gaps(n: int, sizes: Sequence[int]) -> list:
    """Gaps i_1, i_2 - i_1, ..., n - i_last of an increasing size list."""
    pts = [0] + list(sizes) + [n]
    return [b - a for a, b in zip(pts, pts[1:])]


def gaps_balanced(gaps) -> bool:
    return max(gaps) - min(gaps) <= 1


def balanced_levels(n: int, k: int) -> list:
    """k-1 increasing level sizes whose k gaps differ by at most one.

    Every balanced arrangement has the same multinomial chain count, so the
    maximizer is the lexicographically smallest one: short gaps first, except
    that two zero gaps have to go at both ends to keep sizes distinct.
    """
    if not 1 <= k - 1 <= n + 1:
        raise ParameterError(f"need 1 <= k-1 <= n+1, got n={n}, k={k}")
    q, r = divmod(n, k)
    gaps = [q] * (k - r) + [q + 1] * r
    if q == 0 and k - r == 2:
        gaps = [0] + [1] * (k - 2) + [0]
    sizes = []
    acc = 0
    for g in gaps[:-1]:
        acc += g
        sizes.append(acc)
    return sizes


def _chains_in_levels(n, levels, l):
    # l-chains inside the union of full levels: sum over l-subsets of levels
    total = 0
    for sub in combinations(levels, l):
        total += chain_count_levels(n, sorted(sub, reverse=True))
    return total


def la_chainfree(n: int, k: int, l: int):
    """Max number of l-chains in a union of k-1 full levels of 2^[n].

    Exhaustive over all level subsets in lexicographic order, so the
    returned argmax is the lexicographically smallest maximizer.
    Returns ``(value, levels)``.
    """
    if not 1 <= l < k:
        raise ParameterError(f"need 1 <= l < k, got k={k}, l={l}")
    if not k - 1 <= n + 1:
        raise ParameterError(f"need k-1 <= n+1, got n={n}, k={k}")
    best = -1
    arg = None
    for levels in combinations(range(n + 1), k - 1):
        v = _chains_in_levels(n, levels, l)
        if v > best:
            best, arg = v, list(levels)
    return best, arg


@dataclass(frozen=True)
class ConstantReport:
    value: Fraction
    p1: Fraction
    p2: Fraction
    limit: Fraction  # p1 / (1 - p2)


def block_probabilities(k: int, l: int):
    """p1 and p2 of the block construction with blocks of size k+l-3."""
    if k < 2 or l < 2:
        raise ParameterError(f"need k, l >= 2, got k={k}, l={l}")
    w = k + l - 3
    full = 2**w
    p1 = Fraction(comb(w, k - 1), full)
    p2 = Fraction(full - comb(w, k - 1) - comb(w, k - 2), full)
    return p1, p2


def conjecture_constant(k: int, l: int, s: int) -> ConstantReport:
    """C(k-1, s) * (l-1)/(k+l-2), with the block probabilities it comes from."""
    if not 1 <= s <= k - 1:
        raise ParameterError(f"need 1 <= s <= k-1, got k={k}, s={s}")
    p1, p2 = block_probabilities(k, l)
    ratio = Fraction(l - 1, k + l - 2)
    limit = p1 / (1 - p2)
    if limit != ratio:
        raise ArithmeticError(f"p1/(1-p2) = {limit} differs from {ratio} at k={k}, l={l}")
    return ConstantReport(comb(k - 1, s) * ratio, p1, p2, limit)
