"""Explicit families: the block construction and its relatives."""

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Sequence

from .core_family import Family, word_from_elements
from .errors import CapExceeded, ParameterError
from .formulas import balanced_levels

DEFAULT_CAP = 2_000_000


@dataclass(frozen=True)
class KnlParams:
    """Parameters of the block construction.

    [n] is cut into m = n // w consecutive blocks of width w = k+l-3 plus a
    remainder block that carries no constraint.
    """

    n: int
    k: int
    l: int

    def __post_init__(self):
        if self.k < 2 or self.l < 2:
            raise ParameterError(f"need k, l >= 2, got k={self.k}, l={self.l}")
        if self.n < self.width:
            raise ParameterError(f"need n >= k+l-3 = {self.width}, got n={self.n}")
        if self.n > 64:
            raise ParameterError("n is capped at 64")

    @property
    def width(self) -> int:
        return self.k + self.l - 3

    @property
    def m(self) -> int:
        return self.n // self.width

    def block_mask(self, j: int) -> int:
        """Word of block j (1-based), the interval [(j-1)w+1, jw]."""
        w = self.width
        return ((1 << w) - 1) << ((j - 1) * w)

    def block_index(self, word: int):
        """(j, |F cap A_j|) for the first block hit with size k-2 or k-1, else None."""
        bad = (self.k - 2, self.k - 1)
        for j in range(1, self.m + 1):
            t = (word & self.block_mask(j)).bit_count()
            if t in bad:
                return j, t
        return None


def knl_member(p: KnlParams, word: int) -> str:
    """'+' for the upper level, '-' for the lower level, '' if not a member."""
    half = p.n // 2
    size = word.bit_count()
    if size not in (half, half + 1):
        return ""
    hit = p.block_index(word)
    if hit is None:
        return ""
    _, t = hit
    if size == half + 1 and t == p.k - 1:
        return "+"
    if size == half and t == p.k - 2:
        return "-"
    return ""


def _level_size_exact(p: KnlParams, upper: bool) -> int:
    w = p.width
    half = p.n // 2
    target_size = half + 1 if upper else half
    designated = p.k - 1 if upper else p.k - 2
    # polynomial in |H| for the blocks before j: sizes other than k-2, k-1
    free_block = [comb(w, t) if t not in (p.k - 2, p.k - 1) else 0 for t in range(w + 1)]
    prefix = [1]
    total = 0
    for j in range(1, p.m + 1):
        rest = p.n - j * w
        for h, ways in enumerate(prefix):
            if ways == 0:
                continue
            size_h = h + designated
            need = target_size - size_h
            if 0 <= need <= rest:
                total += ways * comb(w, designated) * comb(rest, need)
        prefix = _poly_mul(prefix, free_block)
    return total


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def knl_plus_size_exact(p: KnlParams) -> int:
    """Exact size of the upper level without materializing it.

    Sum over the designated block j of (number of admissible intersection
    patterns H on blocks 1..j with a given |H|) times
    C(n - j*w, n//2 + 1 - |H|); the pattern counts come from a polynomial
    product over the blocks.
    """
    return _level_size_exact(p, upper=True)


def knl_minus_size_exact(p: KnlParams) -> int:
    return _level_size_exact(p, upper=False)


def knl_construction(p: KnlParams, cap: int = DEFAULT_CAP) -> Family:
    """Materialize the block construction (both levels).

    Raises :class:`CapExceeded` before enumerating if the exact size is
    above ``cap``.
    """
    size = knl_plus_size_exact(p) + knl_minus_size_exact(p)
    if size > cap:
        raise CapExceeded(f"construction has {size} sets, above cap {cap}")
    half = p.n // 2
    bits = [1 << i for i in range(p.n)]
    words = []
    for s in (half, half + 1):
        if s > p.n:
            continue
        for combo in combinations(bits, s):
            word = sum(combo)
            if knl_member(p, word):
                words.append(word)
    return Family.from_sets(p.n, words)


def knl_upper_level(fam: Family) -> list:
    half = fam.n // 2
    return [s for s in fam.sets if s.bit_count() == half + 1]


def katona_tarjan_family(n: int) -> Family:
    """Middle level of [n-1] together with each of its sets plus n."""
    if n < 2:
        raise ParameterError("need n >= 2")
    h = (n - 1) // 2
    top = 1 << (n - 1)
    base = [sum(c) for c in combinations([1 << i for i in range(n - 1)], h)]
    return Family.from_sets(n, base + [b | top for b in base])


def level_family(n: int, sizes: Sequence[int]) -> Family:
    """Union of the full levels of 2^[n] with the given cardinalities."""
    sizes = list(sizes)
    if any(a >= b for a, b in zip(sizes, sizes[1:])) or any(not 0 <= s <= n for s in sizes):
        raise ParameterError(f"sizes must be strictly increasing within 0..{n}: {sizes}")
    bits = [1 << i for i in range(n)]
    words = []
    for s in sizes:
        words.extend(sum(c) for c in combinations(bits, s))
    return Family.from_sets(n, words)


def danialt_construction(n: int, k: int, l: int) -> Family:
    """Balanced (l-1)-level family on [n - r], r = k-l+1, with each top set G
    extended by the chain G + {n-r+1}, G + {n-r+1, n-r+2}, ..., G + {n-r+1..n}.

    Every (l-1)-chain of the level part extends to exactly one k-chain, and
    no added set contains two top-level sets.
    """
    if not 2 <= l <= k:
        raise ParameterError(f"need 2 <= l <= k, got k={k}, l={l}")
    r = k - l + 1
    if n <= r + l:
        raise ParameterError(f"need n > (k-l+1) + l = {r + l}, got n={n}")
    base_n = n - r
    sizes = balanced_levels(base_n, l)
    base = level_family(base_n, sizes)
    top = max(sizes)
    tails = []
    for G in base.sets:
        if G.bit_count() != top:
            continue
        for j in range(1, r + 1):
            tails.append(G | word_from_elements(range(base_n + 1, base_n + j + 1)))
    return Family.from_sets(n, list(base.sets) + tails)


def greedy_code(n: int, weight: int, min_distance: int) -> list:
    """Scan weight-``weight`` words in canonical order, keeping each one whose
    symmetric difference with every kept word is at least ``min_distance``."""
    kept = []
    for combo in combinations([1 << i for i in range(n)], weight):
        w = sum(combo)
        if all((w ^ c).bit_count() >= min_distance for c in kept):
            kept.append(w)
    return kept


def code_family_k22(n: int, i: int) -> Family:
    """Middle level plus a greedy constant-weight code at level n//2 + i.

    Two code words at distance >= 2i meet in at most n//2 elements, so no two
    of them share two middle-level subsets and the family is K_{2,2}-free.
    """
    if i < 1:
        raise ParameterError("need i >= 1")
    if n < 2 * i + 2:
        raise ParameterError(f"need n >= 2i+2 = {2 * i + 2}, got n={n}")
    half = n // 2
    middle = [sum(c) for c in combinations([1 << b for b in range(n)], half)]
    code = greedy_code(n, half + i, 2 * i)
    return Family.from_sets(n, middle + code)


def smallest_prime_power_at_least(x: int) -> int:
    q = max(x, 2)
    while True:
        if _is_prime_power(q):
            return q
        q += 1


def _is_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            while q % p == 0:
                q //= p
            return q == 1
    return False


def graham_sloane_bound(n: int, distance: int, weight: int):
    """Lower bound C(n, weight) / q^(delta-1), q the least prime power >= n."""
    from fractions import Fraction

    delta = distance // 2
    q = smallest_prime_power_at_least(n)
    return Fraction(comb(n, weight), q ** (delta - 1))
