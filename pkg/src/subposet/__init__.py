"""Forbidden subposet problems on the Boolean lattice at desk scale."""

from .core_family import (
    ComparabilityDigraph,
    Family,
    antichain_partition,
    build_digraph,
    count_fan_copies,
    count_k_chains,
    dump_family,
    load_family,
)
from .posets import Poset, count_copies, height, is_free, make_poset

__version__ = "0.1.0"

__all__ = [
    "ComparabilityDigraph",
    "Family",
    "Poset",
    "antichain_partition",
    "build_digraph",
    "count_copies",
    "count_fan_copies",
    "count_k_chains",
    "dump_family",
    "height",
    "is_free",
    "load_family",
    "make_poset",
]
