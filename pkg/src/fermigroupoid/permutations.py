"""Permutation helpers with exact integer parity.

Permutations are 0-based tuples ``s`` with ``s[k]`` the image of ``k``.
"""

from __future__ import annotations

from itertools import permutations as _itertools_permutations
from typing import Iterator, Sequence


def inversion_count(seq: Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``seq[i] > seq[j]`` (merge sort, O(n log n))."""
    items = list(seq)
    if len(items) < 2:
        return 0
    count = 0
    width = 1
    buf = items[:]
    n = len(items)
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if items[i] <= items[j]:
                    buf[k] = items[i]
                    i += 1
                else:
                    buf[k] = items[j]
                    count += mid - i
                    j += 1
                k += 1
            buf[k:hi] = items[i:mid] + items[j:hi]
        items, buf = buf, items
        width *= 2
    return count


def parity(seq: Sequence[int]) -> int:
    return inversion_count(seq) & 1


def sign(seq: Sequence[int]) -> int:
    """Sign of the ordering ``seq`` relative to ascending order."""
    return -1 if inversion_count(seq) & 1 else 1


def relative_sign(order_a: Sequence[int], order_b: Sequence[int]) -> int:
    """Sign of ``a^{-1} o b`` for two orderings of the same finite set.

    Returns 0 when the underlying sets differ.
    """
    if len(order_a) != len(order_b) or set(order_a) != set(order_b):
        return 0
    return sign(order_a) * sign(order_b)


def identity(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def compose(s1: Sequence[int], s2: Sequence[int]) -> tuple[int, ...]:
    """``(s1 o s2)(k) = s1[s2[k]]``."""
    if len(s1) != len(s2):
        raise ValueError("arity mismatch")
    return tuple(s1[k] for k in s2)


def inverse(s: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(s)
    for k, v in enumerate(s):
        out[v] = k
    return tuple(out)


def is_permutation(s: Sequence[int]) -> bool:
    return sorted(s) == list(range(len(s)))


def all_permutations(n: int) -> Iterator[tuple[int, ...]]:
    return _itertools_permutations(range(n))


def relabel(order: Sequence[int], s: Sequence[int]) -> tuple[int, ...]:
    """Deck action on an ordering: ``order o s^{-1}``."""
    if len(order) != len(s):
        raise ValueError("arity mismatch")
    s_inv = inverse(s)
    return tuple(order[s_inv[k]] for k in range(len(order)))
