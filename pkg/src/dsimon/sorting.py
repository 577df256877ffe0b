"""Batcher odd-even merge sorting network.

This is the comparator network used for the sorting step of the circuit.
It has O(t^2) depth on 2^t wires (not the O(t) of depth-optimal
constructions), which is immaterial at the sizes simulated here; the depth
is reported so it stays visible.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .gf2 import BitString


@lru_cache(maxsize=None)
def batcher_comparators(size: int) -> tuple[tuple[int, int], ...]:
    """Comparator list ``(i, j)``, ``i < j``, for ``size`` wires (a power of two).

    After the network, wire i holds the i-th smallest input.
    """
    if size < 1 or size & (size - 1):
        raise ValueError(f"network size {size} is not a power of two")
    out = []
    p = 1
    while p < size:
        k = p
        while k >= 1:
            for j in range(k % p, size - k, 2 * k):
                for i in range(min(k, size - j - k)):
                    if (i + j) // (2 * p) == (i + j + k) // (2 * p):
                        out.append((i + j, i + j + k))
            k //= 2
        p *= 2
    return tuple(out)


def network_depth(comparators: Sequence[tuple[int, int]]) -> int:
    """Number of parallel layers when each comparator runs as early as possible."""
    ready: dict[int, int] = {}
    depth = 0
    for a, b in comparators:
        layer = max(ready.get(a, 0), ready.get(b, 0)) + 1
        ready[a] = ready[b] = layer
        depth = max(depth, layer)
    return depth


class NetworkSort(NamedTuple):
    value: BitString
    comparators: int
    depth: int


def sort_network(values: Sequence[BitString]) -> NetworkSort:
    """Sort through the comparator network and concatenate the wires."""
    size = len(values)
    comps = batcher_comparators(size)
    wires = list(values)
    width = wires[0].length
    for w in wires:
        if w.length != width:
            raise ValueError("all inputs must have the same width")
    for a, b in comps:
        # ties pass through untouched
        if wires[b] < wires[a]:
            wires[a], wires[b] = wires[b], wires[a]
    out = BitString(0)
    for w in wires:
        out = out + w
    return NetworkSort(out, len(comps), network_depth(comps))


def sort_arrays(columns: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Run the network elementwise over equal-length arrays (one per wire)."""
    wires = list(columns)
    for a, b in batcher_comparators(len(wires)):
        lo = np.minimum(wires[a], wires[b])
        hi = np.maximum(wires[a], wires[b])
        wires[a], wires[b] = lo, hi
    return wires
