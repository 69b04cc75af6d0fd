"""Maximum cardinality bipartite matching (Hopcroft-Karp).

Left vertices are arbitrary hashables, right vertices likewise.  Iteration
follows the order of the input lists so results are reproducible.
"""
from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Mapping, Sequence

_INF = float("inf")


def hopcroft_karp(
    adjacency: Mapping[Hashable, Sequence[Hashable]],
    left: Iterable[Hashable] | None = None,
) -> dict:
    """Return a maximum matching as a ``{left: right}`` dict.

    ``left`` restricts the left side to a subset of ``adjacency``'s keys and
    fixes the scan order; by default all keys in insertion order are used.
    """
    lefts = list(adjacency) if left is None else list(left)
    pair_left: dict = {}
    pair_right: dict = {}
    dist: dict = {}

    def bfs() -> bool:
        queue = deque()
        for u in lefts:
            if u in pair_left:
                dist[u] = _INF
            else:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                w = pair_right.get(v)
                if w is None:
                    found = True
                elif dist.get(w, _INF) == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u) -> bool:
        for v in adjacency[u]:
            w = pair_right.get(v)
            if w is None or (dist.get(w) == dist[u] + 1 and dfs(w)):
                pair_left[u] = v
                pair_right[v] = u
                return True
        dist[u] = _INF
        return False

    while bfs():
        for u in lefts:
            if u not in pair_left:
                dfs(u)
    return pair_left


def matching_size(adjacency: Mapping[Hashable, Sequence[Hashable]], left=None) -> int:
    return len(hopcroft_karp(adjacency, left))


def saturates(adjacency: Mapping[Hashable, Sequence[Hashable]], left: Iterable[Hashable]) -> bool:
    """True iff a matching covering every vertex in ``left`` exists."""
    left = list(left)
    if any(not adjacency[u] for u in left):
        return False
    return len(hopcroft_karp(adjacency, left)) == len(left)
