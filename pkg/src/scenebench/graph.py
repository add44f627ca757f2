"""Per-axis ring detection for relation graphs via Kahn's algorithm.

Horizontal relations (left/right) and vertical relations (above/below) are
checked independently: each axis's relations are normalized to one direction
and the induced digraph must be acyclic. "No ring" corresponds to the
topological sort visiting all nodes.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, List, Tuple

# Normalized edge direction per axis: an edge u -> v means u precedes v
# (u is further left, or further up, than v).
_AXIS_FORWARD = {"horizontal": "left", "vertical": "above"}
_AXIS_BACKWARD = {"horizontal": "right", "vertical": "below"}


def axis_edges(instances, relations, axis: str) -> List[Tuple[int, int]]:
    """Directed edges (subject-precedes-object normalized) for one axis."""
    forward = _AXIS_FORWARD[axis]
    backward = _AXIS_BACKWARD[axis]
    index = {inst.ref: i for i, inst in enumerate(instances)}
    edges = []
    for rel in relations:
        if rel.kind == forward:
            edges.append((index[rel.subject], index[rel.object]))
        elif rel.kind == backward:
            edges.append((index[rel.object], index[rel.subject]))
    return edges


def edges_are_acyclic(n: int, edges: Iterable[Tuple[int, int]]) -> bool:
    """Kahn's algorithm; acyclic iff every node gets sorted."""
    indegree = [0] * n
    adjacency: List[List[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adjacency[u].append(v)
        indegree[v] += 1
    queue = deque(i for i in range(n) if indegree[i] == 0)
    sorted_count = 0
    while queue:
        u = queue.popleft()
        sorted_count += 1
        for v in adjacency[u]:
            indegree[v] -= 1
            if indegree[v] == 0:
                queue.append(v)
    return sorted_count == n


def axis_is_acyclic(instances, relations, axis: str) -> bool:
    return edges_are_acyclic(len(instances), axis_edges(instances, relations, axis))
