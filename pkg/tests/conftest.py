"""Shared fixtures and independent oracles for the test suite.

Oracles here are deliberately written against different primitives than the
library paths they check (cofactor expansion vs LU, BFS cycle counting vs
the ball-excess walk, Gram eigenvalues vs direct SVD).
"""

import numpy as np
import pytest

from bireg import graphgen as gg


@pytest.fixture
def k23():
    return gg.complete_bipartite(2, 3)


def det_cofactor(M):
    """Brute-force determinant by first-row cofactor expansion."""
    M = np.asarray(M)
    n = M.shape[0]
    if n == 1:
        return complex(M[0, 0])
    total = 0.0 + 0.0j
    for j in range(n):
        minor = np.delete(np.delete(M, 0, axis=0), j, axis=1)
        total += ((-1) ** j) * M[0, j] * det_cofactor(minor)
    return total


def ball_vertices_bfs(adj, v, ell):
    """Vertex set at distance <= ell, by plain level-by-level BFS."""
    frontier = {v}
    seen = {v}
    for _ in range(ell):
        nxt = set()
        for u in frontier:
            for w in adj[u]:
                if w not in seen:
                    nxt.add(w)
        seen |= nxt
        frontier = nxt
    return seen


def cycle_space_dim(vertices, edges):
    """|E| - |V| + #components via union-find (no connectivity assumption)."""
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = len(parent)
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return len(edges) - len(vertices) + comps


def oracle_tangle_free(g, ell):
    """Independent tangle checker: every ball's cycle space has dim <= 1."""
    adj = g.neighbor_lists()
    worst = -(10 ** 9)
    for v in range(g.n + g.m):
        verts = ball_vertices_bfs(adj, v, ell)
        edges = [
            (l, g.n + r) for l, r in g.edges if l in verts and (g.n + r) in verts
        ]
        worst = max(worst, cycle_space_dim(verts, edges))
    return worst <= 1, worst


SMALL_PARAM_GRID = [
    (2, 3, 3, 2),
    (3, 2, 2, 3),
    (4, 6, 3, 2),
    (6, 4, 2, 3),
    (5, 5, 2, 2),
    (6, 9, 3, 2),
    (8, 12, 3, 2),
    (9, 6, 2, 3),
    (10, 15, 3, 2),
    (12, 8, 2, 3),
]
