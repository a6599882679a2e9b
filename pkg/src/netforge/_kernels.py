"""Compiled inner loops over the dense graph arrays.

Every kernel takes the raw arrays owned by :class:`netforge.graph.Graph`:
``adj`` (N x N bool), ``nbr`` (N x cap int32 neighbor table) and ``deg``
(N int64). Neighbor order inside a row is arbitrary.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def reaches(nbr, deg, src, dst):
    if src == dst:
        return True
    n = deg.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    queue[0] = src
    seen[src] = True
    head, tail = 0, 1
    while head < tail:
        x = queue[head]
        head += 1
        for j in range(deg[x]):
            y = nbr[x, j]
            if not seen[y]:
                if y == dst:
                    return True
                seen[y] = True
                queue[tail] = y
                tail += 1
    return False


@njit(cache=True)
def reachable_count(nbr, deg, src):
    n = deg.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    queue[0] = src
    seen[src] = True
    head, tail = 0, 1
    while head < tail:
        x = queue[head]
        head += 1
        for j in range(deg[x]):
            y = nbr[x, j]
            if not seen[y]:
                seen[y] = True
                queue[tail] = y
                tail += 1
    return tail


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def distance_sum(nbr, deg):
    """Sum of BFS distances over unordered pairs; -1 when disconnected.

    All N searches run at once: bit ``s`` of ``seen[x]`` records whether the
    search from source ``s`` has reached ``x``, so one level costs
    O(E * N / 64) word operations.
    """
    n = deg.shape[0]
    words = (n + 63) // 64
    seen = np.zeros((n, words), dtype=np.uint64)
    frontier = np.zeros((n, words), dtype=np.uint64)
    nxt = np.zeros((n, words), dtype=np.uint64)
    for s in range(n):
        bit = np.uint64(1) << np.uint64(s % 64)
        seen[s, s // 64] = bit
        frontier[s, s // 64] = bit
    reached = n
    total = 0
    level = 0
    active = True
    while active:
        level += 1
        active = False
        for x in range(n):
            for w in range(words):
                acc = np.uint64(0)
                for j in range(deg[x]):
                    acc |= frontier[nbr[x, j], w]
                new = acc & ~seen[x, w]
                nxt[x, w] = new
                if new:
                    seen[x, w] |= new
                    c = _popcount(new)
                    reached += c
                    total += level * c
                    active = True
        frontier, nxt = nxt, frontier
    if reached < n * n:
        return -1
    return total // 2


@njit(cache=True)
def local_clustering(adj, nbr, deg, nodes):
    out = np.zeros(nodes.shape[0], dtype=np.float64)
    for idx in range(nodes.shape[0]):
        i = nodes[idx]
        d = deg[i]
        if d < 2:
            continue
        links = 0
        for x in range(d):
            a = nbr[i, x]
            for y in range(x + 1, d):
                if adj[a, nbr[i, y]]:
                    links += 1
        out[idx] = links / ((d * (d - 1)) // 2)
    return out


@njit(cache=True)
def common_neighbors(adj, nbr, deg, u, v):
    if deg[u] > deg[v]:
        u, v = v, u
    out = np.empty(deg[u], dtype=np.int64)
    m = 0
    for j in range(deg[u]):
        w = nbr[u, j]
        if adj[v, w]:
            out[m] = w
            m += 1
    return out[:m]


@njit(cache=True)
def drop_neighbor(nbr, deg, u, v):
    d = deg[u]
    for j in range(d):
        if nbr[u, j] == v:
            nbr[u, j] = nbr[u, d - 1]
            deg[u] = d - 1
            return True
    return False


@njit(cache=True)
def rewire(adj, nbr, deg, u, v, a, b):
    """Delete edge u-v and insert a-b; caller guarantees capacity."""
    adj[u, v] = False
    adj[v, u] = False
    drop_neighbor(nbr, deg, u, v)
    drop_neighbor(nbr, deg, v, u)
    adj[a, b] = True
    adj[b, a] = True
    nbr[a, deg[a]] = b
    deg[a] += 1
    nbr[b, deg[b]] = a
    deg[b] += 1
