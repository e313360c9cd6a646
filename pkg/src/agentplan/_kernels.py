"""Hot loops: all-pairs Dijkstra, Held-Karp closed tours, nearest-neighbour + 2-opt.

Every kernel exists twice. The ``*_nb`` versions are explicit loops compiled
with numba; the ``*_np`` versions are vectorized numpy. Both produce identical
results (including tie-breaks), which the test-suite checks. The public names
at the bottom pick one according to :data:`agentplan._accel.USE_NUMBA`.

Tour kernels take a square closure matrix ``C`` whose row/column 0 is the home
node and 1..m are the targets, and return ``(order, length)`` where ``order``
holds target positions 1..m.
"""

import numpy as np

from agentplan._accel import USE_NUMBA, njit

TIE_RTOL = 1e-9


# ---------------------------------------------------------------- dijkstra

def _dijkstra_loop(W, source, dist, parent):
    n = W.shape[0]
    done = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        dist[i] = np.inf
        parent[i] = -1
    dist[source] = 0.0
    for _ in range(n):
        u = -1
        best = np.inf
        for i in range(n):
            if not done[i] and dist[i] < best:
                best = dist[i]
                u = i
        if u < 0:
            break
        done[u] = True
        for v in range(n):
            w = W[u, v]
            if done[v] or v == u or w == np.inf:
                continue
            nd = dist[u] + w
            if nd < dist[v] or (nd == dist[v] and u < parent[v]):
                dist[v] = nd
                parent[v] = u


def _all_pairs_loop(W):
    n = W.shape[0]
    D = np.empty((n, n))
    P = np.empty((n, n), dtype=np.int64)
    for s in range(n):
        _dijkstra_loop(W, s, D[s], P[s])
    return D, P


_dijkstra_nb = njit(_dijkstra_loop)


@njit
def _all_pairs_nb(W):
    n = W.shape[0]
    D = np.empty((n, n))
    P = np.empty((n, n), dtype=np.int64)
    for s in range(n):
        _dijkstra_nb(W, s, D[s], P[s])
    return D, P


def _dijkstra_np(W, source):
    n = W.shape[0]
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    idx = np.arange(n)
    for _ in range(n):
        pending = np.where(done, np.inf, dist)
        u = int(np.argmin(pending))
        if pending[u] == np.inf:
            break
        done[u] = True
        cand = dist[u] + W[u]
        better = (cand < dist) | ((cand == dist) & (u < parent))
        better &= ~done & (idx != u) & np.isfinite(W[u])
        dist[better] = cand[better]
        parent[better] = u
    return dist, parent


def _all_pairs_np(W):
    n = W.shape[0]
    D = np.empty((n, n))
    P = np.empty((n, n), dtype=np.int64)
    for s in range(n):
        D[s], P[s] = _dijkstra_np(W, s)
    return D, P


# -------------------------------------------------------------- held-karp

def _hk_reconstruct(C, f):
    # Greedy walk through the DP table: smallest target index that still
    # completes an optimal tour, giving the lexicographically smallest order.
    m = C.shape[0] - 1
    best = np.inf
    for j in range(m):
        c = C[0, j + 1] + f[1 << j, j]
        if c < best:
            best = c
    tol = TIE_RTOL * max(1.0, abs(best))
    order = np.empty(m, dtype=np.int64)
    mask = 0
    cur = 0
    target = best
    for k in range(m):
        for j in range(m):
            if (mask >> j) & 1:
                continue
            nxt = mask | (1 << j)
            c = C[cur, j + 1] + f[nxt, j]
            if c <= target + tol:
                order[k] = j + 1
                mask = nxt
                cur = j + 1
                target = f[nxt, j]
                break
    length = C[0, order[0]]
    for k in range(m - 1):
        length += C[order[k], order[k + 1]]
    length += C[order[m - 1], 0]
    return order, length


_hk_reconstruct_nb = njit(_hk_reconstruct)


@njit
def _held_karp_nb(C):
    m = C.shape[0] - 1
    full = (1 << m) - 1
    f = np.full((1 << m, m), np.inf)
    for i in range(m):
        f[full, i] = C[i + 1, 0]
    for mask in range(full - 1, 0, -1):
        for i in range(m):
            if not (mask >> i) & 1:
                continue
            best = np.inf
            for j in range(m):
                if (mask >> j) & 1:
                    continue
                c = C[i + 1, j + 1] + f[mask | (1 << j), j]
                if c < best:
                    best = c
            f[mask, i] = best
    return _hk_reconstruct_nb(C, f)


def _held_karp_np(C):
    m = C.shape[0] - 1
    full = (1 << m) - 1
    bits = 1 << np.arange(m)
    inner = C[1:, 1:]
    f = np.full((1 << m, m), np.inf)
    f[full] = C[1:, 0]
    for mask in range(full - 1, 0, -1):
        js = np.flatnonzero((mask & bits) == 0)
        g = f[mask | bits[js], js]
        f[mask] = (inner[:, js] + g).min(axis=1)
    return _hk_reconstruct(C, f)


# ------------------------------------------------------- nearest neighbour

@njit
def _nearest_neighbor_nb(C):
    m = C.shape[0] - 1
    order = np.empty(m, dtype=np.int64)
    used = np.zeros(m + 1, dtype=np.bool_)
    used[0] = True
    cur = 0
    for k in range(m):
        best = np.inf
        pick = -1
        for j in range(1, m + 1):
            if not used[j] and C[cur, j] < best:
                best = C[cur, j]
                pick = j
        order[k] = pick
        used[pick] = True
        cur = pick
    return order


def _nearest_neighbor_np(C):
    m = C.shape[0] - 1
    order = np.empty(m, dtype=np.int64)
    free = np.ones(m + 1, dtype=bool)
    free[0] = False
    cur = 0
    for k in range(m):
        cur = int(np.argmin(np.where(free, C[cur], np.inf)))
        order[k] = cur
        free[cur] = False
    return order


# ------------------------------------------------------------------- 2-opt

@njit
def _two_opt_nb(C, order):
    m = order.shape[0]
    tour = np.zeros(m + 2, dtype=np.int64)
    tour[1:m + 1] = order
    while True:
        best = 0.0
        bi = -1
        bj = -1
        for i in range(1, m):
            a = tour[i - 1]
            b = tour[i]
            for j in range(i + 1, m + 1):
                c = tour[j]
                d = tour[j + 1]
                delta = C[a, c] + C[b, d] - C[a, b] - C[c, d]
                if delta < best:
                    best = delta
                    bi = i
                    bj = j
        length = 0.0
        for k in range(m + 1):
            length += C[tour[k], tour[k + 1]]
        if bi < 0 or best >= -TIE_RTOL * max(1.0, length):
            return tour[1:m + 1].copy(), length
        tour[bi:bj + 1] = tour[bi:bj + 1][::-1].copy()


def _two_opt_np(C, order):
    m = order.shape[0]
    tour = np.concatenate(([0], order, [0])).astype(np.int64)
    i = np.arange(1, m + 1)[:, None]
    j = np.arange(1, m + 1)[None, :]
    valid = j > i
    while True:
        a, b = tour[i - 1], tour[i]
        c, d = tour[j], tour[j + 1]
        delta = np.where(valid, C[a, c] + C[b, d] - C[a, b] - C[c, d], 0.0)
        length = C[tour[:-1], tour[1:]].sum()
        flat = int(np.argmin(delta))
        best = delta.flat[flat]
        if not best < 0.0 or best >= -TIE_RTOL * max(1.0, length):
            return tour[1:m + 1].copy(), length
        bi, bj = divmod(flat, m)
        bi, bj = bi + 1, bj + 1
        tour[bi:bj + 1] = tour[bi:bj + 1][::-1].copy()


def _heuristic_nb(C):
    return _two_opt_nb(C, _nearest_neighbor_nb(C))


def _heuristic_np(C):
    return _two_opt_np(C, _nearest_neighbor_np(C))


if USE_NUMBA:
    all_pairs = _all_pairs_nb
    held_karp = _held_karp_nb
    heuristic_tour = _heuristic_nb
else:
    all_pairs = _all_pairs_np
    held_karp = _held_karp_np
    heuristic_tour = _heuristic_np
