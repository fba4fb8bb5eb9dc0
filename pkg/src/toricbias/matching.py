"""Exact minimum-weight perfect matching on general weighted graphs.

The solver is a from-scratch primal-dual blossom algorithm (dense O(V^3)
formulation, JIT-compiled with numba) plus an exhaustive oracle for
small graphs.  Real weights are quantized to integers at a fixed scale
before solving, so dual updates are exact and tie-breaking is
reproducible; equal-weight matchings are further disambiguated by a
per-edge rank penalty that prefers pairings of low-indexed vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO

import numpy as np
from numba import njit

WEIGHT_SCALE = 10**6
_BRUTE_FORCE_LIMIT = 12
_INT_LIMIT = 1 << 58


class MatchingStructureError(ValueError):
    """Structurally invalid matching problem (odd node count, bad edge)."""


class InfeasibleMatchingError(ValueError):
    """The graph admits no perfect matching."""


class SizeLimitError(ValueError):
    """Input exceeds the hard size cap of an oracle routine."""


@dataclass
class MatchingGraph:
    """Undirected weighted graph; vertices are 0..node_count-1."""

    node_count: int
    edges: list[tuple[int, int, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.node_count < 0:
            raise MatchingStructureError("node_count must be nonnegative")
        seen = set()
        for u, v, w in self.edges:
            if u == v:
                raise MatchingStructureError(f"self-loop at vertex {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise MatchingStructureError(f"edge ({u}, {v}) out of range")
            if not math.isfinite(w):
                raise MatchingStructureError(f"non-finite weight on edge ({u}, {v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise MatchingStructureError(f"duplicate edge {key}")
            seen.add(key)

    @classmethod
    def complete_from_matrix(cls, weights: np.ndarray) -> "MatchingGraph":
        """Complete graph from a dense symmetric weight matrix."""
        weights = np.asarray(weights, dtype=float)
        count = weights.shape[0]
        edges = [
            (u, v, float(weights[u, v]))
            for u in range(count)
            for v in range(u + 1, count)
        ]
        return cls(count, edges)

    def is_complete(self) -> bool:
        return len(self.edges) == self.node_count * (self.node_count - 1) // 2


@dataclass
class Matching:
    """A perfect matching: sorted (u, v) pairs with u < v, and its weight."""

    pairs: list[tuple[int, int]]
    total_weight: float


def _quantize(edges: list[tuple[int, int, float]]) -> dict[tuple[int, int], int]:
    return {
        (min(u, v), max(u, v)): round(w * WEIGHT_SCALE) for u, v, w in edges
    }


def _rank_penalty(u: int, v: int, node_count: int) -> int:
    return min(u, v) * node_count + max(u, v)


def min_weight_perfect_matching(graph: MatchingGraph) -> Matching:
    """Globally minimum-weight perfect matching.

    Deterministic: quantized integer weights plus a rank penalty that
    selects a canonical matching among weight ties.  Raises
    :class:`MatchingStructureError` for odd node counts and
    :class:`InfeasibleMatchingError` when no perfect matching exists.
    """
    count = graph.node_count
    if count % 2 != 0:
        raise MatchingStructureError(f"odd node count {count}")
    if count == 0:
        return Matching([], 0.0)
    if not graph.edges:
        raise InfeasibleMatchingError("graph has no edges")

    base = _quantize(graph.edges)
    # Penalty factor large enough that one quantum of base weight always
    # dominates the total rank penalty of a matching.
    factor = count**3 // 2 + 1
    combined = {
        key: b * factor + _rank_penalty(*key, count) for key, b in base.items()
    }
    if max(abs(v) for v in combined.values()) * (count + 2) >= _INT_LIMIT:
        combined = dict(base)  # penalties would overflow; keep exactness
    w_max = max(combined.values())
    w_min = min(combined.values())
    if graph.is_complete():
        offset = w_max + 1
    else:
        # inflate so that higher cardinality always beats reweighting
        offset = w_max + (count // 2 + 1) * (w_max - w_min + 1) + 1
    if offset - w_min >= _INT_LIMIT:
        raise MatchingStructureError("weights too large for exact integer solving")

    dense = np.zeros((count + 1, count + 1), dtype=np.int64)
    for (u, v), w in combined.items():
        dense[u + 1, v + 1] = dense[v + 1, u + 1] = offset - w
    mate = _blossom_kernel(count, dense)
    if np.any(mate[1 : count + 1] == 0):
        raise InfeasibleMatchingError("no perfect matching exists")

    pairs = sorted(
        (u - 1, int(mate[u]) - 1) for u in range(1, count + 1) if u < mate[u]
    )
    exact = {(min(u, v), max(u, v)): w for u, v, w in graph.edges}
    return Matching(pairs, sum(exact[p] for p in pairs))


def min_weight_pairs_dense(weights: np.ndarray) -> np.ndarray:
    """Fast path for complete graphs given as a dense weight matrix.

    Same quantization and tie-breaking as
    :func:`min_weight_perfect_matching`, but all set-up is vectorized;
    used by the decoder where the matrix is rebuilt for every syndrome.
    Returns a (count/2, 2) array of matched index pairs.
    """
    weights = np.asarray(weights, dtype=float)
    count = weights.shape[0]
    if count % 2 != 0:
        raise MatchingStructureError(f"odd node count {count}")
    if count == 0:
        return np.empty((0, 2), dtype=np.int64)
    base = np.rint(weights * WEIGHT_SCALE).astype(np.int64)
    factor = count**3 // 2 + 1
    idx = np.arange(count, dtype=np.int64)
    pen = np.minimum(idx[:, None], idx[None, :]) * count + np.maximum(
        idx[:, None], idx[None, :]
    )
    if int(np.abs(base).max()) * factor + count * count >= _INT_LIMIT:
        combined = base
    else:
        combined = base * factor + pen
    offset = int(combined.max()) + 1
    dense = np.zeros((count + 1, count + 1), dtype=np.int64)
    dense[1:, 1:] = offset - combined
    np.fill_diagonal(dense, 0)
    mate = _blossom_kernel(count, dense)
    us = np.nonzero(mate[1:] > idx + 1)[0]
    return np.stack([us, mate[1 + us] - 1], axis=1)


def brute_force_matching(graph: MatchingGraph) -> Matching:
    """Exhaustive minimum over all perfect matchings (node_count <= 12).

    Uses the same quantization and rank-penalty tie objective as the
    solver, so the two agree pair-for-pair on weight ties; residual
    penalty ties resolve to the lexicographically smallest pair list.
    """
    count = graph.node_count
    if count > _BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force capped at {_BRUTE_FORCE_LIMIT} nodes")
    if count % 2 != 0:
        raise MatchingStructureError(f"odd node count {count}")
    if count == 0:
        return Matching([], 0.0)

    base = _quantize(graph.edges)
    factor = count**3 // 2 + 1
    combined = {
        key: b * factor + _rank_penalty(*key, count) for key, b in base.items()
    }
    best_cost: int | None = None
    best_pairs: list[tuple[int, int]] | None = None

    def recurse(remaining: list[int], cost: int, pairs: list[tuple[int, int]]) -> None:
        nonlocal best_cost, best_pairs
        if not remaining:
            if best_cost is None or cost < best_cost:
                best_cost, best_pairs = cost, list(pairs)
            return
        first, rest = remaining[0], remaining[1:]
        for i, partner in enumerate(rest):
            key = (first, partner)
            if key not in combined:
                continue
            pairs.append(key)
            recurse(rest[:i] + rest[i + 1 :], cost + combined[key], pairs)
            pairs.pop()

    recurse(list(range(count)), 0, [])
    if best_pairs is None:
        raise InfeasibleMatchingError("no perfect matching exists")
    exact = {(min(u, v), max(u, v)): w for u, v, w in graph.edges}
    return Matching(best_pairs, sum(exact[p] for p in best_pairs))


def read_edge_list(stream: IO[str]) -> MatchingGraph:
    """Parse the plain-text edge format: ``u v weight`` per line.

    Blank lines and ``#`` comments are ignored; the node count is
    1 + the largest vertex index mentioned.
    """
    edges: list[tuple[int, int, float]] = []
    top = -1
    for lineno, line in enumerate(stream, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 3:
            raise MatchingStructureError(f"line {lineno}: expected 'u v weight'")
        u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        top = max(top, u, v)
        edges.append((u, v, w))
    return MatchingGraph(top + 1, edges)


@njit(cache=True)
def _blossom_kernel(nv, w):  # pragma: no cover - exercised via wrapper
    """Maximum-weight matching on a dense nonnegative int64 matrix.

    ``w`` is (nv+1, nv+1), 1-indexed; 0 means "no edge".  Returns the
    1-indexed mate array (0 = unmatched).  Primal-dual with blossom
    shrinking; all arithmetic is exact integer.
    """
    m_cap = 2 * nv + 2
    inf = np.int64(1) << np.int64(62)

    g_u = np.zeros((m_cap, m_cap), dtype=np.int64)
    g_v = np.zeros((m_cap, m_cap), dtype=np.int64)
    g_w = np.zeros((m_cap, m_cap), dtype=np.int64)
    lab = np.zeros(m_cap, dtype=np.int64)
    mate = np.zeros(m_cap, dtype=np.int64)
    slack = np.zeros(m_cap, dtype=np.int64)
    st = np.zeros(m_cap, dtype=np.int64)
    pa = np.zeros(m_cap, dtype=np.int64)
    label = np.full(m_cap, -1, dtype=np.int64)  # -1 free, 0 even/outer, 1 odd/inner
    vis = np.zeros(m_cap, dtype=np.int64)
    flo = np.zeros((m_cap, m_cap), dtype=np.int64)
    flo_len = np.zeros(m_cap, dtype=np.int64)
    flo_from = np.zeros((m_cap, nv + 1), dtype=np.int64)
    queue = np.zeros(m_cap * m_cap, dtype=np.int64)
    qptr = np.zeros(2, dtype=np.int64)  # head, tail
    n_x = np.zeros(1, dtype=np.int64)
    timer = np.zeros(1, dtype=np.int64)
    stk = np.zeros(4 * m_cap, dtype=np.int64)
    stk2 = np.zeros(4 * m_cap, dtype=np.int64)

    def e_delta(a, b):
        return lab[g_u[a, b]] + lab[g_v[a, b]] - 2 * g_w[a, b]

    def update_slack(u, x):
        if slack[x] == 0 or e_delta(u, x) < e_delta(slack[x], x):
            slack[x] = u

    def set_slack(x):
        slack[x] = 0
        for u in range(1, nv + 1):
            if g_w[u, x] > 0 and st[u] != x and label[st[u]] == 0:
                update_slack(u, x)

    def q_push(x):
        sp = 0
        stk[sp] = x
        sp += 1
        while sp > 0:
            sp -= 1
            y = stk[sp]
            if y <= nv:
                queue[qptr[1]] = y
                qptr[1] += 1
            else:
                for i in range(flo_len[y]):
                    stk[sp] = flo[y, i]
                    sp += 1

    def set_st(x, b):
        sp = 0
        stk[sp] = x
        sp += 1
        while sp > 0:
            sp -= 1
            y = stk[sp]
            st[y] = b
            if y > nv:
                for i in range(flo_len[y]):
                    stk[sp] = flo[y, i]
                    sp += 1

    def get_pr(b, xr):
        pr = 0
        for i in range(flo_len[b]):
            if flo[b, i] == xr:
                pr = i
                break
        if pr % 2 == 1:
            # reverse flo[b][1:] so the path parity works out
            lo = 1
            hi = flo_len[b] - 1
            while lo < hi:
                tmp = flo[b, lo]
                flo[b, lo] = flo[b, hi]
                flo[b, hi] = tmp
                lo += 1
                hi -= 1
            return flo_len[b] - pr
        return pr

    def set_match(u0, v0):
        sp = 0
        stk[sp] = u0
        stk2[sp] = v0
        sp += 1
        while sp > 0:
            sp -= 1
            u = stk[sp]
            v = stk2[sp]
            mate[u] = g_v[u, v]
            if u > nv:
                xr = flo_from[u, g_u[u, v]]
                pr = get_pr(u, xr)
                for i in range(pr):
                    stk[sp] = flo[u, i]
                    stk2[sp] = flo[u, i ^ 1]
                    sp += 1
                stk[sp] = xr
                stk2[sp] = v
                sp += 1
                # rotate flo[u] left by pr
                ln = flo_len[u]
                if pr > 0:
                    buf = np.empty(ln, dtype=np.int64)
                    for i in range(ln):
                        buf[i] = flo[u, (i + pr) % ln]
                    for i in range(ln):
                        flo[u, i] = buf[i]

    def augment(u, v):
        while True:
            xnv = st[mate[u]]
            set_match(u, v)
            if xnv == 0:
                return
            set_match(xnv, st[pa[xnv]])
            u = st[pa[xnv]]
            v = xnv

    def get_lca(u, v):
        timer[0] += 1
        t = timer[0]
        while u != 0 or v != 0:
            if u != 0:
                if vis[u] == t:
                    return u
                vis[u] = t
                u = st[mate[u]]
                if u != 0:
                    u = st[pa[u]]
            tmp = u
            u = v
            v = tmp
        return 0

    def add_blossom(u, lca, v):
        b = nv + 1
        while b <= n_x[0] and st[b] != 0:
            b += 1
        if b > n_x[0]:
            n_x[0] += 1
        lab[b] = 0
        label[b] = 0
        mate[b] = mate[lca]
        flo_len[b] = 1
        flo[b, 0] = lca
        x = u
        while x != lca:
            flo[b, flo_len[b]] = x
            flo_len[b] += 1
            y = st[mate[x]]
            flo[b, flo_len[b]] = y
            flo_len[b] += 1
            q_push(y)
            x = st[pa[y]]
        lo = 1
        hi = flo_len[b] - 1
        while lo < hi:
            tmp = flo[b, lo]
            flo[b, lo] = flo[b, hi]
            flo[b, hi] = tmp
            lo += 1
            hi -= 1
        x = v
        while x != lca:
            flo[b, flo_len[b]] = x
            flo_len[b] += 1
            y = st[mate[x]]
            flo[b, flo_len[b]] = y
            flo_len[b] += 1
            q_push(y)
            x = st[pa[y]]
        set_st(b, b)
        for x in range(1, n_x[0] + 1):
            g_w[b, x] = 0
            g_w[x, b] = 0
        for x in range(1, nv + 1):
            flo_from[b, x] = 0
        for i in range(flo_len[b]):
            xs = flo[b, i]
            for x in range(1, n_x[0] + 1):
                if g_w[xs, x] > 0 and (
                    g_w[b, x] == 0 or e_delta(xs, x) < e_delta(b, x)
                ):
                    g_u[b, x] = g_u[xs, x]
                    g_v[b, x] = g_v[xs, x]
                    g_w[b, x] = g_w[xs, x]
                    g_u[x, b] = g_u[x, xs]
                    g_v[x, b] = g_v[x, xs]
                    g_w[x, b] = g_w[x, xs]
            for x in range(1, nv + 1):
                if flo_from[xs, x] != 0:
                    flo_from[b, x] = xs
        set_slack(b)

    def expand_blossom(b):
        for i in range(flo_len[b]):
            set_st(flo[b, i], flo[b, i])
        xr = flo_from[b, g_u[b, pa[b]]]
        pr = get_pr(b, xr)
        i = 0
        while i < pr:
            xs = flo[b, i]
            xns = flo[b, i + 1]
            pa[xs] = g_u[xns, xs]
            label[xs] = 1
            label[xns] = 0
            slack[xs] = 0
            set_slack(xns)
            q_push(xns)
            i += 2
        label[xr] = 1
        pa[xr] = pa[b]
        for i in range(pr + 1, flo_len[b]):
            xs = flo[b, i]
            label[xs] = -1
            set_slack(xs)
        st[b] = 0

    def on_found_edge(eu, ev):
        u = st[eu]
        v = st[ev]
        if label[v] == -1:
            pa[v] = eu
            label[v] = 1
            nu = st[mate[v]]
            slack[v] = 0
            slack[nu] = 0
            label[nu] = 0
            q_push(nu)
        elif label[v] == 0:
            lca = get_lca(u, v)
            if lca == 0:
                augment(u, v)
                augment(v, u)
                return True
            add_blossom(u, lca, v)
        return False

    def matching_phase():
        for x in range(1, n_x[0] + 1):
            label[x] = -1
            slack[x] = 0
        qptr[0] = 0
        qptr[1] = 0
        for x in range(1, n_x[0] + 1):
            if st[x] == x and mate[x] == 0:
                pa[x] = 0
                label[x] = 0
                q_push(x)
        if qptr[1] == 0:
            return False
        while True:
            while qptr[0] < qptr[1]:
                u = queue[qptr[0]]
                qptr[0] += 1
                if label[st[u]] == 1:
                    continue
                for v in range(1, nv + 1):
                    if g_w[u, v] > 0 and st[u] != st[v]:
                        if e_delta(u, v) == 0:
                            if on_found_edge(g_u[u, v], g_v[u, v]):
                                return True
                        else:
                            update_slack(u, st[v])
            d = inf
            for b in range(nv + 1, n_x[0] + 1):
                if st[b] == b and label[b] == 1:
                    half = lab[b] // 2
                    if half < d:
                        d = half
            for x in range(1, n_x[0] + 1):
                if st[x] == x and slack[x] != 0:
                    if label[x] == -1:
                        delta = e_delta(slack[x], x)
                        if delta < d:
                            d = delta
                    elif label[x] == 0:
                        delta = e_delta(slack[x], x) // 2
                        if delta < d:
                            d = delta
            for u in range(1, nv + 1):
                if label[st[u]] == 0:
                    if lab[u] <= d:
                        return False
                    lab[u] -= d
                elif label[st[u]] == 1:
                    lab[u] += d
            for b in range(nv + 1, n_x[0] + 1):
                if st[b] == b:
                    if label[b] == 0:
                        lab[b] += 2 * d
                    elif label[b] == 1:
                        lab[b] -= 2 * d
            qptr[0] = 0
            qptr[1] = 0
            for x in range(1, n_x[0] + 1):
                if (
                    st[x] == x
                    and slack[x] != 0
                    and st[slack[x]] != x
                    and e_delta(slack[x], x) == 0
                ):
                    if on_found_edge(g_u[slack[x], x], g_v[slack[x], x]):
                        return True
            for b in range(nv + 1, n_x[0] + 1):
                if st[b] == b and label[b] == 1 and lab[b] == 0:
                    expand_blossom(b)
        return False

    # initialisation
    n_x[0] = nv
    w_top = np.int64(0)
    for u in range(1, nv + 1):
        st[u] = u
        for v in range(1, nv + 1):
            g_u[u, v] = u
            g_v[u, v] = v
            g_w[u, v] = w[u, v]
            if w[u, v] > w_top:
                w_top = w[u, v]
            flo_from[u, v] = u if u == v else 0
    for u in range(1, nv + 1):
        lab[u] = w_top

    while matching_phase():
        pass
    return mate[: nv + 1]
