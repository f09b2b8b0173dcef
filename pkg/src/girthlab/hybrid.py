"""The equivariant hybrid metric d_C on (window vertices) x (compactification).

d_C((v,xi),(w,zeta)) is the infimum over finite chains of moves, each move
costing d_tree(v', v'') + C * dbar(q(v'')^{-1}.xi', q(v'')^{-1}.xi'').  On a
product sample V_s x Xi_s every chain decomposes into pure vertex moves
(cost d_tree, boundary part fixed) and pure boundary switches at a vertex
(cost C * dbar of the q-translated points), and conversely, so the sampled
infimum is the shortest-path metric of the undirected two-move graph.  A
plain min-plus Floyd-Warshall closure keeps the matrix exactly symmetric
(float addition is commutative) and monotone in C.

The sampled table is the restriction of the true infimum to chains through
the sample, hence an upper bound on d_C; the lower bracket by the tree
metric is exact because vertex-move costs telescope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GeometryError
from .window import CoverWindow, DeckElement, QMap, Word, tree_distance
from .boundary import GromovPoint, point_metric


@dataclass
class HybridMetricTable:
    """Computed d_C distances on a product sample.

    nodes[i] = (vertex word, GromovPoint); dist is dense, symmetric, with
    exact zeros on the diagonal.  ``clamped_translations`` counts deck
    translates of rays that lost resolution to re-clamping (their visual
    distances are then underestimates; surfaced, not hidden).
    """

    C: float
    vertex_sample: list
    boundary_sample: list
    dist: np.ndarray
    clamped_translations: int
    window: CoverWindow = field(repr=False)

    def node_index(self, v: Word, xi: GromovPoint) -> int:
        return self._index[(v, xi)]

    def __post_init__(self):
        self._index = {}
        for i, v in enumerate(self.vertex_sample):
            for j, xi in enumerate(self.boundary_sample):
                self._index[(v, xi)] = i * len(self.boundary_sample) + j

    @property
    def nodes(self):
        return [(v, xi) for v in self.vertex_sample for xi in self.boundary_sample]

    def distance(self, p, q) -> float:
        return float(self.dist[self._index[p], self._index[q]])

    def boundary_metric_at(self, v: Word, xi: GromovPoint, zeta: GromovPoint) -> float:
        """d_v(xi, zeta) := d_C((v,xi),(v,zeta))."""
        return self.distance((v, xi), (v, zeta))


def step_cost(window: CoverWindow, q: QMap, C: float,
              v: Word, xi: GromovPoint, w: Word, zeta: GromovPoint):
    """Cost of the single chain move (v,xi) -> (w,zeta), and its clamp flag.

    The boundary part is translated by q(w)^{-1} and measured in the visual
    metric at base; identical translated words cost exactly zero.
    """
    clamped = False
    move = tree_distance(v, w)
    if xi == zeta:
        return float(move), clamped
    g_inv = q.value(w).inverse()
    a, ca = xi.translate(g_inv, clamp=None)
    b, cb = zeta.translate(g_inv, clamp=None)
    clamped = ca or cb
    return move + C * point_metric(a, b), clamped


def compute_dc(window: CoverWindow, q: QMap, boundary_sample,
               C: float, vertex_sample=None) -> HybridMetricTable:
    """Shortest-path d_C table over the product sample.

    The underlying graph has an edge for every pure vertex move and every
    pure boundary switch; its closure equals the infimum over all finite
    chains through the sample (an upper bound on the true d_C, exact on
    the sampled statement).
    """
    if not C > 1:
        raise ConfigError("the control constant C must exceed 1")
    if vertex_sample is None:
        vertex_sample = list(window.words)
    boundary_sample = _dedupe(boundary_sample)
    nv, nb = len(vertex_sample), len(boundary_sample)
    n = nv * nb
    if n > 4000:
        raise ConfigError(f"product sample of {n} nodes is beyond table budget")
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    # pure vertex moves (boundary part fixed): same integer cost per xi
    vmove = np.zeros((nv, nv))
    for i, v in enumerate(vertex_sample):
        for k in range(i + 1, nv):
            vmove[i, k] = vmove[k, i] = tree_distance(v, vertex_sample[k])
    clamp_count = 0
    for j in range(nb):
        idx = [i * nb + j for i in range(nv)]
        dist[np.ix_(idx, idx)] = np.minimum(dist[np.ix_(idx, idx)], vmove)
    # pure boundary switches at a fixed vertex
    for i, v in enumerate(vertex_sample):
        g_inv = q.value(v).inverse()
        translated = []
        for xi in boundary_sample:
            t, _ = xi.translate(g_inv, clamp=None)
            translated.append(t)
            if t.is_boundary and t.depth < xi.depth:
                clamp_count += 1  # cancellation shortened the ray: lost resolution
        for j in range(nb):
            for k in range(j + 1, nb):
                c = C * point_metric(translated[j], translated[k])
                a, b = i * nb + j, i * nb + k
                if c < dist[a, b]:
                    dist[a, b] = dist[b, a] = c
    _floyd_warshall(dist)
    return HybridMetricTable(C, list(vertex_sample), list(boundary_sample),
                             dist, clamp_count, window)


def _dedupe(points):
    seen = {}
    for p in points:
        seen.setdefault((p.word, p.kind), p)
    return sorted(seen.values(), key=lambda p: (p.kind, p.word))


def _floyd_warshall(dist: np.ndarray) -> None:
    """In-place min-plus closure; preserves exact matrix symmetry."""
    n = dist.shape[0]
    for k in range(n):
        np.minimum(dist, dist[:, k, None] + dist[None, k, :], out=dist)


# -- invariant checks -----------------------------------------------------


@dataclass
class TableCheckReport:
    name: str
    checked: int
    worst: float
    witnesses: list

    @property
    def passed(self) -> bool:
        return not self.witnesses


def check_symmetry(table: HybridMetricTable) -> TableCheckReport:
    """Exact: the min-plus closure of a symmetric matrix stays symmetric."""
    diff = np.abs(table.dist - table.dist.T)
    worst = float(diff.max())
    witnesses = [] if worst == 0.0 else [tuple(np.unravel_index(diff.argmax(), diff.shape))]
    return TableCheckReport("symmetry", table.dist.size, worst, witnesses)


def check_triangle(table: HybridMetricTable, samples: int = 10_000,
                   seed: int = 0, tol: float = 1e-9) -> TableCheckReport:
    rng = np.random.RandomState(seed)
    n = table.dist.shape[0]
    idx = rng.randint(0, n, size=(samples, 3))
    d = table.dist
    lhs = d[idx[:, 0], idx[:, 2]]
    rhs = d[idx[:, 0], idx[:, 1]] + d[idx[:, 1], idx[:, 2]]
    gap = lhs - rhs
    worst = float(gap.max())
    witnesses = [tuple(map(int, idx[i])) for i in np.nonzero(gap > tol)[0][:5]]
    return TableCheckReport("triangle", samples, worst, witnesses)


def check_tree_lower_bound(table: HybridMetricTable) -> TableCheckReport:
    """d_C((v,xi),(w,zeta)) >= d_tree(v,w), exact."""
    witnesses = []
    worst = 0.0
    nb = len(table.boundary_sample)
    for i, v in enumerate(table.vertex_sample):
        for k, w in enumerate(table.vertex_sample):
            base = tree_distance(v, w)
            block = table.dist[i * nb:(i + 1) * nb, k * nb:(k + 1) * nb]
            gap = base - block.min()
            worst = max(worst, float(gap))
            if block.min() < base:
                witnesses.append((v, w, float(block.min()), base))
    return TableCheckReport("tree-lower-bound", len(table.vertex_sample) ** 2,
                            worst, witnesses[:5])


def check_equal_boundary(table: HybridMetricTable) -> TableCheckReport:
    """d_C((v,xi),(w,xi)) == d_tree(v,w), exact equality."""
    witnesses = []
    worst = 0.0
    nb = len(table.boundary_sample)
    for i, v in enumerate(table.vertex_sample):
        for k, w in enumerate(table.vertex_sample):
            base = float(tree_distance(v, w))
            for j in range(nb):
                got = table.dist[i * nb + j, k * nb + j]
                gap = abs(got - base)
                worst = max(worst, gap)
                if gap != 0.0:
                    witnesses.append((v, w, j, got, base))
    return TableCheckReport("equal-boundary", len(table.vertex_sample) ** 2 * nb,
                            worst, witnesses[:5])


def check_monotone_in_c(window: CoverWindow, q: QMap, boundary_sample,
                        c_small: float, c_big: float,
                        vertex_sample=None) -> TableCheckReport:
    t1 = compute_dc(window, q, boundary_sample, c_small, vertex_sample)
    t2 = compute_dc(window, q, boundary_sample, c_big, vertex_sample)
    gap = t1.dist - t2.dist
    worst = float(gap.max())
    witnesses = [] if worst <= 0.0 else [tuple(np.unravel_index(gap.argmax(), gap.shape))]
    return TableCheckReport("monotone-in-C", t1.dist.size, worst, witnesses)


def check_deck_invariance(table: HybridMetricTable, q: QMap,
                          g: DeckElement, tol: float = 1e-9) -> TableCheckReport:
    """Recompute the table on the g-translated sample and compare.

    Word arithmetic makes translates meaningful beyond the window, and
    q(g.v)^{-1} g = q(v)^{-1} holds exactly at the word level, so the two
    cost matrices agree float-for-float; the tolerance is headroom only.
    """
    wnd = table.window
    tv = [g.act(v) for v in table.vertex_sample]
    tb = []
    clamped = 0
    for xi in table.boundary_sample:
        t, c = xi.translate(g, clamp=None)
        tb.append(t)
        clamped += int(c)
    translated = compute_dc(wnd, q, tb, table.C, tv)
    # boundary samples are re-sorted inside compute_dc: align indices
    perm = [translated.boundary_sample.index(t) for t in tb]
    nb = len(tb)
    idx = [i * nb + perm[j] for i in range(len(tv)) for j in range(nb)]
    diff = np.abs(translated.dist[np.ix_(idx, idx)] - table.dist)
    worst = float(diff.max())
    witnesses = [] if worst <= tol else [tuple(np.unravel_index(diff.argmax(), diff.shape))]
    return TableCheckReport("deck-invariance", table.dist.size, worst, witnesses)


def check_base_change_bound(table: HybridMetricTable, q: QMap,
                            graph_diameter: int, tol: float = 1e-9) -> TableCheckReport:
    """d_v(xi,zeta) <= d_w(xi,zeta) + 4*diam for q(v) == q(w)."""
    worst = -math.inf
    witnesses = []
    checked = 0
    nb = len(table.boundary_sample)
    same_q = {}
    for i, v in enumerate(table.vertex_sample):
        same_q.setdefault(q.value(v).word, []).append(i)
    for group in same_q.values():
        for i in group:
            for k in group:
                if i == k:
                    continue
                for j in range(nb):
                    for m in range(j + 1, nb):
                        checked += 1
                        dv = table.dist[i * nb + j, i * nb + m]
                        dw = table.dist[k * nb + j, k * nb + m]
                        gap = dv - dw - 4 * graph_diameter
                        worst = max(worst, float(gap))
                        if gap > tol:
                            witnesses.append((i, k, j, m, float(dv), float(dw)))
    return TableCheckReport("base-change", checked, worst, witnesses[:5])


def enumerate_sequences_oracle(window: CoverWindow, q: QMap, nodes,
                               C: float, max_steps: int = 3) -> np.ndarray:
    """Brute-force infimum over chains of <= max_steps through given nodes.

    Independent oracle for small samples: every directed step is costed by
    the defining formula (vertex move plus q-translated boundary switch at
    the target), with intermediate nodes ranging over the node list.
    """
    n = len(nodes)
    step = np.full((n, n), np.inf)
    for i, (v, xi) in enumerate(nodes):
        for j, (w, zeta) in enumerate(nodes):
            if i == j:
                step[i, j] = 0.0
                continue
            move = tree_distance(v, w)
            g_inv = q.value(w).inverse()
            a, _ = xi.translate(g_inv, clamp=None)
            b, _ = zeta.translate(g_inv, clamp=None)
            step[i, j] = move + C * point_metric(a, b)
    best = step.copy()
    np.fill_diagonal(best, 0.0)
    power = step.copy()
    for _ in range(max_steps - 1):
        power = np.min(power[:, :, None] + step[None, :, :], axis=1)
        best = np.minimum(best, power)
    return best
