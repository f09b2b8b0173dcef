"""Rips complexes below half-girth scale and the squared-distance retraction.

The retraction of a weighted simplex point x is the unique minimizer of
y -> sum_i t_i d(y, v_i)^2 over the graph, located by minimizing over every
vertex and edge in the geodesic hull of the support.  On an edge (a, b)
with arc parameter s (distance from a), a support vertex contributes
(d(v_i,a) + s)^2 when strictly nearer a, (d(v_i,b) + 1 - s)^2 when strictly
nearer b.  A vertex equidistant from both endpoints contributes the tent
(m + min(s, 1-s))^2: this genuinely occurs once girth <= 3*scale (e.g. the
vertex opposite an edge on a girth cycle), so the per-edge objective is
minimized piecewise on [0, 1/2] and [1/2, 1].  The closed-form stationary
point on a tent-free edge is

    s0 = sum_{near b} t_i (d(v_i,b) + 1)  -  sum_{near a} t_i d(v_i,a),

exposed as ``edge_minimizer`` with the equidistant case rejected.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .errors import GeometryError
from .graphs import FiniteGraph, girth

WEIGHT_TOL = 1e-12
OBJ_TIE_TOL = 1e-9
POINT_TOL = 2e-6


class RipsComplex:
    """P_d of a graph: simplices are vertex sets of diameter <= d.

    Only maximal simplices are stored (cliques of the distance-<=d relation,
    Bron-Kerbosch with canonical ordering); faces are implicit.
    """

    def __init__(self, host: FiniteGraph, scale: int):
        g = girth(host)
        if not scale >= 1:
            raise GeometryError("scale must be >= 1")
        if not scale < g / 2:
            raise GeometryError(
                f"scale {scale} violates the hypothesis scale < girth/2 = {g / 2}")
        self.host = host
        self.scale = scale
        close = [set() for _ in range(host.n)]
        for u in range(host.n):
            for v in range(host.n):
                if u != v and host.distance(u, v) <= scale:
                    close[u].add(v)
        self.maximal_simplices = sorted(_bron_kerbosch(close, host.n))

    def simplices_of_dim(self, k: int) -> set:
        out = set()
        for m in self.maximal_simplices:
            out.update(itertools.combinations(m, k + 1))
        return out

    def is_simplex(self, vertices) -> bool:
        vs = sorted(set(vertices))
        return all(self.host.distance(u, v) <= self.scale
                   for u, v in itertools.combinations(vs, 2))


def _bron_kerbosch(close, n):
    cliques = []

    def expand(r, p, x):
        if not p and not x:
            cliques.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: len(close[u] & p))
        for v in sorted(p - close[pivot]):
            expand(r | {v}, p & close[v], x & close[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(n)), set())
    return cliques


@dataclass(frozen=True)
class RipsPoint:
    """Barycentric point of a simplex: vertices with weights summing to 1."""

    simplex: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.simplex) != len(self.weights):
            raise GeometryError("simplex/weight length mismatch")
        if any(t < -WEIGHT_TOL for t in self.weights):
            raise GeometryError("negative barycentric weight")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise GeometryError(f"weights sum to {sum(self.weights)}, not 1")

    def support(self):
        return [(v, t) for v, t in zip(self.simplex, self.weights) if t > WEIGHT_TOL]

    def as_vector(self) -> dict:
        out = {}
        for v, t in zip(self.simplex, self.weights):
            out[v] = out.get(v, 0.0) + t
        return out


@dataclass(frozen=True)
class TreePoint:
    """A point of the host graph: a vertex, or an interior edge point.

    Canonical form: ``a < b`` with s the arc distance from a; s in {0, 1}
    collapses to the vertex form (a == b, s == 0).
    """

    a: int
    b: int
    s: float

    @staticmethod
    def vertex(v: int) -> "TreePoint":
        return TreePoint(v, v, 0.0)

    @staticmethod
    def on_edge(a: int, b: int, s: float) -> "TreePoint":
        if s <= WEIGHT_TOL:
            return TreePoint.vertex(a)
        if s >= 1.0 - WEIGHT_TOL:
            return TreePoint.vertex(b)
        if a > b:
            a, b, s = b, a, 1.0 - s
        return TreePoint(a, b, s)

    @property
    def is_vertex(self) -> bool:
        return self.a == self.b

    def distance_to_vertex(self, g: FiniteGraph, u: int) -> float:
        if self.is_vertex:
            return float(g.distance(self.a, u))
        return min(g.distance(self.a, u) + self.s,
                   g.distance(self.b, u) + 1.0 - self.s)


def tree_point_distance(g: FiniteGraph, p: TreePoint, q: TreePoint) -> float:
    """Arc-length distance between two points of the graph realization."""
    if p.is_vertex and q.is_vertex:
        return float(g.distance(p.a, q.a))
    if (p.a, p.b) == (q.a, q.b) and not p.is_vertex:
        direct = abs(p.s - q.s)
        around = min(p.s + q.s + g.distance(p.a, q.a),
                     (1 - p.s) + (1 - q.s) + g.distance(p.b, q.b))
        return min(direct, around)
    best = math.inf
    for u, du in _ends(p):
        for v, dv in _ends(q):
            best = min(best, du + g.distance(u, v) + dv)
    return best


def _ends(p: TreePoint):
    if p.is_vertex:
        return [(p.a, 0.0)]
    return [(p.a, p.s), (p.b, 1.0 - p.s)]


# -- the minimizer -------------------------------------------------------


def hull(g: FiniteGraph, vertices) -> list:
    """Vertices on geodesics between support pairs (unique below half-girth)."""
    vs = sorted(set(vertices))
    out = set(vs)
    for u, v in itertools.combinations(vs, 2):
        duv = g.distance(u, v)
        for z in range(g.n):
            if g.distance(u, z) + g.distance(z, v) == duv:
                out.add(z)
    return sorted(out)


def hull_edges(g: FiniteGraph, hull_vertices) -> list:
    hs = set(hull_vertices)
    return [(u, v) for u, v in g.edges if u in hs and v in hs]


def edge_minimizer(x: RipsPoint, edge, g: FiniteGraph) -> float:
    """Raw stationary point s0 of the squared-distance objective on an edge.

    Requires every positive-weight vertex to be strictly nearer one
    endpoint; an equidistant vertex makes the objective non-smooth and is
    reported as a geometry error (the caller must fall back to piecewise
    minimization).  The value is not clamped to [0, 1].
    """
    a, b = edge
    if (min(a, b), max(a, b)) not in set(g.edges):
        raise GeometryError(f"({a}, {b}) is not an edge of the host")
    s0 = 0.0
    for v, t in x.support():
        da, db = g.distance(v, a), g.distance(v, b)
        if da == db:
            raise GeometryError(
                f"vertex {v} is equidistant from both endpoints of ({a}, {b})",
                witness=(v, a, b, da))
        if da < db:
            s0 -= t * da
        else:
            s0 += t * (db + 1)
    return s0


def _edge_argmin(x: RipsPoint, a: int, b: int, g: FiniteGraph):
    """Exact minima of the per-edge objective, tents handled piecewise.

    Returns a list of (s, value), one per quadratic piece, so that ties
    between tent pieces stay visible to the caller.  On each piece the
    objective is s^2 + B s + C (leading coefficient sum(t_i) = 1), so the
    stationary point is -B/2 clamped to the piece.
    """
    support = x.support()
    terms = []  # (t, base distance, slope sign on [0, 1/2])
    has_tent = False
    for v, t in support:
        da, db = g.distance(v, a), g.distance(v, b)
        if da < db:
            terms.append((t, float(da), +1.0, False))
        elif db < da:
            terms.append((t, float(db) + 1.0, -1.0, False))
        else:
            terms.append((t, float(da), +1.0, True))
            has_tent = True

    def piece_min(lo, hi, flip_tents):
        lin = 0.0
        const = 0.0
        quad = 0.0
        for t, c, eps, tent in terms:
            e = eps
            cc = c
            if tent and flip_tents:
                e, cc = -1.0, c + 1.0  # tent right piece: (m + 1 - s)^2
            quad += t
            lin += 2 * t * cc * e
            const += t * cc * cc
        s_star = min(hi, max(lo, -lin / (2 * quad)))
        return s_star, quad * s_star * s_star + lin * s_star + const

    if not has_tent:
        return [piece_min(0.0, 1.0, False)]
    return [piece_min(0.0, 0.5, False), piece_min(0.5, 1.0, True)]


def objective_at(x: RipsPoint, p: TreePoint, g: FiniteGraph) -> float:
    return sum(t * p.distance_to_vertex(g, v) ** 2 for v, t in x.support())


def retract(x: RipsPoint, g: FiniteGraph) -> TreePoint:
    """argmin_y sum t_i d(y, v_i)^2 over the geodesic hull of the support.

    Candidates within the objective-tie tolerance must coincide as points;
    two minimizers further apart signal a genuine non-uniqueness (possible
    only at special weights when girth <= 3*scale) and raise GeometryError.
    """
    support_vertices = [v for v, _ in x.support()]
    hv = hull(g, support_vertices)
    candidates = []
    for u in hv:
        candidates.append((TreePoint.vertex(u),
                           objective_at(x, TreePoint.vertex(u), g)))
    for a, b in hull_edges(g, hv):
        for s, val in _edge_argmin(x, a, b, g):
            candidates.append((TreePoint.on_edge(a, b, s), val))
    best_val = min(val for _, val in candidates)
    near = [p for p, val in candidates if val <= best_val + OBJ_TIE_TOL]
    winner = min(near, key=lambda p: (p.a, p.b, p.s))
    for p in near:
        if tree_point_distance(g, winner, p) > POINT_TOL:
            raise GeometryError(
                "two distant minimizers within tolerance "
                "(girth hypothesis too tight for this weight vector)",
                witness=(winner, p, best_val))
    return winner


def embed_tree_point(p: TreePoint, complex_: RipsComplex) -> RipsPoint:
    if p.is_vertex:
        return RipsPoint((p.a,), (1.0,))
    return RipsPoint((p.a, p.b), (1.0 - p.s, p.s))


def homotopy(x: RipsPoint, t: float, complex_: RipsComplex) -> RipsPoint:
    """t*x + (1-t)*r(x) inside the simplex spanned by supp(x) and r(x).

    The common simplex is the support of x plus the bracketing vertices of
    the retraction; if that set exceeds the scale the straight-line
    homotopy is undefined and a geometry error is raised.
    """
    if not 0.0 <= t <= 1.0:
        raise GeometryError("homotopy time must lie in [0, 1]")
    g = complex_.host
    r = retract(x, g)
    bracket = [r.a] if r.is_vertex else [r.a, r.b]
    sigma = sorted(set(v for v, _ in x.support()) | set(bracket))
    if not complex_.is_simplex(sigma):
        raise GeometryError(
            "support of x and its retraction span no common simplex",
            witness=(sigma,))
    weights = {v: 0.0 for v in sigma}
    for v, w in zip(x.simplex, x.weights):
        if w > 0:
            weights[v] += t * w
    rp = embed_tree_point(r, complex_)
    for v, w in zip(rp.simplex, rp.weights):
        if w > 0:
            weights[v] += (1.0 - t) * w
    return RipsPoint(tuple(sigma), tuple(weights[v] for v in sigma))


# -- sampling and oracles -------------------------------------------------


def sample_point(complex_: RipsComplex, rng: random.Random) -> RipsPoint:
    """Uniform Dirichlet point on a random maximal simplex (random face)."""
    simplex = complex_.maximal_simplices[
        rng.randrange(len(complex_.maximal_simplices))]
    keep = [v for v in simplex if rng.random() < 0.8] or [simplex[0]]
    raw = [rng.expovariate(1.0) for _ in keep]
    total = sum(raw)
    return RipsPoint(tuple(keep), tuple(w / total for w in raw))


def grid_oracle(x: RipsPoint, g: FiniteGraph, step: float = 1e-3):
    """Brute-force argmin over a uniform grid on every hull edge and vertex.

    Returns (best point, best value, near-minimizers within 1e-9), using
    the true piecewise distance min(d(v,a)+s, d(v,b)+1-s) on each edge.
    Grids are evaluated vectorized; the oracle shares no code with the
    closed-form minimizer it checks.
    """
    import numpy as np

    support = x.support()
    hv = hull(g, [v for v, _ in support])
    pts = [TreePoint.vertex(u) for u in hv]
    vals = [objective_at(x, p, g) for p in pts]
    n_steps = int(round(1.0 / step))
    s_grid = np.arange(1, n_steps) * step
    for a, b in hull_edges(g, hv):
        obj = np.zeros_like(s_grid)
        for v, t in support:
            da, db = g.distance(v, a), g.distance(v, b)
            dist = np.minimum(da + s_grid, db + 1.0 - s_grid)
            obj += t * dist * dist
        for i in range(len(s_grid)):
            pts.append(TreePoint.on_edge(a, b, s_grid[i]))
        vals.extend(obj.tolist())
    best = min(vals)
    near = [p for p, v in zip(pts, vals) if v <= best + OBJ_TIE_TOL]
    winner = min((p for p, v in zip(pts, vals) if v == best),
                 key=lambda p: (p.a, p.b, p.s))
    return winner, best, near


# -- Lipschitz check ------------------------------------------------------


def l1_distance(x: RipsPoint, y: RipsPoint) -> float:
    """l1 distance of barycentric weight vectors over the union support.

    For two points of a common simplex this is the simplicial path metric
    exactly; the Lipschitz sampler only draws such pairs.
    """
    xv, yv = x.as_vector(), y.as_vector()
    keys = set(xv) | set(yv)
    return sum(abs(xv.get(k, 0.0) - yv.get(k, 0.0)) for k in keys)


@dataclass
class LipschitzReport:
    constant: float
    pairs_checked: int
    max_ratio: float
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


def check_lipschitz(complex_: RipsComplex, sample_count: int,
                    seed: int = 0) -> LipschitzReport:
    """Sampled check of d(r(x), r(y)) <= (scale+1) * d(x, y) + 1e-9.

    Pairs are drawn inside a common maximal simplex (where the l1 metric is
    exact); each violation is reported with its witness pair.
    """
    rng = random.Random(seed)
    g = complex_.host
    c = complex_.scale + 1
    max_ratio = 0.0
    violations = []
    for _ in range(sample_count):
        simplex = complex_.maximal_simplices[
            rng.randrange(len(complex_.maximal_simplices))]
        x = _dirichlet_on(simplex, rng)
        y = _dirichlet_on(simplex, rng)
        dxy = l1_distance(x, y)
        drr = tree_point_distance(g, retract(x, g), retract(y, g))
        if dxy > 0:
            max_ratio = max(max_ratio, drr / dxy)
        if drr > c * dxy + 1e-9:
            violations.append((x, y, drr, dxy))
    return LipschitzReport(c, sample_count, max_ratio, violations)


def _dirichlet_on(simplex, rng):
    keep = [v for v in simplex if rng.random() < 0.75] or [simplex[0]]
    raw = [rng.expovariate(1.0) for _ in keep]
    total = sum(raw)
    return RipsPoint(tuple(keep), tuple(w / total for w in raw))
