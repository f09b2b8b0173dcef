"""The long-and-thin cover pipeline on a window.

Stages, each verified on samples as it is built:

1. flow cover: sets B_{3a}(v0) x U(v0, xi-) x U(v0, xi+) cut to the flow
   space, with v0 ranging over the in-window lift of a maximal 2a-separated
   vertex set and U(v0, xi) the Gromov ball {zeta : (zeta, xi)_{v0} >= L},
   L = ceil(6a);
2. pull-back to (vertices) x (boundary) along the flow at a searched time tau;
3. thickening into the compactification (every Gromov ball re-read over all
   point kinds with identical parameters; slice projections unchanged);
4. final assembly with the bulk product sets B_R(g.v0) x B_{2/3}(g.v).

All balls are open and a = girth/7 throughout.  Membership reduces to two
primitives, tree-ball tests and Gromov-product tests at an explicit
basepoint, so every verification below is an exact finite computation.
Gromov levels and flow times are integers (levels are ceil-rounded:
smaller sets, so containment certificates stay valid).

The separated set V0 is chosen greedily, but the greedy order is searched:
a maximal separated set can be locally too dense for the 5-dimensional
bound (a V0 vertex whose whole distance-2 sphere also lies in V0 puts
seven sets through one flow point), so deterministic candidate orders are
tried until the packing bound #(V0 in any open 3a-ball) <= 6 holds.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from .boundary import (FlowPoint, GromovPoint, VERTEX, flow_vertex,
                       geodesic_words, gromov_product_at, vertex_point)
from .errors import GeometryError
from .graphs import FiniteGraph
from .window import DeckElement, Word, tree_distance


# -- primitive regions ----------------------------------------------------


class GromovBall:
    """{zeta : (zeta, center)_{base} >= level}; open in the visual metric.

    Balls at a fixed basepoint and integer level are equal or disjoint, so
    (base, gate word) identifies the ball: the gate is the level-th vertex
    of the base ray toward the center when the center is deep enough, and
    the center itself otherwise (a singleton ball).
    """

    __slots__ = ("base", "center", "level")

    def __init__(self, base: Word, center: GromovPoint, level: int):
        self.base = base
        self.center = center
        self.level = int(level)

    def contains(self, p: GromovPoint) -> bool:
        return gromov_product_at(self.base, self.center, p) >= self.level

    def available_depth(self) -> float:
        """Arc length from the basepoint to the center."""
        path = geodesic_words(vertex_point(self.base), self.center)
        eff = len(path) - 1
        if self.center.kind == "mid":
            eff -= 0.5
        return eff

    def gate(self) -> Word | None:
        path = geodesic_words(vertex_point(self.base), self.center)
        if self.available_depth() < self.level:
            return None
        return path[self.level]

    def canonical_id(self):
        g = self.gate()
        if g is None:
            return ("singleton", self.base, self.center.word, self.center.kind,
                    self.level)
        return ("ball", self.base, g, self.level)

    def translate(self, g: DeckElement) -> "GromovBall":
        center, _ = self.center.translate(g)
        return GromovBall(g.act(self.base), center, self.level)


# -- cover sets ------------------------------------------------------------


class FlowCoverSet:
    """B_{3a}(v0) x ball_minus x ball_plus, cut to the flow space."""

    __slots__ = ("v0", "ball_minus", "ball_plus", "tree_radius")

    def __init__(self, v0: Word, ball_minus: GromovBall, ball_plus: GromovBall,
                 tree_radius: float):
        self.v0 = v0
        self.ball_minus = ball_minus
        self.ball_plus = ball_plus
        self.tree_radius = tree_radius

    def contains(self, fp: FlowPoint) -> bool:
        return (tree_distance(fp.v, self.v0) < self.tree_radius
                and self.ball_minus.contains(fp.xi_minus)
                and self.ball_plus.contains(fp.xi_plus))

    def canonical_id(self):
        return ("flow", self.v0, self.ball_minus.canonical_id(),
                self.ball_plus.canonical_id())

    def translate(self, g: DeckElement) -> "FlowCoverSet":
        return FlowCoverSet(g.act(self.v0), self.ball_minus.translate(g),
                            self.ball_plus.translate(g), self.tree_radius)


class PulledCoverSet:
    """iota^{-tau} of a flow set: {(v, xi) : Phi_tau(v, v, xi) in W}."""

    __slots__ = ("graph", "tau", "flow_set", "_slice_cache")

    def __init__(self, graph: FiniteGraph, tau: int, flow_set: FlowCoverSet):
        self.graph = graph
        self.tau = tau
        self.flow_set = flow_set
        self._slice_cache = {}

    def contains(self, v: Word, xi: GromovPoint) -> bool:
        if not xi.is_boundary:
            return False
        moved = flow_vertex(v, xi, self.tau)
        if tree_distance(moved, v) < self.tau:
            return False  # flow saturated: outside the finite model
        return self.flow_set.contains(FlowPoint(moved, vertex_point(v), xi))

    def slice_gates(self, v: Word):
        """Gate vertices describing the nonempty slice at v, else None.

        The slice at v is [v in ball_minus] * ball_plus * (union over gate
        vertices w at distance tau from v, within 3a of v0, of the rays
        through w); a gate survives only if some ideal boundary ray passes
        it while staying inside ball_plus.
        """
        if v in self._slice_cache:
            return self._slice_cache[v]
        result = None
        if self.flow_set.ball_minus.contains(vertex_point(v)):
            gates = []
            for w in tree_sphere(self.graph, v, self.tau):
                if tree_distance(w, self.flow_set.v0) < self.flow_set.tree_radius:
                    if joint_rays_exist(self.graph, v, w, self.flow_set.ball_plus):
                        gates.append(w)
            result = gates or None
        self._slice_cache[v] = result
        return result

    def projection(self, vertex_domain) -> set:
        return {v for v in vertex_domain if self.slice_gates(v) is not None}

    def canonical_id(self):
        return ("pull", self.tau, self.flow_set.canonical_id())

    def translate(self, g: DeckElement) -> "PulledCoverSet":
        return PulledCoverSet(self.graph, self.tau, self.flow_set.translate(g))


class ThickenedCoverSet:
    """A pulled set re-read over the compactification.

    Identical gate and ball parameters; membership now accepts vertex and
    midpoint kinds.  Only nonempty boundary slices are thickened, so the
    vertex projection is preserved exactly.
    """

    __slots__ = ("pulled",)

    def __init__(self, pulled: PulledCoverSet):
        self.pulled = pulled

    def contains(self, v: Word, xi: GromovPoint) -> bool:
        ps = self.pulled
        gates = ps.slice_gates(v)
        if gates is None:
            return False
        if not ps.flow_set.ball_plus.contains(xi):
            return False
        return any(passes_through(v, xi, w) for w in gates)

    def projection(self, vertex_domain) -> set:
        return self.pulled.projection(vertex_domain)

    def canonical_id(self):
        return ("thick",) + self.pulled.canonical_id()

    def translate(self, g: DeckElement) -> "ThickenedCoverSet":
        return ThickenedCoverSet(self.pulled.translate(g))


class BulkCoverSet:
    """B_R(center) x B_{2/3}(focus): the finite-part product sets."""

    __slots__ = ("center", "radius", "focus")

    def __init__(self, center: Word, radius: float, focus: Word):
        self.center = center
        self.radius = radius
        self.focus = focus

    def contains(self, v: Word, xi: GromovPoint) -> bool:
        if tree_distance(v, self.center) >= self.radius:
            return False
        return realization_distance(self.focus, xi) < 2.0 / 3.0

    def projection(self, vertex_domain) -> set:
        return {v for v in vertex_domain
                if tree_distance(v, self.center) < self.radius}

    def canonical_id(self):
        return ("bulk", self.center, self.focus)

    def translate(self, g: DeckElement) -> "BulkCoverSet":
        return BulkCoverSet(g.act(self.center), self.radius, g.act(self.focus))


# -- geometric helpers -------------------------------------------------------


def realization_distance(v: Word, p: GromovPoint) -> float:
    """Arc distance from a vertex to a finite point of the tree realization."""
    if p.is_boundary:
        return math.inf
    if p.kind == VERTEX:
        return float(tree_distance(v, p.word))
    far = tree_distance(v, p.word)
    near = tree_distance(v, p.word[:-1])
    return min(far, near) + 0.5


def tree_sphere(graph: FiniteGraph, v: Word, r: int) -> list:
    """Words at tree distance exactly r from v, in the ideal (untruncated) tree."""
    frontier = {v: None}
    for _ in range(r):
        nxt = {}
        for w, came in frontier.items():
            if len(w) >= 2 and w[:-1] != came:
                nxt.setdefault(w[:-1], w)
            prev = w[-2] if len(w) >= 2 else None
            for nbr in graph.adjacency[w[-1]]:
                if nbr != prev:
                    child = w + (nbr,)
                    if child != came:
                        nxt.setdefault(child, w)
        frontier = nxt
    return sorted(frontier)


def passes_through(v: Word, p: GromovPoint, gate: Word) -> bool:
    """Does the geodesic from v to p pass through (or end at) the gate?"""
    return gromov_product_at(v, vertex_point(gate), p) >= tree_distance(v, gate)


def joint_rays_exist(graph: FiniteGraph, v: Word, gate: Word,
                     ball_plus: GromovBall) -> bool:
    """Is some ideal boundary ray through the gate (seen from v) in ball_plus?"""
    bid = ball_plus.canonical_id()
    if bid[0] == "singleton":
        center = ball_plus.center
        return center.is_boundary and passes_through(v, center, gate)
    constraints = [(v, gate), (ball_plus.base, bid[2])]
    return cylinders_satisfiable(graph, constraints)


def cylinders_satisfiable(graph: FiniteGraph, pass_constraints) -> bool:
    """Can one ideal boundary ray satisfy all (viewpoint, gate) constraints?

    A pass-through constraint is a positive cylinder (rays whose base word
    extends the gate word) when the gate is not an ancestor of the
    viewpoint, and otherwise forbids the subtree of the viewpoint-side
    child of the gate.  Rays extend forever exactly when the graph has
    minimum degree >= 2 (enforced by the pipeline entry points).
    """
    positives, negatives = [], []
    base_word = pass_constraints[0][0][:1]
    for view, gate in pass_constraints:
        cp = _cpl(view, gate)
        if cp == len(gate):  # ancestor (or equal)
            if len(gate) < len(view):
                negatives.append(view[:len(gate) + 1])
        else:
            positives.append(gate)
    stem = max(positives, key=len, default=base_word)
    for p in positives:
        if _cpl(p, stem) != len(p):
            return False  # incompatible positive cylinders
    for nw in negatives:
        if len(nw) <= len(stem) and _cpl(nw, stem) == len(nw):
            return False  # the stem itself sits in a forbidden subtree
    horizon = max([len(n) for n in negatives] + [len(stem)]) + 1
    return _extend_avoiding(graph, stem, negatives, horizon)


def _cpl(a, b) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


def _extend_avoiding(graph, word, forbidden, horizon) -> bool:
    if len(word) >= horizon:
        return True
    prev = word[-2] if len(word) >= 2 else None
    for nbr in graph.adjacency[word[-1]]:
        if nbr == prev:
            continue
        child = word + (nbr,)
        if any(len(f) <= len(child) and _cpl(child, f) == len(f)
               for f in forbidden):
            continue
        if _extend_avoiding(graph, child, forbidden, horizon):
            return True
    return False


# -- families ---------------------------------------------------------------


@dataclass
class CoverFamily:
    """A finite materialization of a (conceptually infinite) invariant cover.

    ``sets`` holds the members relevant to the sampled window region,
    deduplicated by canonical id.  Dimension and containment queries take
    explicit point samples and are exact for the points supplied.
    """

    kind: str
    alpha: float
    sets: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._ids = {s.canonical_id() for s in self.sets}

    def add(self, s) -> bool:
        cid = s.canonical_id()
        if cid in self._ids:
            return False
        self._ids.add(cid)
        self.sets.append(s)
        return True

    def has_id(self, cid) -> bool:
        return cid in self._ids

    def __len__(self):
        return len(self.sets)


# -- separated sets -----------------------------------------------------------


def separated_set(graph: FiniteGraph, separation: float, order) -> list:
    chosen = []
    for v in order:
        if all(graph.distance(v, u) >= separation for u in chosen):
            chosen.append(v)
    return sorted(chosen)


def packing_count(graph: FiniteGraph, chosen, radius: float) -> int:
    return max(sum(1 for u in chosen if graph.distance(v, u) < radius)
               for v in range(graph.n))


def choose_separated_set(graph: FiniteGraph, alpha: float,
                         max_orders: int = 64) -> list:
    """Maximal 2a-separated vertex set with open-3a-ball packing <= 6.

    Greedy maximality guarantees coverage within 2a; the packing bound is
    not automatic, so deterministic alternative greedy orders are tried
    until one passes.
    """
    n = graph.n
    orders = [list(range(n))]
    orders += [[(i + s) % n for i in range(n)] for s in range(1, min(n, 16))]
    rng = random.Random(314159)
    while len(orders) < max_orders:
        perm = list(range(n))
        rng.shuffle(perm)
        orders.append(perm)
    for order in orders:
        chosen = separated_set(graph, 2 * alpha, order)
        if packing_count(graph, chosen, 3 * alpha) <= 6:
            return chosen
    raise GeometryError(
        "no maximal separated set with the required packing bound was found "
        f"within {max_orders} greedy orders", witness=(graph.name, alpha))
