"""Finite simple graphs with the path metric, girth machinery, and test families.

Vertices are integers 0..n-1.  All graphs are validated to be simple and
connected on construction; the path metric, girth and diameter are then
total functions.  Girth is the length of a shortest cycle, ``math.inf`` for
trees (a distinguished non-integer value, never a sentinel integer).

The generator side provides a small catalog of named graphs (cycles and the
classical small cages) plus a seeded random regular generator with a girth
floor.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from .errors import ConfigError, IngestionError, ResourceLimitError

INFINITE = math.inf


class FiniteGraph:
    """A finite simple connected graph with cached path-metric queries."""

    def __init__(self, n: int, edges, name: str = ""):
        if n <= 0:
            raise IngestionError("graph needs at least one vertex")
        adjacency = [[] for _ in range(n)]
        edge_set = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise IngestionError(f"edge ({u}, {v}) out of range for {n} vertices")
            if u == v:
                raise IngestionError(f"loop edge at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in edge_set:
                raise IngestionError(f"duplicate edge ({u}, {v})")
            edge_set.add(key)
        for u, v in sorted(edge_set):
            adjacency[u].append(v)
            adjacency[v].append(u)
        self.n = n
        self.edges = sorted(edge_set)
        self.adjacency = [tuple(sorted(nbrs)) for nbrs in adjacency]
        self.name = name
        self._dist = None
        self._girth = None
        if n > 1 and not self._connected():
            raise IngestionError("graph is not connected")

    def _connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n

    # -- path metric ---------------------------------------------------

    def bfs_distances(self, source: int) -> list[int]:
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    @property
    def distance_matrix(self) -> list[list[int]]:
        if self._dist is None:
            self._dist = [self.bfs_distances(s) for s in range(self.n)]
        return self._dist

    def distance(self, u: int, v: int) -> int:
        return self.distance_matrix[u][v]

    def geodesic(self, u: int, v: int) -> tuple[int, ...]:
        """The unique shortest u-v path, as a vertex tuple.

        Uniqueness holds whenever 2*d(u,v) < girth; no check is made here,
        callers below half-girth scale rely on it.
        """
        dist_v = self.distance_matrix[v]
        path = [u]
        cur = u
        while cur != v:
            cur = min(w for w in self.adjacency[cur] if dist_v[w] == dist_v[cur] - 1)
            path.append(cur)
        return tuple(path)

    def degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.adjacency]

    def __repr__(self):
        label = self.name or "graph"
        return f"FiniteGraph({label}, n={self.n}, m={len(self.edges)})"


# -- girth and diameter -----------------------------------------------


def girth(g: FiniteGraph) -> float:
    """Length of a shortest cycle; ``math.inf`` if the graph is a tree.

    BFS from every vertex: the first non-tree edge closure seen from root r
    yields a closed walk of length dist[u]+dist[v]+1, always >= girth, and
    equal to it when r lies on a shortest cycle.
    """
    if g._girth is not None:
        return g._girth
    best = INFINITE
    for root in range(g.n):
        dist = [-1] * g.n
        parent = [-1] * g.n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break
            for v in g.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif v != parent[u]:
                    cycle = dist[u] + dist[v] + 1
                    if cycle < best:
                        best = cycle
    g._girth = best
    return best


def girth_by_enumeration(g: FiniteGraph, max_length: int | None = None) -> float:
    """Oracle girth: exhaustive search over simple cycles.

    Enumerates simple paths by DFS from each start vertex (start = smallest
    vertex on the cycle, second vertex < last to kill orientation doubles)
    and records closures back to the start.  Exponential; intended for the
    <= 30 vertex catalog only.
    """
    limit = max_length if max_length is not None else g.n
    best = INFINITE

    def extend(start, path, on_path):
        nonlocal best
        if len(path) > limit or len(path) >= best:
            return
        u = path[-1]
        for v in g.adjacency[u]:
            if v == start and len(path) >= 3:
                if len(path) > 3 and path[1] > path[-1]:
                    continue  # canonical orientation only
                best = min(best, len(path))
            elif v > start and v not in on_path:
                path.append(v)
                on_path.add(v)
                extend(start, path, on_path)
                on_path.discard(v)
                path.pop()

    for start in range(g.n):
        extend(start, [start], {start})
    return best


def diameter(g: FiniteGraph) -> int:
    """Maximum path distance over all vertex pairs (graphs are connected)."""
    return max(max(row) for row in g.distance_matrix)


# -- catalog ----------------------------------------------------------


def _lcf_graph(n: int, pattern: list[int], name: str) -> FiniteGraph:
    """Hamiltonian cubic graph in LCF notation: an n-cycle plus chords."""
    edges = [(i, (i + 1) % n) for i in range(n)]
    reps = n // len(pattern)
    offsets = pattern * reps
    for i, off in enumerate(offsets):
        j = (i + off) % n
        if (min(i, j), max(i, j)) not in {(min(a, b), max(a, b)) for a, b in edges}:
            edges.append((i, j))
    return FiniteGraph(n, edges, name=name)


def cycle_graph(n: int) -> FiniteGraph:
    if n < 3:
        raise ConfigError("cycle needs at least 3 vertices")
    return FiniteGraph(n, [(i, (i + 1) % n) for i in range(n)], name=f"cycle({n})")


def path_graph(n: int) -> FiniteGraph:
    if n < 1:
        raise ConfigError("path needs at least 1 vertex")
    return FiniteGraph(n, [(i, i + 1) for i in range(n - 1)], name=f"path({n})")


def petersen_graph() -> FiniteGraph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i + 5, ((i + 2) % 5) + 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return FiniteGraph(10, edges, name="petersen")


def heawood_graph() -> FiniteGraph:
    return _lcf_graph(14, [5, -5], name="heawood")


def mcgee_graph() -> FiniteGraph:
    return _lcf_graph(24, [12, 7, -7], name="mcgee")


def tutte_coxeter_graph() -> FiniteGraph:
    return _lcf_graph(30, [-13, -9, 7, -7, 9, 13], name="tutte-coxeter")


CATALOG = {
    "petersen": petersen_graph,
    "heawood": heawood_graph,
    "mcgee": mcgee_graph,
    "tutte-coxeter": tutte_coxeter_graph,
}


def generate(name: str) -> FiniteGraph:
    """Build a catalog graph from its id: cycle(n), path(n), or a cage name."""
    key = name.strip().lower()
    if key.startswith("cycle(") and key.endswith(")"):
        return cycle_graph(int(key[6:-1]))
    if key.startswith("path(") and key.endswith(")"):
        return path_graph(int(key[5:-1]))
    if key in CATALOG:
        return CATALOG[key]()
    raise ConfigError(f"unknown catalog id {name!r}; known: "
                      f"cycle(n), path(n), {', '.join(sorted(CATALOG))}")


# -- random regular graphs with a girth floor --------------------------


def random_regular_graph(k: int, n: int, min_girth: int = 3, seed: int = 0,
                         budget: int = 200) -> FiniteGraph:
    """Seeded k-regular graph on n vertices with girth >= min_girth.

    Pairing-model rejection first; if a sample comes out simple and
    connected but with short cycles, a 2-swap repair pass breaks shortest
    cycles until the girth floor is met.  Deterministic for a fixed seed.
    Raises ResourceLimitError naming the budget when no attempt succeeds.
    """
    if k * n % 2 != 0:
        raise ConfigError(f"no {k}-regular graph on {n} vertices (odd degree sum)")
    if k >= n:
        raise ConfigError("degree must be smaller than vertex count")
    rng = random.Random(seed)
    for attempt in range(budget):
        g = _pairing_sample(k, n, rng)
        if g is None:
            continue
        g = _swap_repair(g, min_girth, rng, max_swaps=12 * n)
        if g is not None and girth(g) >= min_girth:
            g.name = f"random({k}-regular,n={n},girth>={min_girth},seed={seed})"
            return g
    raise ResourceLimitError(
        f"could not reach girth >= {min_girth} for a {k}-regular graph on "
        f"{n} vertices within the retry budget of {budget} attempts")


def _pairing_sample(k: int, n: int, rng: random.Random) -> FiniteGraph | None:
    stubs = [v for v in range(n) for _ in range(k)]
    rng.shuffle(stubs)
    edges = set()
    for i in range(0, len(stubs), 2):
        u, v = stubs[i], stubs[i + 1]
        if u == v:
            return None
        key = (min(u, v), max(u, v))
        if key in edges:
            return None
        edges.add(key)
    try:
        return FiniteGraph(n, sorted(edges))
    except IngestionError:
        return None


def _shortest_cycle_edges(g: FiniteGraph) -> list[tuple[int, int]] | None:
    """Edges of one shortest cycle, or None for a forest."""
    best = None
    for root in range(g.n):
        dist = [-1] * g.n
        parent = [-1] * g.n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif v != parent[u]:
                    length = dist[u] + dist[v] + 1
                    if best is None or length < best[0]:
                        best = (length, root, u, v, parent[:])
    if best is None:
        return None
    _, root, u, v, parent = best
    def up(x):
        path = [x]
        while path[-1] != root:
            path.append(parent[path[-1]])
        return path
    pu, pv = up(u), up(v)
    walk = pu[::-1] + pv + [u]  # closed walk containing the cycle
    cyc = []
    for a, b in zip(walk, walk[1:]):
        cyc.append((min(a, b), max(a, b)))
    return cyc


def _short_cycle_score(n: int, edges, cap: int) -> tuple[int, int]:
    """(shortest cycle length clamped to cap, count of closures at that length).

    Cheap hill-climbing score: closure counts over all BFS roots are a proxy
    for the number of shortest cycles, good enough to order candidate swaps.
    """
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    best = cap
    count = 0
    for root in range(n):
        dist = [-1] * n
        parent = [-1] * n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best + 1:
                break
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif v != parent[u]:
                    length = dist[u] + dist[v] + 1
                    if length < best:
                        best = length
                        count = 1
                    elif length == best:
                        count += 1
    return best, count


def _swap_repair(g: FiniteGraph, min_girth: int, rng: random.Random,
                 max_swaps: int) -> FiniteGraph | None:
    """Break short cycles with degree-preserving 2-swaps (hill climbing).

    Each move evaluates a bounded random sample of candidate swaps and takes
    the best scoring one; a plateau triggers a random kick.  Connectivity is
    only checked on the candidate actually taken.
    """
    edges = set(g.edges)
    n = g.n

    def score(es):
        length, closures = _short_cycle_score(n, es, min_girth)
        return (-length, closures)  # lower is better

    current_score = score(edges)
    for _ in range(max_swaps):
        if current_score[0] <= -min_girth:
            if _is_connected(n, edges):
                return FiniteGraph(n, sorted(edges))
            return None
        cyc = _shortest_cycle_edges(FiniteGraph(n, sorted(edges)))
        pool = sorted(edges)
        taken = None
        for _ in range(40):  # first acceptable candidate wins
            a, b = cyc[rng.randrange(len(cyc))]
            c, d = pool[rng.randrange(len(pool))]
            if len({a, b, c, d}) < 4:
                continue
            x, y = rng.choice((((a, c), (b, d)), ((a, d), (b, c))))
            e1, e2 = (min(x), max(x)), (min(y), max(y))
            if e1 in edges or e2 in edges:
                continue
            trial = (edges - {(a, b), (c, d)}) | {e1, e2}
            trial_score = score(trial)
            if trial_score < current_score or (
                    trial_score == current_score and rng.random() < 0.2):
                if _is_connected(n, trial):
                    taken = (trial, trial_score)
                    break
        if taken is not None:
            edges, current_score = taken
        else:
            kicked = _random_swap(edges, n, rng)
            if kicked is None:
                return None
            edges = kicked
            current_score = score(edges)
    return None


def _random_swap(edges: set, n: int, rng: random.Random) -> set | None:
    pool = sorted(edges)
    for _ in range(80):
        (a, b), (c, d) = rng.sample(pool, 2)
        if len({a, b, c, d}) < 4:
            continue
        pairs = [((a, c), (b, d)), ((a, d), (b, c))]
        rng.shuffle(pairs)
        for x, y in pairs:
            e1, e2 = (min(x), max(x)), (min(y), max(y))
            if e1 in edges or e2 in edges:
                continue
            trial = (edges - {(a, b), (c, d)}) | {e1, e2}
            if _is_connected(n, trial):
                return trial
    return None


def _is_connected(n: int, edges) -> bool:
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == n


# -- families ----------------------------------------------------------


@dataclass
class GraphFamily:
    """An ordered finite prefix of a space of graphs.

    ``is_large_girth_prefix`` checks the finite witness of the large-girth
    condition: component girths are nondecreasing along the declared order.
    Components are metrically independent (cross-component distance is
    treated as infinite), so every other query delegates per component.
    """

    components: list[FiniteGraph] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.labels) != len(self.components):
            self.labels = [g.name or f"component-{i}"
                           for i, g in enumerate(self.components)]

    def girths(self) -> list[float]:
        return [girth(g) for g in self.components]

    def is_large_girth_prefix(self) -> bool:
        gs = self.girths()
        return all(a <= b for a, b in zip(gs, gs[1:]))

    def degree_bound(self) -> int:
        """Uniform degree bound: the formal content of bounded geometry."""
        return max(max(g.degrees()) for g in self.components)


# -- edge-list text interface ------------------------------------------


def parse_edge_list(text: str, name: str = "") -> FiniteGraph:
    """Parse 'u v' lines (0-based ids, '#' comments) into a graph.

    Duplicate and loop edges are rejected with the offending line number.
    """
    edges = []
    max_vertex = -1
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise IngestionError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise IngestionError(f"line {lineno}: non-integer vertex id in {raw!r}")
        if u < 0 or v < 0:
            raise IngestionError(f"line {lineno}: negative vertex id")
        if u == v:
            raise IngestionError(f"line {lineno}: loop edge at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise IngestionError(
                f"line {lineno}: duplicate of edge first seen on line {seen[key]}")
        seen[key] = lineno
        edges.append(key)
        max_vertex = max(max_vertex, u, v)
    if not edges:
        raise IngestionError("no edges found")
    return FiniteGraph(max_vertex + 1, edges, name=name)


def format_edge_list(g: FiniteGraph) -> str:
    lines = [f"# {g.name or 'graph'}: {g.n} vertices, {len(g.edges)} edges"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"
