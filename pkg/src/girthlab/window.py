"""Truncated universal covers of finite graphs and their deck actions.

A window vertex is a non-backtracking path from the base vertex, stored as
the tuple of graph vertices it visits; the empty path is ``(base,)``.  The
set of all such paths of length <= radius is a tree, and the covering map
sends a path to its final vertex.  Deck transformations are reduced closed
paths at the base, acting by concatenate-and-reduce; word arithmetic works
on arbitrary paths, so deck translates remain meaningful beyond the window
truncation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ConfigError, GeometryError, IngestionError, ResourceLimitError
from .graphs import FiniteGraph, diameter, girth

Word = tuple  # vertex tuple, word[0] == base


def reduce_path(seq) -> Word:
    """Remove immediate backtracks (x, y, x) -> (x) until none remain."""
    out = []
    for v in seq:
        if len(out) >= 2 and out[-2] == v:
            out.pop()
        else:
            out.append(v)
    return tuple(out)


def word_depth(w: Word) -> int:
    return len(w) - 1


def common_prefix_edges(a: Word, b: Word) -> int:
    """Number of shared initial edges of two words from the same base."""
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k - 1


def tree_distance(a: Word, b: Word) -> int:
    cp = common_prefix_edges(a, b)
    return (word_depth(a) - cp) + (word_depth(b) - cp)


def meet_depth(a: Word, b: Word) -> int:
    """Depth of the deepest common ancestor of two words."""
    return common_prefix_edges(a, b)


class DeckElement:
    """A deck transformation: a reduced closed edge-path at the base.

    Equality is word equality after reduction; the identity is the empty
    loop.  Elements act on window words by concatenate-and-reduce.
    """

    __slots__ = ("word",)

    def __init__(self, word):
        word = reduce_path(word)
        if word[0] != word[-1]:
            raise GeometryError("deck element must be a closed path at base")
        self.word = word

    @property
    def is_identity(self) -> bool:
        return len(self.word) == 1

    def act(self, w: Word) -> Word:
        if w[0] != self.word[-1]:
            raise GeometryError("word is not based where the loop ends")
        return reduce_path(self.word + w[1:])

    def inverse(self) -> "DeckElement":
        return DeckElement(self.word[::-1])

    def compose(self, other: "DeckElement") -> "DeckElement":
        """self * other: first traverse self, then other."""
        return DeckElement(reduce_path(self.word + other.word[1:]))

    def __eq__(self, other):
        return isinstance(other, DeckElement) and self.word == other.word

    def __hash__(self):
        return hash(self.word)

    def __repr__(self):
        return f"DeckElement({'-'.join(map(str, self.word))})"


class CoverWindow:
    """Radius-R truncation of the universal cover of a finite graph."""

    def __init__(self, graph: FiniteGraph, base: int, radius: int,
                 max_vertices: int = 500_000):
        if radius < 1:
            raise ConfigError("window radius must be >= 1")
        if not (0 <= base < graph.n):
            raise ConfigError(f"base vertex {base} out of range")
        k = max(graph.degrees())
        estimate = 1 + k * sum((k - 1) ** i for i in range(radius))
        if estimate > max_vertices:
            raise ResourceLimitError(
                f"window of radius {radius} on a degree-{k} graph holds up to "
                f"~{estimate} vertices, beyond the budget of {max_vertices}")
        self.graph = graph
        self.base = base
        self.radius = radius
        root = (base,)
        words = [root]
        frontier = [root]
        for _ in range(radius):
            nxt = []
            for w in frontier:
                last = w[-1]
                prev = w[-2] if len(w) >= 2 else None
                for nbr in graph.adjacency[last]:
                    if nbr != prev:
                        nxt.append(w + (nbr,))
            words.extend(nxt)
            frontier = nxt
        words.sort(key=lambda w: (len(w), w))  # canonical, schedule-independent
        if len(words) > max_vertices:
            raise ResourceLimitError(
                f"window has {len(words)} vertices, beyond {max_vertices}")
        self.words = words
        self.index = {w: i for i, w in enumerate(words)}
        self._qmap = None

    # -- basic queries ---------------------------------------------------

    def __len__(self):
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self.index

    def covering_image(self, w: Word) -> int:
        return w[-1]

    def tree_edges(self):
        """Path-extension pairs (parent word, child word)."""
        for w in self.words:
            if len(w) >= 2:
                yield w[:-1], w

    def check_tree(self) -> bool:
        n_edges = sum(1 for _ in self.tree_edges())
        return len(self.words) == n_edges + 1

    def rim_words(self):
        return [w for w in self.words if word_depth(w) == self.radius]

    def as_graph(self) -> FiniteGraph:
        """The window tree as a FiniteGraph on word indices."""
        edges = [(self.index[p], self.index[c]) for p, c in self.tree_edges()]
        return FiniteGraph(len(self.words), edges,
                           name=f"window({self.graph.name},r={self.radius})")

    # -- deck structure ---------------------------------------------------

    def q_map(self) -> "QMap":
        if self._qmap is None:
            self._qmap = QMap(self)
        return self._qmap

    def deck_elements(self, include_identity: bool = False) -> list[DeckElement]:
        """Distinct deck elements arising as q-values of window vertices."""
        q = self.q_map()
        seen = {}
        for w in self.words:
            g = q.value(w)
            seen.setdefault(g.word, g)
        out = [g for g in seen.values() if include_identity or not g.is_identity]
        return sorted(out, key=lambda g: (len(g.word), g.word))


class QMap:
    """Equivariant assignment of deck elements to cover vertices.

    The fundamental domain is the lift at base of a BFS spanning tree of the
    graph; q(w) is the loop (w followed by the reversed tree path of its
    covering image), so q(g.w) = g * q(w) holds by construction and
    q^{-1}(identity) is exactly the lifted tree.
    """

    def __init__(self, window: CoverWindow):
        g = window.graph
        parent = [-1] * g.n
        order = [window.base]
        seen = {window.base}
        queue = deque([window.base])
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    parent[v] = u
                    order.append(v)
                    queue.append(v)
        tree_words = {}
        for u in order:
            if u == window.base:
                tree_words[u] = (u,)
            else:
                tree_words[u] = tree_words[parent[u]] + (u,)
        self.window = window
        self.tree_words = tree_words
        self.domain = sorted(tree_words.values(), key=lambda w: (len(w), w))

    def value(self, w: Word) -> DeckElement:
        back = self.tree_words[w[-1]][::-1]
        return DeckElement(reduce_path(w + back[1:]))

    def domain_diameter(self) -> int:
        words = self.domain
        return max(tree_distance(a, b) for a in words for b in words)

    def check_equivariance(self, elements=None) -> list:
        """Witness list of (g, w) with q(g.w) != g*q(w); empty when verified.

        Checked for every window word and every supplied deck element (all
        in-window q-values by default); translates may leave the window,
        word arithmetic still applies.
        """
        if elements is None:
            elements = self.window.deck_elements()
        bad = []
        for g in elements:
            for w in self.window.words:
                lhs = self.value(g.act(w))
                rhs = g.compose(self.value(w))
                if lhs != rhs:
                    bad.append((g, w))
        return bad


# -- asymptotic faithfulness -------------------------------------------


@dataclass
class FaithfulnessReport:
    ball_radius: int
    centers_checked: int
    pairs_checked: int
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


def check_asymptotic_faithfulness(window: CoverWindow,
                                  ball_radius: int | None = None) -> FaithfulnessReport:
    """Exhaustive isometry check of the covering map on small balls.

    For every ball of the given radius (default floor(girth/4)) centered in
    the inner window, every vertex pair must satisfy
    d_tree(x, y) == d_graph(p(x), p(y)).  Violating pairs are reported.
    """
    g = window.graph
    gr = girth(g)
    if ball_radius is None:
        if gr == float("inf"):
            ball_radius = window.radius
        else:
            ball_radius = int(gr // 4)
    if window.radius < ball_radius:
        raise ConfigError(
            f"window radius {window.radius} is smaller than the required "
            f"ball radius {ball_radius}")
    violations = []
    pairs = 0
    centers = [w for w in window.words
               if word_depth(w) <= window.radius - ball_radius]
    for center in centers:
        ball = [w for w in window.words
                if tree_distance(center, w) <= ball_radius]
        for i, x in enumerate(ball):
            for y in ball[i + 1:]:
                pairs += 1
                dt = tree_distance(x, y)
                dg = g.distance(x[-1], y[-1])
                if dt != dg:
                    violations.append((center, x, y, dt, dg))
    return FaithfulnessReport(ball_radius, len(centers), pairs, violations)


# -- line-oriented export ----------------------------------------------


def format_window(window: CoverWindow) -> str:
    """Vertex table (index, path word, covering image) plus edge table."""
    lines = [f"# window base={window.base} radius={window.radius} "
             f"graph={window.graph.name or 'graph'}"]
    for i, w in enumerate(window.words):
        lines.append(f"vertex {i} {'-'.join(map(str, w))} {w[-1]}")
    for p, c in window.tree_edges():
        lines.append(f"edge {window.index[p]} {window.index[c]}")
    return "\n".join(lines) + "\n"


def parse_window(text: str, graph: FiniteGraph) -> CoverWindow:
    """Rebuild a window from its export; validates against the graph."""
    base = radius = None
    words = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            for part in line[1:].split():
                if part.startswith("base="):
                    base = int(part[5:])
                elif part.startswith("radius="):
                    radius = int(part[7:])
            continue
        if not line:
            continue
        fields = line.split()
        if fields[0] == "vertex":
            word = tuple(int(x) for x in fields[2].split("-"))
            if int(fields[3]) != word[-1]:
                raise IngestionError(f"line {lineno}: covering image mismatch")
            words.append(word)
        elif fields[0] != "edge":
            raise IngestionError(f"line {lineno}: unknown record {fields[0]!r}")
    if base is None or radius is None:
        raise IngestionError("missing window header")
    window = CoverWindow(graph, base, radius)
    if sorted(words) != sorted(window.words):
        raise IngestionError("vertex table does not match the rebuilt window")
    return window
