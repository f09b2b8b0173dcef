"""Gromov boundary of the cover tree, at finite resolution.

Points of the compactified tree are represented by access words from the
base vertex:

* ``ray``    -- a non-backtracking path of full depth N; stands for the
  boundary point it converges to, distinguishable from its neighbours
  exactly when they diverge before depth N.
* ``vertex`` -- an eventually-constant ray, identified with its endpoint.
* ``mid``    -- the midpoint of the final edge of its word (used by the
  cover samplers; the effective depth is a half-integer).

The Gromov product of two distinct points is the length of the common
prefix of their access words, capped by either effective depth; identical
points have product +inf.  Rebasing to an arbitrary window vertex is pure
word arithmetic, so products at any basepoint stay exact (integers and
half-integers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GeometryError
from .window import (CoverWindow, DeckElement, Word, common_prefix_edges,
                     reduce_path, tree_distance, word_depth)

RAY = "ray"
VERTEX = "vertex"
MID = "mid"


@dataclass(frozen=True)
class GromovPoint:
    """A point of the compactified cover tree, as an access word from base."""

    word: Word
    kind: str = RAY

    def __post_init__(self):
        if self.kind not in (RAY, VERTEX, MID):
            raise GeometryError(f"unknown point kind {self.kind!r}")
        if self.kind == MID and len(self.word) < 2:
            raise GeometryError("edge midpoint needs a word of depth >= 1")

    @property
    def depth(self) -> int:
        return word_depth(self.word)

    @property
    def effective_depth(self) -> float:
        """Arc length from base to the point (N for rays)."""
        if self.kind == MID:
            return self.depth - 0.5
        return self.depth

    @property
    def is_boundary(self) -> bool:
        return self.kind == RAY

    def translate(self, g: DeckElement, clamp: int | None = None):
        """Deck translate; rays may shrink or grow, optionally re-clamped.

        Returns (point, clamped) where ``clamped`` flags a ray that had to
        be truncated back to ``clamp``; truncation loses resolution and is
        surfaced as a diagnostic by the metric code.
        """
        word = g.act(self.word)
        clamped = False
        if self.kind == RAY and clamp is not None and word_depth(word) > clamp:
            word = word[:clamp + 1]
            clamped = True
        return GromovPoint(word, self.kind), clamped

    def __repr__(self):
        tail = {RAY: "...", VERTEX: "", MID: "+1/2"}[self.kind]
        return f"<{'-'.join(map(str, self.word))}{tail}>"


def vertex_point(word: Word) -> GromovPoint:
    return GromovPoint(word, VERTEX)


def ray_point(word: Word) -> GromovPoint:
    return GromovPoint(word, RAY)


def midpoint(word: Word) -> GromovPoint:
    return GromovPoint(word, MID)


def boundary_rays(window: CoverWindow, depth: int | None = None,
                  limit: int | None = None, seed: int = 0) -> list[GromovPoint]:
    """Depth-N rays of the window, canonically ordered.

    With ``limit``, a deterministic evenly-spread subsample (stride over the
    sorted list, offset by the seed) is returned instead of all rays.
    """
    depth = window.radius if depth is None else depth
    words = sorted(w for w in window.words if word_depth(w) == depth)
    if limit is not None and len(words) > limit:
        stride = len(words) / limit
        offset = seed % max(1, int(stride))
        words = [words[min(len(words) - 1, int(i * stride) + offset)]
                 for i in range(limit)]
        words = sorted(set(words))
    return [GromovPoint(w, RAY) for w in words]


# -- Gromov products ----------------------------------------------------


def gromov_product_base(a: GromovPoint, b: GromovPoint) -> float:
    """(a, b) at the base vertex; +inf for identical points."""
    if a == b:
        return math.inf
    cp = common_prefix_edges(a.word, b.word)
    return min(a.effective_depth, b.effective_depth, cp)


def gromov_product_at(w: Word, a: GromovPoint, b: GromovPoint) -> float:
    """(a, b) at window vertex w, by rebasing the access words.

    The w-ray to a point climbs to the meet with its word, then follows the
    word down; two rebased rays share their climb up to the shorter one and
    possibly a common descent afterwards.
    """
    if a == b:
        return math.inf
    dw = word_depth(w)
    climb_a, rem_a, turn_a = _ray_from(w, a)
    climb_b, rem_b, turn_b = _ray_from(w, b)
    if climb_a != climb_b:
        return min(climb_a, climb_b)
    # equal climb: both turn off the ancestor chain at the same spot
    if turn_a != turn_b:  # only possible via fractional stop positions
        return min(climb_a, climb_b)
    down = min(gromov_product_base(a, b) - turn_a, rem_a, rem_b)
    return climb_a + max(0.0, down)


def _ray_from(w: Word, p: GromovPoint):
    """(climb length, remaining descent, turnoff depth) of the w-ray to p."""
    dm = common_prefix_edges(w, p.word)
    eff = p.effective_depth
    turn = min(dm, eff)
    climb = word_depth(w) - turn
    rem = max(0.0, eff - dm)
    return climb, rem, dm


def gromov_product(xi: GromovPoint, zeta: GromovPoint,
                   v: Word | None = None) -> float:
    """Spec-facing product: clamped at the available ray resolution.

    Identical rays report their depth N (the resolution floor of the
    truncation), not infinity; identical vertex points report +inf since
    they are genuinely the same point of the finite model.
    """
    if xi == zeta and xi.kind == RAY:
        if v is None:
            return float(xi.depth)
        climb, rem, _ = _ray_from(v, xi)
        return climb + rem  # all the agreement the truncation can certify
    if v is None:
        return gromov_product_base(xi, zeta)
    return gromov_product_at(v, xi, zeta)


def visual_metric(xi: GromovPoint, zeta: GromovPoint,
                  v: Word | None = None) -> float:
    """e^{-(xi, zeta)} at the base (or at v).

    Identical rays get e^{-N}: the truncation cannot distinguish them from
    rays diverging after depth N, so the value is a resolution floor rather
    than a true zero.  Identical vertex points get exactly 0.
    """
    p = gromov_product(xi, zeta, v)
    if p == math.inf:
        return 0.0
    return math.exp(-p)


def point_metric(a: GromovPoint, b: GromovPoint) -> float:
    """Metric used inside d_C tables: 0 iff same canonical point.

    Unlike ``visual_metric`` this treats equal ray words as the same point
    (distance 0) so that equal-boundary identities of the hybrid metric
    hold exactly.
    """
    if a == b:
        return 0.0
    return math.exp(-gromov_product_base(a, b))


# -- flow space ----------------------------------------------------------


@dataclass(frozen=True)
class FlowPoint:
    """(v, xi_minus, xi_plus) with v on the geodesic xi_minus -> xi_plus."""

    v: Word
    xi_minus: GromovPoint
    xi_plus: GromovPoint

    def __post_init__(self):
        if geodesic_position(self.v, self.xi_minus, self.xi_plus) is None:
            raise GeometryError(
                "vertex does not lie on the geodesic between the endpoints",
                witness=(self.v, self.xi_minus, self.xi_plus))


def geodesic_position(v: Word, xi_minus: GromovPoint,
                      xi_plus: GromovPoint) -> float | None:
    """Arc-length coordinate of v on the xi_minus -> xi_plus geodesic.

    None when v is not on the geodesic, or the endpoints coincide.  The
    geodesic runs from the minus word down to the meet and back up the plus
    word; endpoints of kind ``vertex`` bound it, rays extend it to depth N.
    """
    if xi_minus == xi_plus:
        return None
    a, b = xi_minus.word, xi_plus.word
    md = common_prefix_edges(a, b)
    dv = word_depth(v)
    la, lb = word_depth(a), word_depth(b)
    on_minus = common_prefix_edges(v, a) == dv and md <= dv <= la
    on_plus = common_prefix_edges(v, b) == dv and md <= dv <= lb
    if not (on_minus or on_plus):
        return None
    if on_minus:
        return float(la - dv)
    return float((la - md) + (dv - md))


def flow(p: FlowPoint, tau: int) -> FlowPoint:
    """Move v |tau| steps along the geodesic toward xi_{sign(tau)}.

    Saturates at the stored endpoint when |tau| exceeds the remaining
    length: the finite stand-in for flowing all the way to the boundary
    point.
    """
    if tau == 0:
        return p
    a, b = p.xi_minus.word, p.xi_plus.word
    md = common_prefix_edges(a, b)
    total = (word_depth(a) - md) + (word_depth(b) - md)
    s = geodesic_position(p.v, p.xi_minus, p.xi_plus)
    s_new = min(total, max(0, int(s) + tau))
    la = word_depth(a)
    if s_new <= la - md:
        v_new = a[:la - s_new + 1]
    else:
        v_new = b[:md + (s_new - (la - md)) + 1]
    return FlowPoint(v_new, p.xi_minus, p.xi_plus)


def flow_vertex(v: Word, xi: GromovPoint, tau: int) -> Word:
    """phi_tau(v) for the flow point (v, v, xi): tau steps from v toward xi.

    This is the vertex component of Phi_tau(v, v, xi) used by cover
    pull-backs; saturates at the end of the available word.
    """
    fp = FlowPoint(v, vertex_point(v), xi)
    return flow(fp, tau).v


def geodesic_words(xi_minus: GromovPoint, xi_plus: GromovPoint) -> list[Word]:
    """All vertices (as words) on the geodesic between two distinct points."""
    a, b = xi_minus.word, xi_plus.word
    md = common_prefix_edges(a, b)
    out = [a[:i + 1] for i in range(word_depth(a), md - 1, -1)]
    out += [b[:i + 1] for i in range(md + 1, word_depth(b) + 1)]
    return out
