"""Convex polyhedral Cauchy surfaces from light-cone orbits.

Pipeline: enumerate a word ball of the holonomy orbit of the decoration
points, take the Euclidean convex hull, keep the facets whose support
plane is spacelike with every orbit point in its causal future (the past
boundary of the hull), grow the word ball until the facets incident to
the base decoration points stop changing, and finally read off the
quotient singular Euclidean surface carried by the facet complex.

Support planes are stored as (u, c) with u the future-timelike unit
normal (Euclidean normalization, u = J n for the outward Euclidean
normal n): the plane is {<x|u> = c} and its causal future is
{<x|u> <= c}, so hull membership and the causal condition coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decoration import Decoration, OrbitPointSet, orbit_ball
from .errors import (
    Degenerate,
    GluingMismatch,
    InconclusiveNearBoundary,
    NotAdmissible,
    NotStabilized,
)
from .flatsurf import ConeSurface
from .holonomy import (
    MarkedGroupPresentation,
    check_admissible,
    evaluate_word,
    invert_word,
    reduce_word,
)
from .minkowski import J, mink_form
from .predicates import OrientOracle, coplanar_band, orient3d_true

#: Relative coplanarity band for merging hull triangles into polygons.
MERGE_RTOL = 1e-8
#: Strict spacelikeness margin for unit support normals.
SPACELIKE_MARGIN = 1e-12
#: Orbit points may exceed a support plane by at most this relative amount.
ABOVE_FACET_TOL = 1e-9
#: Paired quotient edges must agree to this relative tolerance.
EPS_GLUE = 1e-8


@dataclass(frozen=True)
class HullFacet:
    """Maximal coplanar facet of a Euclidean convex hull."""

    vertices: tuple          # point indices, convex cyclic order, CCW from outside
    normal: np.ndarray       # outward Euclidean unit normal
    offset: float            # n . x = offset on the facet plane


@dataclass(frozen=True)
class Facet:
    """Spacelike facet of the polyhedral surface, with Minkowski support."""

    vertices: tuple          # orbit indices, CCW seen from the future side
    support: np.ndarray      # future timelike u, Euclidean unit norm
    support_c: float         # <x|u> = c on the facet, <p|u> <= c for all p


@dataclass(frozen=True)
class FacetPairing:
    """Edge-level gluing between fundamental facets.

    Side ``side_a`` of fundamental facet ``facet_a`` is identified with
    side ``side_b`` of ``facet_b``; ``word`` maps facet_b onto the facet
    of the complex adjacent to facet_a across that side.
    """

    facet_a: int
    side_a: int
    facet_b: int
    side_b: int
    word: tuple


@dataclass
class HullSurface:
    """Spacelike facet complex of the hull of a truncated orbit."""

    orbit: OrbitPointSet
    facets: list
    fundamental: list = field(default_factory=list)   # indices into facets
    pairings: list = field(default_factory=list)
    stabilized_at: int | None = None

    def fundamental_facets(self):
        return [self.facets[i] for i in self.fundamental]


# ---------------------------------------------------------------------------
# Euclidean convex hull kernel
# ---------------------------------------------------------------------------


class _TriFacet:
    __slots__ = ("a", "b", "c", "neighbors", "conflicts", "alive")

    def __init__(self, a, b, c):
        self.a, self.b, self.c = a, b, c
        self.neighbors = {}  # directed edge (u, v) on boundary -> facet
        self.conflicts = []
        self.alive = True

    def edges(self):
        return ((self.a, self.b), (self.b, self.c), (self.c, self.a))

    def verts(self):
        return (self.a, self.b, self.c)


def _initial_simplex(points):
    n = len(points)
    order = sorted(range(n), key=lambda i: tuple(points[i]))
    p0 = order[0]
    d2 = np.sum((points - points[p0]) ** 2, axis=1)
    p1 = int(np.argmax(d2))
    if d2[p1] == 0:
        raise Degenerate("all points coincide")
    cr = np.cross(points - points[p0], points[p1] - points[p0])
    area2 = np.sum(cr**2, axis=1)
    p2 = int(np.argmax(area2))
    if area2[p2] == 0:
        raise Degenerate("points are collinear")
    p3 = -1
    for i in order:
        if i in (p0, p1, p2):
            continue
        # true (unperturbed) predicate: rank detection must not be fooled
        # by the symbolic perturbation
        if orient3d_true(points, p0, p1, p2, i) != 0:
            p3 = i
            break
    if p3 < 0:
        raise Degenerate("points are coplanar (rank < 3)")
    if orient3d_true(points, p0, p1, p2, p3) > 0:
        p1, p2 = p2, p1
    return p0, p1, p2, p3


def _link_ring(facets):
    """Connect neighbor pointers among a closed set of triangles."""
    by_edge = {}
    for f in facets:
        for u, v in f.edges():
            by_edge[(u, v)] = f
    for f in facets:
        for u, v in f.edges():
            twin = by_edge.get((v, u))
            if twin is not None:
                f.neighbors[(u, v)] = twin
    return by_edge


def _hull_triangles(points):
    """Incremental hull with conflict lists over the perturbed predicate.

    Symbolic perturbation keeps every point set in general position, so
    strictly-visible regions are disks and horizons single cycles even on
    the exactly-degenerate light-cone configurations; the true geometry
    is recovered afterwards by coplanar merging.
    """
    n = len(points)
    oracle = OrientOracle(points)
    p0, p1, p2, p3 = _initial_simplex(points)
    if oracle.orient(p0, p1, p2, p3) > 0:
        p1, p2 = p2, p1
    base = [
        _TriFacet(p0, p1, p2),
        _TriFacet(p0, p3, p1),
        _TriFacet(p1, p3, p2),
        _TriFacet(p2, p3, p0),
    ]
    _link_ring(base)

    used = {p0, p1, p2, p3}
    rest = np.array([i for i in range(n) if i not in used], dtype=int)
    facets = list(base)
    if len(rest):
        for f in base:
            signs = oracle.orient_batch(f.a, f.b, f.c, rest)
            f.conflicts = [int(i) for i, s in zip(rest, signs) if s > 0]

    pending = [f for f in facets if f.conflicts]
    while pending:
        f = pending.pop()
        if not f.alive or not f.conflicts:
            continue
        # farthest conflict point of this facet (selection heuristic only)
        a, b, c = points[f.a], points[f.b], points[f.c]
        nrm = np.cross(b - a, c - a)
        dists = (points[f.conflicts] - a) @ nrm
        p = f.conflicts[int(np.argmax(dists))]

        # visible region by BFS over neighbors
        visible = {id(f): f}
        stack = [f]
        while stack:
            g = stack.pop()
            for edge, nb in g.neighbors.items():
                if not nb.alive or id(nb) in visible:
                    continue
                if oracle.orient(nb.a, nb.b, nb.c, p) > 0:
                    visible[id(nb)] = nb
                    stack.append(nb)
        # horizon: directed edges of visible facets whose twin is hidden
        horizon = []
        for g in visible.values():
            for edge, nb in g.neighbors.items():
                if id(nb) not in visible:
                    horizon.append((edge, nb, g))
        if not horizon:
            raise Degenerate("no horizon found (numerical inconsistency)")

        new_facets = []
        for (u, v), outside, dead in horizon:
            nf = _TriFacet(u, v, p)
            nf.neighbors[(u, v)] = outside
            outside.neighbors[(v, u)] = nf
            candidates = sorted((set(dead.conflicts) | set(outside.conflicts)) - {p})
            if candidates:
                cand = np.array(candidates, dtype=int)
                signs = oracle.orient_batch(u, v, p, cand)
                nf.conflicts = [int(i) for i, s in zip(cand, signs) if s > 0]
            new_facets.append(nf)
        # ring links among the new facets (edges containing p)
        by_first = {nf.a: nf for nf in new_facets}
        if len(by_first) != len(new_facets):
            raise Degenerate("horizon is not a single cycle")
        for nf in new_facets:
            nxt = by_first[nf.b]
            nf.neighbors[(nf.b, p)] = nxt
            nxt.neighbors[(p, nxt.a)] = nf
        for g in visible.values():
            g.alive = False
        facets.extend(new_facets)
        pending.extend(nf for nf in new_facets if nf.conflicts)
        facets = [g for g in facets if g.alive]

    return facets


def _merge_coplanar(points, tris, rel_tol):
    """Union adjacent coplanar triangles into maximal convex polygons."""
    index = {id(f): k for k, f in enumerate(tris)}
    parent = list(range(len(tris)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in tris:
        for edge, nb in f.neighbors.items():
            k1, k2 = index[id(f)], index[id(nb)]
            if find(k1) == find(k2):
                continue
            opposite = next(v for v in nb.verts() if v not in edge)
            if coplanar_band(
                points[f.a], points[f.b], points[f.c], points[opposite], rel_tol
            ):
                parent[find(k1)] = find(k2)

    groups = {}
    for k, f in enumerate(tris):
        groups.setdefault(find(k), []).append(f)

    facets = []
    for group in groups.values():
        verts = sorted({v for f in group for v in f.verts()})
        pts = points[verts]
        # Newell normal of the union (sum of triangle normals is robust)
        nrm = np.zeros(3)
        for f in group:
            nrm += np.cross(points[f.b] - points[f.a], points[f.c] - points[f.a])
        norm = np.linalg.norm(nrm)
        if norm == 0:
            raise Degenerate("zero normal on merged facet")
        nrm /= norm
        centroid = pts.mean(axis=0)
        # cyclic CCW order around the outward normal
        ref = pts[0] - centroid
        ref -= nrm * np.dot(ref, nrm)
        ref /= np.linalg.norm(ref)
        other = np.cross(nrm, ref)
        ang = np.arctan2((pts - centroid) @ other, (pts - centroid) @ ref)
        cycle = tuple(v for _, v in sorted(zip(ang, verts)))
        offset = float(np.mean(pts @ nrm))
        facets.append(HullFacet(vertices=cycle, normal=nrm, offset=offset))
    return facets


def _canonical_facet(f):
    k = f.vertices.index(min(f.vertices))
    cyc = f.vertices[k:] + f.vertices[:k]
    return HullFacet(vertices=cyc, normal=f.normal, offset=f.offset)


def convex_hull_3d(points):
    """Full Euclidean convex hull as oriented polygonal facets.

    Coplanar triangles are merged (relative band MERGE_RTOL); facet
    cycles run counterclockwise seen from outside, rotated to start at
    their smallest vertex index, and facets are sorted by vertex tuple.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValueError("expected an (n, 3) array")
    if len(points) < 4:
        raise Degenerate("need at least 4 points")
    tris = _hull_triangles(points)
    facets = _merge_coplanar(points, tris, MERGE_RTOL)
    return sorted((_canonical_facet(f) for f in facets), key=lambda f: f.vertices)


# ---------------------------------------------------------------------------
# spacelike facet surface
# ---------------------------------------------------------------------------


def _planar_facet(points):
    """Single facet through a rank-2 point set (ep_surface minimal case)."""
    pts = np.asarray(points, dtype=float)
    p0 = pts[0]
    nrm = None
    for i in range(1, len(pts)):
        for j in range(i + 1, len(pts)):
            cand = np.cross(pts[i] - p0, pts[j] - p0)
            if np.linalg.norm(cand) > 1e-12 * max(1.0, np.max(np.abs(pts)) ** 2):
                nrm = cand
                break
        if nrm is not None:
            break
    if nrm is None:
        raise Degenerate("points are collinear")
    for p in pts:
        if abs(np.dot(p - p0, nrm)) > 1e-9 * np.linalg.norm(nrm) * max(
            1.0, float(np.max(np.abs(p - p0)))
        ):
            raise Degenerate("points are not coplanar")
    nrm /= np.linalg.norm(nrm)
    if nrm[0] > 0:  # outward = past-facing so that u = J n is future
        nrm = -nrm
    centroid = pts.mean(axis=0)
    ref = pts[0] - centroid
    other = np.cross(nrm, ref)
    ang = np.arctan2((pts - centroid) @ other, (pts - centroid) @ ref)
    cycle = tuple(int(v) for _, v in sorted(zip(ang, range(len(pts)))))
    return HullFacet(vertices=cycle, normal=nrm, offset=float(np.mean(pts @ nrm)))


def ep_surface(orbit):
    """Spacelike past-boundary facets of the hull of an orbit point set.

    Keeps exactly the hull facets whose Minkowski support u = J n is
    future timelike (q(u) < -SPACELIKE_MARGIN after normalization) with
    every orbit point weakly below the plane; lightlike supports (the
    truncated images of the singular rays) are discarded.
    """
    points = orbit.points if isinstance(orbit, OrbitPointSet) else np.asarray(orbit, float)
    if len(points) < 3:
        raise Degenerate("need at least 3 points")
    if len(points) == 3:
        hull_facets = [_planar_facet(points)]
    else:
        try:
            hull_facets = convex_hull_3d(points)
        except Degenerate:
            hull_facets = [_planar_facet(points)]

    scale = max(1.0, float(np.max(np.abs(points))))
    kept = []
    for f in hull_facets:
        u = J @ f.normal
        c = f.offset
        if u[0] <= 0:
            continue
        qu = float(mink_form(u, u))
        if qu >= -SPACELIKE_MARGIN:
            continue
        pairings = points @ (J @ u)  # <p|u> for all p
        if float(np.max(pairings)) > c + ABOVE_FACET_TOL * scale:
            continue
        kept.append(Facet(vertices=f.vertices, support=u, support_c=c))
    if not kept:
        raise Degenerate("no spacelike facet (orbit too small)")
    return kept


# ---------------------------------------------------------------------------
# stabilization over word-ball radius
# ---------------------------------------------------------------------------


def _word_key(word):
    return (len(word), word)


def _facet_word_key(orbit, facet):
    return tuple(sorted((_word_key(orbit.words[v]) for v in facet.vertices)))


def _lookup_table(facets):
    return {frozenset(f.vertices): idx for idx, f in enumerate(facets)}


def _match_facet_image(rep, orbit, facet, word):
    """Orbit indices of the image of a facet under a group word, or None."""
    iso = evaluate_word(rep, word)
    out = []
    for v in facet.vertices:
        idx = orbit.find(iso.apply(orbit.points[v]))
        if idx < 0:
            return None
        out.append(idx)
    return tuple(out)


def _fundamental_classes(rep, orbit, facets):
    """Canonical representative per group class of base-incident facets.

    A facet is base-incident when one of its vertices carries the empty
    word.  Among the translates of such a facet that move each vertex
    word to the identity in turn, the canonical representative is the one
    with the lexicographically smallest vertex word multiset; ties break
    on the support normal.
    """
    table = _lookup_table(facets)
    seen = {}
    for idx, facet in enumerate(facets):
        if all(len(orbit.words[v]) > 0 for v in facet.vertices):
            continue
        best = None
        for v in facet.vertices:
            shift = invert_word(orbit.words[v])
            image = _match_facet_image(rep, orbit, facet, shift)
            if image is None:
                continue
            jdx = table.get(frozenset(image))
            if jdx is None:
                continue
            key = _facet_word_key(orbit, facets[jdx])
            support_key = tuple(np.round(facets[jdx].support, 9))
            cand = (key, support_key, jdx)
            if best is None or cand < best:
                best = cand
        if best is None:
            # translate fell outside the enumerated ball; treat the facet
            # itself as its representative for this round
            best = (_facet_word_key(orbit, facet), tuple(np.round(facet.support, 9)), idx)
        seen.setdefault(best[0], best)
    reps = sorted(seen.values())
    return [jdx for _, _, jdx in reps], [key for key, _, _ in reps]


def _supports_close(facets_a, idx_a, facets_b, idx_b, tol=1e-7):
    for ia, ib in zip(idx_a, idx_b):
        ua, ub = facets_a[ia].support, facets_b[ib].support
        ca, cb = facets_a[ia].support_c, facets_b[ib].support_c
        scale = max(1.0, abs(ca), abs(cb))
        if float(np.max(np.abs(ua - ub))) > tol or abs(ca - cb) > tol * scale:
            return False
    return True


def _edge_map(facets):
    out = {}
    for idx, f in enumerate(facets):
        k = len(f.vertices)
        for s in range(k):
            e = frozenset((f.vertices[s], f.vertices[(s + 1) % k]))
            out.setdefault(e, []).append((idx, s))
    return out


def _identify_translate(rep, orbit, facets, fund, target_idx):
    """Express a facet of the complex as word . fundamental_facet.

    Returns (position in fund, word, vertex map target->fundamental).
    """
    target = facets[target_idx]
    target_set = frozenset(target.vertices)
    for pos, fidx in enumerate(fund):
        f = facets[fidx]
        if len(f.vertices) != len(target.vertices):
            continue
        for vt in target.vertices:
            for vf in f.vertices:
                word = reduce_word(orbit.words[vt] + invert_word(orbit.words[vf]))
                image = _match_facet_image(rep, orbit, f, word)
                if image is None or frozenset(image) != target_set:
                    continue
                vmap = {img: orig for img, orig in zip(image, f.vertices)}
                return pos, word, vmap
    return None


def _compute_pairings(rep, orbit, facets, fund):
    edge_map = _edge_map(facets)
    pairings = []
    seen = set()
    for pos, fidx in enumerate(fund):
        f = facets[fidx]
        k = len(f.vertices)
        for s in range(k):
            if (pos, s) in seen:
                continue
            u, v = f.vertices[s], f.vertices[(s + 1) % k]
            incident = edge_map[frozenset((u, v))]
            others = [(i, ss) for i, ss in incident if i != fidx]
            if len(incident) != 2 or not others:
                raise NotStabilized(
                    f"fundamental facet {pos} has an unmatched edge; "
                    "complex is truncated too early"
                )
            nb_idx, _ = others[0]
            hit = _identify_translate(rep, orbit, facets, fund, nb_idx)
            if hit is None:
                raise NotStabilized(
                    "could not express a neighboring facet as a translate of "
                    "a fundamental facet"
                )
            pos2, word, vmap = hit
            f2 = facets[fund[pos2]]
            k2 = len(f2.vertices)
            # the shared edge pulls back to an edge of the fundamental rep
            pu, pv = vmap[u], vmap[v]
            side2 = None
            for s2 in range(k2):
                if f2.vertices[s2] == pv and f2.vertices[(s2 + 1) % k2] == pu:
                    side2 = s2
                    break
            if side2 is None:
                raise GluingMismatch("pulled-back edge is not a side of its facet")
            pairings.append(FacetPairing(pos, s, pos2, side2, word))
            seen.add((pos, s))
            if (pos2, side2) != (pos, s):
                seen.add((pos2, side2))
    return pairings


def stabilize_hull(rep, d, r0=1, r_max=8, insertion_seed=None, dedup_rtol=None):
    """Grow the word ball until the fundamental facet set stops changing.

    Stops at the first radius whose canonical fundamental facets (vertex
    word multisets and supports) match the previous round exactly;
    raises NotStabilized when r_max is reached first.  The insertion
    seed permutes the hull kernel's input order and must not change the
    result (exact predicates make the hull order-independent).
    """
    if isinstance(rep.presentation, MarkedGroupPresentation):
        report = check_admissible(rep)
        if not report.passed:
            raise NotAdmissible(
                f"admissibility necessary conditions fail: {report.verdict.value}"
            )
    history = []
    prev = None  # (orbit, facets, fund_idx, keys)
    radius = r0
    while radius <= r_max:
        kwargs = {} if dedup_rtol is None else {"dedup_rtol": dedup_rtol}
        orbit = orbit_ball(rep, d, radius, **kwargs)
        try:
            facets = _ep_surface_permuted(orbit, insertion_seed)
            fund_idx, keys = _fundamental_classes(rep, orbit, facets)
        except Degenerate as exc:
            history.append((radius, f"degenerate: {exc}"))
            prev = None
            radius += 1
            continue
        history.append((radius, keys))
        if prev is not None and keys == prev[3]:
            if _supports_close(facets, fund_idx, prev[1], prev[2]):
                pairings = _compute_pairings(rep, orbit, facets, fund_idx)
                return HullSurface(
                    orbit=orbit,
                    facets=facets,
                    fundamental=fund_idx,
                    pairings=pairings,
                    stabilized_at=radius,
                )
        prev = (orbit, facets, fund_idx, keys)
        radius += 1
    raise NotStabilized(
        f"fundamental facets kept changing up to radius {r_max}", history=history
    )


def _ep_surface_permuted(orbit, insertion_seed):
    if insertion_seed is None:
        return ep_surface(orbit)
    rng = np.random.default_rng(insertion_seed)
    perm = rng.permutation(len(orbit.points))
    inverse = np.empty_like(perm)
    inverse[perm] = np.arange(len(perm))
    shuffled = OrbitPointSet(
        [orbit.words[i] for i in perm],
        orbit.points[perm],
        orbit.decoration_index[perm],
        orbit.radius,
        orbit.dedup_rtol,
    )
    facets = ep_surface(shuffled)
    remapped = []
    for f in facets:
        cyc = tuple(int(perm[v]) for v in f.vertices)
        k = cyc.index(min(cyc))
        remapped.append(
            Facet(vertices=cyc[k:] + cyc[:k], support=f.support, support_c=f.support_c)
        )
    return sorted(remapped, key=lambda f: f.vertices)


# ---------------------------------------------------------------------------
# induced singular Euclidean surface
# ---------------------------------------------------------------------------


def _minkowski_length(u):
    value = mink_form(u, u)
    if value <= 0:
        raise GluingMismatch("facet edge is not spacelike")
    return math.sqrt(value)


@dataclass(frozen=True)
class QuotientCell:
    """One fundamental facet read as a Euclidean polygon."""

    orbit_vertices: tuple
    decoration_classes: tuple
    lengths: tuple
    corner_angles: tuple


@dataclass
class QuotientSurfaceReport:
    """Singular Euclidean surface induced on the facet complex quotient."""

    cone_surface: ConeSurface
    cells: list
    cone_angles: dict          # decoration class -> total angle
    vertex_decoration: dict    # cone-surface vertex id -> decoration class
    pairings: list


def _cell_geometry(orbit, facet):
    pts = orbit.points[list(facet.vertices)]
    k = len(facet.vertices)
    lengths = []
    for s in range(k):
        lengths.append(_minkowski_length(pts[(s + 1) % k] - pts[s]))
    angles = []
    for s in range(k):
        u = pts[(s - 1) % k] - pts[s]
        w = pts[(s + 1) % k] - pts[s]
        cosang = mink_form(u, w) / (_minkowski_length(u) * _minkowski_length(w))
        angles.append(math.acos(min(1.0, max(-1.0, cosang))))
    classes = tuple(int(orbit.decoration_index[v]) for v in facet.vertices)
    return QuotientCell(
        orbit_vertices=tuple(facet.vertices),
        decoration_classes=classes,
        lengths=tuple(lengths),
        corner_angles=tuple(angles),
    )


def quotient_surface(h):
    """Euclidean cone surface carried by the fundamental facets.

    Edge lengths come from the Minkowski form restricted to the spacelike
    support planes; cells are fan-triangulated so the result is a valid
    ConeSurface whose Delaunay cellulation recovers the cells.
    """
    if h.stabilized_at is None:
        raise NotStabilized("hull surface is not stabilized")
    cells = [_cell_geometry(h.orbit, f) for f in h.fundamental_facets()]

    for pr in h.pairings:
        la = cells[pr.facet_a].lengths[pr.side_a]
        lb = cells[pr.facet_b].lengths[pr.side_b]
        if abs(la - lb) > EPS_GLUE * max(1.0, la, lb):
            raise GluingMismatch(
                f"paired sides ({pr.facet_a},{pr.side_a}) ~ ({pr.facet_b},{pr.side_b}) "
                f"have lengths {la} != {lb}"
            )

    cone_angles = {}
    for cell in cells:
        for cls, ang in zip(cell.decoration_classes, cell.corner_angles):
            cone_angles[cls] = cone_angles.get(cls, 0.0) + ang

    # fan-triangulate each cell from its corner 0
    triangles = []
    gluing = {}
    cell_side_slot = {}
    tri_base = []
    for ci, cell in enumerate(cells):
        k = len(cell.lengths)
        pts = h.orbit.points[list(cell.orbit_vertices)]
        base = len(triangles)
        tri_base.append(base)
        if k == 3:
            triangles.append(
                (tuple(cell.decoration_classes), tuple(cell.lengths))
            )
            for s in range(3):
                cell_side_slot[(ci, s)] = (base, s)
            continue
        diag = [
            _minkowski_length(pts[m] - pts[0]) for m in range(k)
        ]
        for m in range(1, k - 1):
            v_ids = (
                cell.decoration_classes[0],
                cell.decoration_classes[m],
                cell.decoration_classes[(m + 1) % k],
            )
            lens = (
                diag[m] if m > 1 else cell.lengths[0],
                cell.lengths[m],
                diag[m + 1] if m < k - 2 else cell.lengths[k - 1],
            )
            triangles.append((v_ids, lens))
        cell_side_slot[(ci, 0)] = (base, 0)
        for m in range(1, k - 1):
            cell_side_slot[(ci, m)] = (base + m - 1, 1)
        cell_side_slot[(ci, k - 1)] = (base + k - 3, 2)
        for m in range(1, k - 2):
            gluing[(base + m - 1, 2)] = (base + m, 0)
            gluing[(base + m, 0)] = (base + m - 1, 2)

    for pr in h.pairings:
        sa = cell_side_slot[(pr.facet_a, pr.side_a)]
        sb = cell_side_slot[(pr.facet_b, pr.side_b)]
        gluing[sa] = sb
        gluing[sb] = sa

    surface = ConeSurface(triangles, gluing)
    return QuotientSurfaceReport(
        cone_surface=surface,
        cells=cells,
        cone_angles=cone_angles,
        vertex_decoration={cls: cls for cell in cells for cls in cell.decoration_classes},
        pairings=list(h.pairings),
    )


# ---------------------------------------------------------------------------
# Cauchy-surface ray check
# ---------------------------------------------------------------------------


def _frontier_facets(facets):
    """Facets owning an edge shared with no other facet of the complex."""
    edge_map = _edge_map(facets)
    out = set()
    for edge, owners in edge_map.items():
        if len(owners) < 2:
            for idx, _ in owners:
                out.add(idx)
    return out


def ray_crossing_check(h, base, direction, margin=1e-9):
    """Number of transverse crossings of a timelike line with the complex.

    Counts crossings of {base + t * direction} with the spacelike facet
    complex; rays whose crossing lies on a facet touching the truncation
    frontier (or misses the complex entirely) raise
    InconclusiveNearBoundary instead of returning a count.
    """
    base = np.asarray(base, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if mink_form(direction, direction) >= 0 or direction[0] <= 0:
        raise ValueError("direction must be future timelike")
    frontier = _frontier_facets(h.facets)
    points = h.orbit.points
    crossings = []
    for idx, f in enumerate(h.facets):
        u, c = f.support, f.support_c
        denom = mink_form(direction, u)
        if denom == 0:
            continue
        t_star = (c - mink_form(base, u)) / denom
        x = base + t_star * direction
        n = J @ u
        verts = points[list(f.vertices)]
        k = len(verts)
        inside = True
        scale = max(1.0, float(np.max(np.abs(verts))) ** 2)
        for s in range(k):
            edge = verts[(s + 1) % k] - verts[s]
            if float(np.dot(np.cross(edge, x - verts[s]), n)) < -margin * scale:
                inside = False
                break
        if inside:
            crossings.append((t_star, idx))
    if not crossings:
        raise InconclusiveNearBoundary("ray misses the truncated facet complex")
    # crossings on shared edges appear once per incident facet; cluster by t
    crossings.sort()
    clusters = [[crossings[0]]]
    t_scale = max(1.0, abs(crossings[0][0]))
    for item in crossings[1:]:
        if abs(item[0] - clusters[-1][0][0]) <= 1e-9 * max(t_scale, abs(item[0])):
            clusters[-1].append(item)
        else:
            clusters.append([item])
    for cluster in clusters:
        if any(idx in frontier for _, idx in cluster):
            raise InconclusiveNearBoundary(
                "crossing lies on the truncation frontier of the complex"
            )
    return len(clusters)
