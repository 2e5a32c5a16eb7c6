"""Singular Euclidean cone surfaces as glued triangles.

A surface is a list of oriented triangles (vertex ids + side lengths) and
a fixed-point-free involution pairing triangle sides.  Side k of a
triangle runs from corner k to corner k+1; gluing reverses orientation,
identifying corner k with the partner's corner k'+1 and corner k+1 with
corner k'.  There is no global embedding: all geometry is developed
locally, hinge by hinge.

Legality of an interior edge follows the Delaunay criterion: develop the
two adjacent triangles into the plane and test the opposite vertex
against the circumscribed circle of the first (equivalently, the Ptolemy
inequality d(a,b) d(c,d) >= d(a,c) d(b,d) + d(a,d) d(b,c) for the hinge
quadrilateral a, d, b, c with diagonal ab; equality is the cocyclic
case).  Lawson's flip loop terminates because each flip lexicographically
increases the sorted angle vector of the triangulation; the iteration cap
is a diagnostic only.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryEdge,
    DegenerateTriangle,
    FlipLimitExceeded,
    InvalidSurface,
    UnknownVertex,
)

#: Glued sides must agree to this relative tolerance.
EPS_GLUE = 1e-8
#: Developments must reproduce defining lengths to this relative tolerance.
EPS_DEV = 1e-9
#: Relative half-width of the cocyclic band of the in-circle determinant.
EPS_CYC = 1e-9


class Legality(enum.Enum):
    LEGAL = "legal"
    ILLEGAL = "illegal"
    COCYCLIC = "cocyclic"


def _check_triangle(lengths, tol=EPS_DEV):
    a, b, c = lengths
    if min(a, b, c) <= 0:
        raise DegenerateTriangle(f"non-positive side in {lengths}")
    s = max(a, b, c)
    if a + b - c <= tol * s or b + c - a <= tol * s or c + a - b <= tol * s:
        raise DegenerateTriangle(f"triangle inequality fails for {lengths}")


def triangle_angles(lengths):
    """Corner angles from side lengths; corner k is opposite side k+1."""
    a, b, c = lengths
    angles = []
    for k in range(3):
        opp = lengths[(k + 1) % 3]
        s1 = lengths[k]
        s2 = lengths[(k - 1) % 3]
        cos_a = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)
        angles.append(math.acos(min(1.0, max(-1.0, cos_a))))
    return tuple(angles)


def triangle_area(lengths):
    a, b, c = lengths
    s = 0.5 * (a + b + c)
    return math.sqrt(max(0.0, s * (s - a) * (s - b) * (s - c)))


def _place_triangle(lengths):
    """CCW planar coordinates with side 0 on the positive x-axis."""
    _check_triangle(lengths)
    a, b, c = lengths  # side 0, 1, 2
    x = (a * a + c * c - b * b) / (2.0 * a)
    y2 = c * c - x * x
    if y2 <= 0:
        raise DegenerateTriangle(f"flat development for {lengths}")
    return np.array([[0.0, 0.0], [a, 0.0], [x, math.sqrt(y2)]])


class ConeSurface:
    """Closed oriented singular Euclidean surface from glued triangles."""

    def __init__(self, triangles, gluing, check=True):
        self.vertices_of = [tuple(v) for v, _ in triangles]
        self.lengths_of = [tuple(float(x) for x in l) for _, l in triangles]
        self.gluing = {tuple(a): tuple(b) for a, b in gluing.items()}
        if check:
            self._validate()

    @classmethod
    def from_lengths(cls, lengths, gluing):
        """Derive vertex ids as corner classes of the gluing."""
        n = len(lengths)
        parent = {(t, k): (t, k) for t in range(n) for k in range(3)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            parent[find(x)] = find(y)

        for (t, i), (t2, j) in gluing.items():
            union((t, i), (t2, (j + 1) % 3))
            union((t, (i + 1) % 3), (t2, j))
        labels = {}
        verts = []
        for t in range(n):
            row = []
            for k in range(3):
                root = find((t, k))
                if root not in labels:
                    labels[root] = len(labels)
                row.append(labels[root])
            verts.append(tuple(row))
        return cls(list(zip(verts, lengths)), gluing)

    # -- structure ---------------------------------------------------------

    def _validate(self):
        n = len(self.lengths_of)
        for t, lengths in enumerate(self.lengths_of):
            try:
                _check_triangle(lengths)
            except DegenerateTriangle as exc:
                raise InvalidSurface(f"triangle {t}: {exc}") from exc
        for slot, partner in self.gluing.items():
            if slot == partner:
                raise InvalidSurface(f"side {slot} glued to itself")
            if self.gluing.get(partner) != slot:
                raise InvalidSurface(f"gluing not an involution at {slot}")
            la = self.side_length(slot)
            lb = self.side_length(partner)
            if abs(la - lb) > EPS_GLUE * max(1.0, la, lb):
                raise InvalidSurface(
                    f"glued sides {slot} ~ {partner} have lengths {la} != {lb}"
                )
            # vertex ids must match the corner identification
            t, i = slot
            t2, j = partner
            if (
                self.vertices_of[t][i] != self.vertices_of[t2][(j + 1) % 3]
                or self.vertices_of[t][(i + 1) % 3] != self.vertices_of[t2][j]
            ):
                raise InvalidSurface(f"vertex ids inconsistent across {slot} ~ {partner}")
        for t in range(n):
            for k in range(3):
                if (t, k) not in self.gluing:
                    raise InvalidSurface(f"side {(t, k)} is unglued (boundary)")

    def side_length(self, slot):
        t, i = slot
        return self.lengths_of[t][i]

    @property
    def vertex_ids(self):
        return sorted({v for tri in self.vertices_of for v in tri})

    def edges(self):
        """Canonical edge ids: the lexicographically smaller slot of each pair."""
        return sorted(
            slot for slot, partner in self.gluing.items() if slot <= partner
        )

    def euler_characteristic(self):
        f = len(self.lengths_of)
        e = len(self.gluing) // 2
        v = len(self.vertex_ids)
        return v - e + f

    def total_area(self):
        return sum(triangle_area(l) for l in self.lengths_of)

    def copy(self):
        return ConeSurface(
            list(zip(self.vertices_of, self.lengths_of)), dict(self.gluing), check=False
        )


def cone_angle(surface, vertex):
    """Total angle around a marked vertex (sum of incident corner angles)."""
    total = 0.0
    seen = False
    for tri, lengths in zip(surface.vertices_of, surface.lengths_of):
        angles = triangle_angles(lengths)
        for k in range(3):
            if tri[k] == vertex:
                total += angles[k]
                seen = True
    if not seen:
        raise UnknownVertex(vertex)
    return total


def cone_angles(surface):
    return {v: cone_angle(surface, v) for v in surface.vertex_ids}


def gauss_bonnet_residual(surface):
    """|sum_v (2 pi - angle(v)) - 2 pi chi|; zero on consistent gluing data."""
    total = sum(2 * math.pi - a for a in cone_angles(surface).values())
    return abs(total - 2 * math.pi * surface.euler_characteristic())


@dataclass(frozen=True)
class Hinge:
    """Two triangles developed in the plane along a shared diagonal.

    Points: a, b are the diagonal endpoints (a at the origin), c the apex
    of the first triangle (above the axis), d the apex of the second
    (below).
    """

    slot: tuple
    partner: tuple
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def defining_lengths(self):
        return (
            float(np.linalg.norm(self.b - self.a)),
            float(np.linalg.norm(self.c - self.b)),
            float(np.linalg.norm(self.c - self.a)),
            float(np.linalg.norm(self.d - self.a)),
            float(np.linalg.norm(self.d - self.b)),
        )


def develop_hinge(surface, edge):
    """Lay out the two triangles adjacent to an interior edge.

    Works also when both sides of the edge bound the same triangle (the
    second copy is developed independently).
    """
    edge = tuple(edge)
    if edge not in surface.gluing:
        raise BoundaryEdge(f"{edge} is not an interior edge")
    t, i = edge
    t2, j = surface.gluing[edge]
    lt = surface.lengths_of[t]
    l2 = surface.lengths_of[t2]
    # first triangle: corner i at origin, corner i+1 at (L, 0), apex above
    length = lt[i]
    pts1 = _place_triangle((lt[i], lt[(i + 1) % 3], lt[(i + 2) % 3]))
    a, b, c = pts1[0], pts1[1], pts1[2]
    # partner: corner j at b, corner j+1 at a, apex below the axis
    x = (l2[j] * l2[j] + l2[(j + 2) % 3] * l2[(j + 2) % 3] - l2[(j + 1) % 3] ** 2) / (
        2.0 * l2[j]
    )
    y2 = l2[(j + 2) % 3] ** 2 - x * x
    if y2 <= 0:
        raise DegenerateTriangle(f"flat development for partner of {edge}")
    # partner develops right-to-left: its corner j sits at b
    d = np.array([length - x, -math.sqrt(y2)])
    return Hinge(edge, (t2, j), a, b, c, d)


def _incircle_sign(a, b, c, d, rel_tol):
    """Sign of the in-circle determinant of d against CCW circle (a, b, c).

    Positive: strictly inside; negative: strictly outside; zero: on the
    circle within the relative tolerance band.
    """
    rows = []
    mags = []
    for p in (a, b, c):
        ex, ey = p[0] - d[0], p[1] - d[1]
        rows.append((ex, ey, ex * ex + ey * ey))
        mags.append((abs(ex), abs(ey), ex * ex + ey * ey))
    det = (
        rows[0][0] * (rows[1][1] * rows[2][2] - rows[2][1] * rows[1][2])
        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[2][0] * rows[1][2])
        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[2][0] * rows[1][1])
    )
    perm = (
        mags[0][0] * (mags[1][1] * mags[2][2] + mags[2][1] * mags[1][2])
        + mags[0][1] * (mags[1][0] * mags[2][2] + mags[2][0] * mags[1][2])
        + mags[0][2] * (mags[1][0] * mags[2][1] + mags[2][0] * mags[1][1])
    )
    if abs(det) <= rel_tol * max(perm, 1e-300):
        return 0
    return 1 if det > 0 else -1


def is_legal(surface, edge, tol=EPS_CYC):
    """Delaunay legality of an interior edge."""
    h = develop_hinge(surface, edge)
    sign = _incircle_sign(h.a, h.b, h.c, h.d, tol)
    if sign > 0:
        return Legality.ILLEGAL
    if sign < 0:
        return Legality.LEGAL
    return Legality.COCYCLIC


def flip_edge(surface, edge):
    """Replace the diagonal of the hinge about an interior edge, in place.

    Only defined when the two sides of the edge belong to distinct
    triangles; a folded hinge (both sides on one triangle) cannot be
    re-diagonalized by local surgery.
    """
    edge = tuple(edge)
    h = develop_hinge(surface, edge)
    t, i = h.slot
    t2, j = h.partner
    if t == t2:
        raise InvalidSurface(f"cannot flip folded edge {edge}")
    va = surface.vertices_of[t][i]
    vb = surface.vertices_of[t][(i + 1) % 3]
    vc = surface.vertices_of[t][(i + 2) % 3]
    vd = surface.vertices_of[t2][(j + 2) % 3]
    new_len = float(np.linalg.norm(h.c - h.d))
    len_ca = float(np.linalg.norm(h.a - h.c))
    len_ad = float(np.linalg.norm(h.d - h.a))
    len_db = float(np.linalg.norm(h.b - h.d))
    len_bc = float(np.linalg.norm(h.c - h.b))

    # old outer slots -> new slots (quad a-d-b-c split along c-d)
    relabel = {
        (t, (i + 2) % 3): (t, 0),   # c -> a
        (t2, (j + 1) % 3): (t, 1),  # a -> d
        (t2, (j + 2) % 3): (t2, 0),  # d -> b
        (t, (i + 1) % 3): (t2, 1),  # b -> c
    }
    old_partners = {slot: surface.gluing[slot] for slot in relabel}

    surface.vertices_of[t] = (vc, va, vd)
    surface.lengths_of[t] = (len_ca, len_ad, new_len)
    surface.vertices_of[t2] = (vd, vb, vc)
    surface.lengths_of[t2] = (len_db, len_bc, new_len)

    for slot in relabel:
        surface.gluing.pop(slot, None)
    surface.gluing.pop((t, i), None)
    surface.gluing.pop((t2, j), None)
    surface.gluing[(t, 2)] = (t2, 2)
    surface.gluing[(t2, 2)] = (t, 2)
    for old_slot, new_slot in relabel.items():
        partner = old_partners[old_slot]
        partner = relabel.get(partner, partner)
        surface.gluing[new_slot] = partner
        surface.gluing[partner] = new_slot
    return new_len


@dataclass(frozen=True)
class CocyclicCell:
    """Convex cocyclic polygon cell of the Delaunay cellulation."""

    vertices: tuple          # vertex ids, boundary cyclic order (CCW)
    lengths: tuple           # side k joins corner k to corner k+1
    circumradius: float
    central_angles: tuple    # developed positions of the corners on the circle
    corner_angles: tuple
    slots: tuple             # triangulation boundary slot realizing each side

    def __len__(self):
        return len(self.vertices)


@dataclass
class Cellulation:
    """Legal cellulation: flipped triangulation plus merged cocyclic cells."""

    surface: ConeSurface
    cells: list
    gluing: dict             # (cell, side) -> (cell, side), involution
    edge_legality: dict
    flips: int

    def cell_of_slot(self):
        out = {}
        for ci, cell in enumerate(self.cells):
            for k, slot in enumerate(cell.slots):
                out[slot] = (ci, k)
        return out


def _circumcircle(p0, p1, p2):
    ax, ay = p0
    bx, by = p1
    cx, cy = p2
    dd = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if dd == 0:
        raise DegenerateTriangle("collinear triangle in circumcircle")
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / dd
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / dd
    center = np.array([ux, uy])
    return center, float(np.linalg.norm(p0 - center))


def _develop_class(surface, tris, internal):
    """Develop a set of triangles glued along the given internal slots.

    Returns per-triangle corner coordinates in one common plane.
    """
    tris = sorted(tris)
    coords = {}
    base = tris[0]
    coords[base] = _place_triangle(surface.lengths_of[base])
    stack = [base]
    placed = {base}
    while stack:
        t = stack.pop()
        for k in range(3):
            if (t, k) not in internal:
                continue
            t2, j = surface.gluing[(t, k)]
            if t2 in placed:
                continue
            # rigid motion sending partner side onto side (t, k), reversed
            p = coords[t][k]
            qpt = coords[t][(k + 1) % 3]
            local = _place_triangle(surface.lengths_of[t2])
            src0 = local[j]
            src1 = local[(j + 1) % 3]
            # map src0 -> qpt, src1 -> p, flipping the partner below the side
            u = (src1 - src0) / np.linalg.norm(src1 - src0)
            v = (p - qpt) / np.linalg.norm(p - qpt)
            rot = np.array(
                [
                    [u[0] * v[0] + u[1] * v[1], -(u[0] * v[1] - u[1] * v[0])],
                    [u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1]],
                ]
            )
            coords[t2] = (local - src0) @ rot.T + qpt
            placed.add(t2)
            stack.append(t2)
    if len(placed) != len(tris):
        raise InvalidSurface("cocyclic class is not connected by its internal edges")
    return coords


def _merge_cocyclic(surface, legality, tol):
    """Group triangles across cocyclic edges into maximal cocyclic cells."""
    n = len(surface.lengths_of)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for edge, status in legality.items():
        if status is Legality.COCYCLIC:
            t, _ = edge
            t2, _ = surface.gluing[edge]
            parent[find(t)] = find(t2)

    classes = {}
    for t in range(n):
        classes.setdefault(find(t), []).append(t)

    cells = []
    slot_to_cellside = {}
    for tris in sorted(classes.values()):
        tri_set = set(tris)
        internal = set()
        for t in tris:
            for k in range(3):
                partner = surface.gluing[(t, k)]
                edge_id = min((t, k), partner)
                if partner[0] in tri_set and legality[edge_id] is Legality.COCYCLIC:
                    internal.add((t, k))
        coords = _develop_class(surface, tris, internal)
        center, radius = _circumcircle(*coords[tris[0]])
        for t in tris:
            for k in range(3):
                r = float(np.linalg.norm(coords[t][k] - center))
                if abs(r - radius) > max(10 * tol, 1e3 * EPS_CYC) * max(1.0, radius):
                    raise InvalidSurface(
                        f"merged cell not cocyclic: corner ({t},{k}) at radius {r} "
                        f"vs {radius}"
                    )
        # boundary walk, starting from the smallest boundary slot
        boundary = sorted(
            (t, k) for t in tris for k in range(3) if (t, k) not in internal
        )
        if not boundary:
            raise InvalidSurface("cocyclic class has no boundary sides")
        walk = []
        slot = boundary[0]
        while True:
            walk.append(slot)
            t, k = slot
            cand = (t, (k + 1) % 3)
            while cand in internal:
                t2, j = surface.gluing[cand]
                cand = (t2, (j + 1) % 3)
            slot = cand
            if slot == boundary[0]:
                break
            if len(walk) > len(boundary):
                raise InvalidSurface("boundary walk does not close")
        if len(walk) != len(boundary):
            raise InvalidSurface("cocyclic class boundary is not a single cycle")
        verts = tuple(surface.vertices_of[t][k] for t, k in walk)
        lens = tuple(surface.lengths_of[t][k] for t, k in walk)
        positions = [coords[t][k] for t, k in walk]
        angles = tuple(
            float(np.arctan2(p[1] - center[1], p[0] - center[0])) for p in positions
        )
        corner = []
        for m in range(len(walk)):
            prev_p = positions[(m - 1) % len(walk)]
            here = positions[m]
            next_p = positions[(m + 1) % len(walk)]
            u = prev_p - here
            v = next_p - here
            cosang = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
            corner.append(math.acos(min(1.0, max(-1.0, cosang))))
        cell = CocyclicCell(
            vertices=verts,
            lengths=lens,
            circumradius=radius,
            central_angles=angles,
            corner_angles=tuple(corner),
            slots=tuple(walk),
        )
        for m, s in enumerate(walk):
            slot_to_cellside[s] = (len(cells), m)
        cells.append(cell)

    gluing = {}
    for slot, (ci, side) in slot_to_cellside.items():
        partner = surface.gluing[slot]
        gluing[(ci, side)] = slot_to_cellside[partner]
    return cells, gluing


def delaunay(surface, tol=EPS_CYC, flip_order="lex", seed=None, max_flips=None):
    """Legal (Delaunay) cellulation of a cone surface by Lawson flips.

    Flips the lexicographically smallest illegal edge until none remains
    (``flip_order="random"`` with a seed picks uniformly instead; the
    final cellulation is the same by uniqueness), then merges triangles
    across cocyclic edges into maximal cocyclic cells.
    """
    work = surface.copy()
    n_edges = len(work.gluing) // 2
    cap = max_flips if max_flips is not None else 100 * n_edges * n_edges
    rng = random.Random(seed)
    flips = 0
    while True:
        illegal = [
            e
            for e in work.edges()
            if work.gluing[e][0] != e[0] and is_legal(work, e, tol) is Legality.ILLEGAL
        ]
        if not illegal:
            folded_illegal = [
                e
                for e in work.edges()
                if work.gluing[e][0] == e[0] and is_legal(work, e, tol) is Legality.ILLEGAL
            ]
            if folded_illegal:
                raise InvalidSurface(
                    f"illegal folded edges {folded_illegal} cannot be flipped"
                )
            break
        edge = rng.choice(illegal) if flip_order == "random" else illegal[0]
        flip_edge(work, edge)
        flips += 1
        if flips > cap:
            raise FlipLimitExceeded(f"exceeded {cap} flips")

    legality = {e: is_legal(work, e, tol) for e in work.edges()}
    cells, gluing = _merge_cocyclic(work, legality, tol)
    return Cellulation(
        surface=work, cells=cells, gluing=gluing, edge_legality=legality, flips=flips
    )


def cellulations_isomorphic(c1, c2, rel_tol=1e-6):
    """Combinatorial isomorphism between cellulations with matching lengths.

    Tries every anchor (cell, side, orientation) of c2 against cell 0,
    side 0 of c1 and propagates over the gluing graph.  Returns
    ``(found, max_relative_length_error)`` for the best anchor.
    """
    if len(c1.cells) != len(c2.cells):
        return False, float("inf")
    sizes1 = sorted(len(c) for c in c1.cells)
    sizes2 = sorted(len(c) for c in c2.cells)
    if sizes1 != sizes2:
        return False, float("inf")

    cutoff = max(rel_tol, 1e-2)

    def attempt(ci2, s2, orient):
        # mapping: cell of c1 -> (cell of c2, offset, orient); corner m of a
        # goes to corner off+m (orient=1) or off-m (orient=-1) of the image
        k0 = len(c1.cells[0])
        if len(c2.cells[ci2]) != k0:
            return None
        mapping = {0: (ci2, s2, orient)}
        stack = [0]
        err = 0.0
        while stack:
            a = stack.pop()
            cb, off, sgn = mapping[a]
            ka = len(c1.cells[a])
            for s in range(ka):
                la = c1.cells[a].lengths[s]
                side_b = (off + s) % ka if sgn > 0 else (off - s - 1) % ka
                lb = c2.cells[cb].lengths[side_b]
                err = max(err, abs(la - lb) / max(1.0, abs(la), abs(lb)))
                if err > cutoff:
                    return None
                na, nsa = c1.gluing[(a, s)]
                nb, nsb = c2.gluing[(cb, side_b)]
                kn = len(c1.cells[na])
                if len(c2.cells[nb]) != kn:
                    return None
                if sgn > 0:
                    entry = (nb, (nsb - nsa) % kn, 1)
                else:
                    entry = (nb, (nsb + nsa + 1) % kn, -1)
                if na in mapping:
                    if mapping[na] != entry:
                        return None
                else:
                    mapping[na] = entry
                    stack.append(na)
        if len(mapping) != len(c1.cells):
            return None
        return err

    best = None
    for ci2 in range(len(c2.cells)):
        for s2 in range(len(c2.cells[ci2])):
            for orient in (1, -1):
                err = attempt(ci2, s2, orient)
                if err is not None and (best is None or err < best):
                    best = err
    if best is None:
        return False, float("inf")
    return True, best
