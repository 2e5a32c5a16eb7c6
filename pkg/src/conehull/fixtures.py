"""Reference inputs used by the demos and the test suite.

Two arithmetic holonomy fixtures (the modular once-punctured torus and
the level-2 congruence thrice-punctured sphere) whose orbit points have
exact dyadic coordinates, plus small cone surfaces: the regular
tetrahedron boundary, the square pillowcase, the one-vertex square
torus, and doubles of random convex polygons.
"""

from __future__ import annotations

import math

import numpy as np

from .decoration import Decoration
from .flatsurf import ConeSurface
from .holonomy import AffineRepresentation, MarkedGroupPresentation, evaluate_word
from .minkowski import AffineIsometry, psl2_to_so12


def punctured_torus_rep():
    """Marked once-punctured torus holonomy inside SL(2, Z).

    Handle generators [[1,1],[1,2]] and [[1,-1],[-1,2]]; the peripheral
    closes the relation [a, b] c = 1, with parabolic commutator.
    """
    pres = MarkedGroupPresentation(genus=1, punctures=1)
    a = AffineIsometry(psl2_to_so12(1, 1, 1, 2))
    b = AffineIsometry(psl2_to_so12(1, -1, -1, 2))
    comm = a @ b @ a.inverse() @ b.inverse()
    return AffineRepresentation(pres, {"a1": a, "b1": b, "c1": comm.inverse()})


def punctured_torus_decoration():
    """Decoration on the fixed ray of the peripheral: the cusp at 0."""
    return Decoration([[1.0, -1.0, 0.0]])


def gamma2_rep():
    """Thrice-punctured sphere holonomy (level-2 congruence subgroup).

    Peripherals fix the cusps at infinity, 0 and 1:
    c1 = [[1,2],[0,1]], c2 = [[1,0],[-2,1]], c3 = (c1 c2)^-1.
    """
    pres = MarkedGroupPresentation(genus=0, punctures=3)
    c1 = AffineIsometry(psl2_to_so12(1, 2, 0, 1))
    c2 = AffineIsometry(psl2_to_so12(1, 0, -2, 1))
    c3 = (c1 @ c2).inverse()
    return AffineRepresentation(pres, {"c1": c1, "c2": c2, "c3": c3})


def gamma2_decoration():
    """Equivariant integral decoration of the three cusp rays.

    Cusp p/q carries the point (p^2+q^2, 2pq, p^2-q^2): infinity ->
    (1,1,0) scaled by 2, zero -> (1,-1,0) scaled by 2, one -> (2,0,2).
    The common factor 2 keeps all coordinates integral.
    """
    return Decoration([[2.0, 2.0, 0.0], [2.0, -2.0, 0.0], [2.0, 0.0, 2.0]])


def peripheral_fixed_points(rep, d):
    """Residuals of the decoration under the peripheral images (sanity)."""
    out = []
    for lab, p in zip(rep.presentation.peripherals, d.points):
        out.append(float(np.max(np.abs(rep.images[lab].apply(p) - p))))
    return out


# ---------------------------------------------------------------------------
# cone surfaces
# ---------------------------------------------------------------------------


def tetrahedron_surface(side=1.0):
    """Boundary of the regular tetrahedron: four cone points of angle pi."""
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    gluing = {}
    directed = {}
    for t, (x, y, z) in enumerate(faces):
        cyc = (x, y, z)
        for s in range(3):
            directed[(cyc[s], cyc[(s + 1) % 3])] = (t, s)
    for (u, v), slot in directed.items():
        gluing[slot] = directed[(v, u)]
    tris = [(f, (side, side, side)) for f in faces]
    return ConeSurface(tris, gluing)


def pillowcase_surface(side=1.0):
    """Double of the unit square: four cone points of angle pi."""
    d = side * math.sqrt(2.0)
    tris = [
        ((0, 1, 2), (side, side, d)),
        ((0, 2, 3), (d, side, side)),
        ((2, 1, 0), (side, side, d)),
        ((3, 2, 0), (side, d, side)),
    ]
    gluing = {
        (0, 0): (2, 1),
        (2, 1): (0, 0),
        (0, 1): (2, 0),
        (2, 0): (0, 1),
        (1, 1): (3, 0),
        (3, 0): (1, 1),
        (1, 2): (3, 2),
        (3, 2): (1, 2),
        (0, 2): (1, 0),
        (1, 0): (0, 2),
        (2, 2): (3, 1),
        (3, 1): (2, 2),
    }
    return ConeSurface(tris, gluing)


def square_torus_surface(side=1.0):
    """Unit square torus with one marked (flat, angle 2 pi) point."""
    d = side * math.sqrt(2.0)
    tris = [
        ((0, 0, 0), (side, side, d)),
        ((0, 0, 0), (d, side, side)),
    ]
    gluing = {
        (0, 0): (1, 1),
        (1, 1): (0, 0),
        (0, 1): (1, 2),
        (1, 2): (0, 1),
        (0, 2): (1, 0),
        (1, 0): (0, 2),
    }
    return ConeSurface(tris, gluing)


def double_of_polygon(points2d, apex=0):
    """Double of a convex polygon, both sides fan-triangulated from apex.

    Every polygon vertex becomes a cone point of angle twice its interior
    angle; the result is a flat sphere with n singular points.
    """
    pts = np.asarray(points2d, dtype=float)
    n = len(pts)
    if n < 3:
        raise ValueError("need at least a triangle")
    idx = [(apex + m) % n for m in range(n)]

    def length(u, v):
        return float(np.linalg.norm(pts[u] - pts[v]))

    tris = []
    slots_front = {}
    slots_back = {}
    for m in range(1, n - 1):
        tri = (idx[0], idx[m], idx[m + 1])
        lens = (
            length(tri[0], tri[1]),
            length(tri[1], tri[2]),
            length(tri[2], tri[0]),
        )
        t = len(tris)
        tris.append((tri, lens))
        for s in range(3):
            slots_front[(tri[s], tri[(s + 1) % 3])] = (t, s)
    for m in range(1, n - 1):
        tri = (idx[m + 1], idx[m], idx[0])
        lens = (
            length(tri[0], tri[1]),
            length(tri[1], tri[2]),
            length(tri[2], tri[0]),
        )
        t = len(tris)
        tris.append((tri, lens))
        for s in range(3):
            slots_back[(tri[s], tri[(s + 1) % 3])] = (t, s)

    gluing = {}

    def glue(sa, sb):
        gluing[sa] = sb
        gluing[sb] = sa

    for m in range(n):
        u, v = idx[m], idx[(m + 1) % n]
        if (u, v) in slots_front and (v, u) in slots_back:
            glue(slots_front[(u, v)], slots_back[(v, u)])
    for m in range(2, n - 1):
        glue(slots_front[(idx[0], idx[m])], slots_front[(idx[m], idx[0])])
        glue(slots_back[(idx[0], idx[m])], slots_back[(idx[m], idx[0])])
    return ConeSurface(tris, gluing)


def random_convex_polygon(n, seed, min_angle_gap=0.15):
    """Convex n-gon: points at sorted random angles on a generic ellipse."""
    rng = np.random.default_rng(seed)
    while True:
        theta = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=n))
        gaps = np.diff(np.concatenate([theta, [theta[0] + 2 * math.pi]]))
        if np.min(gaps) > min_angle_gap:
            break
    a = 1.0 + rng.uniform(0.2, 0.8)
    b = 1.0
    return np.column_stack([a * np.cos(theta), b * np.sin(theta)])


def random_cone_surface(n_triangles=20, seed=0, apex=0):
    """Double of a random convex polygon with n_triangles triangles."""
    if n_triangles % 2 or n_triangles < 2:
        raise ValueError("need an even triangle count >= 2")
    n = n_triangles // 2 + 2
    return double_of_polygon(random_convex_polygon(n, seed), apex=apex)


def relation_word(rep):
    return rep.presentation.relation()


def relation_residual(rep):
    return evaluate_word(rep, rep.presentation.relation()).defect_from_identity()
