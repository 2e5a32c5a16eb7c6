"""Adaptive-precision orientation predicates for the hull kernel.

Three layers, applied in order:

1. float evaluation of the orientation determinant, accepted when its
   magnitude exceeds a forward error bound built from the permanent of
   the same expression;
2. exact sign over the rationals (float coordinates are exact dyadic
   rationals, so Fraction arithmetic is exact);
3. when the exact determinant is zero, a symbolic perturbation along the
   moment curve: point i is displaced by eta^(i+1) * (t, t^2, t^3) with
   t = i + 1, and the sign of the lowest-order nonvanishing coefficient
   of det(eta) is returned.  The top coefficient is a Vandermonde
   determinant of distinct nodes, so the polynomial never vanishes
   identically and the perturbed predicate never answers zero.

Orbit points on the light cone make layer 3 matter: entire stabilizer
cosets lie on one lightlike plane and cocyclic cells are exactly
coplanar, so zero determinants are structural, not accidental.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

_EPS = float(np.finfo(float).eps) * 0.5  # 2^-53
#: Error-bound coefficient for the one-shot float determinant.
ORIENT3D_BOUND = (7.0 + 56.0 * _EPS) * _EPS


def orient3d_det(a, b, c, d):
    """Float value of det[b-a; c-a; d-a] and its permanent (for bounds)."""
    m00, m01, m02 = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    m10, m11, m12 = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    m20, m21, m22 = d[0] - a[0], d[1] - a[1], d[2] - a[2]
    det = (
        m00 * (m11 * m22 - m12 * m21)
        - m01 * (m10 * m22 - m12 * m20)
        + m02 * (m10 * m21 - m11 * m20)
    )
    perm = (
        abs(m00) * (abs(m11) * abs(m22) + abs(m12) * abs(m21))
        + abs(m01) * (abs(m10) * abs(m22) + abs(m12) * abs(m20))
        + abs(m02) * (abs(m10) * abs(m21) + abs(m11) * abs(m20))
    )
    return det, perm


def _exact_sign(a, b, c, d):
    ax, ay, az = (Fraction(float(x)) for x in a)
    bx, by, bz = (Fraction(float(x)) for x in b)
    cx, cy, cz = (Fraction(float(x)) for x in c)
    dx, dy, dz = (Fraction(float(x)) for x in d)
    m00, m01, m02 = bx - ax, by - ay, bz - az
    m10, m11, m12 = cx - ax, cy - ay, cz - az
    m20, m21, m22 = dx - ax, dy - ay, dz - az
    det = (
        m00 * (m11 * m22 - m12 * m21)
        - m01 * (m10 * m22 - m12 * m20)
        + m02 * (m10 * m21 - m11 * m20)
    )
    if det > 0:
        return 1
    if det < 0:
        return -1
    return 0


def orient3d_true(points, i, j, k, l):
    """Exact sign of det[p_j - p_i; p_k - p_i; p_l - p_i]; zero on coplanar."""
    a, b, c, d = points[i], points[j], points[k], points[l]
    det, perm = orient3d_det(a, b, c, d)
    bound = ORIENT3D_BOUND * perm
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return _exact_sign(a, b, c, d)


def _poly_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return out


def _sos_sign(points, idx):
    """Sign of the perturbed 4x4 determinant, never zero.

    Rows are [x + eta^(m+1) t, y + eta^(m+1) t^2, z + eta^(m+1) t^3, 1]
    for point index m with node t = m + 1; the coefficient of the total
    perturbation degree is a nonzero Vandermonde-type determinant.
    """
    rows = []
    for m in idx:
        x, y, z = (Fraction(float(v)) for v in points[m])
        t = Fraction(m + 1)
        e = m + 1
        rows.append(
            [
                {0: x, e: t},
                {0: y, e: t * t},
                {0: z, e: t * t * t},
                {0: Fraction(1)},
            ]
        )
    # expand the 4x4 determinant along the constant last column
    total = {}
    sign4 = [1, -1, 1, -1]
    for r in range(4):
        minor_rows = [rows[m] for m in range(4) if m != r]
        det3 = {}
        for perm, s in (
            ((0, 1, 2), 1),
            ((1, 2, 0), 1),
            ((2, 0, 1), 1),
            ((2, 1, 0), -1),
            ((1, 0, 2), -1),
            ((0, 2, 1), -1),
        ):
            term = _poly_mul(
                _poly_mul(minor_rows[0][perm[0]], minor_rows[1][perm[1]]),
                minor_rows[2][perm[2]],
            )
            for e, cval in term.items():
                det3[e] = det3.get(e, Fraction(0)) + s * cval
        for e, cval in det3.items():
            total[e] = total.get(e, Fraction(0)) + sign4[r] * cval
    for e in sorted(total):
        if total[e] != 0:
            return 1 if total[e] > 0 else -1
    raise AssertionError("perturbed determinant vanished identically")


def _row_parity(idx):
    """Sort indices, returning (sorted tuple, permutation sign)."""
    arr = list(idx)
    sign = 1
    for a in range(1, 4):
        b = a
        while b > 0 and arr[b - 1] > arr[b]:
            arr[b - 1], arr[b] = arr[b], arr[b - 1]
            sign = -sign
            b -= 1
    return tuple(arr), sign


class OrientOracle:
    """Perturbed orientation predicate over a fixed point array, cached."""

    def __init__(self, points):
        self.points = np.asarray(points, dtype=float)
        self._cache = {}

    def orient(self, i, j, k, l):
        """Sign of det[p_j-p_i; p_k-p_i; p_l-p_i] after perturbation (+-1)."""
        a, b, c, d = (self.points[m] for m in (i, j, k, l))
        det, perm = orient3d_det(a, b, c, d)
        bound = ORIENT3D_BOUND * perm
        if det > bound:
            return 1
        if det < -bound:
            return -1
        key, sign = _row_parity((i, j, k, l))
        if key not in self._cache:
            exact = _exact_sign(*(self.points[m] for m in key))
            self._cache[key] = exact if exact != 0 else _sos_sign(self.points, key)
        return sign * self._cache[key]

    def orient_batch(self, i, j, k, candidates):
        """Vectorized signs of det[...; p_m - p_i] for m in candidates."""
        a = self.points[i]
        u = self.points[j] - a
        v = self.points[k] - a
        n = np.cross(u, v)
        au, av = np.abs(u), np.abs(v)
        n_perm = np.array(
            [
                au[1] * av[2] + au[2] * av[1],
                au[2] * av[0] + au[0] * av[2],
                au[0] * av[1] + au[1] * av[0],
            ]
        )
        diffs = self.points[candidates] - a
        dets = diffs @ n
        # conservative: covers rounding in n, the differences and the dot
        bound = 32.0 * _EPS * (np.abs(diffs) @ (np.abs(n) + n_perm))
        signs = np.zeros(len(candidates), dtype=np.int8)
        signs[dets > bound] = 1
        signs[dets < -bound] = -1
        for row in np.nonzero(np.abs(dets) <= bound)[0]:
            signs[row] = self.orient(i, j, k, int(candidates[row]))
        return signs


def coplanar_band(a, b, c, d, rel_tol):
    """True when d is within rel_tol (relative) of the plane through a, b, c.

    Used for coplanar facet merging, where the band is much wider than
    floating point error.
    """
    det, perm = orient3d_det(a, b, c, d)
    return abs(det) <= rel_tol * max(perm, 1e-300)
