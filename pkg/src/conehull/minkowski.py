"""Linear algebra of Minkowski 3-space R^{1,2}.

Vectors are numpy arrays (t, x, y) carrying the quadratic form

    q(t, x, y) = -t^2 + x^2 + y^2

with polarization ``mink_form(u, v) = -u_t v_t + u_x v_x + u_y v_y``.
Orientation- and time-orientation-preserving isometries form
SO_0(1,2) |x R^3; a linear isometry is a 3x3 matrix m with
m^T J m = J (J = diag(-1,1,1)), det m = 1 and m[0,0] > 0.

Orientation convention, used consistently by ``align_wedge``:
``mink_cross(u, v) = J @ np.cross(u, v)`` so that
mink_form(mink_cross(u, v), u) = mink_form(mink_cross(u, v), v) = 0 and
gamma @ mink_cross(u, v) = mink_cross(gamma u, gamma v) for gamma in
SO_0(1,2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame, InvalidIsometry, NotParabolic, NotUnimodular, PairingMismatch

#: Module-wide tolerance on normalized quantities (double precision inputs
#: of moderate dynamic range).
EPS_FORM = 1e-9

J = np.diag([-1.0, 1.0, 1.0])
J.setflags(write=False)


def vec(t, x, y):
    """Minkowski vector as a read-only float array (t, x, y)."""
    v = np.array([t, x, y], dtype=float)
    v.setflags(write=False)
    return v


def mink_form(u, v):
    """Bilinear pairing <u|v> = -u_t v_t + u_x v_x + u_y v_y."""
    return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def q(v):
    """Quadratic form q(v) = <v|v>."""
    return mink_form(v, v)


def mink_cross(u, v):
    """J-adjusted cross product, Minkowski-orthogonal to both arguments.

    Returns the zero vector when u, v are parallel.
    """
    return J @ np.cross(u, v)


def is_future_lightlike(v, tol=EPS_FORM):
    """True when q(v) = 0 within tol (relative to |v|^2) and v_t > 0."""
    scale = max(1.0, float(np.max(np.abs(v))) ** 2)
    return abs(q(v)) <= tol * scale and v[0] > 0


def isometry_defect(m):
    """max-norm of m^T J m - J; zero exactly on O(1,2)."""
    return float(np.max(np.abs(m.T @ J @ m - J)))


def require_isometry(m, tol=EPS_FORM):
    """Raise InvalidIsometry unless m lies in SO_0(1,2) within tol."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise InvalidIsometry(f"expected 3x3 matrix, got {m.shape}")
    defect = isometry_defect(m)
    if defect > tol * max(1.0, float(np.max(np.abs(m))) ** 2):
        raise InvalidIsometry(f"m^T J m - J has max defect {defect:.3e}")
    if abs(np.linalg.det(m) - 1.0) > 1e3 * tol * max(1.0, float(np.max(np.abs(m))) ** 3):
        raise InvalidIsometry("determinant is not 1")
    if m[0, 0] <= 0:
        raise InvalidIsometry("time orientation reversed (m[0,0] <= 0)")
    return m


class LinearIsometry:
    """Element of SO_0(1,2), wrapping an immutable 3x3 matrix."""

    __slots__ = ("m",)

    def __init__(self, m, tol=EPS_FORM, check=True):
        m = np.array(m, dtype=float)
        if check:
            require_isometry(m, tol)
        m.setflags(write=False)
        self.m = m

    @classmethod
    def identity(cls):
        return cls(np.eye(3), check=False)

    def apply(self, v):
        return self.m @ v

    def __matmul__(self, other):
        if isinstance(other, LinearIsometry):
            return LinearIsometry(self.m @ other.m, check=False)
        return self.m @ other

    def inverse(self):
        # J m^T J inverts any J-orthogonal matrix without a linear solve.
        return LinearIsometry(J @ self.m.T @ J, check=False)

    @property
    def trace(self):
        return float(np.trace(self.m))

    def __repr__(self):
        return f"LinearIsometry({self.m.tolist()!r})"


class AffineIsometry:
    """Affine isometry x -> linear x + translation of R^{1,2}."""

    __slots__ = ("linear", "translation")

    def __init__(self, linear, translation=None, tol=EPS_FORM, check=True):
        if not isinstance(linear, LinearIsometry):
            linear = LinearIsometry(linear, tol=tol, check=check)
        if translation is None:
            translation = np.zeros(3)
        translation = np.array(translation, dtype=float)
        translation.setflags(write=False)
        self.linear = linear
        self.translation = translation

    @classmethod
    def identity(cls):
        return cls(LinearIsometry.identity())

    def apply(self, v):
        return self.linear.m @ v + self.translation

    def __matmul__(self, other):
        if isinstance(other, AffineIsometry):
            return AffineIsometry(
                LinearIsometry(self.linear.m @ other.linear.m, check=False),
                self.linear.m @ other.translation + self.translation,
            )
        return self.apply(other)

    def inverse(self):
        inv = self.linear.inverse()
        return AffineIsometry(inv, -(inv.m @ self.translation))

    def defect_from_identity(self):
        """max-norm distance from the identity over both parts."""
        return max(
            float(np.max(np.abs(self.linear.m - np.eye(3)))),
            float(np.max(np.abs(self.translation))),
        )

    def __repr__(self):
        return f"AffineIsometry({self.linear.m.tolist()!r}, {self.translation.tolist()!r})"


class IsometryKind(enum.Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


class FixedSetKind(enum.Enum):
    HAS_FIXED_POINT = "has_fixed_point"
    FIXED_LIGHTLIKE_LINE = "fixed_lightlike_line"
    NO_FIXED_POINT = "no_fixed_point"


@dataclass(frozen=True)
class CausalClass:
    """Linear conjugacy class plus the fixed-set refinement of the affine part."""

    kind: IsometryKind
    fixed: FixedSetKind

    def __str__(self):
        return f"{self.kind.value}/{self.fixed.value}"


def _as_affine(phi):
    if isinstance(phi, AffineIsometry):
        return phi
    if isinstance(phi, LinearIsometry):
        return AffineIsometry(phi)
    return AffineIsometry(LinearIsometry(phi))


def fixed_direction(m, tol=EPS_FORM):
    """Unit vector spanning ker(m - I); None when 1 is not an eigenvalue.

    For parabolic m the direction is future lightlike and gets normalized
    to t = 1.
    """
    m = np.asarray(m, dtype=float)
    u, s, vt = np.linalg.svd(m - np.eye(3))
    scale = max(1.0, s[0])
    if s[-1] > 1e3 * tol * scale:
        return None
    v = vt[-1]
    if abs(v[0]) > 1e-12:
        v = v / v[0]
    elif v[1] < 0 or (v[1] == 0 and v[2] < 0):
        v = -v
    v = np.array(v)
    v.setflags(write=False)
    return v


def classify(phi, tol=EPS_FORM):
    """Causal class of an isometry from the trace of its linear part.

    trace < 3 - tol: elliptic (1 + 2 cos theta); trace > 3 + tol:
    hyperbolic (1 + 2 cosh l); |trace - 3| <= tol: parabolic, or the
    identity when ||m - I||_inf <= tol.  The fixed-set refinement solves
    (I - m) x = translation on its rank-2 image.
    """
    phi = _as_affine(phi)
    m = require_isometry(phi.linear.m, tol)
    tau = phi.translation
    tr = float(np.trace(m))
    tau_scale = max(1.0, float(np.max(np.abs(tau))))

    if abs(tr - 3.0) <= tol:
        if float(np.max(np.abs(m - np.eye(3)))) <= tol:
            fixed = (
                FixedSetKind.HAS_FIXED_POINT
                if float(np.max(np.abs(tau))) <= tol * tau_scale
                else FixedSetKind.NO_FIXED_POINT
            )
            return CausalClass(IsometryKind.IDENTITY, fixed)
        v = fixed_direction(m, tol)
        tangent = v is not None and abs(mink_form(tau, v)) <= tol * tau_scale * max(
            1.0, float(np.max(np.abs(v)))
        )
        fixed = FixedSetKind.FIXED_LIGHTLIKE_LINE if tangent else FixedSetKind.NO_FIXED_POINT
        return CausalClass(IsometryKind.PARABOLIC, fixed)

    kind = IsometryKind.ELLIPTIC if tr < 3.0 else IsometryKind.HYPERBOLIC
    v = fixed_direction(m, tol)
    if v is None:
        # Elliptic rotation whose axis the SVD could not resolve; the axis
        # always exists, so treat the solve as authoritative instead.
        fixed = FixedSetKind.HAS_FIXED_POINT
    else:
        tangent = abs(mink_form(tau, v)) <= tol * tau_scale * max(1.0, float(np.max(np.abs(v))))
        fixed = FixedSetKind.HAS_FIXED_POINT if tangent else FixedSetKind.NO_FIXED_POINT
    return CausalClass(kind, fixed)


def parabolic_fixed_line(phi, tol=EPS_FORM):
    """Fixed line of a parabolic affine isometry, or None.

    phi has fixed points iff its translation part pairs to zero with the
    fixed lightlike eigendirection v of the linear part (tau in Fix^perp,
    which equals Im(linear - I)).  On success returns ``(point,
    direction)`` with direction normalized to t = 1; the full fixed set is
    ``point + R * direction``.
    """
    phi = _as_affine(phi)
    m = phi.linear.m
    tau = phi.translation
    cls = classify(AffineIsometry(phi.linear), tol)
    if cls.kind is not IsometryKind.PARABOLIC:
        raise NotParabolic(f"linear part is {cls.kind.value}, not parabolic")
    v = fixed_direction(m, tol)
    if v is None:
        raise NotParabolic("could not resolve the fixed lightlike direction")
    tau_scale = max(1.0, float(np.max(np.abs(tau))))
    if abs(mink_form(tau, v)) > tol * tau_scale * max(1.0, float(np.max(np.abs(v)))):
        return None
    # (I - m) has rank 2 with image Fix(m)^perp; least squares projects tau
    # onto the image and returns one preimage.
    point, *_ = np.linalg.lstsq(np.eye(3) - m, tau, rcond=None)
    point.setflags(write=False)
    return point, v


def align_wedge(a1, b1, a2, b2, tol=EPS_FORM):
    """Unique gamma in SO_0(1,2) with gamma a1 = b2 and gamma b1 = a2.

    All four vectors must be future lightlike with equal edge pairings
    <a1|b1> = <a2|b2>.  Reversing the directed edge under an
    orientation-preserving map puts the two wedges on different sides of
    the shared plane; equivalently gamma maps mink_cross(a1, b1) onto
    mink_cross(b2, a2) = -mink_cross(a2, b2).
    """
    a1, b1, a2, b2 = (np.asarray(v, dtype=float) for v in (a1, b1, a2, b2))
    for name, v in (("a1", a1), ("b1", b1), ("a2", a2), ("b2", b2)):
        if not is_future_lightlike(v, max(tol, 1e2 * EPS_FORM)):
            raise DegenerateFrame(f"{name} is not future lightlike")
    g1 = mink_form(a1, b1)
    g2 = mink_form(a2, b2)
    scale = max(1.0, abs(g1), abs(g2))
    if abs(g1 - g2) > 1e3 * tol * scale:
        raise PairingMismatch(f"<a1|b1> = {g1:.12g} but <a2|b2> = {g2:.12g}")
    w1 = mink_cross(a1, b1)
    w2 = mink_cross(b2, a2)
    if float(np.max(np.abs(w1))) <= tol * scale or float(np.max(np.abs(w2))) <= tol * scale:
        raise DegenerateFrame("lightlike pair is parallel")
    m1 = np.column_stack([a1, b1, w1])
    m2 = np.column_stack([b2, a2, w2])
    gamma = np.linalg.solve(m1.T, m2.T).T
    return LinearIsometry(gamma, tol=max(1e4 * tol, 1e-7))


def psl2_to_so12(a, b, c, d, tol=EPS_FORM):
    """Image of [[a,b],[c,d]] under the 2-to-1 cover PSL(2,R) -> SO_0(1,2).

    Realized through the action M S M^T on symmetric matrices
    S = [[t+x, y], [y, t-x]] (det S = -q).  Both lifts +-M map to the same
    image; the trace satisfies (a+d)^2 = 1 + trace(image).
    """
    det = a * d - b * c
    if abs(det - 1.0) > tol * max(1.0, a * a + b * b + c * c + d * d):
        raise NotUnimodular(f"determinant {det:.12g} != 1")
    m = np.array(
        [
            [
                0.5 * (a * a + b * b + c * c + d * d),
                0.5 * (a * a - b * b + c * c - d * d),
                a * b + c * d,
            ],
            [
                0.5 * (a * a + b * b - c * c - d * d),
                0.5 * (a * a - b * b - c * c + d * d),
                a * b - c * d,
            ],
            [a * c + b * d, a * c - b * d, a * d + b * c],
        ]
    )
    return LinearIsometry(m, tol=max(1e3 * tol, 1e-6))
