"""Decorations, horocycles, and finite orbit enumeration.

A decoration picks one future light-cone point per peripheral class.  Via
``dec_inv`` each such point p corresponds to the horocycle

    {x in H^2 : <x|p> = -1/2},

the intersection of the boundary of J^+(p) with the hyperboloid: for x on
the hyperboloid (<x|x> = -1) and p lightlike (<p|p> = 0) one has
<x-p|x-p> = -1 - 2<x|p>, which vanishes exactly when <x|p> = -1/2.  The
cone point itself is the canonical representation of the horocycle;
boundary angle and level are derived display fields only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotLightlike
from .holonomy import evaluate_word, invert_word, reduce_word
from .minkowski import EPS_FORM, AffineIsometry, is_future_lightlike, mink_form

#: Relative deduplication tolerance for orbit points.  Points on the cone
#: grow exponentially with word length, so the tolerance is relative to
#: point magnitude; an absolute tolerance fails beyond radius ~8.
DEDUP_RTOL = 1e-8


@dataclass(frozen=True)
class Horocycle:
    """Horocycle of H^2, canonically represented by its cone point."""

    conepoint: np.ndarray

    @property
    def boundary_angle(self):
        """Angle of the center on the boundary circle of H^2."""
        return float(np.arctan2(self.conepoint[2], self.conepoint[1]))

    @property
    def level(self):
        """Height of the cone point; larger level = smaller horoball."""
        return float(self.conepoint[0])

    @classmethod
    def from_display(cls, boundary_angle, level):
        p = level * np.array([1.0, np.cos(boundary_angle), np.sin(boundary_angle)])
        p.setflags(write=False)
        return cls(p)

    def membership_residual(self, x):
        """|<x|p> + 1/2|; zero iff x lies on the horocycle."""
        return abs(mink_form(x, self.conepoint) + 0.5)


def dec_inv(p, tol=EPS_FORM):
    """Horocycle associated to a future lightlike point."""
    p = np.asarray(p, dtype=float)
    if not is_future_lightlike(p, tol):
        raise NotLightlike(f"q(p) = {mink_form(p, p):.3e}, p_t = {p[0]:.3e}")
    p = p.copy()
    p.setflags(write=False)
    return Horocycle(p)


def dec(h):
    """Inverse of dec_inv; exact on the canonical representation."""
    return h.conepoint


class Decoration:
    """One future light-cone point per peripheral class."""

    def __init__(self, points, tol=EPS_FORM, metadata=None):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
            raise ValueError("expected an (s, 3) array of points")
        for j, p in enumerate(pts):
            if not is_future_lightlike(p, tol):
                raise NotLightlike(f"decoration point {j} is not future lightlike")
        pts.setflags(write=False)
        self.points = pts
        #: Records how the points were chosen (e.g. solved fixed-line base
        #: points for affine holonomy); purely informational.
        self.metadata = dict(metadata or {})

    def __len__(self):
        return len(self.points)

    def scaled(self, factor):
        if np.ndim(factor) == 0:
            factors = [factor] * len(self.points)
        else:
            factors = list(factor)
        return Decoration(
            [f * p for f, p in zip(factors, self.points)],
            metadata={**self.metadata, "scaled_by": list(map(float, factors))},
        )


def validate_decoration(rep, d, tol=1e-7):
    """Check each decoration point is fixed by its peripheral image.

    Works for linear and affine representations alike (a linear parabolic
    fixes its eigenray pointwise).  Returns the max fixed-point residual.
    """
    worst = 0.0
    peripherals = rep.presentation.peripherals
    if len(peripherals) != len(d):
        raise ValueError(
            f"decoration has {len(d)} points but presentation has "
            f"{len(peripherals)} peripherals"
        )
    for lab, p in zip(peripherals, d.points):
        phi = rep.images[lab]
        scale = max(1.0, float(np.max(np.abs(p))))
        worst = max(worst, float(np.max(np.abs(phi.apply(p) - p))) / scale)
    if worst > tol:
        raise ValueError(f"decoration not fixed by peripherals (residual {worst:.3e})")
    return worst


class OrbitPointSet:
    """Deduplicated finite piece of the orbit of the decoration points.

    Each entry keeps the shortest-lex word that first produced the point
    and the index of the decoration point it came from.
    """

    def __init__(self, words, points, decoration_index, radius, dedup_rtol=DEDUP_RTOL):
        self.words = list(words)
        pts = np.array(points, dtype=float)
        pts.setflags(write=False)
        self.points = pts
        self.decoration_index = np.array(decoration_index, dtype=int)
        self.radius = radius
        self.dedup_rtol = dedup_rtol

    def __len__(self):
        return len(self.words)

    def scales(self):
        """Per-point magnitude used for relative comparisons."""
        return np.maximum(1.0, np.max(np.abs(self.points), axis=1))

    def find(self, p, rtol=None):
        """Index of the entry matching p within the dedup tolerance, or -1."""
        if len(self.words) == 0:
            return -1
        rtol = self.dedup_rtol if rtol is None else rtol
        scale = np.maximum(self.scales(), float(np.max(np.abs(p))))
        hits = np.nonzero(np.max(np.abs(self.points - p), axis=1) <= rtol * scale)[0]
        return int(hits[0]) if len(hits) else -1


def _ball_words(generators, radius):
    """Reduced words of length <= radius, breadth first, lex within length."""
    tokens = list(generators) + ["-" + g for g in generators]
    words = [()]
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            last_inv = None
            if w:
                last = w[-1]
                last_inv = last[1:] if last.startswith("-") else "-" + last
            for tok in tokens:
                if tok == last_inv:
                    continue
                nxt.append(w + (tok,))
        frontier = nxt
        words.extend(frontier)
    return words


def orbit_ball(rep, d, radius, dedup_rtol=DEDUP_RTOL):
    """Apply every reduced word of length <= radius to every decoration point.

    Breadth-first and lexicographic within each length, so representatives
    are stable: the entry set at radius R is a prefix of the one at R+1.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    words, points, dec_idx = [], [], []
    pts_arr = np.empty((0, 3))
    scales = np.empty(0)

    def try_add(word, point, j):
        nonlocal pts_arr, scales
        if len(words) > 0:
            scale = np.maximum(scales, max(1.0, float(np.max(np.abs(point)))))
            if np.any(np.max(np.abs(pts_arr - point), axis=1) <= dedup_rtol * scale):
                return
        words.append(word)
        points.append(point)
        dec_idx.append(j)
        pts_arr = np.vstack([pts_arr, point[None, :]])
        scales = np.append(scales, max(1.0, float(np.max(np.abs(point)))))

    # Incremental isometries along the word tree keep this linear in the
    # number of words instead of quadratic in word length.
    isos = {(): AffineIsometry.identity()}
    for word in _ball_words(rep.presentation.generators, radius):
        if word not in isos:
            isos[word] = isos[word[:-1]] @ rep.image(word[-1])
        iso = isos[word]
        for j, p in enumerate(d.points):
            try_add(word, iso.apply(p), j)

    return OrbitPointSet(words, points, dec_idx, radius, dedup_rtol)


def word_isometry(rep, word):
    """Isometry of a word (convenience wrapper around evaluate_word)."""
    return evaluate_word(rep, word)


def translate_word(word, by):
    """Left-multiply a word: point(word) -> point(by + word), reduced."""
    return reduce_word(tuple(by) + tuple(word))


def count_orbit_in_past(o, point, tol=1e-9):
    """Number of orbit entries in the causal past of the given point.

    An entry p counts when point - p is future causal: q(point - p) <= eps
    and (point - p)_t > -eps, with eps relative to the magnitudes involved.
    """
    point = np.asarray(point, dtype=float)
    diff = point[None, :] - o.points
    qs = -diff[:, 0] ** 2 + diff[:, 1] ** 2 + diff[:, 2] ** 2
    scale = np.maximum(1.0, np.max(np.abs(diff), axis=1) ** 2)
    causal = (qs <= tol * scale) & (diff[:, 0] >= -tol * np.sqrt(scale))
    return int(np.count_nonzero(causal))


__all__ = [
    "DEDUP_RTOL",
    "Decoration",
    "Horocycle",
    "OrbitPointSet",
    "count_orbit_in_past",
    "dec",
    "dec_inv",
    "invert_word",
    "orbit_ball",
    "translate_word",
    "validate_decoration",
    "word_isometry",
]
