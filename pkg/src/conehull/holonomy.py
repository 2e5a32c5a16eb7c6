"""Marked surface-group presentations and their isometry representations.

A marked surface group of genus g with s punctures is

    < a_1, b_1, ..., a_g, b_g, c_1, ..., c_s |
      [a_1,b_1]...[a_g,b_g] c_1...c_s = 1 >,

with [a,b] = a b a^-1 b^-1 and the c_j ("peripherals") encircling the
punctures.  Words are tuples of generator labels; a leading "-" marks an
inverse, e.g. ("a1", "b1", "-a1", "-b1") for the g=1 commutator.

Admissibility is checked only up to its decidable part: peripherals
parabolic with tangent translation parts, handles hyperbolic, relation
closed.  Discreteness and faithfulness of the linear part are not decided
in floating point; reports carry the caveat explicitly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import UnknownGenerator
from .minkowski import (
    EPS_FORM,
    AffineIsometry,
    CausalClass,
    IsometryKind,
    classify,
    fixed_direction,
    mink_form,
)

#: Tolerance on relation residuals for representations built from exact
#: rationals; scales roughly linearly with word length for float inputs.
EPS_REL = 1e-8

DISCRETENESS_CAVEAT = (
    "discreteness and faithfulness are not decided numerically; "
    "verdict covers necessary conditions only"
)


def parse_word(text):
    """Word from a whitespace-separated string, e.g. 'a1 b1 -a1 -b1'."""
    return tuple(text.split())


def invert_word(word):
    return tuple(tok[1:] if tok.startswith("-") else "-" + tok for tok in reversed(word))


def reduce_word(word):
    """Free reduction (cancel adjacent g, g^-1 pairs)."""
    out = []
    for tok in word:
        inv = tok[1:] if tok.startswith("-") else "-" + tok
        if out and out[-1] == inv:
            out.pop()
        else:
            out.append(tok)
    return tuple(out)


class MarkedGroupPresentation:
    """Surface-group presentation marked by (a_i, b_i, c_j) generators."""

    def __init__(self, genus, punctures):
        if genus < 0 or punctures < 1:
            raise ValueError("need genus >= 0 and at least one puncture")
        if 2 * genus - 2 + punctures <= 0:
            raise ValueError("2g - 2 + s > 0 is required")
        self.genus = genus
        self.punctures = punctures
        self.handles = tuple(
            lab for i in range(1, genus + 1) for lab in (f"a{i}", f"b{i}")
        )
        self.peripherals = tuple(f"c{j}" for j in range(1, punctures + 1))
        self.generators = self.handles + self.peripherals

    def relation(self):
        word = []
        for i in range(1, self.genus + 1):
            word += [f"a{i}", f"b{i}", f"-a{i}", f"-b{i}"]
        word += list(self.peripherals)
        return tuple(word)

    def relations(self):
        return (self.relation(),)

    def __repr__(self):
        return f"MarkedGroupPresentation(genus={self.genus}, punctures={self.punctures})"


class FreePresentation:
    """Free group on explicit labels; used by suspension assemblies."""

    def __init__(self, generators):
        self.generators = tuple(generators)
        self.handles = ()
        self.peripherals = ()

    def relations(self):
        return ()

    def __repr__(self):
        return f"FreePresentation({list(self.generators)!r})"


class AffineRepresentation:
    """Generator images in Isom(R^{1,2}) for a presentation."""

    def __init__(self, presentation, images):
        self.presentation = presentation
        unknown = set(images) - set(presentation.generators)
        missing = set(presentation.generators) - set(images)
        if unknown or missing:
            raise UnknownGenerator(
                f"images do not match generators (missing {sorted(missing)}, "
                f"unexpected {sorted(unknown)})"
            )
        self.images = {
            lab: img if isinstance(img, AffineIsometry) else AffineIsometry(img)
            for lab, img in images.items()
        }
        self._inverses = {}

    def image(self, token):
        """Image of a signed generator token."""
        if token.startswith("-"):
            label = token[1:]
            if label not in self.images:
                raise UnknownGenerator(label)
            if label not in self._inverses:
                self._inverses[label] = self.images[label].inverse()
            return self._inverses[label]
        if token not in self.images:
            raise UnknownGenerator(token)
        return self.images[token]

    def linear_part(self):
        """Same representation with all translation parts dropped."""
        return AffineRepresentation(
            self.presentation,
            {lab: AffineIsometry(img.linear) for lab, img in self.images.items()},
        )

    def is_linear(self, tol=EPS_FORM):
        return all(
            float(np.max(np.abs(img.translation))) <= tol for img in self.images.values()
        )

    def conjugated(self, phi):
        """Representation with every image replaced by phi . img . phi^-1."""
        phi_inv = phi.inverse()
        return AffineRepresentation(
            self.presentation,
            {lab: phi @ img @ phi_inv for lab, img in self.images.items()},
        )


def evaluate_word(rep, word):
    """Left-to-right product of generator images; empty word -> identity."""
    out = AffineIsometry.identity()
    for token in word:
        out = out @ rep.image(token)
    return out


def check_relation(rep):
    """Max-norm distance of the evaluated relation word(s) from the identity."""
    residual = 0.0
    for rel in rep.presentation.relations():
        residual = max(residual, evaluate_word(rep, rel).defect_from_identity())
    return residual


def is_tangent(phi, tol=EPS_FORM):
    """True iff the translation part pairs to zero with the fixed lightlike
    direction of the (parabolic) linear part."""
    cls = classify(AffineIsometry(phi.linear), tol)
    if cls.kind is not IsometryKind.PARABOLIC:
        from .errors import NotParabolic

        raise NotParabolic(f"linear part is {cls.kind.value}")
    v = fixed_direction(phi.linear.m, tol)
    tau = phi.translation
    scale = max(1.0, float(np.max(np.abs(tau)))) * max(1.0, float(np.max(np.abs(v))))
    return abs(mink_form(tau, v)) <= tol * scale


class Verdict(enum.Enum):
    ADMISSIBLE_NECESSARY_CONDITIONS = "admissible_necessary_conditions"
    NOT_ADMISSIBLE = "not_admissible"


@dataclass
class AdmissibilityReport:
    relation_ok: bool
    relation_residual: float
    peripheral_classes: list = field(default_factory=list)
    handle_classes: list = field(default_factory=list)
    tangency_ok: list = field(default_factory=list)
    verdict: Verdict = Verdict.NOT_ADMISSIBLE
    caveat: str = DISCRETENESS_CAVEAT

    @property
    def passed(self):
        return self.verdict is Verdict.ADMISSIBLE_NECESSARY_CONDITIONS


def check_admissible(rep, tol=EPS_FORM, rel_tol=EPS_REL):
    """Decidable part of admissibility: relation closed, every peripheral
    parabolic with tangent translation, every handle hyperbolic."""
    residual = check_relation(rep)
    report = AdmissibilityReport(
        relation_ok=residual <= rel_tol, relation_residual=residual
    )
    ok = report.relation_ok
    for lab in rep.presentation.handles:
        cls = classify(rep.images[lab], tol)
        report.handle_classes.append(cls)
        ok = ok and cls.kind is IsometryKind.HYPERBOLIC
    for lab in rep.presentation.peripherals:
        phi = rep.images[lab]
        cls = classify(phi, tol)
        report.peripheral_classes.append(cls)
        if cls.kind is IsometryKind.PARABOLIC:
            tangent = is_tangent(phi, tol)
        else:
            tangent = False
            ok = False
        report.tangency_ok.append(tangent)
        ok = ok and tangent
    report.verdict = (
        Verdict.ADMISSIBLE_NECESSARY_CONDITIONS if ok else Verdict.NOT_ADMISSIBLE
    )
    return report


def cocycle_check(rep, word_pairs):
    """Max deviation from the cocycle identity of affine composition,

        tau(w1 w2) = tau(w1) + L(w1) tau(w2),

    over the given word pairs.  An internal consistency identity: deviation
    is zero in exact arithmetic for any representation.
    """
    worst = 0.0
    for w1, w2 in word_pairs:
        phi1 = evaluate_word(rep, tuple(w1))
        phi2 = evaluate_word(rep, tuple(w2))
        combined = evaluate_word(rep, tuple(w1) + tuple(w2))
        predicted = phi1.translation + phi1.linear.m @ phi2.translation
        worst = max(worst, float(np.max(np.abs(combined.translation - predicted))))
    return worst
