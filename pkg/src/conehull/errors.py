"""Exception hierarchy shared across the library.

Every domain failure derives from ConeHullError so callers can catch one
base class; usage errors (bad arguments, unknown labels) stay ValueError
subclasses as well.
"""


class ConeHullError(Exception):
    """Base class for all library-specific failures."""


# --- Minkowski / isometry kernel -----------------------------------------

class InvalidIsometry(ConeHullError, ValueError):
    """Matrix fails the SO_0(1,2) invariants at the requested tolerance."""


class NotParabolic(ConeHullError, ValueError):
    """Operation requires a parabolic linear part."""


class DegenerateFrame(ConeHullError, ValueError):
    """Lightlike frame vectors are parallel or otherwise rank deficient."""


class PairingMismatch(ConeHullError, ValueError):
    """Edge pairings (Minkowski products, side lengths) disagree."""


class NotUnimodular(ConeHullError, ValueError):
    """2x2 input matrix does not have determinant 1."""


# --- Holonomy --------------------------------------------------------------

class UnknownGenerator(ConeHullError, KeyError):
    """Word references a label absent from the presentation."""


class NotAdmissible(ConeHullError, ValueError):
    """Representation fails the checkable admissibility conditions."""


# --- Decoration ------------------------------------------------------------

class NotLightlike(ConeHullError, ValueError):
    """Point is not on the future light cone."""


# --- Hull ------------------------------------------------------------------

class Degenerate(ConeHullError, ValueError):
    """Point set has affine rank < 3, or no spacelike facet exists."""


class NotStabilized(ConeHullError, RuntimeError):
    """Fundamental facet set kept changing up to the radius cap."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


class GluingMismatch(ConeHullError, ValueError):
    """Paired facet edges have different lengths beyond tolerance."""


class InconclusiveNearBoundary(ConeHullError, RuntimeError):
    """Ray crossing falls too close to the truncation frontier to decide."""


# --- Flat cone surfaces ----------------------------------------------------

class BoundaryEdge(ConeHullError, ValueError):
    """Edge is not glued on both sides."""


class DegenerateTriangle(ConeHullError, ValueError):
    """Triangle inequality fails (or holds only within tolerance)."""


class UnknownVertex(ConeHullError, KeyError):
    """Vertex id absent from the surface."""


class FlipLimitExceeded(ConeHullError, RuntimeError):
    """Lawson flip loop hit the iteration cap; diagnostic, not silent."""


class InvalidSurface(ConeHullError, ValueError):
    """Cone surface data violates its structural invariants."""


# --- Suspension ------------------------------------------------------------

class NotCocyclic(ConeHullError, ValueError):
    """Polygon data is inconsistent with a single circumscribed circle."""


class OnOrOutsideCircumcircle(ConeHullError, ValueError):
    """Suspension metric coefficient requested outside its domain."""


class RelationResidualTooLarge(ConeHullError, RuntimeError):
    """Assembled holonomy fails to close the surface-group relation."""


class RoundTripMismatch(ConeHullError, RuntimeError):
    """Recovered surface differs from the input; carries a structured diff."""

    def __init__(self, message, diff=None):
        super().__init__(message)
        self.diff = diff or {}


# --- I/O --------------------------------------------------------------------

class ParseError(ConeHullError, ValueError):
    """Input is not syntactically valid JSON; carries line/column."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(ConeHullError, ValueError):
    """Document violates its schema; carries a JSON-pointer-style path."""

    def __init__(self, message, path=""):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path


class VersionError(ConeHullError, ValueError):
    """Document format version is not recognized."""


class IoError(ConeHullError, OSError):
    """Filesystem-level failure while reading or writing a document."""
