"""Exception hierarchy.

Every failure a caller can act on has its own class; all derive from
``PlaneFixError`` so a batch driver can catch them in one place.
"""


class PlaneFixError(Exception):
    """Base class for all package errors."""


class InputError(PlaneFixError):
    """Malformed input (files, map specs, region specs)."""


class NumericalFault(PlaneFixError):
    """A computation did not converge or contradicts a proven statement."""


# geometry
class PointOnCurve(PlaneFixError):
    pass


class NotSimple(PlaneFixError):
    pass


class NoEscape(PlaneFixError):
    pass


class ArcEntersInterior(PlaneFixError):
    pass


# index / variation
class ImageHitsBasepoint(PlaneFixError):
    pass


class FixedPointOnCurve(ImageHitsBasepoint):
    pass


class PreconditionViolated(PlaneFixError):
    def __init__(self, clause, message=""):
        self.clause = clause
        super().__init__(f"{clause}: {message}" if message else clause)


class JunctionTouchesImageOfEndpoints(PlaneFixError):
    pass


class CannotCloseArc(PlaneFixError):
    pass


class NoPartition(PlaneFixError):
    pass


# map analysis
class OutsideDomain(PlaneFixError):
    pass


class NotIsolated(NumericalFault):
    pass


class BoundaryFixedPoint(NumericalFault):
    pass


class ConfigInvalid(PlaneFixError):
    pass


class HypothesisFailed(PlaneFixError):
    """One or more numbered hypotheses of a sufficient condition failed.

    ``clauses`` lists every failed hypothesis number, ``clause`` the first.
    """

    def __init__(self, clauses, details=None):
        self.clauses = tuple(clauses)
        self.clause = self.clauses[0] if self.clauses else None
        self.details = dict(details or {})
        super().__init__(f"hypotheses failed: {list(self.clauses)} {self.details}")


# lamination
class NotDisjoint(PlaneFixError):
    pass


class NoValidPairing(PlaneFixError):
    pass


class NotCompatible(PlaneFixError):
    pass


# polynomial dynamics
class NewtonDivergence(NumericalFault):
    def __init__(self, level, message=""):
        self.level = level
        super().__init__(f"Newton diverged at level {level} {message}".strip())


class RayUnresolved(NumericalFault):
    pass


class ConditionFailed(PlaneFixError):
    def __init__(self, condition, message=""):
        self.condition = condition
        super().__init__(f"condition ({condition}) failed {message}".strip())


class NotFixed(PlaneFixError):
    pass
