"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`GraphError`,
so callers (and the CLI) can catch one type.
"""

from __future__ import annotations


class GraphError(Exception):
    """Base class for all package errors."""


# graph construction / validation

class ValidationError(GraphError):
    """A graph violates one of the data-model invariants."""


class DuplicateId(ValidationError):
    pass


class DanglingEndpoint(ValidationError):
    pass


class NonpositiveLength(ValidationError):
    pass


class NonfiniteGamma(ValidationError):
    pass


class ZeroGammaDelta(ValidationError):
    pass


class IsolatedVertex(ValidationError):
    pass


class EmptyGraph(ValidationError):
    pass


class BadSplitPoint(GraphError):
    pass


class NotSuppressible(GraphError):
    pass


class MissingVertex(GraphError):
    pass


class MissingEdge(GraphError):
    pass


class ParseError(GraphError):
    """Malformed JSON document or builder spec string."""


# spectral

class SolverFailure(GraphError):
    pass


class NoRootInBracket(GraphError):
    pass


class Disconnected(GraphError):
    pass


class ZeroFunction(GraphError):
    pass


class DirichletViolation(GraphError):
    pass


class OutOfRange(GraphError):
    pass


class NegativeLambdaUnsupported(GraphError):
    pass


class DegenerateEigenvalue(GraphError):
    pass


class UnsupportedConditions(GraphError):
    pass


class ZeroEigenvalue(GraphError):
    pass


class NotLocallyEquilateral(GraphError):
    pass


class NotMonotone(GraphError):
    pass


# surgery

class SurgeryError(GraphError):
    pass


class TooFewVertices(SurgeryError):
    pass


class BadPartition(SurgeryError):
    pass


class NotAnEigenpair(SurgeryError):
    pass


class GammaSumMismatch(SurgeryError):
    pass


class DirichletInsertionUnsupported(SurgeryError):
    pass


class BadAssignment(SurgeryError):
    pass


class BadLength(SurgeryError):
    pass


class NotParallel(SurgeryError):
    pass


class NotPendantAtCommonVertex(SurgeryError):
    pass


class NonNaturalTip(SurgeryError):
    pass


class BadM(SurgeryError):
    pass


class NotDetachable(SurgeryError):
    pass


class LengthMismatch(SurgeryError):
    pass


class DirichletTarget(SurgeryError):
    pass


class NonNaturalC(SurgeryError):
    pass


# topology / bounds / verify

class TooManyEdgesForCircumference(GraphError):
    pass


class BadSpec(GraphError):
    pass


class ZeroMu(GraphError):
    pass


class NotAllNatural(GraphError):
    pass


class GenerationExhausted(GraphError):
    pass


class UnsupportedOp(GraphError):
    pass


class HypothesisNotMet(GraphError):
    pass
