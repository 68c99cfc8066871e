"""Exception hierarchy shared by every twistlab module."""


class TwistlabError(Exception):
    """Base class for all library errors."""


class ShapeError(TwistlabError, ValueError):
    """Matrix or vector dimensions do not fit together."""


class ContractError(TwistlabError, ValueError):
    """A documented precondition of an operation is violated."""


class StructuralError(TwistlabError, ValueError):
    """A presentation is malformed (unknown object, bad tensor shape, ...)."""


class UnsupportedInput(TwistlabError, ValueError):
    """The input lies outside the class of objects an operation handles."""


class SchemaError(TwistlabError, ValueError):
    """A serialized document does not match its declared schema."""


class InternalConsistencyError(TwistlabError, AssertionError):
    """A result computed by the library failed its own exact verification."""
