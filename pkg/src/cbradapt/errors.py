"""Exception hierarchy shared by every module of the package."""


class AdaptationError(Exception):
    """Base class for all errors raised by cbradapt."""


class SchemaError(AdaptationError):
    """A schema, utility model or config violates its own invariants."""


class StateError(AdaptationError):
    pass


class UnknownAttribute(StateError):
    pass


class MissingAttribute(StateError):
    pass


class ValueNotInDomain(StateError):
    pass


class UncertainInput(AdaptationError):
    """An operation that needs known values was handed an uncertain one."""


class EmptyInclusionSet(AdaptationError):
    pass


class EmptyQAF(AdaptationError):
    pass


class NoFeasibleState(AdaptationError):
    """The whole adaptable subspace was searched without exceeding UT."""


class SearchSpaceTooLarge(AdaptationError):
    """Constructive search would enumerate more states than ``enum_cap``."""


class KappaTooLarge(AdaptationError):
    """The concretization set of an uncertain state exceeds ``kappa_cap``."""


class ParseError(AdaptationError):
    pass


class SchemaMismatch(AdaptationError):
    """A knowledge base file was written for a different schema."""
