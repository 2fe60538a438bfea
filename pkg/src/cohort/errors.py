"""Exception types raised across the pipeline."""


class CohortError(Exception):
    """Base class for pipeline errors."""


class ValidationError(CohortError):
    """Input or configuration failed validation (CLI exit code 2)."""


class ParseError(ValidationError):
    pass


class MissingMandatoryField(ValidationError):
    pass


class DuplicateMapping(ValidationError):
    pass


class HeaderMismatch(ValidationError):
    pass


class UnmappedId(CohortError):
    pass


class DegenerateTable(CohortError):
    """Contingency table has fewer than two levels on an axis."""


class ZeroMarginal(CohortError):
    pass


class ConstantPredictor(CohortError):
    pass


class SpecMismatch(CohortError):
    """A record lacks a value required by the predictor specification."""


class SingleClass(CohortError):
    pass


class TooFewRecords(CohortError):
    pass


class InvalidConfig(ValidationError):
    pass


class MissingInput(ValidationError):
    pass


class TamperedInput(ValidationError):
    """An intermediate file no longer matches the digest in its manifest."""


class FrozenOutput(CohortError):
    pass


class StageFailure(CohortError):
    pass
