"""Exception hierarchy and warning categories for the jurisim pipeline.

Every domain error derives from :class:`JurisimError` so callers (notably the
CLI) can distinguish data problems from genuine bugs.
"""

from __future__ import annotations


class JurisimError(Exception):
    """Base class for all pipeline errors."""


# corpus ---------------------------------------------------------------

class MalformedRecord(JurisimError):
    def __init__(self, line: int, reason: str = ""):
        self.line = line
        super().__init__(f"malformed record at line {line}" + (f": {reason}" if reason else ""))


class DuplicateId(JurisimError):
    def __init__(self, judgment_id: str):
        self.judgment_id = judgment_id
        super().__init__(f"duplicate judgment id: {judgment_id!r}")


class MissingField(JurisimError):
    def __init__(self, field: str, line: int):
        self.field = field
        self.line = line
        super().__init__(f"missing field {field!r} at line {line}")


class NoTokens(JurisimError):
    def __init__(self, judgment_id: str):
        self.judgment_id = judgment_id
        super().__init__(f"judgment {judgment_id!r} has no tokens (pretokenized mode)")


class EmptyVocabulary(JurisimError):
    pass


class InvalidTopM(JurisimError):
    pass


# expert ---------------------------------------------------------------

class HeaderMismatch(JurisimError):
    pass


class BadValue(JurisimError):
    def __init__(self, row: int, column: str, value: str = ""):
        self.row = row
        self.column = column
        super().__init__(f"bad value in column {column!r}, row {row}" + (f": {value!r}" if value else ""))


class DuplicateCaseId(JurisimError):
    def __init__(self, case_id: str):
        self.case_id = case_id
        super().__init__(f"duplicate case id: {case_id!r}")


# topics ---------------------------------------------------------------

class EmptyMatrix(JurisimError):
    pass


class KTooLarge(JurisimError):
    pass


class InvalidN(JurisimError):
    pass


class VocabMismatch(JurisimError):
    pass


# graph ----------------------------------------------------------------

class UnknownCaseId(JurisimError):
    def __init__(self, case_id: str):
        self.case_id = case_id
        super().__init__(f"unknown case id: {case_id!r}")


class UnknownNode(JurisimError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node: {node_id!r}")


class SchemaViolation(JurisimError):
    pass


class IoError(JurisimError):
    pass


# embed ----------------------------------------------------------------

class EmptyWalks(JurisimError):
    pass


class NoCaseNodes(JurisimError):
    pass


# sim ------------------------------------------------------------------

class ZeroVector(JurisimError):
    def __init__(self, label: str = ""):
        self.label = label
        super().__init__(f"zero vector{': ' + repr(label) if label else ''}")


class DimMismatch(JurisimError):
    pass


class UnknownCase(JurisimError):
    def __init__(self, case_id: str):
        self.case_id = case_id
        super().__init__(f"unknown case: {case_id!r}")


# eval -----------------------------------------------------------------

class InsufficientOverlap(JurisimError):
    pass


class EmptyInput(JurisimError):
    pass


class ConstantInput(JurisimError):
    pass


class LengthMismatch(JurisimError):
    pass


class InvalidConfig(JurisimError):
    pass


# warnings -------------------------------------------------------------

class ConstantColumnWarning(UserWarning):
    """A feature column had max == min and was mapped to all 0.5."""


class IsolatedCaseWarning(UserWarning):
    """A case node ended up with no edges in the knowledge graph."""


class DroppedLabelWarning(UserWarning):
    """A case id present in only one similarity matrix was dropped."""
