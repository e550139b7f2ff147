"""
Exception hierarchy for dataset ingestion, model scenarios and enumeration limits
"""
from typing import Optional


class ParityLensError(Exception):
    """Base class for every error raised by the fairness_audit package"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class SchemaError(ParityLensError):
    """Column roles or record arities do not match the dataset schema"""


class EmptyInputError(ParityLensError):
    """Input file is empty or holds no records"""


class RecordValueError(ParityLensError):
    """A record holds a value outside its allowed domain"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
        self.column = column


class ScenarioError(ParityLensError):
    """Model parameters violate their constraints; names the offending field"""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class EnumerationTooLargeError(ParityLensError):
    """Enumeration bounds exceed the configured work limit"""

    def __init__(self, pairs: int, limit: int):
        super().__init__(
            f"enumeration would examine {pairs:,} (distribution, algorithm) pairs; "
            f"limit is {limit:,} (PARITYLENS_MAX_ENUMERATION_PAIRS)"
        )
        self.pairs = pairs
        self.limit = limit
