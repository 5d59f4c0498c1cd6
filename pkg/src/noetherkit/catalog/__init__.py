"""Bundled corpus of worked systems and the driver that re-verifies it."""

from .records import (
    DATA_DIR, CatalogParseError, CatalogRecord, CatalogValidationError, Claim,
    check_consistency, load_catalog, parse_record, validate_record,
)
from .verify import (
    ClaimResult, RecordReport, operator_count, summarize, verify_catalog, verify_record,
)

__all__ = [
    "DATA_DIR", "CatalogParseError", "CatalogRecord", "CatalogValidationError", "Claim",
    "ClaimResult", "RecordReport", "check_consistency", "load_catalog", "operator_count",
    "parse_record", "summarize", "validate_record", "verify_catalog", "verify_record",
]
