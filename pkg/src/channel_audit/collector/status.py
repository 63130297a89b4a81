"""Page-status parsing: map error-banner wording to a StatusReport.

The substring/regex table ships as a data file
(``data/status_patterns.csv``) so wording drift can be fixed without
touching code.  Rows are ordered most-specific first; the first match
wins.  A page with an error container whose wording matches nothing maps
to ``other_unavailable``; a page with no error banner at all is an
available page.
"""

from __future__ import annotations

import csv
import re
from functools import lru_cache
from importlib import resources

from ..corpus import StatusReason, StatusReport
from .policy import RawPage

__all__ = ["parse_status", "status_patterns"]

# Generic markers of an error container in fixture or pre-rendered HTML.
_ERROR_CONTAINER = re.compile(
    r"class=\"[^\"]*error[^\"]*\"|id=\"error|promo-title|error-banner", re.IGNORECASE
)


@lru_cache(maxsize=1)
def status_patterns() -> tuple[tuple[re.Pattern, StatusReason], ...]:
    """The ordered (compiled pattern, reason) table from the data file."""
    path = resources.files("channel_audit").joinpath("data", "status_patterns.csv")
    rows = []
    with path.open(encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                (
                    re.compile(row["pattern"], re.IGNORECASE),
                    StatusReason(row["reason"]),
                )
            )
    return tuple(rows)


def parse_status(page: RawPage) -> StatusReport:
    """Total mapping from page body to status; never raises on content."""
    body = page.body
    for pattern, reason in status_patterns():
        match = pattern.search(body)
        if match:
            return StatusReport.gone(reason, raw_message=match.group(0))
    if _ERROR_CONTAINER.search(body):
        return StatusReport.gone(
            StatusReason.OTHER_UNAVAILABLE, raw_message="unrecognized error banner"
        )
    return StatusReport.ok()
