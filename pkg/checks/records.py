"""
Verification records shared by the check suites.
"""
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List

from sympy import Rational

from chern import format_rational
from fan import Fan
from intersect import picard_relations

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"


@dataclass(frozen=True)
class VerificationRecord:
    """One exact comparison: status is pass iff expected == computed."""
    check_id: str
    anchor: str
    status: str
    expected: str
    computed: str
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _render(value: Any) -> str:
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        return format_rational(value)
    return str(value)


def compare(check_id: str, anchor: str, expected: Any, computed: Any, details: str = "") -> VerificationRecord:
    """Build a record from an exact comparison, logging failures."""
    status = PASS if expected == computed else FAIL
    record = VerificationRecord(check_id, anchor, status, _render(expected), _render(computed), details)
    if status == FAIL:
        logger.error(f"Check {check_id} failed: expected {record.expected}, computed {record.computed} {details}")
    return record


def crashed(check_id: str, anchor: str, error: Exception) -> VerificationRecord:
    logger.error(f"Check {check_id} raised {type(error).__name__}: {error}")
    return VerificationRecord(check_id, anchor, FAIL, "no error", type(error).__name__, str(error))


def named_relations(fan: Fan, basis: List[str]) -> List[Dict[str, int]]:
    """Dual-basis linear equivalences keyed by ray name."""
    return [
        {fan.rays[x].name: int(c) for x, c in divisor.coefficients.items()}
        for divisor in picard_relations(fan, basis)
    ]
