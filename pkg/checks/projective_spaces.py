"""
Projective space checks: ch_k-positivity for every k and the basic fan data.
"""
import logging
from typing import List

from catalog import ProjectiveSpaceParams, build_family
from chern import POSITIVE, classify
from fan import is_fano, is_projective, primitive_relations

from .records import VerificationRecord, compare, crashed

logger = logging.getLogger(__name__)

ANCHOR = "P^d is ch_k-positive"


class ProjectiveSpaceChecks:
    """Checks over P^d for min_d <= d <= max_d."""

    def __init__(self, min_d: int = 2, max_d: int = 6):
        self.min_d = min_d
        self.max_d = max_d

    def run(self) -> List[VerificationRecord]:
        records = []
        for d in range(self.min_d, self.max_d + 1):
            check_id = f"pn.d{d}"
            try:
                records.extend(self._check(d))
            except Exception as e:
                records.append(crashed(check_id, ANCHOR, e))
        logger.info(f"Projective spaces: {len(records)} records")
        return records

    def _check(self, d: int) -> List[VerificationRecord]:
        fan = build_family("pn", ProjectiveSpaceParams(d))
        records = [
            compare(f"pn.d{d}.picard_number", ANCHOR, 1, fan.picard_number),
            compare(f"pn.d{d}.projective", ANCHOR, True, is_projective(fan)[0]),
            compare(f"pn.d{d}.fano", ANCHOR, True, is_fano(fan)),
            compare(f"pn.d{d}.relation_degrees", ANCHOR, [d + 1],
                    [relation.degree for relation in primitive_relations(fan)]),
        ]
        for k in range(1, d + 1):
            report = classify(fan, k)
            records.append(compare(f"pn.d{d}.k{k}", ANCHOR, POSITIVE, report.classification,
                                   f"min {report.min_value}"))
        return records
