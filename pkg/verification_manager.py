"""
Verification Manager

Runs every check suite and aggregates their records into one table.
"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, List

import pandas as pd

from checks import BatyrevChecks, BundleChecks, ProjectiveSpaceChecks, PropertyChecks, VerificationRecord
from checks.records import crashed

logger = logging.getLogger(__name__)


class PaperVerificationManager:
    """Manager class for running all verification suites."""

    def __init__(self, max_bc: int = 3, max_twist: int = 3, workers: int = 1):
        """
        Set up the suites with their grid bounds.

        Args:
            max_bc: bound on the b_i and c_i of the Picard-three grid
            max_twist: bound on the twists of the Picard-two grids
            workers: suites run at once, and processes for the per-fan suites
        """
        self.workers = max(1, workers)
        self.suites = {
            "projective_spaces": ProjectiveSpaceChecks(),
            "bundles": BundleChecks(max_twist=max_twist),
            "picard_three": BatyrevChecks(max_bc=max_bc, workers=self.workers),
            "properties": PropertyChecks(max_twist=max_twist, workers=self.workers),
        }

    def run_all(self) -> List[VerificationRecord]:
        """
        Run every suite.

        Returns:
            Records grouped by suite in registration order, each group sorted by check id
        """
        results: Dict[str, List[VerificationRecord]] = {}
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            future_to_suite = {executor.submit(suite.run): name for name, suite in self.suites.items()}
            for future in as_completed(future_to_suite):
                name = future_to_suite[future]
                try:
                    results[name] = future.result()
                except Exception as e:
                    results[name] = [crashed(f"{name}.suite", name, e)]
                failed = sum(1 for r in results[name] if not r.passed)
                logger.info(f"Suite {name} finished: {len(results[name])} records, {failed} failed")

        records = []
        for name in self.suites:
            records.extend(sorted(results[name], key=lambda r: r.check_id))
        return records

    @staticmethod
    def to_frame(records: List[VerificationRecord]) -> pd.DataFrame:
        return pd.DataFrame([r.to_dict() for r in records],
                            columns=["check_id", "anchor", "status", "expected", "computed", "details"])

    @staticmethod
    def summary(records: List[VerificationRecord]) -> pd.DataFrame:
        """Pass/fail counts per anchor."""
        frame = PaperVerificationManager.to_frame(records)
        if frame.empty:
            return pd.DataFrame(columns=["anchor", "pass", "fail"])
        counts = frame.groupby(["anchor", "status"]).size().unstack(fill_value=0)
        for status in ("pass", "fail"):
            if status not in counts.columns:
                counts[status] = 0
        return counts[["pass", "fail"]].reset_index()
