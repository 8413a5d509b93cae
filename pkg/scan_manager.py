"""
Scan Manager

Classifies ch_k over every fan of a family grid, in parallel when asked,
and summarizes the classifications with pandas.
"""
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from catalog import build_family, canonical_family, grid_parameters
from chern import classify, format_rational

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ["family", "params", "d", "k", "classification", "min_value", "witness"]


def scan_fan(family: str, params, ks: Sequence[int]) -> List[Dict[str, Any]]:
    """Classify one grid member for each k that fits its dimension."""
    fan = build_family(family, params)
    records = []
    for k in ks:
        if k > fan.rank:
            continue
        report = classify(fan, k)
        records.append({
            "family": family,
            "params": params.to_dict(),
            "d": fan.rank,
            "k": k,
            "classification": report.classification,
            "min_value": format_rational(report.min_value),
            "witness": fan.ray_names(report.witness),
        })
    return records


class ScanManager:
    """Manager class for sweeping a family grid."""

    def __init__(self, family: str, ks: Sequence[int], bounds: Optional[Dict[str, int]] = None, workers: int = 1):
        self.family = canonical_family(family)
        self.ks = sorted(set(ks))
        self.bounds = dict(bounds or {})
        self.workers = max(1, workers)

    def run(self) -> List[Dict[str, Any]]:
        """
        Classify every grid member.

        Returns:
            One record per (fan, k), ordered by parameters and then k
            regardless of completion order
        """
        grid = grid_parameters(self.family, self.bounds)
        logger.info(f"Scanning {len(grid)} {self.family} fans for k in {self.ks} with {self.workers} worker(s)")
        results: Dict[int, List[Dict[str, Any]]] = {}

        if self.workers == 1:
            for index, params in enumerate(grid):
                results[index] = scan_fan(self.family, params, self.ks)
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                future_to_index = {
                    executor.submit(scan_fan, self.family, params, self.ks): index
                    for index, params in enumerate(grid)
                }
                for future in as_completed(future_to_index):
                    index = future_to_index[future]
                    results[index] = future.result()

        records = []
        for index in range(len(grid)):
            records.extend(results[index])
        return records

    @staticmethod
    def to_frame(records: List[Dict[str, Any]]) -> pd.DataFrame:
        frame = pd.DataFrame(records, columns=RECORD_COLUMNS)
        frame["params"] = frame["params"].map(lambda p: " ".join(f"{k}={v}" for k, v in p.items()))
        frame["witness"] = frame["witness"].map(lambda w: ",".join(w))
        return frame

    @staticmethod
    def summary(records: List[Dict[str, Any]]) -> pd.DataFrame:
        """Counts per k and classification."""
        frame = pd.DataFrame(records, columns=RECORD_COLUMNS)
        if frame.empty:
            return pd.DataFrame(columns=["k", "classification", "count"])
        return frame.groupby(["k", "classification"]).size().reset_index(name="count")

    def to_csv(self, records: List[Dict[str, Any]], path: str) -> None:
        self.to_frame(records).to_csv(path, index=False)
        logger.info(f"Wrote {len(records)} scan records to {path}")
