"""
Process pool for suites that fan out over grid members.
"""
import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, Dict, List, Sequence, Tuple

logger = logging.getLogger(__name__)


def map_members(func: Callable[..., List], jobs: Sequence[Tuple], workers: int = 1) -> List:
    """
    Run func(*job) for every job and concatenate the returned lists in job order.

    Args:
        func: module-level function returning a list per job
        jobs: argument tuples
        workers: worker processes; 1 runs inline

    Returns:
        The concatenated results, ordered by job regardless of completion order
    """
    results: List = [None] * len(jobs)
    if workers <= 1 or len(jobs) <= 1:
        results = [func(*job) for job in jobs]
    else:
        # spawned workers: callers run inside the verification manager's threads
        context = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=context) as executor:
            future_to_index: Dict = {executor.submit(func, *job): index for index, job in enumerate(jobs)}
            for future in as_completed(future_to_index):
                results[future_to_index[future]] = future.result()
        logger.debug(f"{func.__name__}: {len(jobs)} jobs on {workers} processes")
    return [item for result in results for item in result]
