"""
Report records and the multiprocessing fan-out of syzygy-scheme tables.

Workers receive serialized curves and scrolls, and write their reports into a
multiprocessing.Manager dictionary keyed by subset position.
"""
import json
import logging
import multiprocessing as mp
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..geometry.canon import STRAND_LENGTH, CanonicalCurve, ScrollData, SyzygySchemeReport, syzygy_scheme
from ..geometry.plane import PlaneModel

logger = logging.getLogger(__name__)


@dataclass
class Report:
    """Outcome of one verification: echoed inputs, computed values and itemized checks."""
    assertion: str
    inputs: Dict[str, Any]
    values: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    wall_time: Optional[float] = None

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def check(self, name: str, ok: bool):
        self.checks[name] = bool(ok)

    def to_dict(self, include_wall_time: bool = False) -> Dict[str, Any]:
        data = {
            "assertion": self.assertion,
            "inputs": self.inputs,
            "values": self.values,
            "checks": self.checks,
            "passed": self.passed,
        }
        if include_wall_time and self.wall_time is not None:
            data["wall_time"] = self.wall_time
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Report':
        return cls(
            assertion=data["assertion"],
            inputs=dict(data["inputs"]),
            values=dict(data.get("values", {})),
            checks={k: bool(v) for k, v in data.get("checks", {}).items()},
            wall_time=data.get("wall_time"),
        )


@dataclass
class WorkerStatus:
    """Status of a table worker process."""
    worker_id: str
    status: str  # 'idle', 'running', 'completed', 'error'
    assigned: int = 0
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "worker_id": self.worker_id,
            "status": self.status,
            "assigned": self.assigned,
            "started_at": self.started_at.isoformat() if self.started_at else None,
            "completed_at": self.completed_at.isoformat() if self.completed_at else None,
            "error": self.error,
        }


def subset_rng(seed: int, job: int) -> np.random.Generator:
    """Hyperplane draws of one subset, independent of which worker runs it."""
    return np.random.default_rng([seed, job])


def table_worker(worker_id: str, payload: Dict[str, Any], jobs: List[int],
                 subsets: List[List[str]], results, status, strand_length: int, seed: int):
    """
    Top-level worker entry: rebuild the curve and scrolls, then compute the
    syzygy schemes of the assigned subsets.
    """
    state = WorkerStatus(worker_id, 'running', len(jobs), started_at=datetime.now())
    status[worker_id] = state.to_dict()
    try:
        model = PlaneModel.from_dict(payload["model"])
        curve = CanonicalCurve.from_dict(model, payload["curve"])
        scrolls = {data["label"]: ScrollData.from_dict(curve.ring, data) for data in payload["scrolls"]}
        for job in jobs:
            chosen = [scrolls[label] for label in subsets[job]]
            results[job] = syzygy_scheme(curve, chosen, strand_length, subset_rng(seed, job)).to_dict()
        state.status = 'completed'
    except Exception as e:
        state.status = 'error'
        state.error = str(e)
        logger.exception("[tables] worker %s failed", worker_id)
    state.completed_at = datetime.now()
    status[worker_id] = state.to_dict()


class TableCoordinator:
    """
    Fans syzygy-scheme computations over worker processes and gathers the
    reports in subset order.
    """

    def __init__(self, workers: int = 1, strand_length: int = STRAND_LENGTH, seed: int = 42):
        self.workers = max(1, workers)
        self.strand_length = strand_length
        self.seed = seed

    def run(self, curve: CanonicalCurve, scrolls: Sequence[ScrollData],
            subsets: Sequence[Sequence[str]]) -> List[SyzygySchemeReport]:
        subsets = [list(s) for s in subsets]
        if self.workers == 1 or len(subsets) <= 1:
            by_label = {s.label: s for s in scrolls}
            return [syzygy_scheme(curve, [by_label[l] for l in subset], self.strand_length,
                                  subset_rng(self.seed, job))
                    for job, subset in enumerate(subsets)]

        payload = {
            "model": curve.model.to_dict(),
            "curve": curve.to_dict(),
            "scrolls": [s.to_dict() for s in scrolls],
        }
        manager = mp.Manager()
        results = manager.dict()
        status = manager.dict()
        count = min(self.workers, len(subsets))
        processes = []
        for w in range(count):
            jobs = list(range(w, len(subsets), count))
            process = mp.Process(
                target=table_worker,
                args=(f"tables-{w + 1}", payload, jobs, subsets, results, status, self.strand_length, self.seed),
            )
            process.start()
            processes.append(process)
        for process in processes:
            process.join()

        failed = [s for s in status.values() if s["status"] != 'completed']
        collected = dict(results)
        manager.shutdown()
        if failed:
            raise RuntimeError("table workers failed: " + "; ".join(
                f"{s['worker_id']}: {s['error']}" for s in failed))
        logger.info("[tables] %d syzygy schemes from %d workers", len(collected), count)
        return [SyzygySchemeReport.from_dict(collected[i]) for i in range(len(subsets))]
