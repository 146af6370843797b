"""Scaling benchmark: wall-clock and memory proxy against data size."""

from __future__ import annotations

import csv
import dataclasses
import time
from dataclasses import dataclass
from typing import Sequence

from .pipeline import PipelineConfig, log_log_slope, run_once
from .rng import SeedStream, derive
from .synth import BlobConfig, make_blobs


@dataclass
class ScalingRow:
    n: int
    seconds: float
    memory_proxy: int
    graph_nnz: list[int]
    nmi: float | None


@dataclass
class ScalingTable:
    rows: list[ScalingRow]

    @property
    def sizes(self) -> list[int]:
        return [r.n for r in self.rows]

    @property
    def time_slope(self) -> float:
        return log_log_slope(self.sizes, [r.seconds for r in self.rows])

    @property
    def memory_slope(self) -> float:
        return log_log_slope(self.sizes, [r.memory_proxy for r in self.rows])


def benchmark_scaling(generator_cfg: BlobConfig, sizes: Sequence[int],
                      pipeline_cfg: PipelineConfig | None = None) -> ScalingTable:
    """Time one pipeline run per size; only ``n`` varies between rows."""
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    cfg = pipeline_cfg or PipelineConfig(k=generator_cfg.k)
    rows = []
    for n in sizes:
        ds = make_blobs(dataclasses.replace(generator_cfg, n=n))
        t0 = time.perf_counter()
        res = run_once(ds, cfg, derive(SeedStream(cfg.seed), 0))
        seconds = time.perf_counter() - t0
        nmi = res.scores["nmi"] if res.scores else None
        rows.append(ScalingRow(n, seconds, res.memory_proxy, [g.nnz for g in res.groups], nmi))
    return ScalingTable(rows)


def write_table(table: ScalingTable, path, delimiter: str = "\t") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter)
        w.writerow(["n", "seconds", "memory_proxy", "graph_nnz_total", "nmi"])
        for r in table.rows:
            w.writerow([r.n, f"{r.seconds:.6f}", r.memory_proxy, sum(r.graph_nnz),
                        "" if r.nmi is None else f"{r.nmi:.4f}"])
        if len(table.rows) >= 2:
            w.writerow(["# time_slope", f"{table.time_slope:.6f}"])
            w.writerow(["# memory_slope", f"{table.memory_slope:.6f}"])
