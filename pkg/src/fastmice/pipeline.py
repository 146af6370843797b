"""End-to-end multi-view ensemble clustering.

Stages per repetition: view groups, view-sharing graphs, base clusterings,
consensus.  Stream layout under the master seed::

    run r              derive(master, r)
      view groups      derive(run, 0) -> derive(., m) per group
      group m work     derive(derive(run, 1), m)
        k^(m) draw       derive(., 0)
        anchors, v-th    derive(derive(., 1), v)
        discretization   derive(., 2)
      consensus        derive(run, 2)
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .anchors import AnchorBudget, select_anchors
from .consensus import BaseClustering, Ensemble, build_consensus_graph, consensus_partition
from .dataset import DistanceMetric, MultiViewDataset
from .graph import assemble_view_sharing, build_subgraph, normalize_rows
from .kmeans import KMeansConfig
from .rng import SeedStream, derive, uniform_int
from .transfercut import partition
from .viewgroups import ViewGroup, ViewGroupConfig, generate_view_groups, member_matrix

log = logging.getLogger(__name__)

STAGES = ("groups", "graphs", "base", "consensus")
METRIC_NAMES = ("nmi", "ari", "acc", "pur")


class PipelineError(RuntimeError):
    pass


class SparsityBudgetError(PipelineError):
    """A graph's nonzero count departs from its closed-form budget."""


@dataclass(frozen=True)
class PipelineConfig:
    k: int
    m_groups: int = 20
    anchors: int | None = None  # None -> min(1000, N)
    knn: int = 5
    tau_min: float = 0.2
    tau_max: float = 0.8
    v_min: int = 1
    v_max: int | None = None
    k_min: int | None = None  # None -> k
    k_max: int | None = None  # None -> 2k
    seed: int = 0
    metric: DistanceMetric | None = None  # None -> the dataset's metric
    runs: int = 1
    threads: int = 0
    kmeans_iters: int = 100

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.knn < 1 or self.m_groups < 1 or self.runs < 1:
            raise ValueError("knn, m_groups and runs must be positive")
        if self.anchors is not None and self.anchors < 1:
            raise ValueError("anchors must be positive")
        lo, hi = self.cluster_range
        if not 1 <= lo <= hi:
            raise ValueError(f"invalid base cluster range [{lo}, {hi}]")

    @property
    def cluster_range(self) -> tuple[int, int]:
        lo = self.k if self.k_min is None else self.k_min
        hi = 2 * self.k if self.k_max is None else self.k_max
        return lo, hi

    def n_anchors(self, n: int) -> int:
        return min(1000, n) if self.anchors is None else min(self.anchors, n)

    def n_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def view_group_config(self) -> ViewGroupConfig:
        return ViewGroupConfig(self.m_groups, self.v_min, self.v_max, self.tau_min, self.tau_max)


@dataclass
class GroupStats:
    group_index: int
    n_members: int
    k_bar: int
    p_bar: int
    nnz: int
    n_clusters: int
    embedding_size: int


@dataclass
class RunResult:
    labels: np.ndarray
    scores: dict[str, float] | None
    timings: dict[str, float]
    groups: list[GroupStats]
    consensus_nnz: int
    final_k: int
    consensus_row_sums: np.ndarray | None = None
    ensemble: Ensemble | None = None

    @property
    def memory_proxy(self) -> int:
        """Stored graph nonzeros plus spectral embedding elements."""
        base = sum(g.nnz + g.embedding_size for g in self.groups)
        return base + self.consensus_nnz + self.labels.size * self.final_k


@dataclass
class RunReport:
    config: PipelineConfig
    runs: list[RunResult] = field(default_factory=list)

    @property
    def labels(self) -> list[np.ndarray]:
        return [r.labels for r in self.runs]

    def metric_values(self, name: str) -> np.ndarray:
        return np.array([r.scores[name] for r in self.runs if r.scores is not None])

    def summary(self) -> dict[str, tuple[float, float]]:
        out = {}
        if not self.runs or self.runs[0].scores is None:
            return out
        for name in METRIC_NAMES:
            vals = self.metric_values(name)
            std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
            out[name] = (float(vals.mean()), std)
        return out


def check_group_budget(graph_nnz: int, n: int, knn: int, n_views: int, group: ViewGroup,
                       k_bar: int) -> None:
    size = group.size
    if graph_nnz != n * k_bar * size:
        raise SparsityBudgetError(
            f"group {group.index}: view-sharing graph has {graph_nnz} nonzeros, "
            f"expected N*K_bar*V_m = {n * k_bar * size}")
    if k_bar < math.ceil(knn / size):
        # k_bar was clamped to a tiny anchor budget; the range bound cannot hold
        return
    if not knn <= k_bar * size < knn + n_views:
        raise SparsityBudgetError(
            f"group {group.index}: K_bar*V_m = {k_bar * size} outside [{knn}, {knn + n_views})")


def _base_clustering(dataset: MultiViewDataset, group: ViewGroup, cfg: PipelineConfig,
                     metric: DistanceMetric, gs: SeedStream):
    n = dataset.n_samples
    budget = AnchorBudget(cfg.n_anchors(n), cfg.knn, group.size, n)
    p_bar, k_bar = budget.p_bar, budget.k_bar
    t0 = time.perf_counter()
    anchor_stream = derive(gs, 1)
    subgraphs = []
    for v in range(group.size):
        x = member_matrix(dataset, group, v)
        anchors = select_anchors(x, p_bar, metric, derive(anchor_stream, v))
        subgraphs.append(normalize_rows(build_subgraph(x, anchors, k_bar, metric)))
    graph = assemble_view_sharing(subgraphs, group.index)
    check_group_budget(graph.nnz, n, cfg.knn, dataset.n_views, group, k_bar)
    t1 = time.perf_counter()

    lo, hi = cfg.cluster_range
    k_m = uniform_int(derive(gs, 0), lo, hi)
    n_cols = int(np.count_nonzero(np.asarray(graph.affinity.sum(axis=0)).ravel()))
    if k_m > n_cols:
        log.warning("group %d: k^(m)=%d exceeds %d usable anchors; clamping", group.index, k_m, n_cols)
        k_m = n_cols
    labels = partition(graph.affinity, k_m, KMeansConfig(k_m, max_iters=cfg.kmeans_iters), derive(gs, 2))
    t2 = time.perf_counter()
    stats = GroupStats(group.index, group.size, k_bar, p_bar, graph.nnz, k_m, n * k_m)
    return BaseClustering(group.index, labels, k_m), stats, t1 - t0, t2 - t1


def run_once(dataset: MultiViewDataset, cfg: PipelineConfig, run_stream: SeedStream) -> RunResult:
    metric = dataset.metric if cfg.metric is None else DistanceMetric.parse(cfg.metric)
    n = dataset.n_samples
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the number of samples N={n}")
    timings = dict.fromkeys(STAGES, 0.0)

    t0 = time.perf_counter()
    groups = generate_view_groups(dataset, cfg.view_group_config(), derive(run_stream, 0))
    timings["groups"] = time.perf_counter() - t0

    work = derive(run_stream, 1)

    def job(group: ViewGroup):
        try:
            return _base_clustering(dataset, group, cfg, metric, derive(work, group.index))
        except SparsityBudgetError:
            raise
        except Exception as exc:
            raise PipelineError(f"group {group.index} failed: {exc}") from exc

    threads = cfg.n_threads()
    if threads == 1 or len(groups) == 1:
        results = [job(g) for g in groups]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, groups))

    members = tuple(r[0] for r in results)
    stats = [r[1] for r in results]
    timings["graphs"] = sum(r[2] for r in results)
    timings["base"] = sum(r[3] for r in results)

    t0 = time.perf_counter()
    ensemble = Ensemble(members)
    cgraph = build_consensus_graph(ensemble)
    row_sums = np.asarray(cgraph.sum(axis=1)).ravel()
    if cgraph.nnz != n * ensemble.size or np.any(row_sums != ensemble.size):
        raise SparsityBudgetError(
            f"consensus graph has {cgraph.nnz} nonzeros, expected N*M = {n * ensemble.size}")
    labels = consensus_partition(ensemble, cfg.k, KMeansConfig(cfg.k, max_iters=cfg.kmeans_iters),
                                 derive(run_stream, 2))
    timings["consensus"] = time.perf_counter() - t0

    scores = None
    if dataset.labels is not None:
        scores = metrics.evaluate(labels, dataset.labels)
    return RunResult(labels, scores, timings, stats, int(cgraph.nnz), cfg.k, row_sums, ensemble)


def run_pipeline(dataset: MultiViewDataset, cfg: PipelineConfig) -> RunReport:
    master = SeedStream(cfg.seed)
    report = RunReport(cfg)
    for r in range(cfg.runs):
        res = run_once(dataset, cfg, derive(master, r))
        if res.scores is not None:
            log.info("run %d: %s", r, " ".join(f"{k}={v:.2f}" for k, v in res.scores.items()))
        report.runs.append(res)
    return report


def emit_labels(labels, path) -> None:
    from .dataset import write_labels

    write_labels(path, labels)


def report_lines(report: RunReport) -> list[str]:
    cfg = report.config
    lines = [
        f"k = {cfg.k}",
        f"groups = {cfg.m_groups}",
        f"anchors = {cfg.anchors if cfg.anchors is not None else 'auto'}",
        f"knn = {cfg.knn}",
        f"tau_min = {cfg.tau_min}",
        f"tau_max = {cfg.tau_max}",
        f"k_min = {cfg.cluster_range[0]}",
        f"k_max = {cfg.cluster_range[1]}",
        f"seed = {cfg.seed}",
        f"runs = {len(report.runs)}",
    ]
    for i, r in enumerate(report.runs):
        for stage in STAGES:
            lines.append(f"run.{i}.time.{stage} = {r.timings[stage]:.6f}")
        if r.scores is not None:
            for name in METRIC_NAMES:
                lines.append(f"run.{i}.{name} = {r.scores[name]:.4f}")
    for stage in STAGES:
        vals = np.array([r.timings[stage] for r in report.runs])
        lines.append(f"time.{stage}.mean = {vals.mean():.6f}")
    for name, (mean, std) in report.summary().items():
        lines.append(f"{name}.mean = {mean:.4f}")
        lines.append(f"{name}.std = {std:.4f}")
    return lines


def emit_report(report: RunReport, path) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(report_lines(report)) + "\n")


def read_report(path) -> dict[str, str]:
    from .dataset import read_manifest

    return read_manifest(path)


def log_log_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=np.float64))
    ly = np.log(np.asarray(y, dtype=np.float64))
    return float(np.polyfit(lx, ly, 1)[0])

