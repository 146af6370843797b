"""Multi-view ensemble clustering from random view groups and anchor graphs."""

from .consensus import BaseClustering, Ensemble, build_consensus_graph, consensus_partition
from .dataset import DistanceMetric, MultiViewDataset, ViewMatrix, distance, load_dataset
from .metrics import acc, ari, nmi, purity
from .pipeline import PipelineConfig, RunReport, run_pipeline
from .rng import SeedStream, derive

__all__ = [
    "BaseClustering",
    "DistanceMetric",
    "Ensemble",
    "MultiViewDataset",
    "PipelineConfig",
    "RunReport",
    "SeedStream",
    "ViewMatrix",
    "acc",
    "ari",
    "build_consensus_graph",
    "consensus_partition",
    "derive",
    "distance",
    "load_dataset",
    "nmi",
    "purity",
    "run_pipeline",
]

__version__ = "0.1.0"
