"""Community-aware node embedding: MERW walks, partition-weighted skip-gram,
combinatorial partitioners, K-means, evaluation metrics and LFR benchmarks."""
from .cluster import KMeans, kmeans
from .combinatorial import CNM, LabelPropagation, Louvain, cnm, lpa, louvain, modularity
from .embed import Embedding, SgnsParams, SkipGram, build_pairs, sgns_loss_grad, train
from .graph import (Graph, GraphStats, GroundTruthCover, Partition, graph_stats, parse_community_file,
                    parse_edge_list, serialize_communities, serialize_edge_list)
from .harness import EvalReport, RunConfig, emit_report, run_method
from .lfr import LfrParams, generate_lfr
from .metrics import EvalScores, evaluate, mean_f1, nmi, omega
from .pipeline import CommunityEmbedding
from .spectral import EigenPair, leading_eigenpair, merw_reweight
from .walks import RandomWalker, WalkCorpus, WalkParams, generate_corpus, transition_prob

__version__ = "0.1.0"

__all__ = [
    "CNM", "CommunityEmbedding", "EigenPair", "Embedding", "EvalReport", "EvalScores", "Graph", "GraphStats",
    "GroundTruthCover", "KMeans", "LabelPropagation", "LfrParams", "Louvain", "Partition", "RandomWalker",
    "RunConfig", "SgnsParams", "SkipGram", "WalkCorpus", "WalkParams", "build_pairs", "cnm", "emit_report",
    "evaluate", "generate_corpus", "generate_lfr", "graph_stats", "kmeans", "leading_eigenpair", "lpa",
    "louvain", "mean_f1", "merw_reweight", "modularity", "nmi", "omega", "parse_community_file",
    "parse_edge_list", "run_method", "serialize_communities", "serialize_edge_list", "sgns_loss_grad",
    "train", "transition_prob",
]
