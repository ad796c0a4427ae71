"""Overlapping community detection with assortative and generative node features."""

from .estimator import PFCD
from .graph import FeatureTable, Graph, GraphFormatError, load_edge_list, load_feature_table, split_features
from .learner import FitConfig, FitDivergedError, FitResult, fit, initialize
from .metrics import CommunityAssignment, f1_score, nmi, rank_assortative
from .model import ModelParams, NumericalDomainError, log_likelihood
from .synth import SynthConfig, generate_features, generate_network

__version__ = "0.1.0"

__all__ = [
    "PFCD", "FeatureTable", "Graph", "GraphFormatError", "load_edge_list", "load_feature_table",
    "split_features", "FitConfig", "FitDivergedError", "FitResult", "fit", "initialize",
    "CommunityAssignment", "f1_score", "nmi", "rank_assortative", "ModelParams",
    "NumericalDomainError", "log_likelihood", "SynthConfig", "generate_features", "generate_network",
]
