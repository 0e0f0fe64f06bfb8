"""Random p-trees, their cut-trees and the reverse (shuffle) transformation."""
from .ptree import (
    ProbWeights,
    RepeatTimes,
    RootedTree,
    enumerate_rooted_trees,
    ptree_pmf,
    repeat_times,
    reroot,
    sample_ptree,
    span,
    span_star,
    subtree_above,
)

__version__ = "0.1.0"
