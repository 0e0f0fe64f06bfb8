"""Continuum trees: line-breaking, cut measures, genealogies and their discrete analogues."""
from .cuts import CutMeasure, CutPointProcess, first_separation, restricted_cut_measure, simulate_cuts
from .discrete import (
    GammaWalk,
    PoissonCutTrace,
    gamma_walk,
    one_cut_distance_matrix,
    poisson_cut_trace,
)
from .genealogy import GenealogyResult, HorizonWarning, genealogy_matrix
from .linebreak import line_break
from .realtree import Atom, RealTree, TreePoint
from .theta import ThetaParam, build_pn, cdf_eta1, survival_eta1
