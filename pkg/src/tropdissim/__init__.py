"""Dissimilarity vectors of metric trees and their tropical relations."""

from .branching import BranchingDiagram, branching_diagram, valuation, valuation_tableau
from .dissimilarity import (DissimVector, DistanceMatrix, d_sigma, dissimilarity_vector,
                            distance_matrix, pairwise_from_rooted, rooted_dissimilarity,
                            rooted_dissimilarity_vector, rooted_vector, steiner_hull,
                            tableau_dissimilarity)
from .newick import NewickError, parse_newick, to_newick
from .reconstruction import NonAdditiveError, four_point_check, reconstruct, verify_injectivity
from .relations import (QuadraticRelation, classical_selftest, exchange_relation, gen_exchange,
                        gen_three_term, tropical_check)
from .tableaux import (Tableau, columns, dimension_oracle, enumerate_ssyt, rho,
                       validate_ssyt)
from .tree import InvalidTreeError, MetricTree, Split, Topology, enumerate_topologies, random_tree
from .tropical import NEG_INF, TropicalForm, Verdict, argmax_count, eval_form, membership, tropicalize

__version__ = "0.1.0"
