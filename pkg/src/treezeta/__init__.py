"""Trees, Schottky quotients, shift dynamics and spectral zeta functions.

The pipeline: build a patch of the Bruhat-Tits tree of PGL(2, Q_p), let a
Schottky group act, form the quotient dual graph, study the subshift of
finite type of its walks, realize the graded filtration of cylinder
functions exactly, represent truncated Cuntz-Krieger operator families on
it, and check numerically that regularized determinants of the associated
Dirac zeta functions reproduce local Euler factors (split and foam
variants).
"""

from treezeta.graphs import (DirectedGraph, EdgeMatrix, ValidationReport,
                             append_tails, edge_matrices, enumerate_walks,
                             quotient_by_action, subdivide_edges, universal_cover)
from treezeta.padic import PadicContext
from treezeta.lattices import (LatticeClass, TreePatch, build_tree_patch,
                               crossroad, half_line_of_point, lattice_distance,
                               vertex_neighbors)
from treezeta.schottky import (DualGraphData, SchottkyGroup, axis_vertices,
                               bridge, build_schottky_tree, equalize_loop_lengths,
                               hyperbolic_type, quotient_dual_graph,
                               reduction_quotient)
from treezeta.extension import (ExtensionParams, extend_edge_matrix, extend_graph,
                                walk_embedding)
from treezeta.dynamics import (FiltrationSpace, ShadowMeasure, ShiftSpace,
                               build_sft, cylinder_measure, filtration_space,
                               rank_filtration, shadow_measure, theta_counts)
from treezeta.operators import (CohomologyEmbedding, OperatorSet, af_core_element,
                                build_operators, check_ck_relations,
                                embed_cohomology)
from treezeta.zeta import (DiracSpectrum, EulerFactorSpec, TraceTable,
                           dirac_spectrum, euler_factor, hurwitz_zeta,
                           regularized_determinant, verify_local_factor,
                           zeta_functions)
from treezeta.foam import FoamBlock, build_foam_graph, foam_embeddings

__all__ = [
    "DirectedGraph", "EdgeMatrix", "ValidationReport", "append_tails",
    "edge_matrices", "enumerate_walks", "quotient_by_action", "subdivide_edges",
    "universal_cover",
    "PadicContext",
    "LatticeClass", "TreePatch", "build_tree_patch", "crossroad",
    "half_line_of_point", "lattice_distance", "vertex_neighbors",
    "DualGraphData", "SchottkyGroup", "axis_vertices", "bridge",
    "build_schottky_tree", "equalize_loop_lengths", "hyperbolic_type",
    "quotient_dual_graph", "reduction_quotient",
    "ExtensionParams", "extend_edge_matrix", "extend_graph", "walk_embedding",
    "FiltrationSpace", "ShadowMeasure", "ShiftSpace", "build_sft",
    "cylinder_measure", "filtration_space", "rank_filtration", "shadow_measure",
    "theta_counts",
    "CohomologyEmbedding", "OperatorSet", "af_core_element", "build_operators",
    "check_ck_relations", "embed_cohomology",
    "DiracSpectrum", "EulerFactorSpec", "TraceTable", "dirac_spectrum",
    "euler_factor", "hurwitz_zeta", "regularized_determinant",
    "verify_local_factor", "zeta_functions",
    "FoamBlock", "build_foam_graph", "foam_embeddings",
]

__version__ = "0.1.0"
