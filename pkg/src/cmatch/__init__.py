"""Online matching on bipartite configuration models.

The package samples configuration-model graphs as an online stream, runs
matching policies (greedy, ranking, and lookahead baselines) with optional
per-vertex capacities, computes exact offline optima, and solves the
fluid-limit ODEs whose curves predict greedy's asymptotic performance.
"""

from .degrees import DegreePMF, dominates, explicit, from_spec, poisson, regular
from .stream import (DegreeSequencePair, HalfEdgePool, Multigraph,
                     build_full_graph, new_pool, sample_degree_sequences,
                     write_edge_list)
from .matching import (BIASED_GREEDY, GREEDY, HIGHEST, POLICIES, RANKING,
                       SMALLEST, Trajectory, capacities_from_profile,
                       final_matched_counts, histograms_at,
                       matched_fraction_at, run_policy, write_trajectory_csv)
from .fluid import (CapacityProfile, CharacteristicsReport, FluidCurve,
                    ModelComparison, SystemState, SystemTrajectory,
                    closed_form_2regular, closed_form_er, compare_models,
                    solve_G_capless, solve_G_fixed_capacity,
                    solve_G_general_capacity, solve_full_system,
                    sup_deviation, verify_characteristics, write_fluid_csv)
from .offline import OptResult, max_b_matching, max_matching

__all__ = [
    "DegreePMF", "regular", "poisson", "explicit", "from_spec", "dominates",
    "DegreeSequencePair", "HalfEdgePool", "Multigraph",
    "sample_degree_sequences", "new_pool", "build_full_graph",
    "write_edge_list",
    "GREEDY", "RANKING", "SMALLEST", "HIGHEST", "BIASED_GREEDY", "POLICIES",
    "Trajectory", "run_policy", "final_matched_counts", "matched_fraction_at",
    "histograms_at", "capacities_from_profile", "write_trajectory_csv",
    "FluidCurve", "CapacityProfile", "SystemState", "SystemTrajectory",
    "CharacteristicsReport", "ModelComparison",
    "solve_G_capless", "solve_G_fixed_capacity", "solve_G_general_capacity",
    "solve_full_system", "verify_characteristics", "closed_form_2regular",
    "closed_form_er", "compare_models", "sup_deviation", "write_fluid_csv",
    "OptResult", "max_matching", "max_b_matching",
]
