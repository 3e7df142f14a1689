"""tumod: structured sparsity through totally unimodular linear descriptions.

The package models combinatorial sparsity penalties as linear systems over
support indicators, certifies total unimodularity of the constraint
matrices, evaluates tight convex envelopes by linear programming, checks
tightness against a brute-force biconjugation oracle, and runs LP-based
sparse-recovery experiments.
"""

from .envelopes import (EnvelopeValue, TuPenaltySpec, dispersive_l0_envelope,
                        dispersive_spec, group_intersection_envelope,
                        group_intersection_spec, knapsack_envelope,
                        knapsack_spec, latent_group_envelope, latent_group_spec,
                        pairwise_dispersive_envelope, pairwise_dispersive_spec,
                        sparse_cover_spec, sparse_g_cover_envelope,
                        sparse_group_surrogate, tree_envelope, tree_spec,
                        tu_envelope_lp, within_group_sparsity_spec)
from .groups import (GroupStructure, IntersectionGraph, TreeStructure,
                     appendix_interval_groups, biadjacency, bipartite_incidence,
                     group_structure, hierarchy_groups, intersection_constraint_matrix,
                     intersection_graph, read_group_file, refractoriness_matrix,
                     tree_incidence, tree_structure, write_group_file)
from .intmat import (IntMatrix, bareiss_determinant, concat_cols, concat_rows,
                     identity, int_matrix, read_int_matrix, write_int_matrix)
from .lp import (LpProblem, LpSolution, LpSolverError, LpStatus,
                 enumerate_vertices_optimum, solve_lp)
from .oracle import (SupportFunctionTable, biconjugate, biconjugate_dominated,
                     conjugate, tabulate)
from .penalties import (dispersive_l0_penalty, group_cover_penalty,
                        group_intersection_penalty, knapsack_penalty,
                        pairwise_dispersive_penalty, sparse_g_cover_penalty,
                        support_indicator, support_set, tree_l0_penalty,
                        within_group_sparsity_penalty)
from .recovery import (ExperimentConfig, NoiseSpec, RecoveryInstance, TrialRecord,
                       dispersive_experiment_config, gen_group_sparse_signal,
                       gen_instance, gen_spike_train, group_cover_experiment_config,
                       mean_errors, records_to_csv, relative_error, run_experiment,
                       solve_bp, solve_dbp, solve_sgl_linf, solve_slgl,
                       write_records_csv)
from .tu import (TuVerdict, check_two_nonzero_row_condition, exhaustive_minor_verdict,
                 is_interval_matrix, is_totally_unimodular, tu_preserving)

__version__ = "0.1.0"
