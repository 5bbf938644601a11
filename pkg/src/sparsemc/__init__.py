"""First-order model checking on sparse random graphs.

The pipeline: sample a graph from a random model, verify or search the
prefix-partition budget, extract the low-degree protrusion skeleton,
shrink each region to a minimal rank-q-equivalent representative, and
evaluate local sentences on the kernelized neighborhoods. The harness
measures all of it over (model, n, seed) grids into CSV/SVG reports.
"""

from .graphs import (Ball, DegreeStats, Graph, LabeledGraph, as_labeled,
                     ball, base_graph, bfs_ball_members, complete_graph,
                     connected_components, cycle_graph, degree_stats,
                     edge_excess, induced_edge_count, is_connected,
                     lollipop_graph, path_graph, star_graph, triangle_count)
from .graphio import (GraphFormatError, format_graph, parse_graph,
                      read_graph, write_graph)
from .models import (ModelSpec, gen_chung_lu, gen_config, gen_er, gen_pa,
                     generate, integer_power_law_weights, parse_model_desc,
                     parse_probability_expr, power_law_weights)
from .fo import (EvalError, Formula, FormulaError, distance_at_most,
                 distance_greater, distance_qrank, formula_size, free_vars,
                 naive_check, parse_formula, print_formula, qrank,
                 relativize, substitute_free)
from .gnf import (BasicLocalSentence, GnfFormatError, GnfSentence,
                  expand_to_fo, format_gnf, gnf_to_fo, parse_gnf)
from .qtypes import QType, TypeContext, compute_qtype, qtype_equal, tuple_type_id
from .decomp import (BrmuVerdict, CanonicalPartition, PartitionParams,
                     ProtrusionSkeleton, d_hat, d_tilde_exponent_class,
                     minimal_b, peel_degree_one, protrusion_skeleton,
                     verify_brmu_partition, verify_protrusion_partition)
from .kernel import (KernelConfig, KernelReport, RepResult,
                     minimal_representative, reduce_trees, replace_part,
                     replace_protrusions)
from .localcheck import (GnfResult, LocalOutcome, ScatterReport, check_gnf,
                         check_gnf_oracle, eval_local, max_scattered)
from .harness import (ExperimentPlan, RunSummary, emit_plots, measure_row,
                      parse_plan, read_report, run_experiment)
from .selftest import SelftestReport, rank_characteristic, run_selftest

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
