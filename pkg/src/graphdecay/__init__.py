"""Spectral decay estimates, Green kernels, and parabolicity on weighted graphs."""

from .graphs import (ConfigError, GraphError, NumericError, PreconditionError,
                     ResourceError, WeightedGraph, GraphFamily,
                     RegularTreeFamily, WeightedRayFamily, FileFamily,
                     End, EndDecomposition, RadialSlice, Materialized,
                     build_family, make_graph, graph_from_file,
                     graph_from_dict, ball, annulus, ends)
from .metrics import (Metric, combinatorial_metric, default_intrinsic,
                      explicit_metric, metric_from_spec, verify_intrinsic,
                      jump_size, lipschitz_constant, IntrinsicReport,
                      LipschitzReport)
from .operators import (VertexFunction, NegativeFunctionError,
                        laplacian_apply, laplacian_values, gamma,
                        gamma_by_definition, green_identity_residual,
                        form_identity_residual, rayleigh_quotient,
                        dirichlet_bottom, ball_bottom, end_bottom,
                        spectral_bottom_estimate, complement_bottom,
                        essential_bottom_evidence, subharmonic_defect,
                        SpectralResult, SpectralSequence, IdentityResidual)
from .decay import (DecayRate, decay_rate, decay_rate_inverse, q_of,
                    CutoffPair, build_cutoffs, exp_gradient_bounds,
                    GradientViolation, DecayReport, DecayRow,
                    subharmonic_decay_report, decay_report_on_domain,
                    decay_condition, vanishing_trend, slope_fit)
from .domains import Domain, domain_for_end, domain_for_region, resolve_values
from .potential import (ResolventKernel, ResolventLimit, resolvent_truncated,
                        resolvent, resolvent_decay_report, HarmonicSolution,
                        solve_harmonic, harmonic_dirichlet, BarrierFunction,
                        barrier, ClassificationReport, classify_parabolic,
                        tail_volume_telescoping, harmonic_limit_decay,
                        TreeOracle, tree_closed_forms)
from .entropy import EntropyEstimate, volume_entropy, brooks_check
from .oracles import (OracleResult, brute_eigen, brute_recurrence, brute_sum,
                      brute_ball_sizes)

__version__ = "0.1.0"
