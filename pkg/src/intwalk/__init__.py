"""Persistence probabilities of the integrated simple random walk and its bridge.

Exact lattice dynamic programming at small horizons, float64 DP and exact
conditional sampling at large ones, characteristic-function inversion against
the local Gaussian limit, and decay-exponent estimation across the three
conditioning regimes (free, walk bridge, full bridge).
"""

from .errors import BudgetError, PreconditionError
from .paths import (AdjointPath, State, StepPath, accordance_set, adjoint_evolve,
                    all_paths, area_before_start, evolve, in_support, make_path,
                    reachable, shift_states)
from .layers import Layer, Weight, initial_layer, layer_sequence, run_layers, step
from .dist import (BoundCheck, BridgeResult, ConditionalMoments, Decomposition,
                   FirstPassage, association_check, bridge_persistence,
                   conditional_moments, decomposition_identity,
                   endpoint_reversal_prob, first_passage, persistence,
                   point_prob, s_bridge_persistence, scaled_pair_covariance,
                   strict_positive_moment, tail_joint_bound, target_zone_mass)
from .fourier import (DecayScan, QuadratureSpec, QuadraticScan, cf_decay_scan,
                      char_fn, g_density, g_transition, invert_cf,
                      invert_cf_grid, llt_sup_error, quadratic_bound_scan)
from .transforms import (TransformReport, check_level_r_injection,
                         check_monotone_membership, check_sign_flip_injection,
                         invert_after_last_r, invert_after_last_zero)
from .sampling import (BackwardTable, McEstimate, PinSpec, PinnedCltReport,
                       ScaledPath, area_nonnegative, build_backward,
                       conditional_marginal, mc_persistence, paths_to_signs,
                       pinned_clt_check, pinned_marginal_density,
                       pinned_oracle_moments, positivity_functional, rng_stream,
                       sample_pinned, walk_area_endpoints)
from .exponent import (DecayPoint, DecaySeries, ExponentFit, fit_exponent,
                       regime_suite)

__version__ = "0.1.0"
