"""Privacy-utility trade-offs for finite-alphabet mechanisms.

The package evaluates seven privacy losses on explicit mechanisms, gives
closed-form privacy-distortion functions and brackets under Hamming
distortion, builds the mechanisms attaining them, and checks all of it
against numerical oracles.
"""

from putlab.bounds import BoundPair
from putlab.catalog import (identity_mechanism, optimal_adp_mechanism, optimal_ml_mechanism, q_delta_mechanism,
                            randomized_response, uniform_mechanism, wang_mechanism)
from putlab.composition import approx_dp_composition, compose, composed_loss_law, composed_pd
from putlab.core import (Mechanism, Prior, PrivacyNotion, ProductSpace, SourceClass, SourceSet,
                         classify_source_set, expected_distortion, is_valid, theta_star)
from putlab.global_pd import global_bounds
from putlab.local import (adp_known_prior, adp_source_set_class2, class1_pd, dp_known_prior,
                          ml_distortion_from_leakage, ml_known_prior)
from putlab.losses import check_relations, eval_loss
from putlab.lp import BACKEND
from putlab.oracle import oracle_pd_convex, oracle_pd_lp, verify_closed_forms

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoundPair", "Mechanism", "Prior", "PrivacyNotion", "ProductSpace", "SourceClass", "SourceSet",
    "adp_known_prior", "adp_source_set_class2", "approx_dp_composition", "check_relations", "class1_pd",
    "classify_source_set", "compose", "composed_loss_law", "composed_pd", "dp_known_prior", "eval_loss",
    "expected_distortion", "global_bounds", "identity_mechanism", "is_valid", "ml_distortion_from_leakage",
    "ml_known_prior", "optimal_adp_mechanism", "optimal_ml_mechanism", "oracle_pd_convex", "oracle_pd_lp",
    "q_delta_mechanism", "randomized_response", "theta_star", "uniform_mechanism", "verify_closed_forms",
    "wang_mechanism",
]
