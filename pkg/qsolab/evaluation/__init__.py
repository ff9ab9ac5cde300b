from .metrics import (
    MetricReport,
    du_bounds,
    du_objective,
    hat_du_exact,
    lipschitz_F_check,
    nonsymmetric_degeneracy_demo,
)
from .structure import BlockWitness, find_invariant_blocks
from .mixing import (
    BallCertificate,
    ChainStability,
    EmpiricalReport,
    MixingReport,
    QuasiCertificate,
    Verdict,
    chain_stability,
    check_diamond_ball,
    classify_quasi_mixing,
    delta1_exact,
    delta1_lipschitz_check,
    delta_coeff,
    delta_n_estimate,
    delta_n_profile,
    empirical_mixing,
    grid_certify,
    implied_horizon,
    openness_radius,
    quasi_equiv_check,
    sampled_image_diameter,
    norm_mixing_spot_check,
    window_coefficient,
)
from .evaluator import CensusEvaluator, Evaluator, wilson_interval
from .testing import flatten_results_dict, print_csv_format, verify_results
