"""Hypothesis tests for random objects measured jointly in multiple metric
spaces: Fréchet means, variances, covariances and correlations, SPD-manifold
comparison of covariance matrices, seven composite group-difference tests,
and a simulation harness."""

from .dataset import dumps_msd, load_msd, loads_msd, save_msd
from .distributions import (
    chi2_cdf,
    chi2_sf,
    chi2_upper_quantile,
    f_cdf,
    f_sf,
    f_upper_quantile,
)
from .errors import (
    DataError,
    DegenerateDataError,
    MetricManovaError,
    SingularMatrixError,
    UnstableStatisticError,
)
from .estimators import (
    MomentSet,
    covariance_matrix,
    frechet_correlation,
    frechet_covariance,
    moment_set,
)
from .inference import (
    TEST_NAMES,
    ComponentResult,
    TestReport,
    anova_stats_covariance,
    anova_stats_variance,
    permutation_pvalue,
    pillai_adapted,
    pillai_distance,
    r_statistic,
    run_test,
    run_tests,
)
from .samples import (
    DistanceProfile,
    FrechetMeanResult,
    GroupedMultiSample,
    SpaceSample,
    distance_profile,
    frechet_mean,
    frechet_variance,
)
from .simulation import (
    RejectionEstimate,
    Scenario1Params,
    Scenario2Params,
    ba_graph,
    estimate_rejection_rate,
    estimate_rejection_rates,
    gamma_covariates,
    gen_scenario1,
    gen_scenario2,
    sample_bivariate_normal,
    scenario_generator,
    study_grid,
)
from .spaces import (
    EuclideanPoint,
    GaussianPoint,
    LaplacianMatrix,
    custom_space,
    distance_matrix_space,
    euclidean_distance,
    euclidean_space,
    frobenius_distance,
    gaussian_space,
    laplacian_from_edges,
    laplacian_space,
    w2_gaussian,
)
from .spd import (
    SpdMatrix,
    matrix_exp_sym,
    matrix_log,
    ridge_repair,
    spd_distance,
    sym_eig,
)

__version__ = "0.1.0"
