"""Bayes factor t-tests with informed effect size priors.

Given only a t-statistic and the sample size(s), compute the marginal
posterior of the standardised effect size and Bayes factors under
shifted/scaled Student-t or normal priors, for one-sample/paired and
independent-samples designs, including one-sided tests, replication
chains, and evidence-for-the-null curves.
"""

from .bayes import (
    CurvePoint,
    CurveResult,
    bf10,
    bf10_normal_prior,
    bf10_t_prior,
    log_term_ab,
    log_term_cd,
    max_bf01_curve,
    observed_effect_size,
    one_sided_bf,
    posterior_log_density,
    posterior_odds,
    posterior_summary,
    savage_dickey_log_bf10,
    transitive_bf,
)
from .elicitation import (
    ElicitationSheet,
    FitResult,
    PercentileFeedback,
    ReplicationChainResult,
    fit_t_to_density_grid,
    fit_t_to_histogram,
    fit_t_to_quantiles,
    replication_chain,
)
from .errors import (
    DegenerateDirectionError,
    DomainError,
    InsufficientInformationError,
    IntegrationError,
)
from .model import (
    DEFAULT_CAUCHY_PRIOR,
    BayesFactorResult,
    Design,
    Diagnostics,
    EffectSizePrior,
    NormalPrior,
    Orientation,
    PosteriorGrid,
    StudentTPrior,
    TTestSummary,
    Truncation,
    parse_prior,
)
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadResult,
    integrate_halfline_log,
    integrate_interval_log,
)
from .reports import SCHEMA_VERSION, AnalysisRequest, build_report
from .signed_log import SignedLogValue
from .special import (
    inv_gamma_logpdf,
    log_1f1,
    log_gamma,
    normal_cdf,
    normal_logpdf,
    student_t_cdf,
    student_t_logpdf,
    student_t_quantile,
)

__version__ = "0.1.0"
