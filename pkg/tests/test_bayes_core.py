import math
from dataclasses import dataclass

import numpy as np
import pytest

from conftest import make_cases, oracle_log_bf, oracle_nct_logpdf, rel_linear, rel_log

from informed_ttest import (
    DEFAULT_CAUCHY_PRIOR,
    DegenerateDirectionError,
    DomainError,
    NormalPrior,
    Orientation,
    StudentTPrior,
    TTestSummary,
    Truncation,
    bf10,
    bf10_normal_prior,
    bf10_t_prior,
    integrate_interval_log,
    log_term_ab,
    log_term_cd,
    max_bf01_curve,
    one_sided_bf,
    posterior_log_density,
    posterior_odds,
    posterior_summary,
    savage_dickey_log_bf10,
    transitive_bf,
)
from informed_ttest import bayes
from informed_ttest.model import prior_logpdf
from informed_ttest.quadrature import QuadratureConfig

# 50-digit series evaluations of the closed-form numerator terms
LOG_AB_EXAMPLE = 15.30077884264237951607  # t=2, n=20, mu=0.35, g=0.0104
LOG_CD_EXAMPLE = 337.0591914802363908137  # t=6.22, n=173, delta=0.5
# noncentral-t predictive oracle values (scipy quad, split at the peaks)
LOG_BF_NORMAL_T0_N30 = -1.3862943611198872  # exactly -log 4: (1+30*0.5)^(-1/2)
LOG_BF_NORMAL_TWOSAMPLE = 1.5506448904208443  # t=2, n1=24, n2=26, N(0.35, 0.04)
LOG_BF_ONESIDED_TWOSAMPLE = 0.8463072821552511  # t=1.5, 60/65, t(0.35,0.102,3), pos
LOG_BF01_DEFAULT_N50 = 1.5568152727272966  # t=0, n=50 per group, default prior
# Bayes-rule oracle: mpmath numerator, 16001-point Simpson normaliser
POSTERIOR_LOGDENS_04 = 1.9044455795423403  # t=4.02, n=140, t(0.465,0.078,41.478)
POSTERIOR_MEDIAN_INFORMED = 0.4089672118660457
POSTERIOR_CI_LO_INFORMED = 0.29181808600878584
POSTERIOR_CI_HI_INFORMED = 0.523028615795852

INFORMED_PRIOR = StudentTPrior(0.350, 0.102, 3.0)
FITTED_PRIOR = StudentTPrior(0.465, 0.078, 41.478)


class TestSummaryValidation:
    def test_minimum_observations(self):
        with pytest.raises(DomainError, match="more than one observation"):
            TTestSummary.one_sample(1.0, 1)
        with pytest.raises(DomainError, match="each group"):
            TTestSummary.two_sample(1.0, 10, 1)

    def test_two_sample_needs_n2(self):
        with pytest.raises(DomainError):
            TTestSummary(design="two", t=1.0, n1=10)
        with pytest.raises(DomainError):
            TTestSummary(design="one", t=1.0, n1=10, n2=5)

    def test_implausible_t_rejected(self):
        with pytest.raises(DomainError):
            TTestSummary.one_sample(1.5e6, 20)

    def test_derived_quantities(self):
        s = TTestSummary.two_sample(1.0, 24, 26)
        assert s.nu == 48.0
        assert s.n_eff == pytest.approx(12.48)
        s1 = TTestSummary.one_sample(1.0, 20)
        assert s1.nu == 19.0 and s1.n_eff == 20.0


class TestClosedFormTerms:
    def test_ab_zero_location(self):
        s = TTestSummary.one_sample(2.0, 20)
        got = log_term_ab(s, 0.0, 0.3)
        assert got.sign == 1
        assert got.log_magnitude == pytest.approx(math.lgamma(10.0), abs=1e-12)

    def test_ab_zero_t(self):
        s = TTestSummary.one_sample(0.0, 20)
        got = log_term_ab(s, 0.35, 0.3)
        assert got.log_magnitude == pytest.approx(math.lgamma(10.0), abs=1e-12)

    def test_ab_value(self):
        s = TTestSummary.one_sample(2.0, 20)
        got = log_term_ab(s, 0.35, 0.0104)
        assert got.sign == 1
        assert got.log_magnitude == pytest.approx(LOG_AB_EXAMPLE, abs=1e-10)

    def test_cd_zero_delta(self):
        s = TTestSummary.one_sample(6.22, 173)
        got = log_term_cd(s, 0.0)
        assert got.log_magnitude == pytest.approx(math.lgamma(86.5), abs=1e-12)

    def test_cd_value(self):
        s = TTestSummary.one_sample(6.22, 173)
        got = log_term_cd(s, 0.5)
        assert got.sign == 1
        assert abs(got.log_magnitude - LOG_CD_EXAMPLE) <= 1e-10 * LOG_CD_EXAMPLE

    def test_cancellation_route_matches_series_route(self):
        # the opposed-sign branch switches to the positive-integral form;
        # compare against the hypergeometric form where both are stable
        for nu in (3.0, 40.0, 172.0):
            for q in (-0.2, -0.05, 0.05, 0.2):
                via_pair = bayes._log_gamma_1f1_pair(0.5 * (nu + 1.0), q, 0.25 * q * q, nu)
                via_moment = math.log(2.0) + bayes._log_moment_integral(nu + 1.0, q)
                assert via_pair == pytest.approx(via_moment, abs=5e-12)

    def test_positivity_under_opposition(self):
        # mu_delta and t of opposite sign: the summands nearly cancel but
        # the sum stays positive
        s = TTestSummary.one_sample(-8.0, 500)
        got = log_term_ab(s, 1.0, 0.01)
        assert got.sign == 1 and math.isfinite(got.log_magnitude)

    def test_domain(self):
        s = TTestSummary.one_sample(2.0, 20)
        with pytest.raises(DomainError):
            log_term_ab(s, 0.35, 0.0)
        with pytest.raises(DomainError):
            log_term_cd(s, math.inf)


class TestNormalPriorBF:
    def test_degenerate_prior_is_indifferent(self):
        s = TTestSummary.one_sample(2.0, 30)
        res = bf10_normal_prior(s, NormalPrior(0.0, 1e-12))
        assert abs(math.expm1(res.log_bf10)) <= 1e-6

    def test_null_data_favour_null(self):
        s = TTestSummary.one_sample(0.0, 30)
        res = bf10_normal_prior(s, NormalPrior(0.0, 0.5))
        assert res.log_bf10 == pytest.approx(LOG_BF_NORMAL_T0_N30, abs=1e-10)
        assert res.bf10 < 1.0

    def test_two_sample_value(self):
        s = TTestSummary.two_sample(2.0, 24, 26)
        res = bf10_normal_prior(s, NormalPrior(0.35, 0.04))
        assert res.log_bf10 == pytest.approx(LOG_BF_NORMAL_TWOSAMPLE, abs=1e-9)

    def test_rejects_t_prior(self):
        with pytest.raises(DomainError):
            bf10_normal_prior(TTestSummary.one_sample(1.0, 10), INFORMED_PRIOR)


class TestTPriorBF:
    def test_crowd_within_original(self):
        res = bf10_t_prior(TTestSummary.one_sample(6.22, 173), DEFAULT_CAUCHY_PRIOR)
        assert abs(res.bf10 / 2483125.0 - 1.0) <= 0.01
        assert res.diagnostics.g_integral_log is not None

    def test_crowd_within_replication_informed(self):
        res = bf10_t_prior(TTestSummary.one_sample(4.02, 140), FITTED_PRIOR)
        assert abs(res.bf10 / 901.5 - 1.0) <= 0.01

    def test_crowd_within_replication_default(self):
        res = bf10_t_prior(TTestSummary.one_sample(4.02, 140), DEFAULT_CAUCHY_PRIOR)
        assert abs(res.bf10 / 170.2 - 1.0) <= 0.01


class TestPosteriorDensity:
    def test_even_at_zero_t(self):
        s = TTestSummary.one_sample(0.0, 30)
        for d in (0.1, 0.45, 1.2):
            up = posterior_log_density(s, DEFAULT_CAUCHY_PRIOR, d)
            down = posterior_log_density(s, DEFAULT_CAUCHY_PRIOR, -d)
            assert abs(up - down) <= 1e-12 * max(1.0, abs(up))

    def test_savage_dickey_spot(self):
        s = TTestSummary.one_sample(2.0, 20)
        prior = NormalPrior(0.35, 0.04)
        lhs = posterior_log_density(s, prior, 0.0) - prior_logpdf(prior, 0.0)
        rhs = -bf10_normal_prior(s, prior).log_bf10
        assert abs(math.expm1(lhs - rhs)) <= 1e-8

    def test_density_oracle_value(self):
        s = TTestSummary.one_sample(4.02, 140)
        got = posterior_log_density(s, FITTED_PRIOR, 0.4)
        assert got == pytest.approx(POSTERIOR_LOGDENS_04, abs=1e-8)

    def test_truncated_support(self):
        s = TTestSummary.one_sample(2.0, 20)
        prior = StudentTPrior(0.35, 0.102, 3.0, Truncation.POSITIVE_ONLY)
        assert posterior_log_density(s, prior, -0.2) == -math.inf
        assert math.isfinite(posterior_log_density(s, prior, 0.2))


class TestPosteriorSummary:
    def test_symmetric_median(self):
        grid = posterior_summary(TTestSummary.one_sample(0.0, 30), DEFAULT_CAUCHY_PRIOR)
        assert abs(grid.median) <= 1e-6

    def test_informed_median_and_interval(self):
        grid = posterior_summary(TTestSummary.one_sample(4.02, 140), FITTED_PRIOR)
        assert grid.median == pytest.approx(POSTERIOR_MEDIAN_INFORMED, abs=1e-4)
        assert grid.ci_lower_95 == pytest.approx(POSTERIOR_CI_LO_INFORMED, abs=1e-4)
        assert grid.ci_upper_95 == pytest.approx(POSTERIOR_CI_HI_INFORMED, abs=1e-4)

    def test_symmetric_interval(self):
        grid = posterior_summary(TTestSummary.one_sample(0.0, 30), NormalPrior(0.0, 1.0))
        assert abs(grid.ci_lower_95 + grid.ci_upper_95) <= 1e-5

    def test_normalisation(self):
        for t, n, prior in [
            (6.22, 173, DEFAULT_CAUCHY_PRIOR),
            (0.0, 30, NormalPrior(0.0, 1.0)),
            (-3.0, 50, INFORMED_PRIOR),
        ]:
            grid = posterior_summary(TTestSummary.one_sample(t, n), prior)
            assert abs(grid.normalization_check - 1.0) <= 1e-4


class TestOneSided:
    def test_symmetric_case_equals_two_sided(self):
        s = TTestSummary.one_sample(0.0, 30)
        plus = one_sided_bf(s, DEFAULT_CAUCHY_PRIOR, Orientation.POSITIVE_VS_NULL)
        two = bf10(s, DEFAULT_CAUCHY_PRIOR)
        assert abs(math.expm1(plus.log_bf10 - two.log_bf10)) <= 1e-8

    def test_mixture_identity(self):
        s = TTestSummary.one_sample(1.7, 40)
        plus = one_sided_bf(s, DEFAULT_CAUCHY_PRIOR, Orientation.POSITIVE_VS_NULL)
        minus = one_sided_bf(s, DEFAULT_CAUCHY_PRIOR, Orientation.NEGATIVE_VS_NULL)
        two = bf10(s, DEFAULT_CAUCHY_PRIOR)
        mix = 0.5 * math.exp(plus.log_bf10) + 0.5 * math.exp(minus.log_bf10)
        assert abs(mix / math.exp(two.log_bf10) - 1.0) <= 1e-8

    def test_two_sample_oracle_value(self):
        s = TTestSummary.two_sample(1.5, 60, 65)
        res = one_sided_bf(s, INFORMED_PRIOR, Orientation.POSITIVE_VS_NULL)
        assert res.log_bf10 == pytest.approx(LOG_BF_ONESIDED_TWOSAMPLE, abs=1e-6)
        assert res.orientation is Orientation.POSITIVE_VS_NULL

    def test_matches_truncated_prior(self):
        s = TTestSummary.two_sample(1.5, 60, 65)
        mass_route = one_sided_bf(s, INFORMED_PRIOR, Orientation.POSITIVE_VS_NULL)
        direct = bf10(s, StudentTPrior(0.350, 0.102, 3.0, Truncation.POSITIVE_ONLY))
        assert abs(math.expm1(mass_route.log_bf10 - direct.log_bf10)) <= 1e-8

    def test_requires_untruncated(self):
        s = TTestSummary.one_sample(1.0, 20)
        with pytest.raises(DomainError):
            one_sided_bf(
                s,
                StudentTPrior(0.0, 1.0, 1.0, Truncation.POSITIVE_ONLY),
                Orientation.POSITIVE_VS_NULL,
            )


class TestScalarIdentities:
    def test_transitive_crowd_within(self):
        got = transitive_bf(math.log(901.5), math.log(170.2))
        assert abs(math.exp(got) / 5.30 - 1.0) <= 0.02

    def test_transitive_identity_and_arithmetic(self):
        assert transitive_bf(1.234, 1.234) == 0.0
        assert transitive_bf(math.log(2.0), math.log(8.0)) == pytest.approx(
            math.log(0.25), abs=1e-14
        )

    def test_posterior_odds(self):
        assert posterior_odds(1.0, 10.0) == 10.0
        assert posterior_odds(3.7, 1.0) == 3.7
        assert posterior_odds(0.5, 0.2) == pytest.approx(0.1)
        with pytest.raises(DomainError):
            posterior_odds(0.0, 1.0)
        with pytest.raises(DomainError):
            posterior_odds(1.0, -2.0)


class TestNullEvidenceCurve:
    def test_identical_priors_no_crossover(self):
        res = max_bf01_curve(INFORMED_PRIOR, INFORMED_PRIOR, n_max=8)
        assert res.crossover_n is None
        for p in res.points:
            assert p.log_bf01_a == p.log_bf01_b

    def test_single_point_oracle(self):
        res = max_bf01_curve(DEFAULT_CAUCHY_PRIOR, DEFAULT_CAUCHY_PRIOR, n_max=50, n_min=50)
        assert len(res.points) == 1
        assert res.points[0].log_bf01_a == pytest.approx(LOG_BF01_DEFAULT_N50, abs=1e-6)

    def test_range_validation(self):
        with pytest.raises(DomainError):
            max_bf01_curve(INFORMED_PRIOR, DEFAULT_CAUCHY_PRIOR, n_max=1)


@dataclass(frozen=True)
class _Components:
    """Stand-in summary carrying explicit (t, nu, n_eff)."""

    t: float
    nu: float
    n_eff: float


class TestTwoSampleReduction:
    def test_shared_code_path(self):
        # the two-sample path must equal the one-sample skeleton evaluated
        # at (t, nu = n1+n2-2, n_eff = n1 n2/(n1+n2)) identically
        s = TTestSummary.two_sample(2.0, 24, 26)
        direct = bf10_normal_prior(s, NormalPrior(0.35, 0.04)).log_bf10
        skeleton = bayes._log_bf10_normal(2.0, 48.0, 12.48, 0.35, 0.04)
        assert direct == skeleton

        comp = _Components(2.0, 48.0, 12.48)
        marg = bayes._marginal_t(comp, INFORMED_PRIOR).log_value
        via_summary = bayes._marginal_t(s, INFORMED_PRIOR).log_value
        assert abs(marg - via_summary) <= 1e-12 * max(1.0, abs(marg))


class TestOracleSelfCheck:
    def test_nct_logpdf_matches_scipy_at_moderate_df(self):
        # the test oracle's own noncentral-t density must agree with scipy
        # in the range scipy supports (its boost backend overflows past
        # df ~ 340, which is why the oracle carries its own)
        from scipy import stats

        for df in (1.0, 3.0, 17.0, 99.0, 250.0):
            for nc in (-12.0, -3.0, 0.0, 0.5, 8.0):
                for x in (-6.0, -0.5, 0.0, 1.3, 7.0):
                    ref = float(stats.nct.logpdf(x, df, nc))
                    if not math.isfinite(ref):
                        continue
                    got = oracle_nct_logpdf(x, df, nc)
                    assert abs(got - ref) <= 1e-7 * max(1.0, abs(ref))


class TestRandomisedSuite:
    """Invariant spot-suite on a 40-case slice; the full 200-case grids run
    in the acceptance module."""

    CASES = make_cases(40, seed=777)

    @pytest.mark.parametrize("case", CASES, ids=lambda c: f"t{c.summary.t:+.2f}")
    def test_savage_dickey(self, case):
        sd = savage_dickey_log_bf10(case.summary, case.prior)
        direct = bf10(case.summary, case.prior).log_bf10
        assert rel_linear(sd, direct) <= 1e-6

    @pytest.mark.parametrize("case", CASES[:16], ids=lambda c: f"t{c.summary.t:+.2f}")
    def test_noncentral_t_oracle(self, case):
        mine = bf10(case.summary, case.prior).log_bf10
        ref = oracle_log_bf(case.summary, case.prior)
        tol = 1e-6 if isinstance(case.prior, NormalPrior) else 1e-5
        assert rel_log(mine, ref) <= tol

    @pytest.mark.parametrize("case", CASES[:10], ids=lambda c: f"t{c.summary.t:+.2f}")
    def test_symmetry_under_sign_flip(self, case):
        summary, prior = case.summary, case.prior
        flipped_summary = TTestSummary(summary.design, -summary.t, summary.n1, summary.n2)
        if isinstance(prior, StudentTPrior):
            flipped_prior = StudentTPrior(-prior.location, prior.scale, prior.df)
        else:
            flipped_prior = NormalPrior(-prior.mean, prior.variance)
        a = bf10(summary, prior).log_bf10
        b = bf10(flipped_summary, flipped_prior).log_bf10
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))

    def test_even_in_t_for_centered_prior(self):
        prior = StudentTPrior(0.0, 0.7, 2.0)
        for t in (0.3, 1.8, 5.5):
            up = bf10(TTestSummary.one_sample(t, 45), prior).log_bf10
            down = bf10(TTestSummary.one_sample(-t, 45), prior).log_bf10
            assert abs(up - down) <= 1e-10 * max(1.0, abs(up))

    @pytest.mark.parametrize("case", CASES[:10], ids=lambda c: f"t{c.summary.t:+.2f}")
    def test_positivity(self, case):
        loc = (
            case.prior.location
            if isinstance(case.prior, StudentTPrior)
            else case.prior.mean
        )
        ab = log_term_ab(case.summary, loc, 0.17)
        cd = log_term_cd(case.summary, loc + 0.3)
        assert ab.sign == 1 and cd.sign == 1

    def test_scale_mixture_identity_spot(self):
        summary = TTestSummary.one_sample(2.4, 60)
        prior = StudentTPrior(0.3, 0.4, 5.0)
        lhs = bf10_t_prior(summary, prior).log_bf10
        shape = 0.5 * prior.df
        scale = 0.5 * prior.scale**2 * prior.df
        from informed_ttest import integrate_halfline_log, inv_gamma_logpdf

        rhs = integrate_halfline_log(
            lambda g: bayes._log_bf10_normal(summary.t, summary.nu, summary.n_eff, prior.location, g)
            + inv_gamma_logpdf(g, shape, scale),
            QuadratureConfig(rel_tol=1e-10),
        ).log_value
        assert rel_linear(lhs, rhs) <= 1e-8

    def test_large_df_limit_spot(self):
        summary = TTestSummary.one_sample(2.4, 60)
        heavy = bf10_t_prior(summary, StudentTPrior(0.3, 0.4, 1e6)).log_bf10
        normal = bf10_normal_prior(summary, NormalPrior(0.3, 0.16)).log_bf10
        assert abs(heavy - normal) <= 1e-3

    def test_refined_posterior_mass_spot(self):
        summary = TTestSummary.one_sample(-2.2, 35)
        prior = StudentTPrior(0.2, 0.3, 3.0)
        grid = posterior_summary(summary, prior)
        res = integrate_interval_log(
            lambda d: posterior_log_density(summary, prior, d),
            float(grid.delta[0]),
            float(grid.delta[-1]),
            QuadratureConfig(rel_tol=1e-10),
        )
        assert abs(math.expm1(res.log_value)) <= 1e-6
