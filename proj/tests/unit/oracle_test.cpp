#include <gtest/gtest.h>

#include <cmath>

#include "paircorr/correlation.hpp"
#include "paircorr/errors.hpp"
#include "paircorr/oracle.hpp"

using namespace paircorr;
using namespace paircorr::oracle;

namespace {

ModelParams make(double sigma, double f, double p_tilde, Momentum3 P = {}) {
    ModelParams p;
    p.sigma = sigma;
    p.f = f;
    p.p_tilde = p_tilde;
    p.p_total = P;
    p.relative_axis = {1.0, 0.5, -0.25};
    return p;
}

QuadratureSpec quadrature(std::size_t nodes = 64) {
    QuadratureSpec s;
    s.method = Method::tensor_quadrature;
    s.nodes_per_axis = nodes;
    s.target_rel_tol = 1e-9;
    return s;
}

QuadratureSpec monte_carlo(std::size_t samples = 200'000, double tol = 5e-3) {
    QuadratureSpec s;
    s.sample_count = samples;
    s.target_rel_tol = tol;
    return s;
}

} // namespace

TEST(OracleNormalization, OneParticlePacketsByQuadrature) {
    const auto p = make(0.3, 0.0, 0.4, {0.2, 0.1, 0.0});
    for (double t : {0.0, 5.0}) {
        EXPECT_NEAR(one_particle_norm(p, Branch::plus, t, quadrature(48)).value, 1.0, 1e-10);
        EXPECT_NEAR(one_particle_norm(p, Branch::minus, t, quadrature(48)).value, 1.0, 1e-10);
    }
}

TEST(OracleNormalization, OverlapMatchesClosedForm) {
    const auto p = make(0.5, 0.0, 0.9, {0.3, 0.0, 0.0});
    const auto r0 = overlap_integral(p, 0.0, quadrature(48));
    EXPECT_NEAR(r0.value, overlap_J(0.9, 0.5), 1e-10);
    // the relative phase of the two packets never changes
    EXPECT_NEAR(overlap_integral(p, 3.0, quadrature(64)).value, r0.value, 1e-9);
}

TEST(OracleNormalization, PairDensityByQuadrature) {
    for (double pt : {0.05, 0.5, 2.0}) {
        const auto p = make(0.4, 0.0, pt);
        EXPECT_NEAR(pair_norm(p, SpinChannel::singlet, quadrature()).value, 1.0, 1e-10) << pt;
        EXPECT_NEAR(pair_norm(p, SpinChannel::triplet, quadrature()).value, 1.0, 1e-8) << pt;
    }
}

TEST(OracleNormalization, PairDensityByMonteCarlo) {
    const auto p = make(0.4, 0.0, 0.5, {0.1, 0.0, 0.2});
    for (auto ch : {SpinChannel::singlet, SpinChannel::triplet}) {
        const auto r = pair_norm(p, ch, monte_carlo(200'000));
        EXPECT_LE(r.est_error, 5e-3);
        EXPECT_TRUE(agrees(1.0, r, 0.0)) << r.value << " +- " << r.est_error;
    }
}

TEST(OracleNormalization, CrossSectionAndReducedDensity) {
    auto p = make(0.3, 0.4, 0.5);
    p.n_tot = 2.5;
    EXPECT_NEAR(total_cross_section(p, quadrature()).value, 2.5, 1e-9);
    EXPECT_NEAR(rho_integral(p, quadrature(64)).value, 2.5, 1e-8);
    const auto mc = total_cross_section(p, monte_carlo(100'000));
    EXPECT_TRUE(agrees(2.5, mc, 0.0));
}

TEST(OracleDensity, MarginalMatchesReducedDensity) {
    const auto p = make(0.35, 0.5, 0.6, {0.1, 0, 0});
    const ReducedDensity rho(p);
    for (Momentum3 k : {Momentum3{0.1, 0.1, 0.0}, Momentum3{0.4, -0.2, 0.3}}) {
        const auto q = rho_single(k, p, quadrature(64));
        EXPECT_NEAR(q.value / rho(k), 1.0, 1e-9);
        const auto mc = rho_single(k, p, monte_carlo(100'000, 1e-2));
        EXPECT_TRUE(agrees(rho(k), mc, 0.0)) << mc.value << " vs " << rho(k);
    }
    EXPECT_NEAR(rho.overlap(Branch::plus, Branch::plus).real(), 1.0, 1e-12);
    EXPECT_NEAR(rho.overlap(Branch::plus, Branch::minus).real(), overlap_J(0.6, 0.35), 1e-12);
}

TEST(OracleIntensity, AgreesWithClosedForms) {
    const auto p = make(0.5, 0.5, 0.5, {0.3, -0.1, 0.2});
    for (double dp : {0.25, 1.0}) {
        const auto cor = intensity_cor_oracle(dp, p, monte_carlo());
        const auto unc = intensity_uncor_oracle(dp, p, monte_carlo());
        EXPECT_TRUE(agrees(intensity_cor(dp, p), cor, 1e-3)) << dp;
        EXPECT_TRUE(agrees(intensity_uncor(dp, p), unc, 1e-3)) << dp;
        EXPECT_FALSE(agrees(intensity_uncor(dp, p, UncorrelatedForm::published), unc, 1e-3));
    }
    EXPECT_EQ(intensity_cor_oracle(0.0, p, monte_carlo()).value, 0.0);
}

TEST(OracleIntensity, RatioAgreesWithCorrelation) {
    const auto p = make(0.22, 1.0, 0.3);
    const auto r = correlation_R_oracle(0.3, p, monte_carlo());
    EXPECT_NEAR(r.r, correlation_R(0.3, p), 3 * r.est_error + 1e-3);
}

TEST(OracleIntensity, IndependentOfTotalMomentum) {
    const auto a = make(0.5, 0.3, 0.8);
    const auto b = make(0.5, 0.3, 0.8, {2.0, -1.0, 0.5});
    const auto ra = intensity_cor_oracle(0.6, a, monte_carlo());
    const auto rb = intensity_cor_oracle(0.6, b, monte_carlo());
    EXPECT_LE(std::fabs(ra.value - rb.value), 3 * std::hypot(ra.est_error, rb.est_error));
}

TEST(OracleIntensity, ScalesWithCrossSection) {
    auto p = make(0.5, 0.3, 0.8);
    const auto one = intensity_cor_oracle(0.6, p, monte_carlo(20'000, 1.0));
    p.n_tot = 4.0;
    const auto four = intensity_cor_oracle(0.6, p, monte_carlo(20'000, 1.0));
    EXPECT_NEAR(four.value / one.value, 4.0, 1e-12);
    const auto u1 = intensity_uncor_oracle(0.6, make(0.5, 0.3, 0.8), monte_carlo(20'000, 1.0));
    const auto u4 = intensity_uncor_oracle(0.6, p, monte_carlo(20'000, 1.0));
    EXPECT_NEAR(u4.value / u1.value, 4.0, 1e-12);
}

TEST(OracleDeterminism, SameSeedSameBitsAnyThreadCount) {
    const auto p = make(0.4, 0.5, 0.4);
    auto spec = monte_carlo(20'000, 1.0);
    spec.threads = 1;
    const auto a = intensity_cor_oracle(0.5, p, spec);
    spec.threads = 3;
    const auto b = intensity_cor_oracle(0.5, p, spec);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.est_error, b.est_error);
    spec.rng_seed += 1;
    EXPECT_NE(intensity_cor_oracle(0.5, p, spec).value, a.value);
}

TEST(OracleConvergence, ErrorFallsAsInverseRootSamples) {
    const auto p = make(0.5, 0.5, 1.0);
    const auto small = intensity_uncor_oracle(1.0, p, monte_carlo(20'000, 1.0));
    const auto large = intensity_uncor_oracle(1.0, p, monte_carlo(320'000, 1.0));
    const double ratio = small.est_error / large.est_error;
    EXPECT_GT(ratio, 4.0 * 0.7);
    EXPECT_LT(ratio, 4.0 * 1.3);
    EXPECT_EQ(large.samples_used, 320'000u);
}

TEST(OracleTolerance, TinyBudgetReportsBestEstimate) {
    const auto p = make(0.5, 0.5, 1.0);
    try {
        (void)intensity_cor_oracle(1.0, p, monte_carlo(1'000, 1e-3));
        FAIL() << "expected ToleranceNotMetError";
    } catch (const ToleranceNotMetError& e) {
        EXPECT_TRUE(std::isfinite(e.value()));
        EXPECT_GT(e.est_error(), 1e-3 * std::fabs(e.value()));
        EXPECT_EQ(e.samples_used(), 1'000u);
    }
}

TEST(OracleTolerance, QuadratureIsNotOfferedForShellIntegrals) {
    EXPECT_THROW((void)intensity_cor_oracle(1.0, make(0.5, 0.5, 1.0), quadrature()), DomainError);
    QuadratureSpec bad;
    bad.sample_count = 0;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(OracleGeneralChannels, LinearInWeights) {
    const double sigma = 0.5, dp = 0.8;
    const Momentum3 P{}, pt{0.0, 0.0, 0.6};
    const std::vector<ChannelCrossSection> unit{{SpinChannel::singlet, 1.0, PointMass{P, pt}}};
    const std::vector<ChannelCrossSection> doubled{{SpinChannel::singlet, 2.0, PointMass{P, pt}}};
    const auto spec = monte_carlo(20'000, 1.0);
    EXPECT_NEAR(general_channel_integral(doubled, dp, sigma, spec).value
                    / general_channel_integral(unit, dp, sigma, spec).value,
                2.0, 1e-12);

    const std::vector<ChannelCrossSection> triplet{{SpinChannel::triplet, 1.0, PointMass{P, pt}}};
    const std::vector<ChannelCrossSection> both{{SpinChannel::singlet, 0.3, PointMass{P, pt}},
                                                {SpinChannel::triplet, 0.7, PointMass{P, pt}}};
    const auto big = monte_carlo();
    const auto s = general_channel_integral(unit, dp, sigma, big);
    const auto t = general_channel_integral(triplet, dp, sigma, big);
    const auto m = general_channel_integral(both, dp, sigma, big);
    const double expect = 0.3 * s.value + 0.7 * t.value;
    const double err = std::hypot(m.est_error, 0.3 * s.est_error, 0.7 * t.est_error);
    EXPECT_LE(std::fabs(m.value - expect), 3 * err);
}

TEST(OracleGeneralChannels, PointMassReproducesModelIntensity) {
    const auto p = make(0.5, 0.25, 0.6);
    const auto spec = monte_carlo(20'000, 1.0);
    EXPECT_EQ(general_channel_integral(point_mass_channels(p), 0.7, 0.5, spec).value,
              intensity_cor_oracle(0.7, p, spec).value);
}

TEST(OracleGeneralChannels, NarrowSpreadApproachesPointMass) {
    const double sigma = 0.5, dp = 0.8;
    const Momentum3 P{}, pt{0.0, 0.0, 0.6};
    const std::vector<ChannelCrossSection> narrow{
        gaussian_ptilde_spread(SpinChannel::singlet, 1.0, P, pt, 0.02 * sigma)};
    auto p = make(sigma, 0.0, 0.6);
    p.relative_axis = {0, 0, 1};
    const auto r = general_channel_integral(narrow, dp, sigma, monte_carlo(200'000, 1e-2));
    EXPECT_NEAR(r.value / intensity_cor(dp, p), 1.0, 0.02);
}
