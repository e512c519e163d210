#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "paircorr/stable_math.hpp"
#include "reference_values.hpp"

namespace st = paircorr::stable;

TEST(Sinhc, MatchesDirectFormulaAwayFromZero) {
    for (double z : {0.5, 0.75, 1.0, 3.0, 10.0, 19.9, 25.0, 300.0, 700.0}) {
        EXPECT_NEAR(st::sinhc(z) / (std::sinh(z) / z), 1.0, 1e-14) << z;
    }
}

TEST(Sinhc, SeriesBranchIsSmoothAtCutoff) {
    const double below = st::sinhc(std::nextafter(0.5, 0.0));
    const double above = st::sinhc(0.5);
    EXPECT_NEAR(below, above, 1e-15);
    EXPECT_EQ(st::sinhc(0.0), 1.0);
    EXPECT_EQ(st::sinhc(-2.0), st::sinhc(2.0));
}

TEST(Sinhc, OverflowsOnlyPastDoubleRange) {
    EXPECT_TRUE(std::isfinite(st::sinhc(710.0)));
    EXPECT_TRUE(std::isinf(st::sinhc(800.0)));
    EXPECT_NEAR(st::log_sinhc(800.0), 800.0 - std::log(1600.0), 1e-12);
}

TEST(SinhcMinusOne, KeepsRelativePrecisionNearZero) {
    for (double z : {1e-9, 1e-5, 1e-3}) {
        const double w = z * z;
        const double series = w / 6.0 * (1.0 + w / 20.0 * (1.0 + w / 42.0));
        EXPECT_NEAR(st::sinhc_minus_one(z) / series, 1.0, 1e-15) << z;
    }
    for (double z : {0.1, 0.49, 0.5, 2.0}) {
        EXPECT_NEAR(st::sinhc_minus_one(z) / (std::sinh(z) / z - 1.0), 1.0, 1e-12) << z;
    }
}

TEST(InvSinhc, UnderflowsGracefully) {
    EXPECT_NEAR(st::inv_sinhc(2.0) * st::sinhc(2.0), 1.0, 1e-15);
    EXPECT_GT(st::inv_sinhc(700.0), 0.0);
    EXPECT_EQ(st::inv_sinhc(1e5), 0.0);
    EXPECT_EQ(st::inv_sinhc(0.0), 1.0);
}

// Large-z identity: exp(-(dp^2 + a^2)/4 s^2) sinh(z)/z evaluated through the
// combined exponent equals the direct product wherever both are representable.
TEST(ShellFactor, AgreesWithDirectProductUpToZ700) {
    const double sigma = 1.0;
    for (double z = 1e-3; z <= 700.0; z *= 1.37) {
        const double a = std::sqrt(2.0 * z) * sigma; // dp = a puts the shell at its peak
        const double direct = std::exp(-(a * a + a * a) / (4 * sigma * sigma)) * std::sinh(z) / z;
        ASSERT_TRUE(std::isfinite(direct) && direct > 0.0);
        EXPECT_NEAR(st::shell_factor(a, a, sigma) / direct, 1.0, 1e-12) << z;
    }
}

TEST(ShellFactor, MatchesHighPrecisionReference) {
    using namespace paircorr::reference;
    for (const auto& p : large_z_points) {
        const double v = st::shell_factor(p.delta_p, large_z_p_tilde, large_z_sigma);
        if (p.log_shell_full > std::log(std::numeric_limits<double>::min())) {
            EXPECT_NEAR(std::log(v), p.log_shell_full, 1e-12 * std::fabs(p.log_shell_full)) << p.z;
        } else {
            EXPECT_EQ(v, 0.0) << p.z;
        }
    }
}

TEST(ShellFactor, ReducesToGaussianAtZeroShift) {
    EXPECT_DOUBLE_EQ(st::shell_factor(1.3, 0.0, 0.7), std::exp(-1.3 * 1.3 / (4 * 0.49)));
}
