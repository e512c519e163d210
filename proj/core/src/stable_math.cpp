#include "paircorr/stable_math.hpp"

#include <cmath>
#include <limits>

namespace paircorr::stable {

namespace {

constexpr double series_cutoff = 0.5;

// sum_{k>=1} w^k / (2k+1)!, all terms positive
double sinhc_tail_series(double w) {
    double term = w / 6.0;
    double sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= w / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        sum += term;
        if (term <= sum * 1e-17) {
            break;
        }
    }
    return sum;
}

} // namespace

double sinhc(double z) {
    z = std::fabs(z);
    if (z < series_cutoff) {
        return 1.0 + sinhc_tail_series(z * z);
    }
    if (z < 710.0) {
        return std::sinh(z) / z;
    }
    return std::exp(log_sinhc(z));
}

double sinhc_minus_one(double z) {
    z = std::fabs(z);
    if (z < series_cutoff) {
        return sinhc_tail_series(z * z);
    }
    return sinhc(z) - 1.0;
}

double log_sinhc(double z) {
    z = std::fabs(z);
    if (z < series_cutoff) {
        return std::log1p(sinhc_tail_series(z * z));
    }
    // sinh z / z = e^z (1 - e^{-2z}) / (2z)
    return z + std::log(-std::expm1(-2.0 * z) / (2.0 * z));
}

double inv_sinhc(double z) {
    z = std::fabs(z);
    if (z < series_cutoff) {
        return 1.0 / (1.0 + sinhc_tail_series(z * z));
    }
    return 2.0 * z * std::exp(-z) / (-std::expm1(-2.0 * z));
}

double shell_factor(double dp, double a, double sigma) {
    const double four_s2 = 4.0 * sigma * sigma;
    const double z = a * dp / (2.0 * sigma * sigma);
    if (z < series_cutoff) {
        return std::exp(-(dp * dp + a * a) / four_s2) * (1.0 + sinhc_tail_series(z * z));
    }
    const double diff = dp - a;
    return std::exp(-diff * diff / four_s2) * (-std::expm1(-2.0 * z)) / (2.0 * z);
}

} // namespace paircorr::stable
