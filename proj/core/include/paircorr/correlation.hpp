#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "paircorr/model.hpp"

namespace paircorr {

/// Normalization of the accidental (event-mixing) intensity.
///
/// `first_principles` is the closed form obtained by integrating
/// rho(p) rho(p + dp n) / N_tot over p and n; it is what the Monte-Carlo
/// oracle reproduces. `published` multiplies it by J^2, which reproduces the
/// historical curves but no longer integrates to N_tot.
enum class UncorrelatedForm { first_principles, published };

/// z = p_tilde dp / (2 sigma^2), the argument of every sinh in the closed forms.
double z_parameter(double delta_p, double p_tilde, double sigma);

struct IntensityPair {
    double i_cor = 0.0;   ///< same-event (coincidence) intensity
    double i_uncor = 0.0; ///< accidental (event-mixing) intensity
};

/// Coincidence intensity at |p1 - p2| = delta_p, including the physical
/// dp^2 exp(-dp^2 / 4 sigma^2) J^2 prefactor.
double intensity_cor(double delta_p, const ModelParams& params);

/// Accidental intensity at |p1 - p2| = delta_p.
double intensity_uncor(double delta_p, const ModelParams& params,
                       UncorrelatedForm form = UncorrelatedForm::first_principles);

IntensityPair intensities(double delta_p, const ModelParams& params,
                          UncorrelatedForm form = UncorrelatedForm::first_principles);

/// R(dp) = I_cor / I_uncor - 1 for the singlet/triplet mixture with
/// triplet weight params.f.
///
/// The common prefactor is cancelled analytically, so R stays finite where
/// both intensities underflow. At dp = 0 the analytic limit is returned.
/// For f > 0 and p_tilde / sigma below the triplet threshold the p_tilde -> 0
/// limit of the mixture is used (see `correlation_R_small_ptilde_limit`).
double correlation_R(double delta_p, const ModelParams& params,
                     UncorrelatedForm form = UncorrelatedForm::first_principles);

/// Pure singlet channel (f = 0).
double correlation_R0(double delta_p, double p_tilde, double sigma,
                      UncorrelatedForm form = UncorrelatedForm::first_principles);

/// Pure triplet channel (f = 1). Throws DegenerateChannelError at p_tilde ~ 0.
double correlation_R1(double delta_p, double p_tilde, double sigma,
                      UncorrelatedForm form = UncorrelatedForm::first_principles);

/// p_tilde -> 0 limit of the mixture R, as a rational function of
/// q = dp^2 / (4 sigma^2):
///   [2(1-f) + 4fq/3] / [2(1-f)^2 + f^2 (11/8 + q/6 + q^2/10) + f(1-f)(3 + 2q/3)] - 1.
double correlation_R_small_ptilde_limit(double delta_p, double sigma, double f);

struct CorrelationCurve {
    std::vector<double> delta_p;
    std::vector<double> r;
    ModelParams params;

    std::size_t size() const noexcept { return delta_p.size(); }
    bool empty() const noexcept { return delta_p.empty(); }
};

/// Evaluates correlation_R over an ascending grid of positive dp values.
/// Element failures are rethrown as GridPointError carrying the grid index.
CorrelationCurve curve(const ModelParams& params, std::span<const double> grid,
                       UncorrelatedForm form = UncorrelatedForm::first_principles);

/// `count` equally spaced points from `lo` to `hi` inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

struct CurvePeak {
    std::size_t index = 0; ///< grid index of the largest sample
    double delta_p = 0.0;  ///< parabolic-vertex refined location
    double r = 0.0;        ///< refined maximum value
};

/// Location of the global maximum of the curve, refined by a parabola
/// through the largest sample and its neighbours.
CurvePeak locate_maximum(const CorrelationCurve& c);

/// Signs (+1 / -1) of consecutive runs of the curve; exact zeros are skipped.
/// For example a curve negative, then positive, then negative gives {-1, +1, -1}.
std::vector<int> sign_runs(std::span<const double> values);

} // namespace paircorr
