#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "paircorr/correlation.hpp"
#include "paircorr/dataset.hpp"
#include "paircorr/errors.hpp"
#include "paircorr/model.hpp"

namespace paircorr {

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// How p_tilde is determined during a fit.
enum class PTildeMode {
    free,           ///< estimated within p_tilde_bounds
    fixed,          ///< held at FitConfig::fixed.p_tilde
    ratio_to_sigma, ///< tied to p_tilde_ratio * sigma
};

struct FitConfig {
    bool free_sigma = true;
    bool free_f = true;
    PTildeMode p_tilde_mode = PTildeMode::ratio_to_sigma;
    double p_tilde_ratio = 0.1;

    /// Values used for parameters that are not estimated.
    ModelParams fixed{};

    Bounds sigma_bounds{1e-3, 10.0};
    Bounds f_bounds{0.0, 1.0};
    Bounds p_tilde_bounds{0.0, 5.0};
    /// Range from which multistart sigma values are drawn (log-uniform),
    /// intersected with sigma_bounds.
    Bounds sigma_start_range{0.05, 2.0};

    std::size_t multistart_count = 16;
    std::size_t max_iterations = 200;
    double step_tol = 1e-10;     ///< relative parameter change
    double residual_tol = 1e-14; ///< relative objective change
    std::uint64_t rng_seed = 20070101;
    UncorrelatedForm form = UncorrelatedForm::first_principles;
    std::size_t threads = 0;

    std::size_t free_count() const noexcept;
    void validate() const;
};

struct FitResult {
    ModelParams params;           ///< full parameter set at the optimum
    double approx_error = 0.0;    ///< percent, see approximation_error
    std::vector<double> residuals; ///< model - data, per point
    double objective = 0.0;       ///< weighted sum of squared residuals
    bool converged = false;
    std::size_t iterations = 0;
    std::vector<double> objective_trace; ///< objective at the start, then after every accepted step
    std::size_t start_index = 0;         ///< multistart that produced the result
};

/// No multistart met the convergence tolerances. The best attempt is attached.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, FitResult best)
        : Error(what), best_(std::move(best)) {}

    const FitResult& best() const noexcept { return best_; }

private:
    FitResult best_;
};

/// Bounded Levenberg-Marquardt fit of correlation_R to the data, best of
/// `multistart_count` Latin-hypercube starts.
/// Throws InsufficientDataError (fewer than 2 points per free parameter),
/// InsufficientSensitivityError (R does not depend on a free parameter at
/// any start) and NonConvergenceError.
FitResult fit(const Dataset& data, const FitConfig& config);

/// 100 * sqrt(sum w (R_model - r)^2 / sum w r^2). Throws UndefinedMetricError
/// if every r is zero.
double approximation_error(const Dataset& data, const ModelParams& params,
                           UncorrelatedForm form = UncorrelatedForm::first_principles);

/// r_i = R(dp_i) (1 + noise_rel xi_i) with xi_i standard normal, reproducible per seed.
Dataset synthesize(const ModelParams& params, std::span<const double> grid, double noise_rel,
                   std::uint64_t rng_seed,
                   UncorrelatedForm form = UncorrelatedForm::first_principles);

} // namespace paircorr
