#include "paircorr/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "paircorr/parallel.hpp"

namespace paircorr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double jacobian_rel_step = 1e-6;
constexpr double lambda_initial = 1e-3;
constexpr double lambda_max = 1e14;

enum class Slot { sigma, f, p_tilde };

const char* slot_name(Slot s) {
    switch (s) {
    case Slot::sigma:
        return "sigma";
    case Slot::f:
        return "f";
    case Slot::p_tilde:
        return "p_tilde";
    }
    return "?";
}

class Problem {
public:
    Problem(const Dataset& data, const FitConfig& cfg) : data_(data), cfg_(cfg) {
        if (cfg.free_sigma) {
            add(Slot::sigma, cfg.sigma_bounds);
        }
        if (cfg.free_f) {
            add(Slot::f, cfg.f_bounds);
        }
        if (cfg.p_tilde_mode == PTildeMode::free) {
            add(Slot::p_tilde, cfg.p_tilde_bounds);
        }
        sqrt_w_.resize(static_cast<Eigen::Index>(data.size()));
        for (std::size_t i = 0; i < data.size(); ++i) {
            sqrt_w_[static_cast<Eigen::Index>(i)] = std::sqrt(data.weight(i));
        }
    }

    std::size_t dim() const { return slots_.size(); }
    const std::vector<Slot>& slots() const { return slots_; }
    const VectorXd& lo() const { return lo_; }
    const VectorXd& hi() const { return hi_; }

    ModelParams params(const VectorXd& theta) const {
        ModelParams p = cfg_.fixed;
        p.n_tot = 1.0;
        for (std::size_t j = 0; j < slots_.size(); ++j) {
            const double v = theta[static_cast<Eigen::Index>(j)];
            switch (slots_[j]) {
            case Slot::sigma:
                p.sigma = v;
                break;
            case Slot::f:
                p.f = v;
                break;
            case Slot::p_tilde:
                p.p_tilde = v;
                break;
            }
        }
        if (cfg_.p_tilde_mode == PTildeMode::ratio_to_sigma) {
            p.p_tilde = cfg_.p_tilde_ratio * p.sigma;
        }
        return p;
    }

    /// Weighted residuals, or nothing if the model cannot be evaluated there.
    std::optional<VectorXd> residuals(const VectorXd& theta) const {
        const ModelParams p = params(theta);
        VectorXd r(static_cast<Eigen::Index>(data_.size()));
        try {
            for (std::size_t i = 0; i < data_.size(); ++i) {
                const auto& pt = data_.points[i];
                const double v = correlation_R(pt.delta_p, p, cfg_.form);
                if (!std::isfinite(v)) {
                    return std::nullopt;
                }
                r[static_cast<Eigen::Index>(i)] = sqrt_w_[static_cast<Eigen::Index>(i)] * (v - pt.r);
            }
        } catch (const Error&) {
            return std::nullopt;
        }
        return r;
    }

    /// Forward differences, stepping inward at an upper bound.
    std::optional<MatrixXd> jacobian(const VectorXd& theta, const VectorXd& r0) const {
        MatrixXd jac(r0.size(), theta.size());
        for (Eigen::Index j = 0; j < theta.size(); ++j) {
            double h = jacobian_rel_step * std::max(std::fabs(theta[j]), 1e-3);
            if (theta[j] + h > hi_[j]) {
                h = -h;
            }
            VectorXd t = theta;
            t[j] += h;
            auto r = residuals(t);
            if (!r) {
                h = -h;
                t[j] = theta[j] + h;
                r = residuals(t);
                if (!r) {
                    return std::nullopt;
                }
            }
            jac.col(j) = (*r - r0) / (t[j] - theta[j]);
        }
        return jac;
    }

    VectorXd clamp(VectorXd theta) const {
        for (Eigen::Index j = 0; j < theta.size(); ++j) {
            theta[j] = std::clamp(theta[j], lo_[j], hi_[j]);
        }
        return theta;
    }

private:
    void add(Slot s, Bounds b) {
        slots_.push_back(s);
        lo_.conservativeResize(lo_.size() + 1);
        hi_.conservativeResize(hi_.size() + 1);
        lo_[lo_.size() - 1] = b.lo;
        hi_[hi_.size() - 1] = b.hi;
    }

    const Dataset& data_;
    const FitConfig& cfg_;
    std::vector<Slot> slots_;
    VectorXd lo_, hi_;
    VectorXd sqrt_w_;
};

struct StartOutcome {
    VectorXd theta;
    double objective = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool evaluated = false;
    std::size_t iterations = 0;
    std::vector<double> trace;
    std::vector<bool> sensitive; ///< per free parameter, at the starting point
};

StartOutcome levenberg_marquardt(const Problem& prob, const FitConfig& cfg, VectorXd theta) {
    StartOutcome out;
    out.sensitive.assign(prob.dim(), false);
    auto r = prob.residuals(theta);
    if (!r) {
        out.theta = theta;
        return out;
    }
    out.evaluated = true;
    double obj = r->squaredNorm();
    out.trace.push_back(obj);

    const double scale = std::max(1.0, r->lpNorm<Eigen::Infinity>());
    double lambda = lambda_initial;
    for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
        out.iterations = iter + 1;
        if (obj == 0.0) {
            out.converged = true;
            break;
        }
        const auto jac = prob.jacobian(theta, *r);
        if (!jac) {
            break;
        }
        if (iter == 0) {
            for (std::size_t j = 0; j < prob.dim(); ++j) {
                const double colmax = jac->col(static_cast<Eigen::Index>(j)).lpNorm<Eigen::Infinity>()
                                      * std::max(std::fabs(theta[static_cast<Eigen::Index>(j)]), 1e-3);
                out.sensitive[j] = colmax > 1e-12 * scale;
            }
        }
        const MatrixXd a = jac->transpose() * *jac;
        const VectorXd g = jac->transpose() * *r;

        bool accepted = false;
        while (lambda <= lambda_max) {
            MatrixXd m = a;
            for (Eigen::Index j = 0; j < m.rows(); ++j) {
                m(j, j) += lambda * std::max(a(j, j), 1e-12);
            }
            const VectorXd step = m.ldlt().solve(-g);
            const VectorXd trial = prob.clamp(theta + step);
            if (trial == theta) {
                // the step leaves the box on every moving coordinate
                out.converged = true;
                break;
            }
            const auto rt = prob.residuals(trial);
            const double obj_t = rt ? rt->squaredNorm() : std::numeric_limits<double>::infinity();
            if (obj_t < obj) {
                const double rel_obj = (obj - obj_t) / obj;
                const double rel_step = (trial - theta).norm() / (theta.norm() + cfg.step_tol);
                theta = trial;
                r = rt;
                obj = obj_t;
                out.trace.push_back(obj);
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (rel_obj <= cfg.residual_tol || rel_step <= cfg.step_tol) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if (out.converged) {
            break;
        }
        if (!accepted) {
            // no damped step lowers the objective: a minimum to working precision
            out.converged = true;
            break;
        }
    }
    out.theta = theta;
    out.objective = obj;
    return out;
}

std::vector<VectorXd> latin_hypercube_starts(const Problem& prob, const FitConfig& cfg) {
    const std::size_t m = cfg.multistart_count;
    const std::size_t d = prob.dim();
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> u01;
    std::vector<VectorXd> starts(m, VectorXd(static_cast<Eigen::Index>(d)));
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<std::size_t> perm(m);
        for (std::size_t k = 0; k < m; ++k) {
            perm[k] = k;
        }
        // Fisher-Yates with an explicit draw so the layout is library-independent
        for (std::size_t k = m; k > 1; --k) {
            const auto pick = static_cast<std::size_t>(u01(rng) * static_cast<double>(k));
            std::swap(perm[k - 1], perm[std::min(pick, k - 1)]);
        }
        const auto jj = static_cast<Eigen::Index>(j);
        const double lo = prob.lo()[jj];
        const double hi = prob.hi()[jj];
        for (std::size_t k = 0; k < m; ++k) {
            const double u = (static_cast<double>(perm[k]) + u01(rng)) / static_cast<double>(m);
            double v = lo + u * (hi - lo);
            if (prob.slots()[j] == Slot::sigma) {
                double a = std::max(lo, cfg.sigma_start_range.lo);
                double b = std::min(hi, cfg.sigma_start_range.hi);
                if (!(a < b)) {
                    a = lo;
                    b = hi;
                }
                v = std::exp(std::log(a) + u * (std::log(b) - std::log(a)));
            }
            starts[k][jj] = std::clamp(v, lo, hi);
        }
    }
    return starts;
}

FitResult make_result(const Problem& prob, const Dataset& data, const FitConfig& cfg,
                      const StartOutcome& s, std::size_t index) {
    FitResult res;
    res.params = prob.params(s.theta);
    res.objective = s.objective;
    res.converged = s.converged;
    res.iterations = s.iterations;
    res.objective_trace = s.trace;
    res.start_index = index;
    res.residuals.reserve(data.size());
    for (const auto& p : data.points) {
        res.residuals.push_back(correlation_R(p.delta_p, res.params, cfg.form) - p.r);
    }
    res.approx_error = approximation_error(data, res.params, cfg.form);
    return res;
}

void require_bounds(const Bounds& b, const char* name, bool positive) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
        throw DomainError(std::string(name) + " bounds must be finite with lo < hi");
    }
    if (positive && !(b.lo > 0.0)) {
        throw DomainError(std::string(name) + " lower bound must be positive");
    }
}

} // namespace

std::size_t FitConfig::free_count() const noexcept {
    return static_cast<std::size_t>(free_sigma) + static_cast<std::size_t>(free_f)
           + static_cast<std::size_t>(p_tilde_mode == PTildeMode::free);
}

void FitConfig::validate() const {
    if (free_count() == 0) {
        throw DomainError("at least one parameter must be free");
    }
    require_bounds(sigma_bounds, "sigma", true);
    require_bounds(f_bounds, "f", false);
    require_bounds(p_tilde_bounds, "p_tilde", false);
    if (f_bounds.lo < 0.0 || f_bounds.hi > 1.0) {
        throw DomainError("f bounds must lie within [0, 1]");
    }
    if (p_tilde_bounds.lo < 0.0) {
        throw DomainError("p_tilde bounds must be non-negative");
    }
    if (!(sigma_start_range.lo > 0.0) || !(sigma_start_range.lo < sigma_start_range.hi)) {
        throw DomainError("sigma start range must be positive with lo < hi");
    }
    if (p_tilde_mode == PTildeMode::ratio_to_sigma
        && (!(p_tilde_ratio >= 0.0) || !std::isfinite(p_tilde_ratio))) {
        throw DomainError("p_tilde ratio must be non-negative and finite");
    }
    if (multistart_count == 0 || max_iterations == 0) {
        throw DomainError("multistart_count and max_iterations must be positive");
    }
    if (!(step_tol > 0.0) || !(residual_tol > 0.0)) {
        throw DomainError("convergence tolerances must be positive");
    }
    ModelParams probe = fixed;
    probe.n_tot = 1.0;
    if (p_tilde_mode == PTildeMode::ratio_to_sigma) {
        probe.p_tilde = p_tilde_ratio * probe.sigma;
    }
    probe.validate();
}

FitResult fit(const Dataset& data, const FitConfig& config) {
    config.validate();
    if (data.empty()) {
        throw InsufficientDataError("insufficient data: dataset is empty");
    }
    data.validate();
    const std::size_t k = config.free_count();
    if (data.size() < 2 * k) {
        throw InsufficientDataError("insufficient data: " + std::to_string(data.size())
                                    + " points for " + std::to_string(k) + " free parameters");
    }

    const Problem prob(data, config);
    const auto starts = latin_hypercube_starts(prob, config);
    std::vector<StartOutcome> outcomes(starts.size());
    parallel_for(
        starts.size(), [&](std::size_t i) { outcomes[i] = levenberg_marquardt(prob, config, starts[i]); },
        config.threads);

    for (std::size_t j = 0; j < prob.dim(); ++j) {
        const bool any = std::any_of(outcomes.begin(), outcomes.end(), [j](const StartOutcome& o) {
            return o.evaluated && o.sensitive[j];
        });
        if (!any) {
            throw InsufficientSensitivityError(std::string("the model does not depend on ")
                                               + slot_name(prob.slots()[j])
                                               + " anywhere in the search box");
        }
    }

    std::optional<std::size_t> best_converged;
    std::optional<std::size_t> best_any;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        if (!o.evaluated) {
            continue;
        }
        if (!best_any || o.objective < outcomes[*best_any].objective) {
            best_any = i;
        }
        if (o.converged && (!best_converged || o.objective < outcomes[*best_converged].objective)) {
            best_converged = i;
        }
    }
    if (!best_any) {
        throw DomainError("the model could not be evaluated at any starting point");
    }
    if (!best_converged) {
        throw NonConvergenceError("no multistart converged within max_iterations",
                                  make_result(prob, data, config, outcomes[*best_any], *best_any));
    }
    return make_result(prob, data, config, outcomes[*best_converged], *best_converged);
}

double approximation_error(const Dataset& data, const ModelParams& params, UncorrelatedForm form) {
    if (data.empty()) {
        throw InsufficientDataError("insufficient data: dataset is empty");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& p = data.points[i];
        const double w = data.weight(i);
        const double d = correlation_R(p.delta_p, params, form) - p.r;
        num += w * d * d;
        den += w * p.r * p.r;
    }
    if (den == 0.0) {
        throw UndefinedMetricError("approximation error is undefined for all-zero data");
    }
    return 100.0 * std::sqrt(num / den);
}

Dataset synthesize(const ModelParams& params, std::span<const double> grid, double noise_rel,
                   std::uint64_t rng_seed, UncorrelatedForm form) {
    if (!(noise_rel >= 0.0) || !std::isfinite(noise_rel)) {
        throw DomainError("noise_rel must be non-negative and finite");
    }
    const CorrelationCurve c = curve(params, grid, form);
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> xi;
    Dataset out;
    out.label = "synthetic";
    out.points.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double noise = noise_rel > 0.0 ? noise_rel * xi(rng) : 0.0;
        out.points.push_back({c.delta_p[i], c.r[i] * (1.0 + noise), std::nullopt});
    }
    return out;
}

} // namespace paircorr
