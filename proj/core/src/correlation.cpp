#include "paircorr/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "paircorr/errors.hpp"
#include "paircorr/stable_math.hpp"
#include "paircorr/units.hpp"

namespace paircorr {

namespace {

// Above this z every bracket is divided by sinh(z)/z before evaluation.
constexpr double scaled_regime_z = 10.0;

void require_delta_p(double delta_p) {
    if (!(delta_p >= 0.0) || !std::isfinite(delta_p)) {
        throw DomainError("delta_p must be non-negative and finite");
    }
}

void require_channel_args(double p_tilde, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sigma must be positive and finite");
    }
    if (!(p_tilde >= 0.0) || !std::isfinite(p_tilde)) {
        throw DomainError("p_tilde must be non-negative and finite");
    }
}

// Dimensionless variables: q = dp^2/4s^2, eps = p~^2/4s^2 (J^2 = e^-eps),
// w = z^2 = 4 q eps.
struct Reduced {
    double q;
    double eps;
    double w;
    double z;
};

Reduced reduce(double delta_p, double p_tilde, double sigma) {
    const double four_s2 = 4.0 * sigma * sigma;
    const double q = delta_p * delta_p / four_s2;
    const double eps = p_tilde * p_tilde / four_s2;
    const double z = p_tilde * delta_p / (2.0 * sigma * sigma);
    return {q, eps, z * z, z};
}

// eps / (1 - e^-eps), -> 1 as eps -> 0
double eps_over_om(double eps) {
    return eps == 0.0 ? 1.0 : eps / -std::expm1(-eps);
}

// (sinh z / z - 1) / eps = sum_{b>=1} (4q)^b eps^(b-1) / (2b+1)!
double sm1_over_eps(const Reduced& v) {
    double term = 4.0 * v.q / 6.0;
    double sum = term;
    for (int b = 1; b < 80; ++b) {
        term *= v.w / ((2.0 * b + 2.0) * (2.0 * b + 3.0));
        sum += term;
        if (term <= sum * 1e-17) {
            break;
        }
    }
    return sum;
}

// (1 + 2e^{-2eps} + e^{-eps} - 4e^{-5eps/4}) / eps^2; the numerator is O(eps^2).
double p0_over_eps2(double eps) {
    if (eps >= 0.5) {
        return (1.0 + 2.0 * std::exp(-2.0 * eps) + std::exp(-eps) - 4.0 * std::exp(-1.25 * eps))
               / (eps * eps);
    }
    // sum_{a>=2} eps^(a-2)/a! (2(-2)^a + (-1)^a - 4(-5/4)^a)
    double u2 = 2.0, u1 = 0.5, u54 = 25.0 / 32.0;
    double sum = 2.0 * u2 + u1 - 4.0 * u54;
    for (int a = 2; a < 60; ++a) {
        const double step = eps / (a + 1.0);
        u2 *= -2.0 * step;
        u1 *= -1.0 * step;
        u54 *= -1.25 * step;
        const double term = 2.0 * u2 + u1 - 4.0 * u54;
        sum += term;
        if (std::fabs(u2) + std::fabs(u1) + std::fabs(u54) <= 1e-18 * std::fabs(sum)) {
            break;
        }
    }
    return sum;
}

// Triplet self-term of the accidental bracket, B_num / (1 - J^2)^2, for z <= 10.
// B_num = P0(eps) + sum_{b>=1} w^b/(2b+1)! (e^-eps - 4^(1-b) e^(-5eps/4)),
// every term of the sum non-negative.
double triplet_uncor_small_z(const Reduced& v, double e1, double e52) {
    const double re = eps_over_om(v.eps);
    const double ratio_w = 4.0 * v.q * re; // w / (1 - J^2)
    const double d1_over_om =
        v.eps == 0.0 ? 0.25 : e1 * -std::expm1(-0.25 * v.eps) / -std::expm1(-v.eps);

    double tail = 0.0;
    double weight = 1.0 / 120.0; // w^(b-2) / (2b+1)! at b = 2
    double quarter_pow = 0.25;   // 4^(1-b)
    for (int b = 2; b < 80; ++b) {
        const double term = weight * (e1 - quarter_pow * e52);
        tail += term;
        if (term <= tail * 1e-17) {
            break;
        }
        weight *= v.w / ((2.0 * b + 2.0) * (2.0 * b + 3.0));
        quarter_pow *= 0.25;
    }
    return p0_over_eps2(v.eps) * re * re + ratio_w * d1_over_om / 6.0 + ratio_w * ratio_w * tail;
}

struct Brackets {
    double cor;
    double uncor;
};

// Channel brackets of the closed forms with the shared prefactor
// N dp^2 exp(-dp^2/4s^2) / (4 sqrt(pi) s^3) removed. In the large-z regime
// both are additionally divided by sinh(z)/z; their ratio is unaffected.
Brackets mixture_brackets(const Reduced& v, double f, UncorrelatedForm form) {
    const double e1 = std::exp(-v.eps);
    const double e2 = std::exp(-2.0 * v.eps);
    const double e52 = std::exp(-1.25 * v.eps);
    const double om = -std::expm1(-v.eps);
    const double fs = 1.0 - f;

    double cor = 0.0, a_term = 0.0, b_term = 0.0, c_term = 0.0;

    if (v.z <= scaled_regime_z) {
        const double s = stable::sinhc(v.z);
        const double s2 = stable::sinhc(0.5 * v.z);
        const double t = f > 0.0 ? sm1_over_eps(v) * eps_over_om(v.eps) : 0.0;
        cor = 2.0 * e1 * (fs * (s + 1.0) / (1.0 + e1) + f * t);
        if (fs > 0.0) {
            a_term = (1.0 + 2.0 * e2 + e1 * s + 4.0 * e52 * s2) / ((1.0 + e1) * (1.0 + e1));
        }
        if (f > 0.0) {
            b_term = triplet_uncor_small_z(v, e1, e52);
        }
        if (f > 0.0 && fs > 0.0) {
            c_term = (1.0 + 2.0 * e1 + e1 * t) / (1.0 + e1);
        }
    } else {
        const double inv_s = stable::inv_sinhc(v.z);
        const double h = std::exp(-0.5 * v.z);
        const double s2_over_s = 2.0 * h / (1.0 + h * h); // 1 / cosh(z/2)
        cor = 2.0 * e1 * (fs * (1.0 + inv_s) / (1.0 + e1) + f * (1.0 - inv_s) / om);
        if (fs > 0.0) {
            a_term = ((1.0 + 2.0 * e2) * inv_s + e1 + 4.0 * e52 * s2_over_s)
                     / ((1.0 + e1) * (1.0 + e1));
        }
        if (f > 0.0) {
            b_term = ((1.0 + 2.0 * e2) * inv_s + e1 - 4.0 * e52 * s2_over_s) / (om * om);
        }
        if (f > 0.0 && fs > 0.0) {
            c_term = ((1.0 + 2.0 * e1) * inv_s + e1 * (1.0 - inv_s) / om) / (1.0 + e1);
        }
    }

    double uncor = fs * fs * a_term + f * f * b_term + 2.0 * f * fs * c_term;
    if (form == UncorrelatedForm::published) {
        uncor *= e1;
    }
    return {cor, uncor};
}

double ratio_minus_one(const Brackets& b) {
    return b.cor / b.uncor - 1.0;
}

} // namespace

double z_parameter(double delta_p, double p_tilde, double sigma) {
    require_channel_args(p_tilde, sigma);
    require_delta_p(delta_p);
    return p_tilde * delta_p / (2.0 * sigma * sigma);
}

IntensityPair intensities(double delta_p, const ModelParams& params, UncorrelatedForm form) {
    params.validate();
    require_delta_p(delta_p);
    if (delta_p == 0.0) {
        return {0.0, 0.0};
    }

    const double sigma = params.sigma;
    const double f = params.f;
    const double fs = 1.0 - f;
    const bool limit = f > 0.0 && triplet_degenerate(params.p_tilde, sigma);
    const double p_tilde = limit ? 0.0 : params.p_tilde;
    const Reduced v = reduce(delta_p, p_tilde, sigma);

    const double e1 = std::exp(-v.eps);
    const double e2 = std::exp(-2.0 * v.eps);
    const double e52 = std::exp(-1.25 * v.eps);
    const double om = -std::expm1(-v.eps);

    // S(a) = exp(-(dp^2 + a^2)/4s^2) sinh(a dp/2s^2)/(a dp/2s^2)
    const double s0 = std::exp(-v.q);
    const double s_full = stable::shell_factor(delta_p, p_tilde, sigma);
    const double s_half = stable::shell_factor(delta_p, 0.5 * p_tilde, sigma);

    const double singlet_cor = (s_full + e1 * s0) / (1.0 + e1);
    // e^-q J^2 (sinh z/z - 1) / (1 - J^2)
    double triplet_cor = 0.0;
    if (f > 0.0) {
        triplet_cor = v.z <= scaled_regime_z ? s0 * e1 * sm1_over_eps(v) * eps_over_om(v.eps)
                                             : (s_full - e1 * s0) / om;
    }

    double a_term = 0.0, b_term = 0.0, c_term = 0.0;
    if (fs > 0.0) {
        a_term = (s0 * (1.0 + 2.0 * e2) + s_full + 4.0 * e1 * s_half) / ((1.0 + e1) * (1.0 + e1));
    }
    if (f > 0.0) {
        b_term = v.z <= scaled_regime_z
                     ? s0 * triplet_uncor_small_z(v, e1, e52)
                     : (s0 * (1.0 + 2.0 * e2) + s_full - 4.0 * e1 * s_half) / (om * om);
    }
    if (f > 0.0 && fs > 0.0) {
        c_term = (s0 * (1.0 + 2.0 * e1) + triplet_cor) / (1.0 + e1);
    }

    const double prefactor =
        params.n_tot * delta_p * delta_p / (4.0 * std::sqrt(units::pi) * sigma * sigma * sigma);
    IntensityPair out;
    out.i_cor = prefactor * 2.0 * (fs * singlet_cor + f * triplet_cor);
    out.i_uncor = prefactor * (fs * fs * a_term + f * f * b_term + 2.0 * f * fs * c_term);
    if (form == UncorrelatedForm::published) {
        out.i_uncor *= e1;
    }
    return out;
}

double intensity_cor(double delta_p, const ModelParams& params) {
    return intensities(delta_p, params).i_cor;
}

double intensity_uncor(double delta_p, const ModelParams& params, UncorrelatedForm form) {
    return intensities(delta_p, params, form).i_uncor;
}

double correlation_R(double delta_p, const ModelParams& params, UncorrelatedForm form) {
    params.validate();
    require_delta_p(delta_p);
    if (params.f > 0.0 && triplet_degenerate(params.p_tilde, params.sigma)) {
        return correlation_R_small_ptilde_limit(delta_p, params.sigma, params.f);
    }
    return ratio_minus_one(
        mixture_brackets(reduce(delta_p, params.p_tilde, params.sigma), params.f, form));
}

double correlation_R0(double delta_p, double p_tilde, double sigma, UncorrelatedForm form) {
    require_channel_args(p_tilde, sigma);
    require_delta_p(delta_p);
    return ratio_minus_one(mixture_brackets(reduce(delta_p, p_tilde, sigma), 0.0, form));
}

double correlation_R1(double delta_p, double p_tilde, double sigma, UncorrelatedForm form) {
    require_channel_args(p_tilde, sigma);
    require_delta_p(delta_p);
    if (triplet_degenerate(p_tilde, sigma)) {
        throw DegenerateChannelError("triplet correlation undefined at p_tilde/sigma < 1e-6");
    }
    return ratio_minus_one(mixture_brackets(reduce(delta_p, p_tilde, sigma), 1.0, form));
}

double correlation_R_small_ptilde_limit(double delta_p, double sigma, double f) {
    require_channel_args(0.0, sigma);
    require_delta_p(delta_p);
    if (!(f >= 0.0 && f <= 1.0)) {
        throw DomainError("f must lie in [0, 1]");
    }
    const double q = delta_p * delta_p / (4.0 * sigma * sigma);
    const double fs = 1.0 - f;
    const double cor = 2.0 * fs + 4.0 * f * q / 3.0;
    const double uncor = 2.0 * fs * fs + f * f * (11.0 / 8.0 + q / 6.0 + q * q / 10.0)
                         + f * fs * (3.0 + 2.0 * q / 3.0);
    return cor / uncor - 1.0;
}

CorrelationCurve curve(const ModelParams& params, std::span<const double> grid,
                       UncorrelatedForm form) {
    params.validate();
    CorrelationCurve out;
    out.params = params;
    out.delta_p.reserve(grid.size());
    out.r.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw GridPointError("delta_p must be positive and finite", i);
        }
        if (i > 0 && !(x > grid[i - 1])) {
            throw GridPointError("grid must be strictly ascending", i);
        }
        try {
            out.r.push_back(correlation_R(x, params, form));
        } catch (const Error& e) {
            throw GridPointError(e.what(), i);
        }
        out.delta_p.push_back(x);
    }
    return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
    } else if (count > 1) {
        const double step = (hi - lo) / static_cast<double>(count - 1);
        for (std::size_t i = 0; i < count; ++i) {
            g[i] = lo + step * static_cast<double>(i);
        }
        g.back() = hi;
    }
    return g;
}

CurvePeak locate_maximum(const CorrelationCurve& c) {
    if (c.empty()) {
        throw DomainError("cannot locate the maximum of an empty curve");
    }
    const auto it = std::max_element(c.r.begin(), c.r.end());
    const std::size_t i = static_cast<std::size_t>(it - c.r.begin());
    CurvePeak peak{i, c.delta_p[i], c.r[i]};
    if (i == 0 || i + 1 >= c.size()) {
        return peak;
    }
    const double x0 = c.delta_p[i - 1], x1 = c.delta_p[i], x2 = c.delta_p[i + 1];
    const double y0 = c.r[i - 1], y1 = c.r[i], y2 = c.r[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (!(curvature < 0.0)) {
        return peak;
    }
    // y = y1 + d01 (x - x1) + curvature (x - x1)(x - x0)
    const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    peak.delta_p = xv;
    peak.r = y1 + d01 * (xv - x1) + curvature * (xv - x1) * (xv - x0);
    return peak;
}

std::vector<int> sign_runs(std::span<const double> values) {
    std::vector<int> runs;
    for (double v : values) {
        if (v == 0.0 || std::isnan(v)) {
            continue;
        }
        const int s = v > 0.0 ? 1 : -1;
        if (runs.empty() || runs.back() != s) {
            runs.push_back(s);
        }
    }
    return runs;
}

} // namespace paircorr
