#include "paircorr/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "paircorr/errors.hpp"
#include "paircorr/units.hpp"

namespace paircorr {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sigma must be positive and finite");
    }
}

} // namespace

void ModelParams::validate() const {
    require_sigma(sigma);
    if (!(f >= 0.0 && f <= 1.0)) {
        throw DomainError("f must lie in [0, 1]");
    }
    if (!(p_tilde >= 0.0) || !std::isfinite(p_tilde)) {
        throw DomainError("p_tilde must be non-negative and finite");
    }
    if (!(n_tot > 0.0) || !std::isfinite(n_tot)) {
        throw DomainError("n_tot must be positive and finite");
    }
    if (!p_total.finite()) {
        throw DomainError("P must be finite");
    }
    if (!relative_axis.finite() || relative_axis.norm2() == 0.0) {
        throw DomainError("relative_axis must be a finite non-zero vector");
    }
}

Momentum3 ModelParams::relative_momentum() const {
    return relative_axis * (p_tilde / relative_axis.norm());
}

Momentum3 ModelParams::mean_momentum(Branch branch) const {
    const Momentum3 rel = relative_momentum();
    return branch == Branch::plus ? (p_total + rel) * 0.5 : (p_total - rel) * 0.5;
}

bool triplet_degenerate(double p_tilde, double sigma) noexcept {
    return p_tilde / sigma < triplet_degeneracy_threshold;
}

LogAmplitude axis_log_amplitude(double p, double mean, double sigma, double t) {
    const double d = p - mean;
    return {
        -0.25 * std::log(2.0 * units::pi * sigma * sigma) - d * d / (4.0 * sigma * sigma),
        -p * p * t / (2.0 * units::electron_mass * units::hbar),
    };
}

std::complex<double> axis_amplitude(double p, double mean, double sigma, double t) {
    require_sigma(sigma);
    require_finite(p, "momentum");
    require_finite(t, "time");
    return axis_log_amplitude(p, mean, sigma, t).value();
}

LogAmplitude one_particle_log_amplitude(const Momentum3& p, const ModelParams& params,
                                        Branch branch, double t) {
    if (!p.finite()) {
        throw DomainError("momentum must be finite");
    }
    require_finite(t, "time");
    const Momentum3 mean = params.mean_momentum(branch);
    const double s2 = params.sigma * params.sigma;
    const Momentum3 d = p - mean;
    return {
        -0.75 * std::log(2.0 * units::pi * s2) - d.norm2() / (4.0 * s2),
        -p.norm2() * t / (2.0 * units::electron_mass * units::hbar),
    };
}

std::complex<double> one_particle_amplitude(const Momentum3& p, const ModelParams& params,
                                            Branch branch, double t) {
    params.validate();
    return one_particle_log_amplitude(p, params, branch, t).value();
}

double overlap_J(double p_tilde, double sigma) {
    require_sigma(sigma);
    if (!(p_tilde >= 0.0) || !std::isfinite(p_tilde)) {
        throw DomainError("p_tilde must be non-negative and finite");
    }
    return std::exp(-p_tilde * p_tilde / (8.0 * sigma * sigma));
}

double channel_norm(double p_tilde, double sigma, SpinChannel channel) {
    const double eps = p_tilde * p_tilde / (4.0 * sigma * sigma);
    // J^2 = exp(-eps)
    return channel == SpinChannel::singlet ? 2.0 * (1.0 + std::exp(-eps))
                                           : -2.0 * std::expm1(-eps);
}

double two_particle_density(const Momentum3& p1, const Momentum3& p2, const ModelParams& params,
                            SpinChannel channel, double t) {
    params.validate();
    if (channel == SpinChannel::triplet && triplet_degenerate(params.p_tilde, params.sigma)) {
        throw DegenerateChannelError("triplet state does not exist at p_tilde/sigma < 1e-6");
    }

    const LogAmplitude a1p1 = one_particle_log_amplitude(p1, params, Branch::plus, t);
    const LogAmplitude a2p2 = one_particle_log_amplitude(p2, params, Branch::minus, t);
    const LogAmplitude a2p1 = one_particle_log_amplitude(p1, params, Branch::minus, t);
    const LogAmplitude a1p2 = one_particle_log_amplitude(p2, params, Branch::plus, t);

    // direct = phi1(p1) phi2(p2), exchange = phi2(p1) phi1(p2)
    const double l_direct = a1p1.log_modulus + a2p2.log_modulus;
    const double l_exchange = a2p1.log_modulus + a1p2.log_modulus;
    const double dphase = (a1p1.phase + a2p2.phase) - (a2p1.phase + a1p2.phase);

    // |e^{L1} +- e^{L2 + i dphi}|^2 = e^{2 Lmax} [ (1 -+ x)^2 +- 4 x sin^2(dphi/2) ] with x = e^{Lmin-Lmax}
    const double l_max = std::max(l_direct, l_exchange);
    const double d = std::min(l_direct, l_exchange) - l_max;
    const double x = std::exp(d);
    const double half_sin = std::sin(0.5 * dphase);
    const double interference = 4.0 * x * half_sin * half_sin;

    double bracket = 0.0;
    if (channel == SpinChannel::singlet) {
        bracket = (1.0 + x) * (1.0 + x) - interference;
    } else {
        const double one_minus_x = -std::expm1(d);
        bracket = one_minus_x * one_minus_x + interference;
    }
    return std::exp(2.0 * l_max) * bracket / channel_norm(params.p_tilde, params.sigma, channel);
}

double coordinate_uncertainty(double sigma, double t) {
    require_sigma(sigma);
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("time must be non-negative and finite");
    }
    const double spread = 2.0 * sigma * sigma * t / (units::hbar * units::electron_mass);
    return units::hbar / (2.0 * sigma) * std::hypot(1.0, spread);
}

Momentum3 mean_coordinate(const ModelParams& params, Branch branch, double t) {
    params.validate();
    require_finite(t, "time");
    return params.mean_momentum(branch) * (t / units::electron_mass);
}

} // namespace paircorr
