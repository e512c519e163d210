#pragma once

// First-principles numerical evaluation of the pair densities, single-electron
// densities and coincidence / accidental intensities by direct integration of
// the model amplitudes. Nothing here uses the closed forms of correlation.hpp;
// these routines exist to check them.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "paircorr/model.hpp"

namespace paircorr::oracle {

enum class Method { monte_carlo, tensor_quadrature };

struct QuadratureSpec {
    Method method = Method::monte_carlo;
    std::size_t sample_count = 2'000'000;
    std::size_t nodes_per_axis = 64;
    std::uint64_t rng_seed = 0x5eed'2007ULL;
    /// est_error above target_rel_tol * |value| raises ToleranceNotMetError.
    double target_rel_tol = 1e-3;
    /// Worker threads (0 = default_thread_count()). Results do not depend on it.
    std::size_t threads = 0;

    void validate() const;
};

struct OracleResult {
    double value = 0.0;
    /// Standard error (Monte-Carlo) or last-refinement difference (quadrature).
    double est_error = 0.0;
    std::size_t samples_used = 0;
};

/// Comparison rule used by every closed-form vs oracle check:
/// |closed - oracle| <= max(rel_tol * |closed|, 3 * est_error).
bool agrees(double closed, const OracleResult& r, double rel_tol);

// --- Channel cross-sections -------------------------------------------------

/// Theta_S concentrated at a single (P, p~).
struct PointMass {
    Momentum3 p_total;
    Momentum3 p_tilde; ///< relative momentum vector
};

/// Theta_S = weight * pi(P, p~) for a probability density pi given by a
/// sampler. `nominal_*` locate the bulk of pi and steer the importance sampler.
struct SampledDistribution {
    std::function<void(std::mt19937_64&, Momentum3& p_total, Momentum3& p_tilde)> sample;
    Momentum3 nominal_p_total;
    Momentum3 nominal_p_tilde;
};

struct ChannelCrossSection {
    SpinChannel channel = SpinChannel::singlet;
    double weight = 1.0; ///< N_S, the integral of Theta_S over (P, p~)
    std::variant<PointMass, SampledDistribution> shape;
};

/// Theta_S whose relative momentum is spread isotropically around `p_tilde`
/// with standard deviation `width` per component; P fixed.
ChannelCrossSection gaussian_ptilde_spread(SpinChannel channel, double weight,
                                           const Momentum3& p_total, const Momentum3& p_tilde,
                                           double width);

/// The two point masses (1 - f) N_tot (singlet) and f N_tot (triplet) at the
/// (P, p~) of `params`; zero-weight channels are omitted.
std::vector<ChannelCrossSection> point_mass_channels(const ModelParams& params);

// --- Densities ----------------------------------------------------------------

/// Phi(p1, p2) = N_tot (f |Psi_1|^2 + (1 - f) |Psi_0|^2).
double phi_differential(const Momentum3& p1, const Momentum3& p2, const ModelParams& params);

/// Single-electron density obtained by marginalizing |Psi_S|^2 over the
/// partner momentum analytically in structure (Psi is bilinear in the
/// one-particle amplitudes) with the required overlap integrals computed by
/// separable trapezoidal quadrature of the amplitudes.
class ReducedDensity {
public:
    explicit ReducedDensity(const ModelParams& params, std::size_t nodes_per_axis = 64);

    double operator()(const Momentum3& p) const;

    /// <phi_i|phi_j> from quadrature, i, j in {plus, minus}.
    std::complex<double> overlap(Branch i, Branch j) const;

private:
    ModelParams params_;
    std::complex<double> o11_, o22_, o12_;
    double norm_singlet_, norm_triplet_;
};

/// rho(p) = integral of Phi(p, p') over p'.
OracleResult rho_single(const Momentum3& p, const ModelParams& params, const QuadratureSpec& spec);

// --- One- and two-particle integrals --------------------------------------

/// Integral of |phi|^2 over R^3 by a tensor trapezoidal rule on a +-8 sigma box.
OracleResult one_particle_norm(const ModelParams& params, Branch branch, double t,
                               const QuadratureSpec& spec);

/// Real part of <phi_1|phi_2> by 3-D tensor quadrature (the imaginary part is
/// reported through est_error if it is not negligible).
OracleResult overlap_integral(const ModelParams& params, double t, const QuadratureSpec& spec);

/// Integral of |Psi_S|^2 over (p1, p2). Monte-Carlo samples two_particle_density
/// directly; tensor quadrature factorizes the integrand axis by axis.
OracleResult pair_norm(const ModelParams& params, SpinChannel channel, const QuadratureSpec& spec);

/// Integral of Phi over (p1, p2); equals N_tot.
OracleResult total_cross_section(const ModelParams& params, const QuadratureSpec& spec);

/// Integral of the reduced density rho over R^3; equals N_tot.
OracleResult rho_integral(const ModelParams& params, const QuadratureSpec& spec);

// --- Intensities -------------------------------------------------------------

/// dp^2 * integral Phi(p1, p1 + dp n) dp1 dn, n over the unit sphere with the
/// unnormalized solid-angle measure (total 4 pi). Monte-Carlo only.
OracleResult intensity_cor_oracle(double delta_p, const ModelParams& params,
                                  const QuadratureSpec& spec);

/// dp^2 / N_tot * integral rho(p1) rho(p1 + dp n) dp1 dn.
OracleResult intensity_uncor_oracle(double delta_p, const ModelParams& params,
                                    const QuadratureSpec& spec);

/// Coincidence intensity for an arbitrary list of channel cross-sections,
/// Phi = sum_S integral Theta_S |Psi_S|^2 dP dp~. With the point masses of
/// `point_mass_channels(params)` this is exactly intensity_cor_oracle.
OracleResult general_channel_integral(std::span<const ChannelCrossSection> theta, double delta_p,
                                      double sigma, const QuadratureSpec& spec);

struct RatioResult {
    double r = 0.0;         ///< I_cor / I_uncor - 1
    double est_error = 0.0; ///< first-order propagated standard error
    OracleResult cor;
    OracleResult uncor;
};

/// Correlation function from the two oracle intensities.
RatioResult correlation_R_oracle(double delta_p, const ModelParams& params,
                                 const QuadratureSpec& spec);

} // namespace paircorr::oracle
