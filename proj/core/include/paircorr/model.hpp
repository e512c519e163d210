#pragma once

#include <complex>

#include "paircorr/momentum.hpp"

namespace paircorr {

/// Total spin of the released pair. Fixes the exchange symmetry of the
/// spatial (momentum) part: singlet is symmetric, triplet antisymmetric.
enum class SpinChannel { singlet, triplet };

/// Selects which of the two one-particle packets is meant: `plus` is centred
/// on (P + p~)/2, `minus` on (P - p~)/2.
enum class Branch { plus, minus };

/// Below this value of p_tilde / sigma the triplet state is treated as
/// nonexistent (its normalization 1 - J^2 has underflowed quadratically).
inline constexpr double triplet_degeneracy_threshold = 1e-6;

/// Physical parameters of one correlation-model instance, atomic units.
struct ModelParams {
    double sigma = 1.0;   ///< momentum uncertainty of each electron, > 0
    double f = 0.0;       ///< singlet -> triplet transition probability, [0, 1]
    double p_tilde = 0.0; ///< magnitude of the relative average momentum, >= 0
    Momentum3 p_total{};  ///< total average momentum P
    double n_tot = 1.0;   ///< total double-ionization cross-section, > 0
    /// Direction of the relative momentum vector. Only its orientation is
    /// used; statistical outputs do not depend on it.
    Momentum3 relative_axis{0.0, 0.0, 1.0};

    /// Throws DomainError if any invariant is violated.
    void validate() const;

    /// The relative momentum vector p_tilde * unit(relative_axis).
    Momentum3 relative_momentum() const;

    /// <p> of the packet on the given branch, (P +- p~)/2.
    Momentum3 mean_momentum(Branch branch) const;
};

bool triplet_degenerate(double p_tilde, double sigma) noexcept;

/// Complex amplitude stored as log-modulus and phase.
struct LogAmplitude {
    double log_modulus = 0.0;
    double phase = 0.0;

    std::complex<double> value() const { return std::polar(std::exp(log_modulus), phase); }
};

/// One Cartesian factor of the Gaussian packet:
/// (2 pi sigma^2)^(-1/4) exp(-(p - mean)^2 / (4 sigma^2) - i p^2 t / (2 m hbar)).
/// The 3-D amplitude is the product of three such factors.
LogAmplitude axis_log_amplitude(double p, double mean, double sigma, double t);
std::complex<double> axis_amplitude(double p, double mean, double sigma, double t);

LogAmplitude one_particle_log_amplitude(const Momentum3& p, const ModelParams& params,
                                        Branch branch, double t = 0.0);

/// phi_{1,2}(p, t) for the plus / minus branch. Unit-normalized over R^3.
std::complex<double> one_particle_amplitude(const Momentum3& p, const ModelParams& params,
                                            Branch branch, double t = 0.0);

/// Overlap <phi_1|phi_2> = exp(-p_tilde^2 / (8 sigma^2)); independent of P and t.
double overlap_J(double p_tilde, double sigma);

/// 2 (1 +- J^2), evaluated without cancellation for the triplet.
double channel_norm(double p_tilde, double sigma, SpinChannel channel);

/// |Psi_S(p1, p2)|^2 for the symmetrized (singlet) or antisymmetrized (triplet)
/// pair state. Normalized to one over (p1, p2) and independent of t.
/// Throws DegenerateChannelError for the triplet at p_tilde / sigma below
/// `triplet_degeneracy_threshold`.
double two_particle_density(const Momentum3& p1, const Momentum3& p2, const ModelParams& params,
                            SpinChannel channel, double t = 0.0);

/// Position-space width of a freely moving packet,
/// (hbar / 2 sigma) sqrt(1 + 4 sigma^4 t^2 / (hbar^2 m^2)).
double coordinate_uncertainty(double sigma, double t);

/// <r> of the packet on the given branch after free flight for time t.
Momentum3 mean_coordinate(const ModelParams& params, Branch branch, double t);

} // namespace paircorr
