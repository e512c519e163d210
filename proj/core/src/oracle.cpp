#include "paircorr/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "paircorr/errors.hpp"
#include "paircorr/parallel.hpp"
#include "paircorr/units.hpp"

namespace paircorr::oracle {

namespace {

constexpr double box_half_width = 8.0; // in units of sigma
constexpr std::size_t mc_chunks = 64;

// Running mean / variance (Welford) with ordered merging.
struct Accumulator {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Accumulator& o) {
        if (o.n == 0) {
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.n) / total;
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
        n += o.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

void check_tolerance(const OracleResult& r, const QuadratureSpec& spec, const char* what) {
    if (!(r.est_error <= spec.target_rel_tol * std::fabs(r.value))) {
        throw ToleranceNotMetError(std::string(what) + ": estimated error exceeds target tolerance",
                                   r.value, r.est_error, r.samples_used);
    }
}

double gaussian3(const Momentum3& x, const Momentum3& mean, double var) {
    const double norm = std::pow(2.0 * units::pi * var, -1.5);
    return norm * std::exp(-(x - mean).norm2() / (2.0 * var));
}

Momentum3 normal3(std::mt19937_64& rng) {
    std::normal_distribution<double> n01;
    const double x = n01(rng);
    const double y = n01(rng);
    const double z = n01(rng);
    return {x, y, z};
}

// Area-preserving map of the unit square onto the unit sphere.
Momentum3 sphere_point(double u, double v) {
    const double cos_t = 1.0 - 2.0 * u;
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = 2.0 * units::pi * v;
    return {sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t};
}

// Plain Monte-Carlo mean of draw(rng) split over fixed substreams.
template <class Draw>
OracleResult mc_mean(const QuadratureSpec& spec, std::uint64_t stream_base, Draw&& draw) {
    const std::size_t chunks = std::min(mc_chunks, spec.sample_count);
    std::vector<Accumulator> acc(chunks);
    parallel_for(
        chunks,
        [&](std::size_t c) {
            std::mt19937_64 rng(substream_seed(spec.rng_seed, stream_base + c));
            const std::size_t n =
                spec.sample_count / chunks + (c < spec.sample_count % chunks ? 1 : 0);
            for (std::size_t i = 0; i < n; ++i) {
                acc[c].add(draw(rng));
            }
        },
        spec.threads);
    Accumulator total;
    for (const auto& a : acc) {
        total.merge(a);
    }
    return {total.mean, std::sqrt(total.variance() / static_cast<double>(total.n)), total.n};
}

// Isotropic Gaussian mixture used as an importance-sampling proposal.
// Every centre is paired with each of the variances.
class GaussianMixture {
public:
    GaussianMixture(std::vector<Momentum3> centers, std::vector<double> weights,
                    std::span<const double> variances)
        : centers_(std::move(centers)) {
        double total = 0.0;
        for (double w : weights) {
            total += w;
        }
        for (double w : weights) {
            weights_.push_back(w / total);
        }
        for (double var : variances) {
            sd_.push_back(std::sqrt(var));
            inv_two_var_.push_back(0.5 / var);
            norm_.push_back(std::pow(2.0 * units::pi * var, -1.5)
                            / static_cast<double>(variances.size()));
        }
    }

    Momentum3 sample(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u01;
        double u = u01(rng);
        std::size_t j = 0;
        while (j + 1 < weights_.size() && u >= weights_[j]) {
            u -= weights_[j];
            ++j;
        }
        const std::size_t k =
            std::min(sd_.size() - 1, static_cast<std::size_t>(u01(rng) * static_cast<double>(sd_.size())));
        return centers_[j] + normal3(rng) * sd_[k];
    }

    double density(const Momentum3& x) const {
        double d = 0.0;
        for (std::size_t j = 0; j < centers_.size(); ++j) {
            if (weights_[j] == 0.0) {
                continue;
            }
            const double r2 = (x - centers_[j]).norm2();
            double dj = 0.0;
            for (std::size_t k = 0; k < sd_.size(); ++k) {
                dj += norm_[k] * std::exp(-r2 * inv_two_var_[k]);
            }
            d += weights_[j] * dj;
        }
        return d;
    }

private:
    std::vector<Momentum3> centers_;
    std::vector<double> weights_;
    std::vector<double> sd_, inv_two_var_, norm_;
};

// Composite trapezoidal rule on [lo, hi] with `nodes` points.
template <class Fn>
auto trapezoid(double lo, double hi, std::size_t nodes, Fn&& fn) {
    const double h = (hi - lo) / static_cast<double>(nodes - 1);
    decltype(fn(lo)) sum = 0.5 * (fn(lo) + fn(hi));
    for (std::size_t i = 1; i + 1 < nodes; ++i) {
        sum += fn(lo + h * static_cast<double>(i));
    }
    return sum * h;
}

struct Box {
    Momentum3 lo;
    Momentum3 hi;
};

Box box_around(std::initializer_list<Momentum3> centers, double sigma) {
    Momentum3 lo = *centers.begin(), hi = lo;
    for (const auto& c : centers) {
        lo = {std::min(lo.x, c.x), std::min(lo.y, c.y), std::min(lo.z, c.z)};
        hi = {std::max(hi.x, c.x), std::max(hi.y, c.y), std::max(hi.z, c.z)};
    }
    const double pad = box_half_width * sigma;
    return {lo - Momentum3{pad, pad, pad}, hi + Momentum3{pad, pad, pad}};
}

// 3-D tensor trapezoid with the refinement estimate |I(n) - I(n/2)|.
template <class Fn>
OracleResult tensor3(const Box& box, std::size_t nodes, std::size_t threads, Fn&& fn) {
    auto integrate = [&](std::size_t n) {
        const double hx = (box.hi.x - box.lo.x) / static_cast<double>(n - 1);
        const double hy = (box.hi.y - box.lo.y) / static_cast<double>(n - 1);
        const double hz = (box.hi.z - box.lo.z) / static_cast<double>(n - 1);
        auto w = [n](std::size_t i) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; };
        std::vector<double> planes(n);
        parallel_for(
            n,
            [&](std::size_t i) {
                double s = 0.0;
                const double x = box.lo.x + hx * static_cast<double>(i);
                for (std::size_t j = 0; j < n; ++j) {
                    const double y = box.lo.y + hy * static_cast<double>(j);
                    for (std::size_t k = 0; k < n; ++k) {
                        const double z = box.lo.z + hz * static_cast<double>(k);
                        s += w(j) * w(k) * fn(Momentum3{x, y, z});
                    }
                }
                planes[i] = w(i) * s;
            },
            threads);
        double total = 0.0;
        for (double p : planes) {
            total += p;
        }
        return total * hx * hy * hz;
    };
    const double fine = integrate(nodes);
    const double coarse = integrate(std::max<std::size_t>(3, (nodes + 1) / 2));
    return {fine, std::fabs(fine - coarse), nodes * nodes * nodes};
}

ModelParams channel_params(double sigma, const Momentum3& p_total, const Momentum3& p_tilde) {
    ModelParams p;
    p.sigma = sigma;
    p.p_total = p_total;
    p.p_tilde = p_tilde.norm();
    if (p.p_tilde > 0.0) {
        p.relative_axis = p_tilde;
    }
    return p;
}

// Proposal centres for p1 on a shell |p2 - p1| = dp: every Gaussian product
// in the integrand peaks at P/2 - d/2 + delta with delta in {0, +-p~/4, +-p~/2}.
struct ShellTarget {
    std::vector<Momentum3> bases; ///< P/2 + delta for every channel
};

ShellTarget shell_target(const Momentum3& p_total, const Momentum3& p_tilde, ShellTarget t = {}) {
    const Momentum3 c = p_total * 0.5;
    for (double k : {0.0, 0.25, -0.25, 0.5, -0.5}) {
        const Momentum3 b = c + p_tilde * k;
        if (std::find(t.bases.begin(), t.bases.end(), b) == t.bases.end()) {
            t.bases.push_back(b);
        }
    }
    return t;
}

constexpr std::array<double, 2> shell_variances{0.5, 1.0};

// dp^2 * integral F(p1, p1 + dp n) dp1 dn by stratified sampling of n and
// importance sampling of p1.
template <class Integrand>
OracleResult shell_integral(double delta_p, double sigma, const ShellTarget& target,
                            const QuadratureSpec& spec, Integrand&& integrand) {
    const std::size_t side = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::sqrt(static_cast<double>(spec.sample_count) / 2.0)), 1, 32);
    const std::size_t strata = side * side;
    const std::array<double, 2> variances{shell_variances[0] * sigma * sigma,
                                          shell_variances[1] * sigma * sigma};
    std::vector<Accumulator> acc(strata);

    parallel_for(
        strata,
        [&](std::size_t k) {
            std::mt19937_64 rng(substream_seed(spec.rng_seed, k));
            std::uniform_real_distribution<double> u01;
            const std::size_t row = k / side;
            const std::size_t col = k % side;
            const std::size_t n =
                spec.sample_count / strata + (k < spec.sample_count % strata ? 1 : 0);

            // component weights from the integrand at the stratum centre
            const Momentum3 d_mid =
                sphere_point((row + 0.5) / static_cast<double>(side),
                             (col + 0.5) / static_cast<double>(side)) * delta_p;
            std::vector<double> weights(target.bases.size());
            double w_max = 0.0;
            for (std::size_t j = 0; j < weights.size(); ++j) {
                const Momentum3 m = target.bases[j] - d_mid * 0.5;
                weights[j] = std::fabs(integrand(rng, m, m + d_mid));
                w_max = std::max(w_max, weights[j]);
            }
            for (double& w : weights) {
                w = w_max > 0.0 ? w + 0.05 * w_max : 1.0;
            }

            // the proposal for p1 is this mixture shifted by -d/2
            const GaussianMixture proposal(target.bases, weights, variances);
            for (std::size_t i = 0; i < n; ++i) {
                const double u = (row + u01(rng)) / static_cast<double>(side);
                const double v = (col + u01(rng)) / static_cast<double>(side);
                const Momentum3 d = sphere_point(u, v) * delta_p;
                const Momentum3 y = proposal.sample(rng);
                const Momentum3 p1 = y - d * 0.5;
                const double value = integrand(rng, p1, p1 + d);
                acc[k].add(4.0 * units::pi * value / proposal.density(y));
            }
        },
        spec.threads);

    double mean = 0.0;
    double var = 0.0;
    std::size_t used = 0;
    for (const auto& a : acc) {
        mean += a.mean;
        var += a.n > 1 ? a.variance() / static_cast<double>(a.n) : 0.0;
        used += a.n;
    }
    const double k2 = static_cast<double>(strata);
    const double scale = delta_p * delta_p;
    return {scale * mean / k2, scale * std::sqrt(var) / k2, used};
}

void require_monte_carlo(const QuadratureSpec& spec, const char* what) {
    if (spec.method != Method::monte_carlo) {
        throw DomainError(std::string(what) + " is only available with the Monte-Carlo method");
    }
}

void require_delta_p(double delta_p) {
    if (!(delta_p >= 0.0) || !std::isfinite(delta_p)) {
        throw DomainError("delta_p must be non-negative and finite");
    }
}

// Proposal for a pair (p1, p2): the two orderings of the packet means, each
// with two widths.
struct PairSampler {
    Momentum3 m1, m2;
    double sigma;

    static constexpr std::array<double, 2> variance_scale{1.0, 2.0};

    void draw(std::mt19937_64& rng, Momentum3& p1, Momentum3& p2) const {
        std::uniform_int_distribution<int> pick(0, 3);
        const int c = pick(rng);
        const double tau = sigma * std::sqrt(variance_scale[static_cast<std::size_t>(c & 1)]);
        const bool swap = (c & 2) != 0;
        p1 = (swap ? m2 : m1) + normal3(rng) * tau;
        p2 = (swap ? m1 : m2) + normal3(rng) * tau;
    }

    double density(const Momentum3& p1, const Momentum3& p2) const {
        double d = 0.0;
        for (double s : variance_scale) {
            const double var = s * sigma * sigma;
            d += gaussian3(p1, m1, var) * gaussian3(p2, m2, var)
                 + gaussian3(p1, m2, var) * gaussian3(p2, m1, var);
        }
        return 0.25 * d;
    }
};

} // namespace

void QuadratureSpec::validate() const {
    if (sample_count == 0) {
        throw DomainError("sample_count must be positive");
    }
    if (nodes_per_axis < 3) {
        throw DomainError("nodes_per_axis must be at least 3");
    }
    if (!(target_rel_tol > 0.0)) {
        throw DomainError("target_rel_tol must be positive");
    }
}

bool agrees(double closed, const OracleResult& r, double rel_tol) {
    const double tol = std::max(rel_tol * std::fabs(closed), 3.0 * r.est_error);
    return std::fabs(closed - r.value) <= tol;
}

ChannelCrossSection gaussian_ptilde_spread(SpinChannel channel, double weight,
                                           const Momentum3& p_total, const Momentum3& p_tilde,
                                           double width) {
    SampledDistribution dist;
    dist.nominal_p_total = p_total;
    dist.nominal_p_tilde = p_tilde;
    dist.sample = [p_total, p_tilde, width](std::mt19937_64& rng, Momentum3& P, Momentum3& pt) {
        P = p_total;
        pt = p_tilde + normal3(rng) * width;
    };
    return {channel, weight, std::move(dist)};
}

std::vector<ChannelCrossSection> point_mass_channels(const ModelParams& params) {
    params.validate();
    std::vector<ChannelCrossSection> out;
    const PointMass at{params.p_total, params.relative_momentum()};
    if (params.f < 1.0) {
        out.push_back({SpinChannel::singlet, (1.0 - params.f) * params.n_tot, at});
    }
    if (params.f > 0.0) {
        out.push_back({SpinChannel::triplet, params.f * params.n_tot, at});
    }
    return out;
}

double phi_differential(const Momentum3& p1, const Momentum3& p2, const ModelParams& params) {
    params.validate();
    double v = 0.0;
    if (params.f < 1.0) {
        v += (1.0 - params.f) * two_particle_density(p1, p2, params, SpinChannel::singlet);
    }
    if (params.f > 0.0) {
        v += params.f * two_particle_density(p1, p2, params, SpinChannel::triplet);
    }
    return params.n_tot * v;
}

ReducedDensity::ReducedDensity(const ModelParams& params, std::size_t nodes_per_axis)
    : params_(params) {
    params_.validate();
    if (params_.f > 0.0 && triplet_degenerate(params_.p_tilde, params_.sigma)) {
        throw DegenerateChannelError("triplet state does not exist at p_tilde/sigma < 1e-6");
    }
    const Momentum3 a1 = params_.mean_momentum(Branch::plus);
    const Momentum3 a2 = params_.mean_momentum(Branch::minus);
    const double s = params_.sigma;

    o11_ = o22_ = o12_ = 1.0;
    for (int ax = 0; ax < 3; ++ax) {
        const double lo = std::min(a1[ax], a2[ax]) - box_half_width * s;
        const double hi = std::max(a1[ax], a2[ax]) + box_half_width * s;
        auto overlap_1d = [&](double mi, double mj) {
            return trapezoid(lo, hi, nodes_per_axis, [&](double x) {
                return std::conj(axis_amplitude(x, mi, s, 0.0)) * axis_amplitude(x, mj, s, 0.0);
            });
        };
        o11_ *= overlap_1d(a1[ax], a1[ax]);
        o22_ *= overlap_1d(a2[ax], a2[ax]);
        o12_ *= overlap_1d(a1[ax], a2[ax]);
    }
    norm_singlet_ = channel_norm(params_.p_tilde, s, SpinChannel::singlet);
    norm_triplet_ = params_.f > 0.0 ? channel_norm(params_.p_tilde, s, SpinChannel::triplet) : 1.0;
}

std::complex<double> ReducedDensity::overlap(Branch i, Branch j) const {
    if (i == j) {
        return i == Branch::plus ? o11_ : o22_;
    }
    return i == Branch::plus ? o12_ : std::conj(o12_);
}

double ReducedDensity::operator()(const Momentum3& p) const {
    const std::complex<double> phi1 = one_particle_log_amplitude(p, params_, Branch::plus).value();
    const std::complex<double> phi2 = one_particle_log_amplitude(p, params_, Branch::minus).value();
    const double direct = std::norm(phi1) * o22_.real() + std::norm(phi2) * o11_.real();
    const double exchange = 2.0 * (phi1 * std::conj(phi2) * o12_).real();
    double rho = 0.0;
    if (params_.f < 1.0) {
        rho += (1.0 - params_.f) * (direct + exchange) / norm_singlet_;
    }
    if (params_.f > 0.0) {
        rho += params_.f * (direct - exchange) / norm_triplet_;
    }
    return params_.n_tot * rho;
}

OracleResult rho_single(const Momentum3& p, const ModelParams& params, const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    const Momentum3 a1 = params.mean_momentum(Branch::plus);
    const Momentum3 a2 = params.mean_momentum(Branch::minus);
    const Momentum3 c = params.p_total * 0.5;
    OracleResult r;
    if (spec.method == Method::tensor_quadrature) {
        r = tensor3(box_around({a1, a2}, params.sigma), spec.nodes_per_axis, spec.threads,
                    [&](const Momentum3& q) { return phi_differential(p, q, params); });
    } else {
        const double s2 = params.sigma * params.sigma;
        const std::array<double, 2> variances{s2, 2.0 * s2};
        const GaussianMixture proposal({a1, a2, c}, {1.0, 1.0, 1.0}, variances);
        r = mc_mean(spec, 0, [&](std::mt19937_64& rng) {
            const Momentum3 q = proposal.sample(rng);
            return phi_differential(p, q, params) / proposal.density(q);
        });
    }
    check_tolerance(r, spec, "rho_single");
    return r;
}

OracleResult one_particle_norm(const ModelParams& params, Branch branch, double t,
                               const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    const Momentum3 m = params.mean_momentum(branch);
    auto density = [&](const Momentum3& p) {
        return std::norm(one_particle_amplitude(p, params, branch, t));
    };
    OracleResult r;
    if (spec.method == Method::tensor_quadrature) {
        r = tensor3(box_around({m}, params.sigma), spec.nodes_per_axis, spec.threads, density);
    } else {
        const double s2 = params.sigma * params.sigma;
        const std::array<double, 2> variances{s2, 2.0 * s2};
        const GaussianMixture proposal({m}, {1.0}, variances);
        r = mc_mean(spec, 0, [&](std::mt19937_64& rng) {
            const Momentum3 p = proposal.sample(rng);
            return density(p) / proposal.density(p);
        });
    }
    check_tolerance(r, spec, "one_particle_norm");
    return r;
}

OracleResult overlap_integral(const ModelParams& params, double t, const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    if (spec.method != Method::tensor_quadrature) {
        throw DomainError("overlap_integral uses tensor quadrature");
    }
    const Momentum3 a1 = params.mean_momentum(Branch::plus);
    const Momentum3 a2 = params.mean_momentum(Branch::minus);
    const Box box = box_around({a1, a2}, params.sigma);
    auto part = [&](bool imag) {
        return tensor3(box, spec.nodes_per_axis, spec.threads, [&](const Momentum3& p) {
            const auto v = std::conj(one_particle_amplitude(p, params, Branch::plus, t))
                           * one_particle_amplitude(p, params, Branch::minus, t);
            return imag ? v.imag() : v.real();
        });
    };
    OracleResult re = part(false);
    const OracleResult im = part(true);
    re.est_error = std::max(re.est_error, std::fabs(im.value));
    check_tolerance(re, spec, "overlap_integral");
    return re;
}

OracleResult pair_norm(const ModelParams& params, SpinChannel channel, const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    if (channel == SpinChannel::triplet && triplet_degenerate(params.p_tilde, params.sigma)) {
        throw DegenerateChannelError("triplet state does not exist at p_tilde/sigma < 1e-6");
    }
    const Momentum3 a1 = params.mean_momentum(Branch::plus);
    const Momentum3 a2 = params.mean_momentum(Branch::minus);
    const double s = params.sigma;

    OracleResult r;
    if (spec.method == Method::tensor_quadrature) {
        // |Psi|^2 = [|phi1(p1) phi2(p2)|^2 + |phi2(p1) phi1(p2)|^2 +- 2 Re(...)] / norm;
        // each term is a product over Cartesian axes of 1-D integrals.
        auto evaluate = [&](std::size_t nodes) {
            std::complex<double> o11 = 1.0, o22 = 1.0, o12 = 1.0;
            for (int ax = 0; ax < 3; ++ax) {
                const double lo = std::min(a1[ax], a2[ax]) - box_half_width * s;
                const double hi = std::max(a1[ax], a2[ax]) + box_half_width * s;
                auto ov = [&](double mi, double mj) {
                    return trapezoid(lo, hi, nodes, [&](double x) {
                        return std::conj(axis_amplitude(x, mi, s, 0.0)) * axis_amplitude(x, mj, s, 0.0);
                    });
                };
                o11 *= ov(a1[ax], a1[ax]);
                o22 *= ov(a2[ax], a2[ax]);
                o12 *= ov(a1[ax], a2[ax]);
            }
            const double sign = channel == SpinChannel::singlet ? 1.0 : -1.0;
            return (2.0 * (o11 * o22).real() + sign * 2.0 * std::norm(o12))
                   / channel_norm(params.p_tilde, s, channel);
        };
        const double fine = evaluate(spec.nodes_per_axis);
        const double coarse = evaluate(std::max<std::size_t>(3, (spec.nodes_per_axis + 1) / 2));
        r = {fine, std::fabs(fine - coarse), 3 * spec.nodes_per_axis};
    } else {
        const PairSampler sampler{a1, a2, s};
        r = mc_mean(spec, 0, [&](std::mt19937_64& rng) {
            Momentum3 p1, p2;
            sampler.draw(rng, p1, p2);
            return two_particle_density(p1, p2, params, channel) / sampler.density(p1, p2);
        });
    }
    check_tolerance(r, spec, "pair_norm");
    return r;
}

OracleResult total_cross_section(const ModelParams& params, const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    OracleResult r;
    if (spec.method == Method::tensor_quadrature) {
        QuadratureSpec loose = spec;
        loose.target_rel_tol = std::numeric_limits<double>::infinity();
        const double fs = 1.0 - params.f;
        if (fs > 0.0) {
            const OracleResult s0 = pair_norm(params, SpinChannel::singlet, loose);
            r.value += fs * s0.value;
            r.est_error += fs * s0.est_error;
            r.samples_used += s0.samples_used;
        }
        if (params.f > 0.0) {
            const OracleResult s1 = pair_norm(params, SpinChannel::triplet, loose);
            r.value += params.f * s1.value;
            r.est_error += params.f * s1.est_error;
            r.samples_used += s1.samples_used;
        }
        r.value *= params.n_tot;
        r.est_error *= params.n_tot;
    } else {
        const PairSampler sampler{params.mean_momentum(Branch::plus),
                                  params.mean_momentum(Branch::minus), params.sigma};
        r = mc_mean(spec, 0, [&](std::mt19937_64& rng) {
            Momentum3 p1, p2;
            sampler.draw(rng, p1, p2);
            return phi_differential(p1, p2, params) / sampler.density(p1, p2);
        });
    }
    check_tolerance(r, spec, "total_cross_section");
    return r;
}

OracleResult rho_integral(const ModelParams& params, const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    const ReducedDensity rho(params, std::max<std::size_t>(spec.nodes_per_axis, 64));
    const Momentum3 a1 = params.mean_momentum(Branch::plus);
    const Momentum3 a2 = params.mean_momentum(Branch::minus);
    OracleResult r;
    if (spec.method == Method::tensor_quadrature) {
        r = tensor3(box_around({a1, a2}, params.sigma), spec.nodes_per_axis, spec.threads, rho);
    } else {
        const double s2 = params.sigma * params.sigma;
        const std::array<double, 2> variances{s2, 2.0 * s2};
        const GaussianMixture proposal({a1, a2, params.p_total * 0.5}, {1.0, 1.0, 1.0}, variances);
        r = mc_mean(spec, 0, [&](std::mt19937_64& rng) {
            const Momentum3 p = proposal.sample(rng);
            return rho(p) / proposal.density(p);
        });
    }
    check_tolerance(r, spec, "rho_integral");
    return r;
}

OracleResult general_channel_integral(std::span<const ChannelCrossSection> theta, double delta_p,
                                      double sigma, const QuadratureSpec& spec) {
    spec.validate();
    require_monte_carlo(spec, "general_channel_integral");
    require_delta_p(delta_p);
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sigma must be positive and finite");
    }
    for (const auto& ch : theta) {
        if (!(ch.weight >= 0.0) || !std::isfinite(ch.weight)) {
            throw DomainError("channel weights must be non-negative");
        }
    }
    if (delta_p == 0.0 || theta.empty()) {
        return {0.0, 0.0, 0};
    }

    ShellTarget target;
    double total_weight = 0.0;
    for (const auto& ch : theta) {
        total_weight += ch.weight;
        std::visit(
            [&](const auto& shape) {
                using T = std::decay_t<decltype(shape)>;
                if constexpr (std::is_same_v<T, PointMass>) {
                    target = shell_target(shape.p_total, shape.p_tilde, std::move(target));
                } else {
                    target = shell_target(shape.nominal_p_total, shape.nominal_p_tilde,
                                          std::move(target));
                }
            },
            ch.shape);
    }

    auto integrand = [&](std::mt19937_64& rng, const Momentum3& p1, const Momentum3& p2) {
        double v = 0.0;
        for (const auto& ch : theta) {
            if (ch.weight == 0.0) {
                continue;
            }
            std::visit(
                [&](const auto& shape) {
                    using T = std::decay_t<decltype(shape)>;
                    if constexpr (std::is_same_v<T, PointMass>) {
                        v += ch.weight * two_particle_density(
                                             p1, p2, channel_params(sigma, shape.p_total, shape.p_tilde),
                                             ch.channel);
                    } else {
                        Momentum3 P, pt;
                        shape.sample(rng, P, pt);
                        v += ch.weight
                             * two_particle_density(p1, p2, channel_params(sigma, P, pt), ch.channel);
                    }
                },
                ch.shape);
        }
        return v;
    };

    OracleResult r = shell_integral(delta_p, sigma, target, spec, integrand);
    if (total_weight > 0.0) {
        check_tolerance(r, spec, "coincidence intensity");
    }
    return r;
}

OracleResult intensity_cor_oracle(double delta_p, const ModelParams& params,
                                  const QuadratureSpec& spec) {
    params.validate();
    const auto channels = point_mass_channels(params);
    return general_channel_integral(channels, delta_p, params.sigma, spec);
}

OracleResult intensity_uncor_oracle(double delta_p, const ModelParams& params,
                                    const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    require_monte_carlo(spec, "intensity_uncor_oracle");
    require_delta_p(delta_p);
    if (delta_p == 0.0) {
        return {0.0, 0.0, 0};
    }
    const ReducedDensity rho(params, std::max<std::size_t>(spec.nodes_per_axis, 64));
    const ShellTarget target = shell_target(params.p_total, params.relative_momentum());
    const double inv_n = 1.0 / params.n_tot;
    OracleResult r = shell_integral(
        delta_p, params.sigma, target, spec,
        [&](std::mt19937_64&, const Momentum3& p1, const Momentum3& p2) {
            return rho(p1) * rho(p2) * inv_n;
        });
    check_tolerance(r, spec, "accidental intensity");
    return r;
}

RatioResult correlation_R_oracle(double delta_p, const ModelParams& params,
                                 const QuadratureSpec& spec) {
    RatioResult out;
    out.cor = intensity_cor_oracle(delta_p, params, spec);
    QuadratureSpec second = spec;
    second.rng_seed = substream_seed(spec.rng_seed, 0xacc1d3u);
    out.uncor = intensity_uncor_oracle(delta_p, params, second);
    const double ratio = out.cor.value / out.uncor.value;
    out.r = ratio - 1.0;
    out.est_error = std::fabs(ratio)
                    * std::hypot(out.cor.est_error / out.cor.value,
                                 out.uncor.est_error / out.uncor.value);
    return out;
}

} // namespace paircorr::oracle
