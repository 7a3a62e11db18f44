#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "skewpower/distribution.hpp"

namespace skewpower {

/// splitmix64 finalizer; used to derive independent engine seeds from
/// (seed, stream) counters so replications are order-independent.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t cell, std::uint64_t rep) {
    std::uint64_t h = mix_seed(seed);
    h = mix_seed(h ^ (0x517cc1b727220a95ULL + cell));
    h = mix_seed(h ^ (0x2545f4914f6cdd1dULL + rep));
    return h;
}

struct SampleBatch {
    std::vector<double> values;
    std::uint64_t seed = 0;
    Distribution source;
};

namespace detail {

/// One esep draw centered at zero: sigma * i * g^{1/alpha} with
/// g ~ Gamma(1/alpha, 1) and the side chosen so that P(X < 0) = (1+eps)/2.
inline double esep_draw_centered(std::mt19937_64& rng, double sigma, double eps, double alpha,
                                 std::gamma_distribution<double>& gamma_shape,
                                 std::uniform_real_distribution<double>& unit) {
    const double g = gamma_shape(rng);
    const double u = unit(rng);
    const double i = (u < 0.5 * (1.0 - eps)) ? kSqrt2 * (1.0 - eps) : -kSqrt2 * (1.0 + eps);
    return sigma * i * std::pow(g, 1.0 / alpha);
}

} // namespace detail

/// Gamma-branch sampler for the esep family (alpha=2 gives esn, alpha=1 esl).
/// Deterministic for a fixed seed within one build of this library.
inline SampleBatch sample_esep(const Distribution& d, std::size_t n, std::uint64_t seed) {
    if (d.family != Family::esep) throw parameter_error("sample_esep requires an esep member");
    if (n == 0) throw parameter_error("sample size must be >= 1");
    std::mt19937_64 rng(mix_seed(seed));
    std::gamma_distribution<double> gamma_shape(1.0 / d.alpha, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SampleBatch batch{{}, seed, d};
    batch.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        batch.values.push_back(
            d.theta + detail::esep_draw_centered(rng, d.sigma, d.eps, d.alpha, gamma_shape, unit));
    return batch;
}

/// est draws via the scale mixture: an esn(0, sigma, eps) draw divided by
/// sqrt(z / (nu/2)) with z ~ Gamma(nu/2, 1), then shifted by theta.
inline SampleBatch sample_est(const Distribution& d, std::size_t n, std::uint64_t seed) {
    if (d.family != Family::est) throw parameter_error("sample_est requires an est member");
    if (n == 0) throw parameter_error("sample size must be >= 1");
    std::mt19937_64 rng(mix_seed(seed));
    std::gamma_distribution<double> gamma_half(0.5, 1.0);
    std::gamma_distribution<double> gamma_mix(0.5 * d.nu, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SampleBatch batch{{}, seed, d};
    batch.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double y = detail::esep_draw_centered(rng, d.sigma, d.eps, 2.0, gamma_half, unit);
        const double z = gamma_mix(rng);
        batch.values.push_back(d.theta + y * std::sqrt(0.5 * d.nu / z));
    }
    return batch;
}

/// esgt draws: an esep(0, sigma, eps, alpha) draw rescaled by (q/z)^{1/alpha},
/// z ~ Gamma(q, 1). Reduces to sample_est at alpha=2, q=nu/2.
inline SampleBatch sample_esgt(const Distribution& d, std::size_t n, std::uint64_t seed) {
    if (d.family != Family::esgt) throw parameter_error("sample_esgt requires an esgt member");
    if (n == 0) throw parameter_error("sample size must be >= 1");
    std::mt19937_64 rng(mix_seed(seed));
    std::gamma_distribution<double> gamma_shape(1.0 / d.alpha, 1.0);
    std::gamma_distribution<double> gamma_mix(d.q, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SampleBatch batch{{}, seed, d};
    batch.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double y = detail::esep_draw_centered(rng, d.sigma, d.eps, d.alpha, gamma_shape, unit);
        const double z = gamma_mix(rng);
        batch.values.push_back(d.theta + y * std::pow(d.q / z, 1.0 / d.alpha));
    }
    return batch;
}

inline SampleBatch sample(const Distribution& d, std::size_t n, std::uint64_t seed) {
    switch (d.family) {
        case Family::esep: return sample_esep(d, n, seed);
        case Family::esgt: return sample_esgt(d, n, seed);
        case Family::est: return sample_est(d, n, seed);
    }
    throw parameter_error("unknown family");
}

} // namespace skewpower
