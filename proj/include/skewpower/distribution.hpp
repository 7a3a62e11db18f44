#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "skewpower/errors.hpp"

namespace skewpower {

enum class Family { esep, esgt, est };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::esep: return "esep";
        case Family::esgt: return "esgt";
        case Family::est: return "est";
    }
    return "?";
}

/// sign(u) with sign(0) = +1, so x = theta belongs to the right branch.
inline double branch_sign(double u) { return u < 0.0 ? -1.0 : 1.0; }

/// One member of the epsilon-skew exponential power family or of its scale
/// mixtures. The skewness mechanism is a side-dependent rescaling: mass
/// (1+eps)/2 to the left of theta and (1-eps)/2 to the right.
///
///   esep(theta, sigma, eps, alpha)  density ~ exp(-t^alpha) with
///       t = |x-theta| / (sqrt(2) (1 - s*eps) sigma), s = sign(x-theta).
///       alpha=2 is the epsilon-skew normal, alpha=1 the epsilon-skew Laplace.
///   esgt(theta, sigma, eps, alpha, q)  gamma scale mixture of an esep:
///       density ~ (1 + t^alpha / q)^-(q + 1/alpha).
///   est(theta, sigma, eps, nu)  the skew-t member (alpha=2, q=nu/2),
///       density ~ (1 + z^2 / (nu (1-s*eps)^2))^-((nu+1)/2), z=(x-theta)/sigma.
struct Distribution {
    Family family = Family::esep;
    double theta = 0.0;
    double sigma = 1.0;
    double eps = 0.0;
    double alpha = 2.0; // esep, esgt
    double q = 1.0;     // esgt
    double nu = 1.0;    // est

    static Distribution esep(double theta, double sigma, double eps, double alpha) {
        Distribution d{Family::esep, theta, sigma, eps, alpha, 1.0, 1.0};
        d.validate();
        return d;
    }
    /// Epsilon-skew normal: esep with alpha = 2.
    static Distribution esn(double theta, double sigma, double eps) {
        return esep(theta, sigma, eps, 2.0);
    }
    /// Epsilon-skew Laplace: esep with alpha = 1.
    static Distribution esl(double theta, double sigma, double eps) {
        return esep(theta, sigma, eps, 1.0);
    }
    static Distribution esgt(double theta, double sigma, double eps, double alpha, double q) {
        Distribution d{Family::esgt, theta, sigma, eps, alpha, q, 1.0};
        d.validate();
        return d;
    }
    static Distribution est(double theta, double sigma, double eps, double nu) {
        Distribution d{Family::est, theta, sigma, eps, 2.0, nu / 2.0, nu};
        d.validate();
        return d;
    }

    void validate() const {
        if (!std::isfinite(theta)) throw parameter_error("theta must be finite");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw parameter_error("sigma must be positive");
        if (!(eps > -1.0 && eps < 1.0)) throw parameter_error("eps must lie in (-1, 1)");
        if (family != Family::est && (!(alpha > 0.0) || !std::isfinite(alpha)))
            throw parameter_error("alpha must be positive");
        if (family == Family::esgt && (!(q > 0.0) || !std::isfinite(q)))
            throw parameter_error("q must be positive");
        if (family == Family::est && (!(nu > 0.0) || !std::isfinite(nu)))
            throw parameter_error("nu must be positive");
    }

    /// Half scale factor of the side x sits on: 1 - sign(x-theta)*eps.
    double side_scale(double x) const { return 1.0 - branch_sign(x - theta) * eps; }

    /// Mass left of theta, which equals F(theta).
    double left_mass() const { return 0.5 * (1.0 + eps); }
};

namespace detail {

constexpr double kSqrt2 = 1.4142135623730951;

inline double esep_log_norm(double alpha, double sigma) {
    // log of alpha / (2^{3/2} Gamma(1/alpha) sigma)
    return std::log(alpha) - 1.5 * std::log(2.0) - std::lgamma(1.0 / alpha) - std::log(sigma);
}

inline double esgt_log_norm(double alpha, double q, double sigma) {
    // log of alpha / (2^{3/2} B(1/alpha, q) q^{1/alpha} sigma)
    const double a = 1.0 / alpha;
    const double log_beta = std::lgamma(a) + std::lgamma(q) - std::lgamma(a + q);
    return std::log(alpha) - 1.5 * std::log(2.0) - log_beta - a * std::log(q) - std::log(sigma);
}

inline double est_log_norm(double nu, double sigma) {
    // log of Gamma((nu+1)/2) / (sqrt(nu pi) Gamma(nu/2) sigma)
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)
         - 0.5 * std::log(nu * M_PI) - std::log(sigma);
}

} // namespace detail

/// Student-t normalizing constant c(nu) = Gamma((nu+1)/2)/(sqrt(nu pi) Gamma(nu/2)).
inline double student_norm_constant(double nu) {
    return std::exp(detail::est_log_norm(nu, 1.0));
}

inline double log_density(const Distribution& d, double x) {
    const double s = branch_sign(x - d.theta);
    const double side = 1.0 - s * d.eps;
    switch (d.family) {
        case Family::esep: {
            const double t = std::fabs(x - d.theta) / (detail::kSqrt2 * side * d.sigma);
            return detail::esep_log_norm(d.alpha, d.sigma) - std::pow(t, d.alpha);
        }
        case Family::esgt: {
            const double t = std::fabs(x - d.theta) / (detail::kSqrt2 * side * d.sigma);
            return detail::esgt_log_norm(d.alpha, d.q, d.sigma)
                 - (d.q + 1.0 / d.alpha) * std::log1p(std::pow(t, d.alpha) / d.q);
        }
        case Family::est: {
            const double z = (x - d.theta) / d.sigma;
            const double u = z / side;
            return detail::est_log_norm(d.nu, d.sigma)
                 - 0.5 * (d.nu + 1.0) * std::log1p(u * u / d.nu);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double density(const Distribution& d, double x) { return std::exp(log_density(d, x)); }

/// Closed-form CDF. Left/right branches integrate to regularized incomplete
/// gamma (esep) or incomplete beta (esgt) pieces; the est branch reduces to
/// the Student-t CDF per side. F(theta) = (1+eps)/2 for every member.
inline double cdf(const Distribution& d, double x) {
    const double p0 = d.left_mass();
    const bool left = x < d.theta;
    const double side = left ? 1.0 + d.eps : 1.0 - d.eps;
    const double t = std::fabs(x - d.theta) / (detail::kSqrt2 * side * d.sigma);
    switch (d.family) {
        case Family::esep: {
            const double y = std::pow(t, d.alpha);
            if (left) return p0 * boost::math::gamma_q(1.0 / d.alpha, y);
            return p0 + (1.0 - p0) * boost::math::gamma_p(1.0 / d.alpha, y);
        }
        case Family::esgt: {
            const double y = std::pow(t, d.alpha) / d.q;
            const double w = y / (1.0 + y);
            if (left) return p0 * boost::math::ibetac(1.0 / d.alpha, d.q, w);
            return p0 + (1.0 - p0) * boost::math::ibeta(1.0 / d.alpha, d.q, w);
        }
        case Family::est: {
            const boost::math::students_t t_dist(d.nu);
            const double z = (x - d.theta) / d.sigma;
            if (left) return (1.0 + d.eps) * boost::math::cdf(t_dist, z / (1.0 + d.eps));
            return p0 + (1.0 - d.eps) * (boost::math::cdf(t_dist, z / (1.0 - d.eps)) - 0.5);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Quantile by bisection on the closed-form CDF. The initial bracket is
/// theta +- 50 sigma (1+|eps|), doubled until it straddles p.
inline double quantile(const Distribution& d, double p) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("quantile requires p in (0, 1)");
    double half = 50.0 * d.sigma * (1.0 + std::fabs(d.eps));
    double lo = d.theta - half, hi = d.theta + half;
    for (int i = 0; i < 200 && cdf(d, lo) > p; ++i) lo = d.theta - (half *= 2.0);
    for (int i = 0; i < 200 && cdf(d, hi) < p; ++i) hi = d.theta + (half *= 2.0);
    if (cdf(d, lo) > p || cdf(d, hi) < p)
        throw numeric_error("quantile bracket expansion failed");
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double width = hi - lo;
        const double f = cdf(d, mid);
        const bool p_converged = std::fabs(f - p) <= 1e-12 && width <= 1e-9 * (1.0 + std::fabs(mid));
        if (p_converged || mid == lo || mid == hi) return mid;
        (f < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// Shared closed form for E(X-theta)^r (signed = true) and E|X-theta|^r.
inline double moment_impl(const Distribution& d, int r, bool signed_moment) {
    if (r < 0) throw parameter_error("moment order must be a nonnegative integer");
    if (r == 0) return 1.0;
    const double lp = std::pow(1.0 + d.eps, r + 1);
    const double rp = std::pow(1.0 - d.eps, r + 1);
    const double left_sign = (signed_moment && r % 2 == 1) ? -1.0 : 1.0;
    const double bracket = left_sign * lp + rp;
    switch (d.family) {
        case Family::esep: {
            const double a = d.alpha;
            const double log_g = std::lgamma((r + 1.0) / a) - std::lgamma(1.0 / a);
            return std::pow(2.0, 0.5 * r) * std::pow(d.sigma, r) * std::exp(log_g) * bracket / 2.0;
        }
        case Family::esgt:
        case Family::est: {
            const double a = d.family == Family::est ? 2.0 : d.alpha;
            const double qq = d.family == Family::est ? 0.5 * d.nu : d.q;
            if (!(qq * a > r))
                throw moment_error("moment of order " + std::to_string(r)
                                   + " does not exist: requires q*alpha > r");
            const double log_g = std::lgamma((r + 1.0) / a) + std::lgamma(qq - r / a)
                               - std::lgamma(1.0 / a) - std::lgamma(qq);
            return std::pow(2.0, 0.5 * r - 1.0) * std::pow(qq, r / a) * std::pow(d.sigma, r)
                 * std::exp(log_g) * bracket;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace detail

/// E(X - theta)^r for nonnegative integer r. For the mixture families the
/// moment exists only when q*alpha > r (nu > r for est); otherwise throws.
inline double central_moment(const Distribution& d, int r) {
    return detail::moment_impl(d, r, /*signed_moment=*/true);
}

/// E|X - theta|^r under the same existence condition.
inline double absolute_moment(const Distribution& d, int r) {
    return detail::moment_impl(d, r, /*signed_moment=*/false);
}

inline bool moment_exists(const Distribution& d, int r) {
    if (d.family == Family::esep) return true;
    const double a = d.family == Family::est ? 2.0 : d.alpha;
    const double qq = d.family == Family::est ? 0.5 * d.nu : d.q;
    return qq * a > r;
}

/// Mean and variance of X, from the first two closed-form moments.
inline double mean(const Distribution& d) { return d.theta + central_moment(d, 1); }
inline double variance(const Distribution& d) {
    const double m1 = central_moment(d, 1);
    return central_moment(d, 2) - m1 * m1;
}

inline double log_likelihood(const Distribution& d, std::span<const double> data) {
    if (data.empty()) throw data_error("log_likelihood requires nonempty data");
    double s = 0.0;
    for (double x : data) s += log_density(d, x);
    return s;
}

inline double log_likelihood(const Distribution& d, const std::vector<double>& data) {
    return log_likelihood(d, std::span<const double>(data));
}

} // namespace skewpower
