#pragma once

#include <array>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>

#include "skewpower/distribution.hpp"

namespace skewpower {

/// Score functions evaluated on the standardized residual z = (x-theta)/sigma.
/// The location and scale components are the log-density derivatives in that
/// standardization (psi_theta = sigma d/dtheta, psi_sigma = sigma d/dsigma);
/// the skewness and shape components carry the opposite sign, d(-log f)/d eps
/// and d(-log f)/d alpha. That sign mix keeps the triple consistent with the
/// information matrices of this family (the theta-eps cross entry is positive)
/// and is preserved everywhere downstream.
struct ScoreVector {
    double psi_theta = 0.0;
    double psi_sigma = 0.0;
    double psi_eps = 0.0;
    double psi_shape = 0.0;          // psi_alpha (esep) or psi_nu (est)
    bool theta_singular = false;     // esep with alpha < 1 at exactly x = theta
};

/// d log c(nu) / d nu for the Student-t normalizing constant.
inline double student_norm_log_derivative(double nu) {
    return 0.5 * (boost::math::digamma(0.5 * (nu + 1.0)) - boost::math::digamma(0.5 * nu)
                  - 1.0 / nu);
}

inline ScoreVector scores(const Distribution& d, double x) {
    const double z = (x - d.theta) / d.sigma;
    const double s = branch_sign(z);
    const double side = 1.0 - s * d.eps;
    const double za = std::fabs(z);
    ScoreVector r;
    if (d.family == Family::esep) {
        const double a = d.alpha;
        const double denom = std::pow(detail::kSqrt2 * side, a);
        const double za_pow = std::pow(za, a);
        if (za == 0.0 && a < 1.0) {
            r.theta_singular = true;
            r.psi_theta = std::numeric_limits<double>::infinity();
        } else {
            r.psi_theta = a * std::pow(za, a - 1.0) * s / denom;
        }
        r.psi_sigma = -1.0 + a * za_pow / denom;
        r.psi_eps = a * za_pow * s / (std::pow(2.0, 0.5 * a) * std::pow(side, a + 1.0));
        const double inv_a = 1.0 / a;
        const double const_term = -(inv_a + boost::math::digamma(inv_a) * inv_a * inv_a);
        const double log_term =
            za == 0.0 ? 0.0
                      : za_pow * (std::log(za) - std::log(detail::kSqrt2 * side)) / denom;
        r.psi_shape = const_term + log_term;
        return r;
    }
    if (d.family == Family::est) {
        const double nu = d.nu;
        const double big_d = nu * side * side + z * z;
        r.psi_theta = (nu + 1.0) * z / big_d;
        r.psi_sigma = (nu + 1.0) * z * z / big_d - 1.0;
        r.psi_eps = (nu + 1.0) * z * z * s / (side * big_d);
        r.psi_shape = student_norm_log_derivative(nu)
                    + 0.5 * std::log1p(z * z / (nu * side * side))
                    - 0.5 * (nu + 1.0) * z * z / (nu * nu * side * side + nu * z * z);
        return r;
    }
    throw parameter_error("scores are defined for the esep and est families");
}

/// Score triple in the coordinates the information matrices use: (theta,
/// sigma, eps) for esep and (theta, sigma^2, eps) for est, keeping the sign
/// convention of ScoreVector.
inline std::array<double, 3> score_vector_information_coords(const Distribution& d, double x) {
    const ScoreVector sc = scores(d, x);
    if (d.family == Family::est)
        return {sc.psi_theta / d.sigma, sc.psi_sigma / (2.0 * d.sigma * d.sigma), sc.psi_eps};
    return {sc.psi_theta / d.sigma, sc.psi_sigma / d.sigma, sc.psi_eps};
}

// ---------------------------------------------------------------------------
// Tail limits of the scores as x -> +inf (the -inf side mirrors with the
// opposite half scale). "divergent" means |psi| -> inf.

struct LimitVerdict {
    bool divergent = false;
    double value = 0.0; // limit when finite

    static LimitVerdict finite(double v) { return {false, v}; }
    static LimitVerdict infinite() { return {true, std::numeric_limits<double>::infinity()}; }
};

struct ScoreLimits {
    LimitVerdict theta, sigma, eps, shape;
};

/// Hard-coded tail classification: esep psi_theta diverges iff alpha > 1,
/// has the finite limit 1/(sqrt2 (1-eps)) at alpha = 1, and vanishes for
/// alpha < 1; the esep sigma/eps/alpha scores always diverge. All est scores
/// except psi_nu are bounded.
inline ScoreLimits score_limit_classification(const Distribution& d) {
    ScoreLimits r;
    if (d.family == Family::esep) {
        if (d.alpha > 1.0)
            r.theta = LimitVerdict::infinite();
        else if (d.alpha == 1.0)
            r.theta = LimitVerdict::finite(1.0 / (detail::kSqrt2 * (1.0 - d.eps)));
        else
            r.theta = LimitVerdict::finite(0.0);
        r.sigma = LimitVerdict::infinite();
        r.eps = LimitVerdict::infinite();
        r.shape = LimitVerdict::infinite();
        return r;
    }
    if (d.family == Family::est) {
        r.theta = LimitVerdict::finite(0.0);
        r.sigma = LimitVerdict::finite(d.nu);
        r.eps = LimitVerdict::finite((d.nu + 1.0) / (1.0 - d.eps));
        r.shape = LimitVerdict::infinite();
        return r;
    }
    throw parameter_error("score limits are defined for the esep and est families");
}

namespace detail {

template <typename F>
LimitVerdict numeric_tail_limit(F&& eval, double growth_threshold = 1.05) {
    // |psi| on radii 10^4 .. 10^9: consistent >5% growth per decade flags
    // divergence; otherwise the last value is the limit estimate.
    double prev = std::fabs(eval(1e4));
    bool all_grow = true;
    double last = prev;
    for (int k = 5; k <= 9; ++k) {
        const double cur = std::fabs(eval(std::pow(10.0, k)));
        if (!(cur > growth_threshold * std::max(prev, 1e-300))) all_grow = false;
        prev = cur;
        last = cur;
    }
    if (all_grow) return LimitVerdict::infinite();
    return LimitVerdict::finite(last);
}

} // namespace detail

/// Growth test over an expanding grid; intended to agree with the analytic
/// classification (asserted in the test suite, and checked by diagnose).
inline ScoreLimits numeric_score_limits(const Distribution& d) {
    ScoreLimits r;
    const auto at = [&](double z) { return scores(d, d.theta + z * d.sigma); };
    r.theta = detail::numeric_tail_limit([&](double z) { return at(z).psi_theta; });
    r.sigma = detail::numeric_tail_limit([&](double z) { return at(z).psi_sigma; });
    r.eps = detail::numeric_tail_limit([&](double z) { return at(z).psi_eps; });
    r.shape = detail::numeric_tail_limit([&](double z) { return at(z).psi_shape; });
    return r;
}

/// Verdict-level agreement. Finite limit values are not compared here: slow
/// polynomial decay (e.g. |z|^{alpha-1} with alpha just under 1) has not
/// reached its limit at the last grid decade, while the finite/divergent
/// classification is already stable.
inline bool limits_agree(const ScoreLimits& a, const ScoreLimits& b) {
    return a.theta.divergent == b.theta.divergent && a.sigma.divergent == b.sigma.divergent
        && a.eps.divergent == b.eps.divergent && a.shape.divergent == b.shape.divergent;
}

// ---------------------------------------------------------------------------
// Tail limits of score products, the ingredients of the information-
// standardized sensitivity. Keyed on alpha in (0,1/2), {1/2}, (1/2,1), {1},
// (1,inf) for the esep family; all est products have finite limits.

enum class ScoreProduct {
    theta_theta,
    theta_sigma,
    theta_eps,
    sigma_sigma,
    sigma_eps,
    eps_eps,
};

inline LimitVerdict product_tail_limit(const Distribution& d, ScoreProduct p) {
    const double e = d.eps;
    if (d.family == Family::esep) {
        const double a = d.alpha;
        const double side = 1.0 - e; // x -> +inf
        const double c_theta = a / std::pow(detail::kSqrt2 * side, a);
        const double c_sigma = c_theta;
        const double c_eps = a / (std::pow(2.0, 0.5 * a) * std::pow(side, a + 1.0));
        switch (p) {
            case ScoreProduct::theta_theta: // order z^{2a-2}
                if (a < 1.0) return LimitVerdict::finite(0.0);
                if (a == 1.0) return LimitVerdict::finite(c_theta * c_theta);
                return LimitVerdict::infinite();
            case ScoreProduct::theta_sigma: // order z^{2a-1}
                if (a < 0.5) return LimitVerdict::finite(0.0);
                if (a == 0.5) return LimitVerdict::finite(c_theta * c_sigma);
                return LimitVerdict::infinite();
            case ScoreProduct::theta_eps: // order z^{2a-1}
                if (a < 0.5) return LimitVerdict::finite(0.0);
                if (a == 0.5) return LimitVerdict::finite(c_theta * c_eps);
                return LimitVerdict::infinite();
            case ScoreProduct::sigma_sigma:
            case ScoreProduct::sigma_eps:
            case ScoreProduct::eps_eps: // order z^{2a}
                return LimitVerdict::infinite();
        }
    }
    if (d.family == Family::est) {
        const double nu = d.nu;
        switch (p) {
            case ScoreProduct::theta_theta: return LimitVerdict::finite(0.0);
            case ScoreProduct::theta_sigma: return LimitVerdict::finite(0.0);
            case ScoreProduct::theta_eps: return LimitVerdict::finite(0.0);
            case ScoreProduct::sigma_sigma: return LimitVerdict::finite(nu * nu);
            case ScoreProduct::sigma_eps:
                return LimitVerdict::finite(nu * (nu + 1.0) / (1.0 - e));
            case ScoreProduct::eps_eps:
                return LimitVerdict::finite((nu + 1.0) * (nu + 1.0) / ((1.0 - e) * (1.0 - e)));
        }
    }
    throw parameter_error("product limits are defined for the esep and est families");
}

} // namespace skewpower
