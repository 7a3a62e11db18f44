#pragma once

#include <array>
#include <cmath>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "skewpower/estimation.hpp"
#include "skewpower/mat3.hpp"
#include "skewpower/quadrature.hpp"
#include "skewpower/scores.hpp"

namespace skewpower {

/// Fisher information scaled by sample size, its inverse (the asymptotic
/// covariance of the ML estimators), and the determinant of the scaled matrix.
struct InfoMatrices {
    Mat3 fisher;
    Mat3 acov;
    double det = 0.0;
    double n = 1.0;
};

namespace detail {

inline InfoMatrices package_info(Mat3 per_obs, double n) {
    InfoMatrices r;
    r.fisher = per_obs.scaled(n);
    r.acov = r.fisher.inverse();
    r.det = r.fisher.det();
    r.n = n;
    return r;
}

} // namespace detail

/// Closed-form esep information over (theta, sigma, eps). The theta entries
/// involve Gamma(1 - 1/alpha), so alpha must exceed 1; the Laplace member and
/// below fall outside the classical regularity domain.
inline InfoMatrices fisher_info_esep(const Distribution& d, double n) {
    if (d.family != Family::esep) throw parameter_error("fisher_info_esep requires an esep member");
    if (!(d.alpha > 1.0))
        throw regularity_error("esep information requires alpha > 1");
    const double a = d.alpha;
    const double sg = d.sigma;
    const double om = 1.0 - d.eps * d.eps;
    const double g_ratio_minus = std::exp(std::lgamma(1.0 - 1.0 / a) - std::lgamma(1.0 / a));
    const double g_ratio_plus = std::exp(std::lgamma(1.0 + 1.0 / a) - std::lgamma(1.0 / a));
    const double inv_gamma = std::exp(-std::lgamma(1.0 / a));
    Mat3 m;
    m(0, 0) = a * (a - 1.0) * g_ratio_minus / (2.0 * sg * sg * om);
    m(0, 2) = m(2, 0) = a * a * inv_gamma / (detail::kSqrt2 * sg * om);
    m(1, 1) = -1.0 / (sg * sg) + a * (a + 1.0) * g_ratio_plus / (sg * sg);
    m(2, 2) = a * (a + 1.0) * g_ratio_plus / om;
    return detail::package_info(m, n);
}

/// The six closed-form asymptotic variance-covariances of the esep ML
/// estimators; equals the inverse of fisher_info_esep.
inline Mat3 asymptotic_cov_esep(const Distribution& d, double n) {
    if (d.family != Family::esep) throw parameter_error("asymptotic_cov_esep requires an esep member");
    if (!(d.alpha > 1.0))
        throw regularity_error("esep asymptotics require alpha > 1");
    const double a = d.alpha;
    const double sg = d.sigma;
    const double e2 = d.eps * d.eps;
    const double gp = std::tgamma(1.0 + 1.0 / a);
    const double gm = std::tgamma(1.0 - 1.0 / a);
    const double g = std::tgamma(1.0 / a);
    const double bracket = gp * gm * a * a - gm * gp - a * a;
    Mat3 c;
    c(0, 0) = 2.0 * (a + 1.0) * gp * g * sg * sg * (1.0 - e2) / (a * n * bracket);
    c(0, 1) = c(1, 0) = 0.0;
    c(0, 2) = c(2, 0) = detail::kSqrt2 * sg * g * (e2 - 1.0) / (n * bracket);
    c(1, 1) = -g * sg * sg / (n * (-a * a * gp - a * gp + g));
    c(1, 2) = c(2, 1) = 0.0;
    c(2, 2) = (a - 1.0) * gm * g * (1.0 - e2) / (a * n * bracket);
    return c;
}

/// det of the alpha = 2 (epsilon-skew normal) information matrix.
inline double esn_fisher_det_closed_form(double sigma, double eps, double n) {
    const double om = 1.0 - eps * eps;
    return 2.0 * n * n * n * (3.0 * M_PI - 8.0)
         / (sigma * sigma * sigma * sigma * M_PI * om * om);
}

/// det of the est information matrix with c = c(nu); the sigma^6 scaling
/// reflects the squared-scale coordinate this family's matrix is taken in.
inline double est_fisher_det_closed_form(double nu, double sigma, double eps, double n) {
    const double c = student_norm_constant(nu);
    const double om = eps * eps - 1.0;
    const double s2 = sigma * sigma;
    return -0.5 * n * n * n * (nu + 1.0) * (nu + 1.0) * nu * (16.0 * c * c - 3.0)
         / (s2 * s2 * s2 * om * om * (nu + 3.0) * (nu + 3.0) * (nu + 3.0));
}

/// Numeric est information over (theta, sigma^2, eps): E[psi psi^T] by
/// adaptive quadrature on the half-lines split at theta. The closed-form
/// determinant above is the correctness anchor.
inline InfoMatrices fisher_info_est(const Distribution& d, double n) {
    if (d.family != Family::est) throw parameter_error("fisher_info_est requires an est member");
    static constexpr int kIdx[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    Mat3 m;
    for (const auto& ij : kIdx) {
        const double v = integrate_split(
            [&](double x) {
                const auto psi = score_vector_information_coords(d, x);
                return psi[static_cast<std::size_t>(ij[0])] * psi[static_cast<std::size_t>(ij[1])]
                     * density(d, x);
            },
            d.theta);
        m(ij[0], ij[1]) = v;
        m(ij[1], ij[0]) = v;
    }
    return detail::package_info(m, n);
}

/// Closed form of int_0^inf (1+y^alpha)^(-q-1/alpha) log(1+y^alpha) dy.
inline double esgt_log_integral(double alpha, double q) {
    if (!(alpha > 0.0) || !(q > 0.0)) throw parameter_error("esgt_log_integral requires alpha, q > 0");
    const double a = 1.0 / alpha;
    const double b = std::exp(std::lgamma(a) + std::lgamma(q) - std::lgamma(q + a));
    return b * (boost::math::digamma(q + a) - boost::math::digamma(q)) / alpha;
}

// ---------------------------------------------------------------------------
// Regularity diagnostics (conditions iv-vii).

struct ConditionVerdict {
    bool pass = false;
    std::string note;
};

struct RegularityReport {
    ConditionVerdict iv;   // param-derivatives of log f exist (finite) at probes
    ConditionVerdict v;    // E[score] = 0
    ConditionVerdict vi;   // det of the information finite and positive
    ConditionVerdict vii;  // E|X-theta|^r finite for r <= 4
    std::array<double, 3> score_means{};   // evidence for (v)
    double fisher_det = 0.0;               // evidence for (vi)
    std::array<bool, 4> moment_ok{};       // evidence for (vii), r = 1..4
    std::array<double, 4> moments{};

    bool all_pass() const { return iv.pass && v.pass && vi.pass && vii.pass; }
};

namespace detail {

// One-sided slopes of g about zero must approach each other as h shrinks:
// a persistent or growing gap is a first-derivative kink (|x-theta|^alpha
// with alpha <= 1 perturbed in theta at x = theta).
template <typename G>
inline bool fd_first_derivative_ok(G&& g, double h) {
    const auto mismatch = [&](double step) {
        const double fwd = (g(step) - g(0.0)) / step;
        const double bwd = (g(0.0) - g(-step)) / step;
        return std::fabs(fwd - bwd);
    };
    const double m1 = mismatch(h), m2 = mismatch(0.5 * h);
    const double slope_scale = std::fabs((g(h) - g(-h)) / (2.0 * h)) + 1.0;
    return !(m2 > 0.9 * m1 && m2 > 1e-7 * slope_scale);
}

// Central second/third differences must stay finite and stop growing as h
// halves; used away from the branch point, where log f is smooth in the
// parameters whenever the first derivatives exist.
template <typename G>
inline bool fd_higher_derivatives_ok(G&& g, double h) {
    const auto second = [&](double step) {
        return (g(step) - 2.0 * g(0.0) + g(-step)) / (step * step);
    };
    const auto third = [&](double step) {
        return (g(2.0 * step) - 2.0 * g(step) + 2.0 * g(-step) - g(-2.0 * step))
             / (2.0 * step * step * step);
    };
    for (auto&& diff :
         {std::function<double(double)>(second), std::function<double(double)>(third)}) {
        const double d1 = diff(h), d2 = diff(0.5 * h);
        if (!std::isfinite(d2)) return false;
        if (std::fabs(d2) > 1.3 * std::fabs(d1) && std::fabs(d2) > 10.0) return false;
    }
    return true;
}

} // namespace detail

inline RegularityReport regularity_check(const Distribution& d) {
    RegularityReport r;

    // (iv): probe log f derivatives in each parameter at five points. At the
    // branch point x = theta only the first derivative is tested (a kink
    // there is what breaks the score, as for alpha <= 1); away from it the
    // second and third differences must be stable as well.
    const std::array<double, 5> probes{d.theta, d.theta - 0.5 * d.sigma, d.theta + 0.5 * d.sigma,
                                       d.theta - 2.0 * d.sigma, d.theta + 2.0 * d.sigma};
    bool iv_ok = true;
    std::string iv_note;
    for (double x : probes) {
        const auto with_theta = [&](double h) {
            Distribution p = d;
            p.theta += h;
            return log_density(p, x);
        };
        const auto with_sigma = [&](double h) {
            Distribution p = d;
            p.sigma += h;
            return log_density(p, x);
        };
        const auto with_eps = [&](double h) {
            Distribution p = d;
            p.eps += h;
            return log_density(p, x);
        };
        const double hx = 1e-2 * d.sigma;
        const double he = 1e-2 * (1.0 - std::fabs(d.eps));
        bool ok = detail::fd_first_derivative_ok(with_theta, hx)
               && detail::fd_first_derivative_ok(with_sigma, hx)
               && detail::fd_first_derivative_ok(with_eps, he);
        if (ok && x != d.theta)
            ok = detail::fd_higher_derivatives_ok(with_theta, hx)
              && detail::fd_higher_derivatives_ok(with_sigma, hx)
              && detail::fd_higher_derivatives_ok(with_eps, he);
        if (!ok) {
            iv_ok = false;
            iv_note = "derivative failure at probe x = " + std::to_string(x);
            break;
        }
    }
    r.iv = {iv_ok, iv_ok ? "finite-difference derivatives stable at all probes" : iv_note};

    // (v): quadrature of each score component against the density
    bool v_ok = true;
    for (int i = 0; i < 3; ++i) {
        r.score_means[static_cast<std::size_t>(i)] = integrate_split(
            [&](double x) {
                return score_vector_information_coords(d, x)[static_cast<std::size_t>(i)]
                     * density(d, x);
            },
            d.theta);
        if (std::fabs(r.score_means[static_cast<std::size_t>(i)]) > 1e-6) v_ok = false;
    }
    r.v = {v_ok, "score means " + std::to_string(r.score_means[0]) + ", "
                     + std::to_string(r.score_means[1]) + ", " + std::to_string(r.score_means[2])};

    // (vi): determinant of the per-observation information
    if (d.family == Family::esep && !(d.alpha > 1.0)) {
        r.vi = {false, "information matrix undefined for alpha <= 1"};
        r.fisher_det = std::numeric_limits<double>::quiet_NaN();
    } else {
        const InfoMatrices info =
            d.family == Family::est ? fisher_info_est(d, 1.0) : fisher_info_esep(d, 1.0);
        r.fisher_det = info.det;
        const bool ok = std::isfinite(info.det) && info.det > 0.0;
        r.vi = {ok, "det = " + std::to_string(info.det)};
    }

    // (vii): absolute moments up to order 4
    bool vii_ok = true;
    std::string missing;
    for (int k = 1; k <= 4; ++k) {
        const bool ok = moment_exists(d, k);
        r.moment_ok[static_cast<std::size_t>(k - 1)] = ok;
        r.moments[static_cast<std::size_t>(k - 1)] =
            ok ? absolute_moment(d, k) : std::numeric_limits<double>::quiet_NaN();
        if (!ok) {
            vii_ok = false;
            missing += (missing.empty() ? "r = " : ", ") + std::to_string(k);
        }
    }
    r.vii = {vii_ok, vii_ok ? "E|X-theta|^r finite for r <= 4" : "moment missing for " + missing};

    return r;
}

/// Plug-in Cramer-Rao bound at the fitted estimates: per-observation
/// information at the estimates, restricted to the free parameters of the
/// fit, inverted and scaled by 1/n. Frozen parameters get zero rows/columns.
inline Mat3 cramer_rao_report(const FitResult& fit) {
    if (!fit.converged) throw parameter_error("cramer_rao_report requires a converged fit");
    const Distribution d = fit.distribution();
    const Mat3 per_obs = d.family == Family::est ? fisher_info_est(d, 1.0).fisher
                                                 : fisher_info_esep(d, 1.0).fisher;
    const std::array<bool, 3> free_mask{!fit.config.freeze_theta, !fit.config.freeze_sigma,
                                        !fit.config.freeze_eps};
    std::vector<int> idx;
    for (int i = 0; i < 3; ++i)
        if (free_mask[static_cast<std::size_t>(i)]) idx.push_back(i);
    Mat3 out;
    const double n = static_cast<double>(fit.n);
    if (idx.size() == 3) {
        out = per_obs.inverse().scaled(1.0 / n);
    } else if (idx.size() == 2) {
        const double a = per_obs(idx[0], idx[0]), b = per_obs(idx[0], idx[1]),
                     c = per_obs(idx[1], idx[1]);
        const double det = a * c - b * b;
        if (!(std::fabs(det) > 0.0)) throw numeric_error("singular information block");
        out(idx[0], idx[0]) = c / (det * n);
        out(idx[1], idx[1]) = a / (det * n);
        out(idx[0], idx[1]) = out(idx[1], idx[0]) = -b / (det * n);
    } else if (idx.size() == 1) {
        out(idx[0], idx[0]) = 1.0 / (per_obs(idx[0], idx[0]) * n);
    } else {
        throw parameter_error("all parameters frozen: nothing to report");
    }
    return out.symmetrized();
}

} // namespace skewpower
