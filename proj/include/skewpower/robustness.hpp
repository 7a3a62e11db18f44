#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "skewpower/asymptotics.hpp"
#include "skewpower/distribution.hpp"
#include "skewpower/mat3.hpp"
#include "skewpower/quadrature.hpp"
#include "skewpower/scores.hpp"

namespace skewpower {

namespace detail {

// Upper triangle of the log-density Hessian in the family's information
// coordinates: (theta, sigma, eps) for esep, (theta, sigma^2, eps) for est.
// Entries: (0)tt (1)ts (2)te (3)ss (4)se (5)ee.
inline std::array<double, 6> log_density_hessian(const Distribution& d, double x) {
    const double s = branch_sign(x - d.theta);
    const double side = 1.0 - s * d.eps;
    std::array<double, 6> h{};
    if (d.family == Family::esep) {
        const double a = d.alpha;
        const double sg = d.sigma;
        const double t = std::fabs(x - d.theta) / (kSqrt2 * side * sg);
        const double T = std::pow(t, a);
        const double t1 = std::pow(t, a - 1.0);
        const double t2 = std::pow(t, a - 2.0);
        h[0] = -a * (a - 1.0) * t2 / (2.0 * side * side * sg * sg);
        h[1] = -a * a * s * t1 / (kSqrt2 * side * sg * sg);
        h[2] = a * a * t1 / (kSqrt2 * sg * side * side);
        h[3] = 1.0 / (sg * sg) - a * (a + 1.0) * T / (sg * sg);
        h[4] = a * a * T * s / (side * sg);
        h[5] = -a * (a + 1.0) * T / (side * side);
        return h;
    }
    if (d.family == Family::est) {
        const double nu = d.nu;
        const double u = d.sigma * d.sigma;
        const double r = x - d.theta;
        const double big_d = nu * u * side * side + r * r;
        const double d2 = big_d * big_d;
        h[0] = (nu + 1.0) * (2.0 * r * r - big_d) / d2;
        h[1] = -(nu + 1.0) * r * nu * side * side / d2;
        h[2] = 2.0 * s * nu * u * side * (nu + 1.0) * r / d2;
        h[3] = 0.5 / (u * u)
             - 0.5 * (nu + 1.0) * r * r * (big_d + u * nu * side * side) / (u * u * d2);
        h[4] = s * (nu + 1.0) * r * r * nu * side / d2;
        h[5] = -(nu + 1.0) * r * r * (2.0 * nu * u * side * side + big_d) / (d2 * side * side);
        return h;
    }
    throw parameter_error("hessian defined for the esep and est families");
}

} // namespace detail

/// M(psi, F) = -E[score Jacobian], computed by adaptive quadrature on the two
/// half-lines split at theta. Equals the per-observation Fisher information
/// at the true parameters (the identity is exercised by the test suite via an
/// independent route). For the est family the scale coordinate is sigma^2,
/// matching that family's information matrix and covariance tables. The
/// esep entries exist classically only for alpha > 1.
inline Mat3 m_matrix(const Distribution& d) {
    if (d.family == Family::esep && !(d.alpha > 1.0))
        throw regularity_error("the esep M-matrix requires alpha > 1");
    static constexpr int kIdx[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    Mat3 m;
    for (int e = 0; e < 6; ++e) {
        const double v = -integrate_split(
            [&](double x) { return detail::log_density_hessian(d, x)[e] * density(d, x); },
            d.theta);
        m(kIdx[e][0], kIdx[e][1]) = v;
        m(kIdx[e][1], kIdx[e][0]) = v;
    }
    // conjugate by diag(1, 1, -1): the printed eps-score is the eps-derivative
    // of -log f, so the cross entries flip sign relative to the raw hessian
    m(0, 2) = -m(0, 2);
    m(2, 0) = -m(2, 0);
    m(1, 2) = -m(1, 2);
    m(2, 1) = -m(2, 1);
    return m;
}

/// IF(x) = M^{-1} Psi(x), with an optional mask restricting to a free block
/// (frozen parameters get zero influence rows).
struct InfluenceOperator {
    Distribution dist;
    Mat3 m_inverse;
    std::array<bool, 3> free_mask{true, true, true};

    Vec3 operator()(double x) const {
        const auto raw = score_vector_information_coords(dist, x);
        Vec3 psi;
        for (int i = 0; i < 3; ++i) psi[i] = free_mask[i] ? raw[static_cast<std::size_t>(i)] : 0.0;
        return m_inverse * psi;
    }
};

inline InfluenceOperator make_influence(const Distribution& d,
                                        std::array<bool, 3> free_mask = {true, true, true}) {
    const Mat3 m = m_matrix(d);
    int nfree = 0;
    for (bool b : free_mask) nfree += b;
    if (nfree == 3) return {d, m.inverse(), free_mask};
    // invert the free block only and scatter back
    Mat3 inv;
    std::vector<int> idx;
    for (int i = 0; i < 3; ++i)
        if (free_mask[i]) idx.push_back(i);
    if (idx.size() == 1) {
        inv(idx[0], idx[0]) = 1.0 / m(idx[0], idx[0]);
    } else if (idx.size() == 2) {
        const double a = m(idx[0], idx[0]), b = m(idx[0], idx[1]), c = m(idx[1], idx[1]);
        const double det = a * c - b * b;
        if (!(std::fabs(det) > 0.0)) throw numeric_error("singular free block");
        inv(idx[0], idx[0]) = c / det;
        inv(idx[1], idx[1]) = a / det;
        inv(idx[0], idx[1]) = inv(idx[1], idx[0]) = -b / det;
    } else {
        throw parameter_error("at least one parameter must be free");
    }
    return {d, inv, free_mask};
}

inline Vec3 influence_function(const Distribution& d, double x) {
    return make_influence(d)(x);
}

// ---------------------------------------------------------------------------
// Gross-error sensitivity and information-standardized sensitivity.

struct SensitivityValue {
    bool divergent = false;
    double value = 0.0;  // sup when finite
    double argmax = 0.0; // x attaining the sup when finite
};

namespace detail {

template <typename Norm>
SensitivityValue sup_over_grid(const Distribution& d, Norm&& norm) {
    // symmetric log-spaced grid of 2001 points spanning theta +- 1e6 sigma,
    // then three decade extensions; >5% sup growth at every extension flags
    // divergence, otherwise golden-section refines around the grid argmax
    std::vector<double> xs;
    xs.reserve(2001 + 3 * 240);
    xs.push_back(d.theta);
    const int per_side = 1000;
    for (int i = 0; i < per_side; ++i) {
        const double r = d.sigma * std::pow(10.0, -6.0 + 12.0 * i / (per_side - 1.0));
        xs.push_back(d.theta + r);
        xs.push_back(d.theta - r);
    }
    double sup = 0.0, arg = d.theta;
    const auto scan = [&](const std::vector<double>& pts) {
        for (double x : pts) {
            const double v = norm(x);
            if (v > sup) {
                sup = v;
                arg = x;
            }
        }
    };
    scan(xs);
    bool always_grows = true;
    for (int ext = 0; ext < 3; ++ext) {
        const double prev = sup;
        std::vector<double> more;
        for (int i = 1; i <= 120; ++i) {
            const double r = d.sigma * std::pow(10.0, 6.0 + ext + i / 120.0);
            more.push_back(d.theta + r);
            more.push_back(d.theta - r);
        }
        scan(more);
        if (!(sup > 1.05 * prev)) always_grows = false;
    }
    if (always_grows) return {true, std::numeric_limits<double>::infinity(), 0.0};

    // refine within the argmax neighborhood
    double lo = arg - std::fabs(arg - d.theta) * 0.5 - 1e-3 * d.sigma;
    double hi = arg + std::fabs(arg - d.theta) * 0.5 + 1e-3 * d.sigma;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = norm(x1), f2 = norm(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::fabs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = norm(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = norm(x1);
        }
    }
    const double refined = norm(0.5 * (a + b));
    if (refined > sup) {
        sup = refined;
        arg = 0.5 * (a + b);
    }
    return {false, sup, arg};
}

inline bool unbounded_scores_without_m(const Distribution& d) {
    // esep with alpha <= 1: the classical M-matrix is undefined while the
    // sigma/eps scores diverge, so the sensitivity verdict is divergent
    return d.family == Family::esep && !(d.alpha > 1.0);
}

} // namespace detail

/// sup_x || IF(x) ||.
inline SensitivityValue gross_error_sensitivity(const Distribution& d) {
    if (detail::unbounded_scores_without_m(d))
        return {true, std::numeric_limits<double>::infinity(), 0.0};
    const InfluenceOperator op = make_influence(d);
    return detail::sup_over_grid(d, [&](double x) { return op(x).norm(); });
}

/// sup_x sqrt(IF(x)^T I IF(x)) with I the per-observation Fisher information.
inline SensitivityValue iss(const Distribution& d) {
    if (detail::unbounded_scores_without_m(d))
        return {true, std::numeric_limits<double>::infinity(), 0.0};
    const InfluenceOperator op = make_influence(d);
    const Mat3 info = d.family == Family::est
                          ? fisher_info_est(d, 1.0).fisher
                          : fisher_info_esep(d, 1.0).fisher;
    return detail::sup_over_grid(d, [&](double x) {
        const Vec3 f = op(x);
        return std::sqrt(std::max(0.0, quadratic_form(f, info)));
    });
}

// ---------------------------------------------------------------------------
// Redescending classification and breakdown point.

struct RedescendingReport {
    bool redescending = false;
    std::array<bool, 4> conditions{};
    int failed_condition = 0;      // 1-based index of the first failure, 0 if none
    double x0_plus = 0.0;          // turning points of psi_theta (standardized)
    double x0_minus = 0.0;
    double rho_tail_slope = 0.0;   // lim rho(x)/|x| (condition 3 evidence)
};

/// Four-condition check on the location objective rho = -log f (normalized to
/// rho(0) = 0): rho(0)=0, rho -> inf, rho/|x| -> 0, and psi_theta rising then
/// falling about an interior turning point. The est family passes with roots
/// sqrt(nu)(1-eps) and -sqrt(nu)(1+eps); esep never does (its psi_theta is
/// monotone away from zero), failing condition 3 for alpha >= 1 and
/// condition 4 below that.
inline RedescendingReport redescending_check(const Distribution& d) {
    RedescendingReport r;
    if (d.family == Family::esep) {
        const double a = d.alpha;
        r.conditions[0] = true;
        r.conditions[1] = true;
        if (a < 1.0) {
            r.rho_tail_slope = 0.0;
            r.conditions[2] = true;
        } else if (a == 1.0) {
            r.rho_tail_slope = 1.0 / (detail::kSqrt2 * (1.0 - d.eps));
            r.conditions[2] = false;
        } else {
            r.rho_tail_slope = std::numeric_limits<double>::infinity();
            r.conditions[2] = false;
        }
        r.conditions[3] = false; // psi' root sits at zero only
        r.failed_condition = r.conditions[2] ? 4 : 3;
        return r;
    }
    if (d.family == Family::est) {
        r.conditions = {true, true, true, true};
        r.redescending = true;
        r.rho_tail_slope = 0.0;
        r.x0_plus = std::sqrt(d.nu) * (1.0 - d.eps);
        r.x0_minus = -std::sqrt(d.nu) * (1.0 + d.eps);
        return r;
    }
    throw parameter_error("redescending check is defined for the esep and est families");
}

enum class Breakdown { half, not_established };

inline Breakdown breakdown_point(const Distribution& d) {
    if (d.family == Family::esep) return d.alpha <= 1.0 ? Breakdown::half : Breakdown::not_established;
    if (d.family == Family::est) return Breakdown::half;
    throw parameter_error("breakdown verdicts are defined for the esep and est families");
}

// ---------------------------------------------------------------------------

struct SensitivityReport {
    Distribution dist;
    ScoreLimits analytic_limits;
    ScoreLimits numeric_limits;
    bool limits_agree = false;
    SensitivityValue ges;
    SensitivityValue iss_value;
    RedescendingReport redescending;
    Breakdown breakdown = Breakdown::not_established;
};

inline SensitivityReport build_sensitivity_report(const Distribution& d) {
    SensitivityReport r{d,
                        score_limit_classification(d),
                        numeric_score_limits(d),
                        false,
                        gross_error_sensitivity(d),
                        iss(d),
                        redescending_check(d),
                        breakdown_point(d)};
    r.limits_agree = limits_agree(r.analytic_limits, r.numeric_limits);
    return r;
}

} // namespace skewpower
