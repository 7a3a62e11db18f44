#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "skewpower/distribution.hpp"

namespace skewpower {

/// Upper tail of the asymptotic Kolmogorov distribution,
/// Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2), truncated at 1e-12 terms.
inline double kolmogorov_tail(double t) {
    if (!(t > 0.0)) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100000; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double stat = 0.0;
    double pvalue = 1.0;
};

/// One-sample Kolmogorov-Smirnov statistic against a fitted member, with the
/// asymptotic p-value at sqrt(n) * stat. Parameters estimated from the same
/// data are plugged in without a Lilliefors correction.
inline KsResult ks_test(std::span<const double> data, const Distribution& d) {
    if (data.empty()) throw data_error("ks_test requires nonempty data");
    std::vector<double> sorted(data.begin(), data.end());
    for (double x : sorted)
        if (!std::isfinite(x)) throw data_error("ks_test requires finite data");
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(d, sorted[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        stat = std::max({stat, hi, lo});
    }
    return {stat, kolmogorov_tail(std::sqrt(n) * stat)};
}

inline KsResult ks_test(const std::vector<double>& data, const Distribution& d) {
    return ks_test(std::span<const double>(data), d);
}

struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
};

inline InformationCriteria information_criteria(double loglik, std::size_t n, int k_free) {
    if (n < 1) throw parameter_error("information criteria require n >= 1");
    if (k_free < 1) throw parameter_error("information criteria require k >= 1");
    const double k = static_cast<double>(k_free);
    return {2.0 * k - 2.0 * loglik, k * std::log(static_cast<double>(n)) - 2.0 * loglik};
}

struct GofReport {
    double ks_stat = 0.0;
    double ks_pvalue = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n = 0;
    int k_free = 0;
};

inline GofReport make_gof_report(std::span<const double> data, const Distribution& d, int k_free) {
    const KsResult ks = ks_test(data, d);
    const double ll = log_likelihood(d, data);
    const InformationCriteria ic = information_criteria(ll, data.size(), k_free);
    return {ks.stat, ks.pvalue, ic.aic, ic.bic, data.size(), k_free};
}

/// Rows (x_(i), F_emp(x_(i)), F_fit(x_(i))...) for external CDF-overlay plots.
/// F_emp is the right-continuous value i/n; tied observations share the value
/// at the last tied index.
struct OverlayTable {
    std::vector<std::string> model_names;
    std::vector<double> x;
    std::vector<double> f_emp;
    std::vector<std::vector<double>> fitted; // one column per model
};

inline OverlayTable cdf_overlay_table(std::span<const double> data,
                                      const std::vector<Distribution>& fits,
                                      std::vector<std::string> names = {}) {
    if (data.empty()) throw data_error("overlay table requires nonempty data");
    OverlayTable t;
    if (names.empty())
        for (const auto& d : fits) names.emplace_back(family_name(d.family));
    t.model_names = std::move(names);
    t.x.assign(data.begin(), data.end());
    std::sort(t.x.begin(), t.x.end());
    const double n = static_cast<double>(t.x.size());
    t.f_emp.resize(t.x.size());
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        std::size_t j = i;
        while (j + 1 < t.x.size() && t.x[j + 1] == t.x[i]) ++j;
        t.f_emp[i] = (static_cast<double>(j) + 1.0) / n;
    }
    t.fitted.resize(fits.size());
    for (std::size_t m = 0; m < fits.size(); ++m) {
        t.fitted[m].reserve(t.x.size());
        for (double xi : t.x) t.fitted[m].push_back(cdf(fits[m], xi));
    }
    return t;
}

} // namespace skewpower
