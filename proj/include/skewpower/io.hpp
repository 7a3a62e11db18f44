#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skewpower/asymptotics.hpp"
#include "skewpower/estimation.hpp"
#include "skewpower/gof.hpp"
#include "skewpower/robustness.hpp"
#include "skewpower/simulation.hpp"

namespace skewpower {

inline bool parse_double(std::string_view token, double& out) {
    // trim spaces, quotes and a trailing CR
    while (!token.empty() && (token.front() == ' ' || token.front() == '"' || token.front() == '\t'))
        token.remove_prefix(1);
    while (!token.empty()
           && (token.back() == ' ' || token.back() == '"' || token.back() == '\r'
               || token.back() == '\t'))
        token.remove_suffix(1);
    if (token.empty()) return false;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

/// First column of a CSV file as numbers. A non-numeric first token makes the
/// first line a header; any later non-numeric or non-finite row is an error
/// naming the line.
inline std::vector<double> read_csv_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file: " + path);
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string token = line.substr(0, line.find(','));
        double v = 0.0;
        if (!parse_double(token, v)) {
            if (lineno == 1) continue; // header
            if (token.find_first_not_of(" \t\r") == std::string::npos) continue; // blank line
            throw data_error("non-numeric value in " + path + " at line "
                             + std::to_string(lineno));
        }
        if (!std::isfinite(v))
            throw data_error("non-finite value in " + path + " at line " + std::to_string(lineno));
        values.push_back(v);
    }
    return values;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv_column(std::ostream& out, const std::vector<double>& values,
                             const std::string& header = "x") {
    out << header << "\n";
    for (double v : values) out << format_double(v) << "\n";
}

inline void write_overlay_csv(std::ostream& out, const OverlayTable& t) {
    out << "x,f_emp";
    for (const auto& name : t.model_names) out << "," << name;
    out << "\n";
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        out << format_double(t.x[i]) << "," << format_double(t.f_emp[i]);
        for (const auto& col : t.fitted) out << "," << format_double(col[i]);
        out << "\n";
    }
}

/// Per-parameter rows in the layout of the recovery tables: the estimate,
/// its variance and MSE for every sample size of the plan.
inline void write_simulation_csv(std::ostream& out, const std::vector<CellResult>& cells) {
    out << "case,eps0,param,truth";
    for (const auto& c : cells) {
        const int n = c.summary.n;
        out << ",mean_n" << n << ",var_n" << n << ",mse_n" << n;
        if (c.mse_ratio) out << ",mse_over_avar_n" << n;
    }
    out << "\n";
    const char* names[3] = {"theta", "sigma", "eps"};
    for (int p = 0; p < 3; ++p) {
        const auto& first = cells.front().summary;
        const ParamStats& fs = p == 0 ? first.theta : (p == 1 ? first.sigma : first.eps);
        out << sim_case_name(first.sim_case) << "," << format_double(first.eps0) << "," << names[p]
            << "," << format_double(fs.truth);
        for (const auto& c : cells) {
            const ParamStats& s =
                p == 0 ? c.summary.theta : (p == 1 ? c.summary.sigma : c.summary.eps);
            out << "," << format_double(s.mean) << "," << format_double(s.var) << ","
                << format_double(s.mse);
            if (c.mse_ratio) out << "," << format_double((*c.mse_ratio)[static_cast<std::size_t>(p)]);
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// JSON serialization (nlohmann). Keys are stable; round-tripping the emitted
// documents is idempotent.

inline nlohmann::json to_json(const Mat3& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i)
        rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
}

inline nlohmann::json to_json(const Distribution& d) {
    nlohmann::json j{{"family", family_name(d.family)},
                     {"theta", d.theta},
                     {"sigma", d.sigma},
                     {"eps", d.eps}};
    if (d.family == Family::esep || d.family == Family::esgt) j["alpha"] = d.alpha;
    if (d.family == Family::esgt) j["q"] = d.q;
    if (d.family == Family::est) j["nu"] = d.nu;
    return j;
}

inline nlohmann::json to_json(const FitResult& r) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : r.trace)
        trace.push_back({{"theta", t.theta}, {"sigma", t.sigma}, {"eps", t.eps},
                         {"loglik", t.loglik}});
    return {{"family", family_name(r.model.family)},
            {"shape", r.model.shape},
            {"theta", r.estimates.theta},
            {"sigma", r.estimates.sigma},
            {"sigma2", r.estimates.sigma * r.estimates.sigma},
            {"eps", r.estimates.eps},
            {"n", r.n},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"loglik", r.loglik},
            {"trace", trace}};
}

inline nlohmann::json to_json(const GofReport& g) {
    return {{"ks_stat", g.ks_stat}, {"ks_pvalue", g.ks_pvalue}, {"aic", g.aic},
            {"bic", g.bic},         {"n", g.n},                 {"k_free", g.k_free}};
}

inline nlohmann::json to_json(const InfoMatrices& m) {
    return {{"fisher", to_json(m.fisher)}, {"acov", to_json(m.acov)}, {"det", m.det}, {"n", m.n}};
}

inline nlohmann::json to_json(const LimitVerdict& v) {
    if (v.divergent) return {{"verdict", "divergent"}};
    return {{"verdict", "finite"}, {"value", v.value}};
}

inline nlohmann::json to_json(const SensitivityValue& v) {
    if (v.divergent) return {{"verdict", "divergent"}};
    return {{"verdict", "finite"}, {"value", v.value}, {"argmax", v.argmax}};
}

inline nlohmann::json to_json(const SensitivityReport& r) {
    nlohmann::json j;
    j["distribution"] = to_json(r.dist);
    j["score_limits"] = {{"theta", to_json(r.analytic_limits.theta)},
                         {"sigma", to_json(r.analytic_limits.sigma)},
                         {"eps", to_json(r.analytic_limits.eps)},
                         {"shape", to_json(r.analytic_limits.shape)}};
    j["score_limits_numeric_agree"] = r.limits_agree;
    j["ges"] = to_json(r.ges);
    j["iss"] = to_json(r.iss_value);
    if (r.redescending.redescending) {
        j["redescending"] = {{"verdict", "yes"},
                             {"x0_plus", r.redescending.x0_plus},
                             {"x0_minus", r.redescending.x0_minus}};
    } else {
        j["redescending"] = {{"verdict", "no"},
                             {"failed_condition", r.redescending.failed_condition}};
    }
    j["breakdown"] = r.breakdown == Breakdown::half ? "1/2" : "not_established";
    return j;
}

inline nlohmann::json to_json(const SimSummary& s) {
    const auto stats = [](const ParamStats& p) {
        return nlohmann::json{
            {"truth", p.truth}, {"mean", p.mean}, {"var", p.var}, {"mse", p.mse}};
    };
    return {{"case", sim_case_name(s.sim_case)},
            {"eps0", s.eps0},
            {"n", s.n},
            {"reps", s.reps},
            {"seed", s.seed},
            {"failures", s.failures},
            {"degraded", s.degraded},
            {"theta", stats(s.theta)},
            {"sigma", stats(s.sigma)},
            {"eps", stats(s.eps)}};
}

inline nlohmann::json to_json(const std::vector<CellResult>& cells) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cells) {
        nlohmann::json j{{"summary", to_json(c.summary)}};
        if (c.asym_var)
            j["asym_var"] = {{"theta", (*c.asym_var)[0]},
                             {"sigma", (*c.asym_var)[1]},
                             {"eps", (*c.asym_var)[2]}};
        if (c.mse_ratio)
            j["mse_over_avar"] = {{"theta", (*c.mse_ratio)[0]},
                                  {"sigma", (*c.mse_ratio)[1]},
                                  {"eps", (*c.mse_ratio)[2]}};
        arr.push_back(std::move(j));
    }
    return arr;
}

/// Upper-triangle text layout for covariance matrices.
inline std::string format_cov_matrix(const Mat3& c) {
    std::ostringstream out;
    out << "Cov(tau_hat) =\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  [ %15.12f  %15.12f  %15.12f ]\n", c(0, 0), c(0, 1), c(0, 2));
    out << buf;
    std::snprintf(buf, sizeof(buf), "  [ %17s%15.12f  %15.12f ]\n", "", c(1, 1), c(1, 2));
    out << buf;
    std::snprintf(buf, sizeof(buf), "  [ %34s%15.12f ]\n", "", c(2, 2));
    out << buf;
    return out.str();
}

} // namespace skewpower
