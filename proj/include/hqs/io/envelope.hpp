/*
   Copyright 2026 The hqs Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <hqs/io/config.hpp>
#include <hqs/network.hpp>
#include <hqs/statistics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace hqs::io {

/// Multiple of the binomial sigma that an empirical frequency may deviate by.
inline constexpr double kPassSigmas = 4.0;

/// Slack for rounding in analytic values (echo 1 + 4e-16 against a frequency of 1).
inline constexpr double kPassSlack = 1e-9;

/**
 * Result of one run. JSON layout (keys sorted):
 *   analytic:     {table: {label: p} | null, summary: {...}}
 *   empirical:    null | {counts: {label: n} | null, frequencies: {...} | null, summary: {...}}
 *   pass:         null | {label: bool}
 *   sigma_bounds: null | {label: 4 sigma}
 *   spec:         the resolved RunSpec
 *   wall_time_ms: only when timing was requested
 */
struct ResultEnvelope {
    RunSpec spec;
    std::vector<std::string> labels; ///< table labels in absorber order
    json analytic_table = nullptr;
    json analytic_summary = json::object();
    bool has_empirical = false;
    json counts = nullptr;
    json frequencies = nullptr;
    json empirical_summary = json::object();
    json sigma_bounds = nullptr;
    json pass = nullptr;
    std::optional<double> wall_time_ms;

    void set_analytic(EchoTable const& table)
    {
        labels.clear();
        analytic_table = json::object();
        for (auto const& e : table.entries) {
            labels.push_back(e.absorber);
            analytic_table[e.absorber] = e.echo;
        }
    }

    /// Empirical counts aligned with the analytic table rows; fills
    /// frequencies, 4-sigma bounds and the pass flags.
    void set_counts(EchoTable const& table, std::span<std::uint64_t const> row_counts, std::uint64_t n)
    {
        has_empirical = true;
        counts = json::object();
        frequencies = json::object();
        for (std::size_t i = 0; i < table.entries.size(); ++i) {
            auto const& label = table.entries[i].absorber;
            double const p = table.entries[i].echo;
            double const freq = static_cast<double>(row_counts[i]) / static_cast<double>(n);
            counts[label] = row_counts[i];
            frequencies[label] = freq;
            add_check(label, freq, p, kPassSigmas * stats::binomial_sigma(std::clamp(p, 0.0, 1.0), n));
        }
    }

    /// Records |observed - expected| <= bound (+ kPassSlack) under `label`.
    void add_check(std::string const& label, double observed, double expected, double bound)
    {
        has_empirical = true;
        if (sigma_bounds.is_null()) {
            sigma_bounds = json::object();
            pass = json::object();
        }
        sigma_bounds[label] = bound;
        pass[label] = std::abs(observed - expected) <= bound + kPassSlack;
    }

    [[nodiscard]] bool all_pass() const
    {
        if (!pass.is_object()) {
            return true;
        }
        for (auto const& [k, v] : pass.items()) {
            if (!v.get<bool>()) {
                return false;
            }
        }
        return true;
    }
};

inline json to_json(ResultEnvelope const& env)
{
    json j;
    j["spec"] = to_json(env.spec);
    j["analytic"] = json{{"table", env.analytic_table}, {"summary", env.analytic_summary}};
    if (env.has_empirical) {
        j["empirical"] = json{{"counts", env.counts},
                              {"frequencies", env.frequencies},
                              {"summary", env.empirical_summary}};
    } else {
        j["empirical"] = nullptr;
    }
    j["sigma_bounds"] = env.sigma_bounds;
    j["pass"] = env.pass;
    if (env.wall_time_ms) {
        j["wall_time_ms"] = *env.wall_time_ms;
    }
    return j;
}

namespace detail {

inline std::string csv_cell(json const& v)
{
    if (v.is_null()) {
        return {};
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    auto s = v.dump();
    if (v.is_structured()) {
        std::string quoted = "\"";
        for (char c : s) {
            quoted += c;
            if (c == '"') {
                quoted += '"';
            }
        }
        return quoted + "\"";
    }
    return s;
}

inline json lookup(json const& obj, std::string const& key)
{
    return obj.is_object() && obj.contains(key) ? obj[key] : json(nullptr);
}

} // namespace detail

inline constexpr std::string_view kRunCsvHeader = "label,analytic,count,frequency,sigma_bound,pass";

/**
 * JSON: the envelope, two-space indented, sorted keys, trailing newline.
 * CSV: kRunCsvHeader, one row per table label in absorber order, then one
 * row per summary key labelled "summary.<key>" (analytic and empirical
 * values in the analytic/frequency columns).
 */
inline std::string emit_results(ResultEnvelope const& env, OutputFormat format)
{
    if (format == OutputFormat::json) {
        return to_json(env).dump(2) + "\n";
    }
    std::ostringstream os;
    os << kRunCsvHeader << '\n';
    for (auto const& label : env.labels) {
        os << label << ',' << detail::csv_cell(detail::lookup(env.analytic_table, label)) << ','
           << detail::csv_cell(detail::lookup(env.counts, label)) << ','
           << detail::csv_cell(detail::lookup(env.frequencies, label)) << ','
           << detail::csv_cell(detail::lookup(env.sigma_bounds, label)) << ','
           << detail::csv_cell(detail::lookup(env.pass, label)) << '\n';
    }
    std::vector<std::string> keys;
    for (auto const& [k, v] : env.analytic_summary.items()) {
        keys.push_back(k);
    }
    for (auto const& [k, v] : env.empirical_summary.items()) {
        if (!env.analytic_summary.contains(k)) {
            keys.push_back(k);
        }
    }
    std::sort(keys.begin(), keys.end());
    for (auto const& k : keys) {
        os << "summary." << k << ',' << detail::csv_cell(detail::lookup(env.analytic_summary, k)) << ",,"
           << detail::csv_cell(detail::lookup(env.empirical_summary, k)) << ','
           << detail::csv_cell(detail::lookup(env.sigma_bounds, "summary." + k)) << ','
           << detail::csv_cell(detail::lookup(env.pass, "summary." + k)) << '\n';
    }
    return os.str();
}

} // namespace hqs::io
