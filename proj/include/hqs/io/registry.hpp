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

#include <hqs/experiments/entangled.hpp>
#include <hqs/experiments/eraser.hpp>
#include <hqs/experiments/interferometers.hpp>
#include <hqs/experiments/two_slit.hpp>
#include <hqs/io/config.hpp>
#include <hqs/io/envelope.hpp>
#include <hqs/statistics.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hqs::io {

struct Experiment {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    std::function<ResultEnvelope(RunSpec const&)> run;

    [[nodiscard]] ParamSpec const* param(std::string_view key) const
    {
        for (auto const& p : params) {
            if (p.name == key) {
                return &p;
            }
        }
        return nullptr;
    }
};

namespace detail {

template <class T>
T get(RunSpec const& spec, char const* key)
{
    return spec.parameters.at(key).get<T>();
}

inline RunOptions bulk() { return RunOptions{false, 0}; }

inline void fill_run(ResultEnvelope& env, EventRun const& run)
{
    env.set_counts(run.table, run.counts, run.total());
}

inline ResultEnvelope table_experiment(RunSpec const& spec, EchoTable const& table)
{
    ResultEnvelope env;
    env.spec = spec;
    env.set_analytic(table);
    if (spec.events) {
        fill_run(env, sample_events(table, *spec.events, spec.seed, bulk()));
    }
    return env;
}

inline void add_chi_square(ResultEnvelope& env, EventRun const& run)
{
    std::vector<double> probs;
    for (auto const& e : run.table.entries) {
        probs.push_back(e.echo);
    }
    auto const chi = stats::chi_square_test(run.counts, probs);
    env.empirical_summary["chi_square"] = chi.statistic;
    env.empirical_summary["chi_square_dof"] = chi.dof;
    env.empirical_summary["chi_square_p"] = chi.p_value;
}

inline ResultEnvelope run_mz(RunSpec const& spec)
{
    return table_experiment(spec, experiments::mach_zehnder(get<bool>(spec, "blocked")));
}

inline ResultEnvelope run_ev(RunSpec const& spec)
{
    auto const a = experiments::ev_recursive_analytic();
    EchoTable table{{{"D2", a.detected}, {"Obj", a.absorbed}}};
    ResultEnvelope env;
    env.spec = spec;
    env.set_analytic(table);
    env.analytic_summary["mean_photons_per_trial"] = a.mean_photons;
    if (spec.events) {
        auto const r = experiments::ev_recursive(*spec.events, spec.seed);
        std::vector<std::uint64_t> const counts{r.detected, r.absorbed};
        env.set_counts(table, counts, r.trials);
        env.empirical_summary["mean_photons_per_trial"] = r.mean_photons();
        env.empirical_summary["photons"] = r.photons;
        // photons per trial is geometric with success probability 1/mean
        double const p = 1.0 / a.mean_photons;
        double const sigma = std::sqrt((1.0 - p) / (p * p) / static_cast<double>(r.trials));
        env.add_check("summary.mean_photons_per_trial", r.mean_photons(), a.mean_photons,
                      kPassSigmas * sigma);
    }
    return env;
}

inline ResultEnvelope run_bubble(RunSpec const& spec)
{
    auto const n_det = static_cast<std::size_t>(get<std::int64_t>(spec, "n_detectors"));
    auto const net = experiments::einstein_bubble_network(n_det);
    ResultEnvelope env;
    env.spec = spec;
    env.set_analytic(echo_table(net));
    if (spec.events) {
        auto const run = run_events(net, *spec.events, spec.seed, bulk());
        fill_run(env, run);
        add_chi_square(env, run);
    }
    return env;
}

inline experiments::TwoSlitConfig two_slit_config(RunSpec const& spec)
{
    experiments::TwoSlitConfig c;
    c.slit_separation = get<double>(spec, "slit_separation");
    c.screen_distance = get<double>(spec, "screen_distance");
    c.bins = static_cast<std::size_t>(get<std::int64_t>(spec, "bins"));
    c.half_width = get<double>(spec, "half_width");
    c.labeled = get<bool>(spec, "labeled");
    return c;
}

inline ResultEnvelope run_two_slit(RunSpec const& spec)
{
    auto const cfg = two_slit_config(spec);
    auto const profile = experiments::two_slit(cfg);
    auto const net = experiments::two_slit_network(cfg);
    ResultEnvelope env;
    env.spec = spec;
    env.set_analytic(echo_table(net));
    env.analytic_summary["visibility"] = profile.visibility;
    env.analytic_summary["fringe_maxima"] = profile.maxima;
    env.analytic_summary["fringe_minima"] = profile.minima;
    if (spec.events) {
        auto const run = run_events(net, *spec.events, spec.seed, bulk());
        fill_run(env, run);
        add_chi_square(env, run);
    }
    return env;
}

inline ResultEnvelope run_delayed_choice(RunSpec const& spec)
{
    bool const up = get<bool>(spec, "screen_up");
    auto const when = experiments::decision_time_from(get<std::string>(spec, "decision_time"));
    ResultEnvelope env;
    env.spec = spec;
    env.set_analytic(echo_table(experiments::delayed_choice_network(up)));
    if (up) {
        env.analytic_summary["visibility"] = experiments::two_slit({}).visibility;
    }
    if (spec.events) {
        auto const run = experiments::delayed_choice(up, when, *spec.events, spec.seed, bulk());
        fill_run(env, run);
    }
    return env;
}

inline ResultEnvelope run_afshar(RunSpec const& spec)
{
    auto const r = experiments::afshar(static_cast<std::size_t>(get<std::int64_t>(spec, "wire_count")),
                                       get<double>(spec, "wire_width"), get<bool>(spec, "both_slits"));
    ResultEnvelope env = table_experiment(
        spec, EchoTable{{{"wires", r.intercepted_fraction}, {"passed", 1.0 - r.intercepted_fraction}}});
    env.analytic_summary["intercepted_fraction"] = r.intercepted_fraction;
    env.analytic_summary["wire_centers"] = r.wire_centers;
    return env;
}

inline ResultEnvelope run_epr(RunSpec const& spec)
{
    double const left = get<double>(spec, "theta_left");
    double const right = get<double>(spec, "theta_right") + get<double>(spec, "delta");
    auto const table = experiments::epr_table(left, right);
    ResultEnvelope env = table_experiment(spec, table);
    auto const c = experiments::correlation(table);
    env.analytic_summary["p_same"] = c.p_same;
    env.analytic_summary["p_different"] = c.p_different;
    env.analytic_summary["E"] = c.E();
    if (spec.events) {
        double const n = static_cast<double>(*spec.events);
        auto const& counts = env.counts;
        double const same = (counts["HH"].get<double>() + counts["VV"].get<double>()) / n;
        double const diff = (counts["HV"].get<double>() + counts["VH"].get<double>()) / n;
        env.empirical_summary["p_same"] = same;
        env.empirical_summary["p_different"] = diff;
        env.empirical_summary["E"] = same - diff;
        env.add_check("summary.p_different", diff, c.p_different,
                      kPassSigmas * stats::binomial_sigma(c.p_different, *spec.events));
    }
    return env;
}

inline ResultEnvelope run_chsh(RunSpec const& spec)
{
    double const a = get<double>(spec, "a");
    double const ap = get<double>(spec, "a_prime");
    double const b = get<double>(spec, "b");
    double const bp = get<double>(spec, "b_prime");
    auto const an = experiments::chsh_analytic(a, ap, b, bp);
    ResultEnvelope env;
    env.spec = spec;
    env.analytic_summary["S"] = an.S;
    env.analytic_summary["E"] = an.E;
    if (spec.events) {
        auto const r = experiments::chsh(a, ap, b, bp, *spec.events, spec.seed);
        env.empirical_summary["S"] = r.S;
        env.empirical_summary["stderr"] = r.stderr_;
        env.empirical_summary["E"] = r.E;
        env.add_check("summary.S", r.S, an.S, kPassSigmas * r.stderr_);
    }
    return env;
}

inline ResultEnvelope run_hardy(RunSpec const& spec)
{
    auto const prep = experiments::atom_preparation_from(get<std::string>(spec, "atom"));
    auto const an = experiments::hardy_analytic(prep);
    ResultEnvelope env;
    env.spec = spec;
    env.set_analytic(an.outcomes);
    env.analytic_summary["absorbed"] = an.absorbed;
    env.analytic_summary["D1"] = an.d1;
    env.analytic_summary["D2"] = an.d2;
    env.analytic_summary["p_xminus_given_D1"] = an.p_xminus_given_d1;
    env.analytic_summary["p_xminus_given_D2"] = an.p_xminus_given_d2;
    if (spec.events) {
        auto const r = experiments::hardy(*spec.events, spec.seed, prep, bulk());
        fill_run(env, r.run);
        double const n = static_cast<double>(*spec.events);
        env.empirical_summary["absorbed"] = double(r.run.count("absorbed")) / n;
        env.empirical_summary["D1"] = double(r.d1_events()) / n;
        env.empirical_summary["D2"] = double(r.d2_events()) / n;
        env.empirical_summary["D2_events"] = r.d2_events();
        if (r.d2_events() > 0) {
            env.empirical_summary["p_xminus_given_D2"] = r.p_xminus_given_d2();
            env.add_check("summary.p_xminus_given_D2", r.p_xminus_given_d2(), an.p_xminus_given_d2,
                          kPassSigmas * stats::binomial_sigma(an.p_xminus_given_d2, r.d2_events()));
        }
    }
    return env;
}

inline ResultEnvelope run_eraser(RunSpec const& spec)
{
    experiments::EraserConfig const cfg{get<bool>(spec, "qwp_in"), get<bool>(spec, "eraser_filter_in"),
                                        get<bool>(spec, "delayed")};
    auto phases = get<std::vector<double>>(spec, "phases");
    if (phases.empty()) {
        phases = experiments::uniform_phase_scan(static_cast<std::size_t>(get<std::int64_t>(spec, "points")));
    }
    auto const r = experiments::eraser(cfg, phases, spec.events.value_or(0), spec.seed);
    ResultEnvelope env;
    env.spec = spec;
    env.analytic_summary["phases"] = r.phases;
    env.analytic_summary["rates"] = r.analytic_rates;
    env.analytic_summary["visibility"] = r.analytic_visibility;
    if (spec.events) {
        env.has_empirical = true;
        env.empirical_summary["counts"] = r.counts;
        env.empirical_summary["rates"] = r.empirical_rates;
        env.empirical_summary["visibility"] = *r.empirical_visibility;
        for (std::size_t k = 0; k < r.phases.size(); ++k) {
            env.add_check(screen_bin_id("rate", k, r.phases.size()), r.empirical_rates[k], r.analytic_rates[k],
                          kPassSigmas * stats::binomial_sigma(r.analytic_rates[k], *spec.events));
        }
    }
    return env;
}

inline ResultEnvelope run_network(RunSpec const& spec)
{
    auto const net = network_from_json(spec.parameters.at("network"));
    ResultEnvelope env;
    env.spec = spec;
    auto const report = validate(net);
    if (!report.ok()) {
        std::string msg = "network failed validation:";
        for (auto const& d : report.defects) {
            msg += " [" + d.message + "]";
        }
        throw ConfigError(msg);
    }
    env.set_analytic(echo_table(net));
    if (spec.events) {
        fill_run(env, run_events(net, *spec.events, spec.seed, bulk()));
    }
    return env;
}

} // namespace detail

/// All experiments addressable from the command line.
inline std::vector<Experiment> const& registry()
{
    using P = ParamType;
    static std::vector<Experiment> const experiments{
        {"mz", "Mach-Zehnder interferometer; blocked puts an absorbing object on arm A",
         {{"blocked", P::boolean, false, "object Obj blocks arm A"}}, detail::run_mz},
        {"ev_recursive",
         "interaction-free detection: repeat blocked-interferometer shots until D2 or Obj (n = trials)",
         {}, detail::run_ev},
        {"einstein_bubble", "isotropic single-photon emission toward a ring of equivalent detectors",
         {{"n_detectors", P::integer, 64, "number of detectors"}}, detail::run_bubble},
        {"two_slit", "two-slit screen pattern; labeled rotates slit 2 to H polarization",
         {{"slit_separation", P::real, 20.0, "slit separation d (wavelengths)"},
          {"screen_distance", P::real, 2000.0, "screen distance L (wavelengths)"},
          {"bins", P::integer, 201, "screen bins (odd)"},
          {"half_width", P::real, 150.0, "screen half width (wavelengths)"},
          {"labeled", P::boolean, false, "polarization-label the slits"}},
         detail::run_two_slit},
        {"delayed_choice", "two-slit screen up, or lens imaging each slit onto detector 1' / 2'",
         {{"screen_up", P::boolean, true, "screen sigma1 in place"},
          {"decision_time", P::text, "before_slits", "before_slits | after_slits (no effect)"}},
         detail::run_delayed_choice},
        {"afshar", "wires on the interference minima: fraction of light intercepted",
         {{"wire_count", P::integer, 10, "number of wires (one per fringe)"},
          {"wire_width", P::real, 0.06, "wire width in fringe periods"},
          {"both_slits", P::boolean, true, "two-slit fringes (false: uniform one-slit light)"}},
         detail::run_afshar},
        {"epr", "polarization-entangled pair (HH+VV)/sqrt2 with two linear analyzers",
         {{"theta_left", P::real, 0.0, "left analyzer angle (degrees)"},
          {"theta_right", P::real, 0.0, "right analyzer angle (degrees)"},
          {"delta", P::real, 0.0, "added to theta_right (degrees)"}},
         detail::run_epr},
        {"chsh", "CHSH combination S of four analyzer settings (n = events per setting)",
         {{"a", P::real, 0.0, "left setting a"},
          {"a_prime", P::real, 45.0, "left setting a'"},
          {"b", P::real, 22.5, "right setting b"},
          {"b_prime", P::real, 67.5, "right setting b'"}},
         detail::run_chsh},
        {"hardy", "interferometer with a spin-1/2 atom's z+ box in one arm; atom measured along X",
         {{"atom", P::text, "x+", "atom preparation: x+ | z+ | z-"}}, detail::run_hardy},
        {"eraser", "two production histories with optional QWP label and 45 degree eraser (n = events per point)",
         {{"qwp_in", P::boolean, false, "label the reflected history with a double-pass QWP"},
          {"eraser_filter_in", P::boolean, false, "45 degree polarizer before the idler detector"},
          {"delayed", P::boolean, false, "lengthen the idler path"},
          {"points", P::integer, 32, "uniform phase scan size when phases is empty"},
          {"phases", P::real_list, json::array(), "explicit pump phases (radians)"}},
         detail::run_eraser},
        {"network", "user-supplied optical network description",
         {{"network", P::network, nullptr, "network object {source, elements}"}}, detail::run_network},
    };
    return experiments;
}

inline Experiment const& find_experiment(std::string_view name)
{
    for (auto const& e : registry()) {
        if (e.name == name) {
            return e;
        }
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

/// Validates parameters against the experiment schema and fills defaults.
inline RunSpec resolve_spec(std::string const& experiment, json const& parameters,
                            std::optional<std::uint64_t> events, std::uint64_t seed,
                            OutputFormat format = OutputFormat::json,
                            std::optional<std::string> output_path = std::nullopt,
                            std::vector<std::size_t> const& network_offsets = {})
{
    auto const& exp = find_experiment(experiment);
    if (!parameters.is_object()) {
        throw ConfigError("\"parameters\" must be an object");
    }
    RunSpec spec{experiment, json::object(), events, seed, format, std::move(output_path)};
    for (auto const& [k, v] : parameters.items()) {
        auto const* p = exp.param(k);
        if (p == nullptr) {
            throw ConfigError("unknown parameter '" + k + "' for experiment '" + experiment + "'");
        }
        spec.parameters[k] = coerce(*p, v);
    }
    for (auto const& p : exp.params) {
        if (!spec.parameters.contains(p.name)) {
            if (p.default_value.is_null()) {
                throw ConfigError("missing parameter '" + p.name + "' for experiment '" + experiment + "'");
            }
            spec.parameters[p.name] = p.default_value;
        }
    }
    if (events && *events < 1) {
        throw ConfigError("events must be >= 1");
    }
    if (experiment == "network") {
        network_from_json(spec.parameters["network"], network_offsets);
    }
    return spec;
}

struct ParsedConfig {
    RunSpec spec;
    std::optional<OpticalNetwork> network; ///< set for network descriptions
};

/**
 * Accepts either a RunSpec object {"experiment", "parameters", "n", "seed",
 * "format", "output"} or a bare network description {"source", "elements"}
 * (which becomes experiment "network").
 */
inline ParsedConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (json::parse_error const& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what(), "", e.byte);
    }
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }

    if (doc.contains("elements")) {
        auto const offsets = array_item_offsets(text, {"elements"});
        auto net = network_from_json(doc, offsets);
        RunSpec spec{"network", json{{"network", doc}}, std::nullopt, 0, OutputFormat::json, std::nullopt};
        return {std::move(spec), std::move(net)};
    }

    for (auto const& [k, v] : doc.items()) {
        if (k != "experiment" && k != "parameters" && k != "n" && k != "seed" && k != "format" && k != "output") {
            throw ConfigError("unknown configuration field '" + k + "'");
        }
    }
    if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
        throw ConfigError("configuration needs a string \"experiment\"");
    }
    std::optional<std::uint64_t> events;
    if (doc.contains("n") && !doc["n"].is_null()) {
        if (!doc["n"].is_number_integer() || doc["n"].get<std::int64_t>() < 1) {
            throw ConfigError("\"n\" must be a positive integer");
        }
        events = doc["n"].get<std::uint64_t>();
    }
    std::uint64_t seed = 0;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) {
            throw ConfigError("\"seed\" must be an integer");
        }
        seed = doc["seed"].get<std::uint64_t>();
    }
    auto const format = output_format_from(doc.value("format", std::string("json")));
    std::optional<std::string> output;
    if (doc.contains("output") && !doc["output"].is_null()) {
        output = doc["output"].get<std::string>();
    }
    auto const offsets = array_item_offsets(text, {"parameters", "network", "elements"});
    auto spec = resolve_spec(doc["experiment"].get<std::string>(), doc.value("parameters", json::object()),
                             events, seed, format, output, offsets);
    std::optional<OpticalNetwork> net;
    if (spec.experiment == "network") {
        net = network_from_json(spec.parameters["network"], offsets);
    }
    return {std::move(spec), std::move(net)};
}

inline ResultEnvelope run_experiment(RunSpec const& spec)
{
    return find_experiment(spec.experiment).run(spec);
}

} // namespace hqs::io
