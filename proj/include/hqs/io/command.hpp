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

#include <hqs/io/registry.hpp>
#include <hqs/mead.hpp>
#include <hqs/parallel.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace hqs::io {

/// Exit codes of run_command.
enum ExitCode : int { exit_ok = 0, exit_internal = 1, exit_config = 2 };

namespace detail {

inline std::string read_file(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_output(std::optional<std::string> const& path, std::string const& bytes, std::ostream& out)
{
    if (!path) {
        out << bytes;
        return;
    }
    std::ofstream file(*path, std::ios::binary);
    file << bytes;
    if (!file) {
        throw std::runtime_error("cannot write '" + *path + "'");
    }
}

inline std::pair<std::string, std::string> split_param(std::string const& kv)
{
    auto const eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--param expects k=v, got '" + kv + "'");
    }
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

inline ParamSpec const& schema_entry(std::vector<ParamSpec> const& schema, std::string const& key,
                                     std::string const& owner)
{
    for (auto const& p : schema) {
        if (p.name == key) {
            return p;
        }
    }
    throw ConfigError("unknown parameter '" + key + "' for " + owner);
}

inline json param_value(ParamSpec const& p, std::string const& text)
{
    if (p.type == ParamType::network && !text.empty() && text.front() == '@') {
        return parse_param_text(p, read_file(text.substr(1)));
    }
    return parse_param_text(p, text);
}

/// Parses "k=v" pairs against a schema; later pairs override earlier ones.
inline json params_from_cli(std::vector<ParamSpec> const& schema, std::vector<std::string> const& pairs,
                            std::string const& owner, json params = json::object())
{
    for (auto const& kv : pairs) {
        auto const [k, v] = split_param(kv);
        params[k] = param_value(schema_entry(schema, k, owner), v);
    }
    return params;
}

inline json resolved_defaults(std::vector<ParamSpec> const& schema, json params)
{
    for (auto const& p : schema) {
        if (!params.contains(p.name)) {
            params[p.name] = p.default_value;
        }
    }
    return params;
}

struct Range {
    std::string key;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;

    [[nodiscard]] double at(std::size_t i) const
    {
        if (count == 1) {
            return start;
        }
        return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

inline std::optional<Range> parse_range(std::string const& key, std::string const& text)
{
    auto const c1 = text.find(':');
    if (c1 == std::string::npos) {
        return std::nullopt;
    }
    auto const c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos) {
        throw ConfigError("range for '" + key + "' must be start:stop:count");
    }
    try {
        Range r{key, std::stod(text.substr(0, c1)), std::stod(text.substr(c1 + 1, c2 - c1 - 1)),
                static_cast<std::size_t>(std::stoull(text.substr(c2 + 1)))};
        if (r.count < 1 || !std::isfinite(r.start) || !std::isfinite(r.stop)) {
            throw ConfigError("range for '" + key + "' needs finite ends and count >= 1");
        }
        return r;
    } catch (ConfigError const&) {
        throw;
    } catch (std::exception const&) {
        throw ConfigError("range for '" + key + "' must be start:stop:count");
    }
}

inline std::string json_cell(json const& v)
{
    return v.is_null() || v.is_structured() ? std::string() : csv_cell(v);
}

// ---------------------------------------------------------------------------

struct RunArgs {
    std::string experiment;
    std::vector<std::string> params;
    std::optional<std::uint64_t> events;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> config;
    bool timing = false;
};

inline int do_run(RunArgs const& a, std::ostream& out)
{
    RunSpec base;
    json params = json::object();
    if (a.config) {
        auto const text = read_file(*a.config);
        base = parse_config(text).spec;
        if (!a.experiment.empty() && a.experiment != base.experiment) {
            throw ConfigError("experiment '" + a.experiment + "' does not match config file experiment '" +
                              base.experiment + "'");
        }
        params = base.parameters;
    } else {
        if (a.experiment.empty()) {
            throw ConfigError("run needs an experiment name or --config");
        }
        base.experiment = a.experiment;
    }
    auto const& exp = find_experiment(base.experiment);
    params = params_from_cli(exp.params, a.params, "experiment '" + exp.name + "'", params);

    auto const events = a.events ? a.events : base.events;
    auto const seed = a.seed.value_or(base.seed);
    auto const format = a.format ? output_format_from(*a.format) : base.format;
    auto const output = a.out ? a.out : base.output_path;
    auto const spec = resolve_spec(base.experiment, params, events, seed, format, output);

    auto const t0 = std::chrono::steady_clock::now();
    auto env = run_experiment(spec);
    if (a.timing) {
        env.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    write_output(spec.output_path, emit_results(env, spec.format), out);
    return exit_ok;
}

inline int do_scan(RunArgs const& a, std::ostream& out)
{
    auto const& exp = find_experiment(a.experiment);
    std::optional<Range> range;
    std::vector<std::string> fixed;
    for (auto const& kv : a.params) {
        auto const [k, v] = split_param(kv);
        auto const& p = schema_entry(exp.params, k, "experiment '" + exp.name + "'");
        if (auto r = (p.type == ParamType::real || p.type == ParamType::integer) ? parse_range(k, v) : std::nullopt) {
            if (range) {
                throw ConfigError("scan takes exactly one range parameter");
            }
            range = r;
        } else {
            fixed.push_back(kv);
        }
    }
    if (!range) {
        throw ConfigError("scan needs one --param key=start:stop:count");
    }
    auto const& range_spec = schema_entry(exp.params, range->key, exp.name);
    auto const base = params_from_cli(exp.params, fixed, "experiment '" + exp.name + "'");

    std::vector<ResultEnvelope> rows;
    std::vector<double> grid;
    for (std::size_t i = 0; i < range->count; ++i) {
        json params = base;
        double const x = range->at(i);
        grid.push_back(x);
        if (range_spec.type == ParamType::integer) {
            params[range->key] = static_cast<std::int64_t>(std::llround(x));
        } else {
            params[range->key] = x;
        }
        auto const spec = resolve_spec(exp.name, params, a.events, a.seed.value_or(0));
        rows.push_back(run_experiment(spec));
    }

    std::vector<std::pair<std::string, std::function<json(ResultEnvelope const&)>>> columns;
    auto const& first = rows.front();
    for (auto const& label : first.labels) {
        columns.emplace_back("analytic_" + label,
                             [label](ResultEnvelope const& e) { return lookup(e.analytic_table, label); });
        if (first.has_empirical) {
            columns.emplace_back("freq_" + label,
                                 [label](ResultEnvelope const& e) { return lookup(e.frequencies, label); });
        }
    }
    for (auto const& [k, v] : first.analytic_summary.items()) {
        if (v.is_primitive()) {
            columns.emplace_back("analytic_" + k,
                                 [k = k](ResultEnvelope const& e) { return lookup(e.analytic_summary, k); });
        }
    }
    for (auto const& [k, v] : first.empirical_summary.items()) {
        if (v.is_primitive()) {
            columns.emplace_back(k, [k = k](ResultEnvelope const& e) { return lookup(e.empirical_summary, k); });
        }
    }
    if (first.has_empirical) {
        columns.emplace_back("pass", [](ResultEnvelope const& e) { return json(e.all_pass()); });
    }

    std::ostringstream os;
    os << range->key;
    for (auto const& c : columns) {
        os << ',' << c.first;
    }
    os << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << json_cell(rows[i].spec.parameters[range->key]);
        for (auto const& c : columns) {
            os << ',' << json_cell(c.second(rows[i]));
        }
        os << '\n';
    }
    write_output(a.out, os.str(), out);
    return exit_ok;
}

// ---------------------------------------------------------------------------

inline std::vector<ParamSpec> const& avalanche_schema()
{
    using P = ParamType;
    static std::vector<ParamSpec> const s{
        {"k", P::real, 1.0, "coupling rate"},
        {"x0", P::real, 0.01, "initial absorber excitation"},
        {"t_end", P::real, 20.0, "end time"},
        {"dt", P::real, 0.0, "step (0: 0.01/k)"},
        {"noise_amplitude", P::real, 0.0, "relative jitter of x0"},
        {"omega", P::real, 0.0, "beat frequency in the same time units (0: unconstrained)"}};
    return s;
}

inline std::vector<ParamSpec> const& compete_schema()
{
    using P = ParamType;
    static std::vector<ParamSpec> const s{
        {"k", P::real_list, json::array({1.0, 1.0}), "coupling rate per absorber"},
        {"x0_max", P::real, 0.01, "seeds drawn from (0, x0_max]"},
        {"trials", P::integer, 10000, "number of trials"},
        {"beta", P::real, 1.0, "cross-inhibition between absorbers"},
        {"threshold", P::real, 0.99, "winning excitation"},
        {"dt", P::real, 0.0, "step (0: 0.01/max k)"},
        {"t_max", P::real, 0.0, "give-up time (0: 400/min k)"}};
    return s;
}

inline std::vector<ParamSpec> const& field_schema()
{
    using P = ParamType;
    static std::vector<ParamSpec> const s{
        {"e1_ev", P::real, 10.2, "upper level energy (eV)"},
        {"e0_ev", P::real, 0.0, "lower level energy (eV)"},
        {"x_emitter", P::real, 0.5, "emitter excited population"},
        {"x_absorber", P::real, 0.5, "absorber excited population"},
        {"absorber_phase", P::real, std::numbers::pi, "absorber dipole phase (rad)"},
        {"separation", P::real, 2.0, "atom separation (wavelengths)"},
        {"half_width", P::real, 4.0, "grid half width (wavelengths)"},
        {"points", P::integer, 161, "grid points per axis"},
        {"t_periods", P::real, 0.0, "snapshot time (beat periods)"}};
    return s;
}

inline int do_dynamics(std::string const& mode, RunArgs const& a, std::ostream& out)
{
    if (mode == "avalanche") {
        auto const p = resolved_defaults(avalanche_schema(),
                                         params_from_cli(avalanche_schema(), a.params, "dynamics avalanche"));
        mead::AvalancheConfig cfg;
        cfg.k = p["k"].get<double>();
        cfg.x0 = p["x0"].get<double>();
        cfg.t_end = p["t_end"].get<double>();
        cfg.dt = p["dt"].get<double>();
        cfg.noise_amplitude = p["noise_amplitude"].get<double>();
        cfg.omega = p["omega"].get<double>();
        cfg.seed = a.seed.value_or(0);
        std::ostringstream os;
        mead::write_trajectory_csv(os, mead::integrate_pair(cfg));
        write_output(a.out, os.str(), out);
        return exit_ok;
    }
    if (mode == "compete") {
        auto const p = resolved_defaults(compete_schema(),
                                         params_from_cli(compete_schema(), a.params, "dynamics compete"));
        mead::CompeteConfig cfg;
        cfg.k_list = p["k"].get<std::vector<double>>();
        cfg.x0_max = p["x0_max"].get<double>();
        if (p["trials"].get<std::int64_t>() < 1) {
            throw ConfigError("trials must be >= 1");
        }
        cfg.trials = p["trials"].get<std::uint64_t>();
        cfg.cross_inhibition = p["beta"].get<double>();
        cfg.threshold = p["threshold"].get<double>();
        cfg.dt = p["dt"].get<double>();
        cfg.t_max = p["t_max"].get<double>();
        cfg.seed = a.seed.value_or(0);
        auto const r = mead::compete(cfg);
        double k_sum = 0.0;
        for (double k : cfg.k_list) {
            k_sum += k;
        }
        json j;
        j["parameters"] = p;
        j["seed"] = cfg.seed;
        j["wins"] = r.wins;
        json fractions = json::array();
        json share = json::array();
        for (std::size_t i = 0; i < r.wins.size(); ++i) {
            fractions.push_back(r.fraction(i));
            share.push_back(cfg.k_list[i] / k_sum);
        }
        j["fractions"] = fractions;
        j["coupling_share"] = share;
        std::uint64_t ties = 0, timeouts = 0;
        double t_sum = 0.0;
        for (auto const& t : r.log) {
            ties += t.tie ? 1 : 0;
            timeouts += t.timeout ? 1 : 0;
            t_sum += t.time;
        }
        j["ties"] = ties;
        j["timeouts"] = timeouts;
        j["mean_time"] = t_sum / static_cast<double>(r.log.size());
        write_output(a.out, j.dump(2) + "\n", out);
        return exit_ok;
    }
    if (mode == "field") {
        auto const p =
            resolved_defaults(field_schema(), params_from_cli(field_schema(), a.params, "dynamics field"));
        double const omega = mead::beat_frequency(p["e1_ev"].get<double>(), p["e0_ev"].get<double>());
        double const wavelength = 2.0 * std::numbers::pi * mead::kSpeedOfLight / omega;
        double const half_sep = 0.5 * p["separation"].get<double>() * wavelength;
        double const hw = p["half_width"].get<double>() * wavelength;
        auto const points = p["points"].get<std::int64_t>();
        if (points < 2) {
            throw ConfigError("points must be >= 2");
        }
        mead::FieldGrid grid{-hw, hw, -hw, hw, static_cast<std::size_t>(points), static_cast<std::size_t>(points)};
        std::array<mead::Dipole, 2> const atoms{
            mead::Dipole{-half_sep, 0.0, p["x_emitter"].get<double>(), 0.0},
            mead::Dipole{half_sep, 0.0, p["x_absorber"].get<double>(), p["absorber_phase"].get<double>()}};
        double const t = p["t_periods"].get<double>() * 2.0 * std::numbers::pi / omega;
        std::ostringstream os;
        try {
            mead::write_field_csv(os, mead::field_snapshot(atoms, omega, t, grid));
        } catch (std::invalid_argument const& e) {
            throw ConfigError(e.what());
        }
        write_output(a.out, os.str(), out);
        return exit_ok;
    }
    throw ConfigError("unknown dynamics mode '" + mode + "' (avalanche | compete | field)");
}

inline void print_schema(std::ostream& os, std::vector<ParamSpec> const& schema)
{
    for (auto const& p : schema) {
        os << "    " << p.name << " (" << to_string(p.type) << ", default "
           << (p.default_value.is_null() ? std::string("required") : p.default_value.dump()) << "): " << p.help
           << '\n';
    }
}

inline int do_list(std::ostream& out)
{
    std::ostringstream os;
    for (auto const& e : registry()) {
        os << e.name << ": " << e.description << '\n';
        print_schema(os, e.params);
    }
    os << "dynamics avalanche: emitter/absorber pair trajectory (CSV)\n";
    print_schema(os, avalanche_schema());
    os << "dynamics compete: several absorbers drawing on one emitter (JSON)\n";
    print_schema(os, compete_schema());
    os << "dynamics field: two-dipole field snapshot (CSV)\n";
    print_schema(os, field_schema());
    out << os.str();
    return exit_ok;
}

} // namespace detail

/**
 * Command-line entry point. `args` excludes the program name.
 *   run <experiment> [--param k=v]... [--events N] [--seed S] [--out PATH]
 *       [--format json|csv] [--config FILE] [--timing]
 *   scan <experiment> --param k=start:stop:count [--param k=v]... [--events N] [--seed S] [--out PATH]
 *   dynamics avalanche|compete|field [--param k=v]... [--seed S] [--out PATH]
 *   list
 * Returns 0 on success, 2 on configuration errors, 1 otherwise.
 */
inline int run_command(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"hqs: transactional single-photon experiment simulator", "hqs"};
    app.require_subcommand(1);

    detail::RunArgs a;
    std::string mode;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--param", a.params, "parameter k=v (repeatable)");
        sub->add_option("--seed", a.seed, "64-bit seed");
        sub->add_option("--out", a.out, "output file (default: standard output)");
    };

    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("experiment", a.experiment, "experiment name");
    add_common(run);
    run->add_option("--events", a.events, "number of events (omit for analytic mode)");
    run->add_option("--format", a.format, "json | csv");
    run->add_option("--config", a.config, "JSON configuration file");
    run->add_flag("--timing", a.timing, "include wall_time_ms");

    auto* scan = app.add_subcommand("scan", "sweep one parameter, one CSV row per point");
    scan->add_option("experiment", a.experiment, "experiment name")->required();
    add_common(scan);
    scan->add_option("--events", a.events, "events per point");

    auto* dyn = app.add_subcommand("dynamics", "transaction-formation dynamics");
    dyn->add_option("mode", mode, "avalanche | compete | field")->required();
    add_common(dyn);

    auto* list = app.add_subcommand("list", "list experiments and parameters");

    std::vector<std::string> storage{"hqs"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char const*> argv;
    for (auto const& s : storage) {
        argv.push_back(s.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (run->parsed()) {
            return detail::do_run(a, out);
        }
        if (scan->parsed()) {
            return detail::do_scan(a, out);
        }
        if (dyn->parsed()) {
            return detail::do_dynamics(mode, a, out);
        }
        if (list->parsed()) {
            return detail::do_list(out);
        }
    } catch (ConfigError const& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (std::invalid_argument const& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (std::exception const& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_internal;
}

} // namespace hqs::io
