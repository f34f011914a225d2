#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "json.hpp"

#include "sflam/baselines.hpp"
#include "sflam/bcd_solver.hpp"
#include "sflam/bounds.hpp"
#include "sflam/csv.hpp"
#include "sflam/parallel.hpp"
#include "sflam/scenario.hpp"
#include "sflam/scenario_io.hpp"
#include "sflam/toy_trainer.hpp"

namespace sflam {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoParticipants = 2;

struct CommandResult {
    std::string csv;
    int exit_code = kExitOk;
    std::vector<std::string> warnings;
};

/// Scenario snapshot text for `cfg` drawn with `seed`.
inline std::string cmd_generate(const ScenarioConfig& cfg, std::uint64_t seed) {
    return serialize_scenario(generate_scenario(cfg, seed));
}

inline void cmd_generate(const std::optional<std::string>& config_path, std::uint64_t seed,
                         const std::string& out_path) {
    const ScenarioConfig cfg = config_path ? load_scenario_config(*config_path) : ScenarioConfig{};
    detail::write_file(out_path, cmd_generate(cfg, seed));
}

// ---------------------------------------------------------------------------
// solve

inline CommandResult cmd_solve(const Scenario& s, std::optional<double> t_max, Scheme scheme, std::uint64_t seed = 0,
                               const BcdConfig& cfg = {}) {
    const double t_max_s = t_max.value_or(s.t_max_s);
    const RoundSolution sol = run_scheme(scheme, s, cfg, seed, t_max_s);

    CsvTable table("solve scheme=" + std::string(scheme_name(scheme)) + " t_max=" + format_number(t_max_s),
                   {"kind", "device_id", "p_w", "q_bits", "rb", "t_total_s", "e_total_j", "participants",
                    "system_energy_j", "efficiency", "iterations"});
    for (std::size_t n = 0; n < s.devices.size(); ++n) {
        const auto& rb = sol.decision.rb_assignment[n];
        const auto& c = sol.per_device[n];
        table.row({"device", format_number(s.devices[n].id), format_number(sol.decision.power_w[n]),
                   format_number(sol.decision.q_bits[n]), rb ? format_number(*rb) : "",
                   rb ? format_number(c.t_total_s) : "", rb ? format_number(c.e_total_j) : "", "", "", "", ""});
    }
    const int k = sol.decision.participants();
    table.row({"summary", "", "", "", "", "", "", format_number(k), format_number(sol.system_energy_j),
               format_number(sol.system_efficiency), format_number(sol.iterations)});

    CommandResult out{table.str(), kExitOk, {}};
    if (k == 0) {
        out.exit_code = kExitNoParticipants;
        out.warnings.push_back("no device can meet T_max = " + format_number(t_max_s) + " s");
    }
    return out;
}

// ---------------------------------------------------------------------------
// sweep

/// A sweep runs either on one fixed scenario (seeds only drive randomized
/// schemes) or on one scenario per seed drawn from a config.
using SweepSource = std::variant<Scenario, ScenarioConfig>;

struct SweepRow {
    Scheme scheme = Scheme::Proposed;
    std::uint64_t seed = 0;
    double t_max_s = 0.0;
    double avg_energy_j = 0.0;
    double efficiency = 0.0;
    double avg_q = 0.0;
    int participants = 0;
};

inline SweepRow summarize(Scheme scheme, std::uint64_t seed, double t_max_s, const RoundSolution& sol) {
    SweepRow r{scheme, seed, t_max_s};
    r.participants = sol.decision.participants();
    r.efficiency = sol.system_efficiency;
    if (r.participants > 0) {
        double q_sum = 0.0;
        for (std::size_t n = 0; n < sol.decision.size(); ++n) {
            if (sol.decision.participating(n)) {
                q_sum += sol.decision.q_bits[n];
            }
        }
        r.avg_q = q_sum / r.participants;
        r.avg_energy_j = sol.system_energy_j / r.participants;
    }
    return r;
}

/// Evaluates the (scheme, seed, t_max) grid in parallel; rows come back
/// sorted by scheme name, seed, then t_max.
inline std::vector<SweepRow> run_sweep(const SweepSource& src, std::vector<double> t_max_list,
                                       std::vector<Scheme> schemes, std::vector<std::uint64_t> seeds,
                                       const BcdConfig& cfg = {}) {
    if (t_max_list.empty() || schemes.empty() || seeds.empty()) {
        throw ArgumentError("sweep: t_max list, schemes and seeds must be non-empty");
    }
    for (double t : t_max_list) {
        if (!(t > 0.0)) {
            throw ArgumentError("sweep: T_max values must be positive");
        }
    }
    std::sort(schemes.begin(), schemes.end(),
              [](Scheme a, Scheme b) { return scheme_name(a) < scheme_name(b); });
    schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    std::sort(t_max_list.begin(), t_max_list.end());
    t_max_list.erase(std::unique(t_max_list.begin(), t_max_list.end()), t_max_list.end());

    std::vector<Scenario> scenarios(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        if (const auto* fixed = std::get_if<Scenario>(&src)) {
            scenarios[i] = *fixed;
        } else {
            scenarios[i] = generate_scenario(std::get<ScenarioConfig>(src), seeds[i]);
        }
    });

    const std::size_t n_t = t_max_list.size();
    const std::size_t n_seed = seeds.size();
    std::vector<SweepRow> rows(schemes.size() * n_seed * n_t);
    parallel_for(rows.size(), [&](std::size_t idx) {
        const std::size_t a = idx / (n_seed * n_t);
        const std::size_t b = (idx / n_t) % n_seed;
        const std::size_t c = idx % n_t;
        const auto sol = run_scheme(schemes[a], scenarios[b], cfg, seeds[b], t_max_list[c]);
        rows[idx] = summarize(schemes[a], seeds[b], t_max_list[c], sol);
    });
    return rows;
}

inline CommandResult cmd_sweep(const SweepSource& src, const std::vector<double>& t_max_list,
                               const std::vector<Scheme>& schemes, const std::vector<std::uint64_t>& seeds,
                               const BcdConfig& cfg = {}) {
    const auto rows = run_sweep(src, t_max_list, schemes, seeds, cfg);
    CsvTable table("sweep", {"scheme", "seed", "t_max", "avg_energy", "efficiency", "avg_q", "participants"});
    CommandResult out;
    bool any = false;
    for (const auto& r : rows) {
        table.row({std::string(scheme_name(r.scheme)), format_number(r.seed), format_number(r.t_max_s),
                   format_number(r.avg_energy_j), format_number(r.efficiency), format_number(r.avg_q),
                   format_number(r.participants)});
        if (r.participants == 0) {
            out.warnings.push_back("no participants: scheme=" + std::string(scheme_name(r.scheme)) +
                                   " seed=" + format_number(r.seed) + " t_max=" + format_number(r.t_max_s));
        } else {
            any = true;
        }
    }
    out.csv = table.str();
    out.exit_code = any ? kExitOk : kExitNoParticipants;
    return out;
}

// ---------------------------------------------------------------------------
// compare-frameworks

/// The first n devices of `s`, with the RB count capped at n.
inline Scenario prefix_scenario(const Scenario& s, int n) {
    if (n < 1 || static_cast<std::size_t>(n) > s.devices.size()) {
        throw ArgumentError("device count " + std::to_string(n) + " outside [1, " +
                            std::to_string(s.devices.size()) + "]");
    }
    Scenario out = s;
    out.devices.resize(static_cast<std::size_t>(n));
    out.env.num_rbs = std::min(out.env.num_rbs, n);
    return out;
}

struct FrameworkRow {
    Framework kind = Framework::FL;
    int n_devices = 0;
    int participants = 0;
    FrameworkCost cost;
};

/// For each device count, solves the round with the proposed scheme and
/// prices the resulting participant set under every framework.
inline std::vector<FrameworkRow> run_compare_frameworks(const Scenario& s, const std::vector<int>& device_counts,
                                                        std::optional<double> t_max = {},
                                                        const FrameworkWorkload& fw = {}, const BcdConfig& cfg = {}) {
    std::vector<std::vector<FrameworkRow>> per_count(device_counts.size());
    parallel_for(device_counts.size(), [&](std::size_t i) {
        const Scenario sub = prefix_scenario(s, device_counts[i]);
        const auto sol = solve_round(sub, cfg, t_max);
        for (const auto kind : {Framework::FL, Framework::SL, Framework::SFL, Framework::SFLAM}) {
            per_count[i].push_back(
                {kind, device_counts[i], sol.decision.participants(), framework_round_cost(kind, sub, fw, sol.decision)});
        }
    });
    std::vector<FrameworkRow> rows;
    for (auto& v : per_count) {
        rows.insert(rows.end(), v.begin(), v.end());
    }
    return rows;
}

inline CommandResult cmd_compare_frameworks(const Scenario& s, const std::vector<int>& device_counts,
                                            std::optional<double> t_max = {}) {
    const auto rows = run_compare_frameworks(s, device_counts, t_max);
    CsvTable table("compare-frameworks", {"framework", "n_devices", "participants", "time_cmp_s", "time_com_s",
                                          "time_s", "energy_cmp_j", "energy_com_j", "energy_j"});
    CommandResult out;
    for (const auto& r : rows) {
        table.row({std::string(framework_name(r.kind)), format_number(r.n_devices), format_number(r.participants),
                   format_number(r.cost.time_cmp_s), format_number(r.cost.time_com_s), format_number(r.cost.time_s),
                   format_number(r.cost.energy_cmp_j), format_number(r.cost.energy_com_j),
                   format_number(r.cost.energy_j)});
        if (r.participants == 0 && r.kind == Framework::FL) {
            out.warnings.push_back("no participants at n_devices=" + format_number(r.n_devices));
        }
    }
    out.csv = table.str();
    return out;
}

// ---------------------------------------------------------------------------
// bound

struct BoundInput {
    BoundParams params;
    std::int64_t activation_dim = 1;
};

/// Reads bound constants from JSON. Per-device arrays must agree in length;
/// rho defaults to uniform weights.
inline BoundInput parse_bound_params(const std::string& text, const std::string& origin = "<bound>") {
    using nlohmann::json;
    const json j = detail::parse_json(text, origin);
    if (!j.is_object()) {
        throw ConfigError(origin + ": expected a JSON object");
    }
    detail::check_keys(j,
                       {"smooth_S", "strong_mu", "gamma_shift", "sigma_sq", "grad_bound_G", "rho", "a", "hess_L",
                        "act_norm_sq", "round_k", "horizon_K", "init_gap", "activation_dim"},
                       "");
    BoundInput in;
    auto& bp = in.params;
    try {
        bp.smooth_S = j.value("smooth_S", bp.smooth_S);
        bp.strong_mu = j.value("strong_mu", bp.strong_mu);
        bp.gamma_shift = j.value("gamma_shift", bp.gamma_shift);
        bp.grad_bound_G = j.value("grad_bound_G", bp.grad_bound_G);
        bp.hess_L = j.value("hess_L", bp.hess_L);
        bp.act_norm_sq = j.value("act_norm_sq", bp.act_norm_sq);
        bp.round_k = j.value("round_k", bp.round_k);
        bp.horizon_K = j.value("horizon_K", bp.horizon_K);
        bp.init_gap = j.value("init_gap", bp.init_gap);
        in.activation_dim = j.value("activation_dim", in.activation_dim);
        bp.sigma_sq = j.at("sigma_sq").get<std::vector<double>>();
        bp.a = j.contains("a") ? j.at("a").get<std::vector<double>>() : std::vector<double>(bp.sigma_sq.size(), 1.0);
        const auto n = bp.sigma_sq.size();
        bp.rho = j.contains("rho") ? j.at("rho").get<std::vector<double>>()
                                   : std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
        bp.n_devices = static_cast<int>(n);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (in.activation_dim < 1) {
        throw ConfigError(origin + ": activation_dim must be positive");
    }
    try {
        check_bound_params(bp);
    } catch (const ArgumentError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return in;
}

inline CommandResult cmd_bound(const BoundInput& in, const std::vector<int>& q_list) {
    CsvTable table("bound", {"q", "bound", "penalty"});
    for (int q : q_list) {
        table.row({format_number(q), format_number(theorem1_bound(in.params, q, in.activation_dim)),
                   format_number(quantization_penalty(in.params, q, in.activation_dim))});
    }
    return {table.str(), kExitOk, {}};
}

// ---------------------------------------------------------------------------
// toy-train

/// One run per (q, seed); nullopt in `q_list` means unquantized. Rows are
/// ordered as the inputs are given, then by round.
inline CommandResult cmd_toy_train(const ToyConfig& base, const std::vector<std::optional<int>>& q_list,
                                   const std::vector<std::uint64_t>& seeds) {
    std::vector<LossTrace> traces(q_list.size() * seeds.size());
    parallel_for(traces.size(), [&](std::size_t i) {
        ToyConfig c = base;
        c.q_bits = q_list[i / seeds.size()];
        c.seed = seeds[i % seeds.size()];
        traces[i] = run_toy_training(c);
    });
    CsvTable table("toy-train", {"round", "q_bits", "seed", "loss"});
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& q = q_list[i / seeds.size()];
        const std::string q_cell = q ? format_number(*q) : "off";
        const std::string seed_cell = format_number(seeds[i % seeds.size()]);
        for (std::size_t k = 0; k < traces[i].loss.size(); ++k) {
            table.row({format_number(static_cast<std::int64_t>(k)), q_cell, seed_cell,
                       format_number(traces[i].loss[k])});
        }
    }
    return {table.str(), kExitOk, {}};
}

} // namespace sflam
