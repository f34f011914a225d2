#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sflam/sflam.hpp"

namespace {

struct SeedArgs {
    std::vector<std::uint64_t> list;
    std::optional<std::uint64_t> count;

    std::vector<std::uint64_t> resolve() const {
        std::vector<std::uint64_t> out = list;
        if (count) {
            for (std::uint64_t s = 0; s < *count; ++s) {
                out.push_back(s);
            }
        }
        if (out.empty()) {
            out.push_back(0);
        }
        return out;
    }
};

void add_seed_flags(CLI::App* cmd, SeedArgs& seeds) {
    cmd->add_option("--seed", seeds.list, "Seed (repeatable)");
    cmd->add_option("--seeds", seeds.count, "Use seeds 0..N-1");
}

int emit(const sflam::CommandResult& r, const std::string& out_path) {
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    if (out_path.empty()) {
        std::cout << r.csv;
    } else {
        sflam::detail::write_file(out_path, r.csv);
    }
    return r.exit_code;
}

std::vector<sflam::Scheme> parse_schemes(const std::vector<std::string>& names) {
    std::vector<sflam::Scheme> out;
    for (const auto& n : names) {
        out.push_back(sflam::parse_scheme(n));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantized split federated learning simulator and resource optimizer"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, std::string("Worker threads (default: $") + sflam::kThreadsEnv + " or 1)");

    std::string config_path;
    std::string scenario_path;
    std::string out_path;
    SeedArgs seeds;
    std::vector<double> t_max;
    std::vector<std::string> schemes;

    auto* gen = app.add_subcommand("generate", "Draw a scenario snapshot from a config");
    gen->add_option("--config", config_path, "Scenario config JSON (defaults if omitted)");
    std::uint64_t gen_seed = 0;
    gen->add_option("--seed", gen_seed, "Scenario seed");
    gen->add_option("--out", out_path, "Output scenario file")->required();

    auto* solve = app.add_subcommand("solve", "Solve one round and print per-device decisions");
    solve->add_option("--scenario", scenario_path, "Scenario snapshot")->required();
    solve->add_option("--t-max", t_max, "Round deadline in seconds (default: scenario value)")->expected(0, 1);
    std::string solve_scheme = "proposed";
    solve->add_option("--scheme", solve_scheme, "proposed|ep|rb|nq");
    std::uint64_t solve_seed = 0;
    solve->add_option("--seed", solve_seed, "Seed for randomized schemes");
    solve->add_option("--out", out_path, "Output CSV (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "Evaluate schemes over seeds and deadlines");
    auto* sweep_scn = sweep->add_option("--scenario", scenario_path, "Fixed scenario snapshot");
    sweep->add_option("--config", config_path, "Config to draw one scenario per seed")->excludes(sweep_scn);
    sweep->add_option("--t-max", t_max, "Deadline (repeatable)")->required();
    sweep->add_option("--scheme", schemes, "Scheme (repeatable; default: all)");
    add_seed_flags(sweep, seeds);
    sweep->add_option("--out", out_path, "Output CSV (default: stdout)");

    auto* cmp = app.add_subcommand("compare-frameworks", "Round time and energy of FL, SL, SFL and SFLAM");
    cmp->add_option("--scenario", scenario_path, "Scenario snapshot")->required();
    std::vector<int> device_counts{1, 2, 4, 8, 16};
    cmp->add_option("--devices", device_counts, "Device counts (repeatable)");
    cmp->add_option("--t-max", t_max, "Round deadline in seconds")->expected(0, 1);
    cmp->add_option("--out", out_path, "Output CSV (default: stdout)");

    auto* bound = app.add_subcommand("bound", "Evaluate the convergence bound against bit width");
    std::string params_path;
    bound->add_option("--params", params_path, "Bound constants JSON")->required();
    std::vector<int> q_list{2, 3, 4, 5, 6, 8, 12, 16, 24, 32};
    bound->add_option("--q", q_list, "Bit widths (repeatable)");
    bound->add_option("--out", out_path, "Output CSV (default: stdout)");

    auto* toy = app.add_subcommand("toy-train", "Train the toy split model with quantized activations");
    std::vector<std::string> toy_q{"32"};
    toy->add_option("--q", toy_q, "Bit widths, or 'off' (repeatable)");
    add_seed_flags(toy, seeds);
    sflam::ToyConfig toy_cfg;
    toy->add_option("--rounds", toy_cfg.rounds, "Rounds K");
    toy->add_option("--devices", toy_cfg.n_devices, "Devices");
    toy->add_option("--samples", toy_cfg.samples_per_device, "Samples per device");
    toy->add_option("--lr", toy_cfg.lr, "Learning rate");
    toy->add_option("--local-epochs", toy_cfg.local_epochs, "Local epochs I");
    toy->add_option("--heterogeneity", toy_cfg.heterogeneity, "Per-device label shift scale");
    toy->add_option("--out", out_path, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? sflam::kExitOk : sflam::kExitError;
    }

    try {
        if (threads > 0) {
            sflam::set_thread_count(threads);
        }
        const std::optional<double> t_opt = t_max.empty() ? std::nullopt : std::optional<double>(t_max.front());

        if (*gen) {
            sflam::cmd_generate(config_path.empty() ? std::nullopt : std::optional<std::string>(config_path),
                                gen_seed, out_path);
            return sflam::kExitOk;
        }
        if (*solve) {
            const auto s = sflam::load_scenario(scenario_path);
            return emit(sflam::cmd_solve(s, t_opt, sflam::parse_scheme(solve_scheme), solve_seed), out_path);
        }
        if (*sweep) {
            sflam::SweepSource src = sflam::ScenarioConfig{};
            if (!scenario_path.empty()) {
                src = sflam::load_scenario(scenario_path);
            } else if (!config_path.empty()) {
                src = sflam::load_scenario_config(config_path);
            }
            const auto names = schemes.empty() ? std::vector<std::string>{"proposed", "ep", "rb", "nq"} : schemes;
            return emit(sflam::cmd_sweep(src, t_max, parse_schemes(names), seeds.resolve()), out_path);
        }
        if (*cmp) {
            const auto s = sflam::load_scenario(scenario_path);
            return emit(sflam::cmd_compare_frameworks(s, device_counts, t_opt), out_path);
        }
        if (*bound) {
            const auto in = sflam::parse_bound_params(sflam::detail::read_file(params_path), params_path);
            return emit(sflam::cmd_bound(in, q_list), out_path);
        }
        if (*toy) {
            std::vector<std::optional<int>> qs;
            for (const auto& q : toy_q) {
                if (q == "off") {
                    qs.emplace_back(std::nullopt);
                } else {
                    try {
                        qs.emplace_back(std::stoi(q));
                    } catch (const std::exception&) {
                        throw sflam::ArgumentError("--q expects an integer or 'off', got '" + q + "'");
                    }
                }
            }
            return emit(sflam::cmd_toy_train(toy_cfg, qs, seeds.resolve()), out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sflam::kExitError;
    }
    return sflam::kExitError;
}
