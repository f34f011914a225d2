#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sflam/error.hpp"
#include "sflam/rng.hpp"

namespace sflam {

/// Bits in one mebibyte; activation and model sizes are quoted in MiB.
inline constexpr double kBitsPerMiB = 8.0 * 1024.0 * 1024.0;

struct DeviceProfile {
    int id = 0;
    double distance_m = 0.0;
    double gpu_freq_hz = 0.0;
    int gpu_cores = 0;
    double flops_per_cycle = 0.0;  // per core
    double kappa1 = 0.0;           // W / (cycles/s)^3
    double p_min_w = 0.0;
    double p_max_w = 0.0;
    int num_samples = 0;  // local dataset size

    bool operator==(const DeviceProfile&) const = default;
};

struct ServerProfile {
    double gpu_freq_hz = 0.0;
    int gpu_cores = 0;
    double flops_per_cycle = 0.0;

    bool operator==(const ServerProfile&) const = default;
};

struct WirelessEnv {
    double subcarrier_bandwidth_hz = 0.0;
    double channel_gain = 0.0;   // h_o
    double pathloss_exp = 0.0;   // exponent on distance
    double noise_power_w = 0.0;  // N_o
    int num_rbs = 0;

    bool operator==(const WirelessEnv&) const = default;
};

/// Split-model compute and payload constants. device_flops and server_flops are
/// per mini-batch pass (the batch size is already folded in).
struct WorkloadModel {
    double device_flops = 0.0;
    double server_flops = 0.0;
    int minibatch = 0;
    std::int64_t activation_dim = 0;  // elements per uploaded activation tensor
    double payload_bits_full = 0.0;   // activation payload at q_max_bits
    int q_max_bits = 32;
    int q_min_bits = 5;
    std::int64_t overhead_bits = 0;

    bool operator==(const WorkloadModel&) const = default;
};

struct Scenario {
    std::vector<DeviceProfile> devices;
    ServerProfile server;
    WirelessEnv env;
    WorkloadModel workload;
    double t_max_s = 0.0;
    std::uint64_t rng_seed = 0;

    bool operator==(const Scenario&) const = default;
};

/// Closed interval sampled uniformly.
struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const Range&) const = default;
};

/// Ranges and constants from which scenarios are drawn. Defaults reproduce the
/// reference simulation setup; h_o, N_o, path-loss exponent, kappa1, p_min and
/// the dataset sizes are not published and are chosen here.
struct ScenarioConfig {
    int num_devices = 50;
    double t_max_s = 50.0;

    Range distance_m{50.0, 1000.0};
    Range p_max_w{0.5, 2.0};
    Range p_min_w{0.1, 0.1};
    Range device_freq_hz{1.0e9, 1.5e9};
    Range device_cores{4, 6};
    Range device_flops_per_cycle{1.0, 1.0};
    Range kappa1{1.0e-28, 1.0e-28};
    Range num_samples{500, 1500};

    Range server_freq_hz{3.0e9, 3.0e9};
    Range server_cores{2560, 5120};
    Range server_flops_per_cycle{1.0, 2.0};

    WirelessEnv env{20.0e6, 1.0e-5, 3.0, 1.0e-13, 20};

    // ViT-B/32 split at the embedding layer, batch of 128 images.
    WorkloadModel workload{
        14.80e9,
        (558.99 - 14.80) * 1e9,
        128,
        128LL * 50 * 768,
        18.688 * kBitsPerMiB,
        32,
        5,
        64,
    };
};

/// Relative slack allowed between payload_bits_full and activation_dim * q_max.
inline constexpr double kPayloadConsistencyTol = 0.01;

namespace detail {

inline void check_range(const Range& r, const std::string& name) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw ConfigError("invalid range for '" + name + "': lo > hi or non-finite");
    }
}

inline int draw_int(const CounterRng& rng, std::uint64_t index, const Range& r) {
    const auto lo = static_cast<std::int64_t>(std::ceil(r.lo));
    const auto hi = static_cast<std::int64_t>(std::floor(r.hi));
    if (lo > hi) {
        return static_cast<int>(lo);
    }
    return static_cast<int>(rng.uniform_int(index, lo, hi));
}

} // namespace detail

/// Checks every range in the config; throws ConfigError naming the field.
inline void check_config(const ScenarioConfig& cfg) {
    using detail::check_range;
    if (cfg.num_devices < 1) {
        throw ConfigError("invalid value for 'num_devices': must be >= 1");
    }
    check_range(cfg.distance_m, "device.distance_m");
    check_range(cfg.p_max_w, "device.p_max_w");
    check_range(cfg.p_min_w, "device.p_min_w");
    check_range(cfg.device_freq_hz, "device.gpu_freq_hz");
    check_range(cfg.device_cores, "device.gpu_cores");
    check_range(cfg.device_flops_per_cycle, "device.flops_per_cycle");
    check_range(cfg.kappa1, "device.kappa1");
    check_range(cfg.num_samples, "device.num_samples");
    check_range(cfg.server_freq_hz, "server.gpu_freq_hz");
    check_range(cfg.server_cores, "server.gpu_cores");
    check_range(cfg.server_flops_per_cycle, "server.flops_per_cycle");
}

struct Violation {
    std::string subject;  // "device <id>", "server", "env", "workload", "scenario"
    std::string field;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Every broken invariant, as data. Empty iff the scenario is valid.
inline std::vector<Violation> validate_scenario(const Scenario& s) {
    std::vector<Violation> out;
    auto positive = [&](double v, const std::string& subject, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            out.push_back({subject, field, "must be finite and > 0"});
        }
    };

    for (const auto& d : s.devices) {
        const std::string who = "device " + std::to_string(d.id);
        positive(d.distance_m, who, "distance_m");
        positive(d.gpu_freq_hz, who, "gpu_freq_hz");
        positive(d.gpu_cores, who, "gpu_cores");
        positive(d.flops_per_cycle, who, "flops_per_cycle");
        positive(d.kappa1, who, "kappa1");
        positive(d.p_min_w, who, "p_min_w");
        positive(d.p_max_w, who, "p_max_w");
        positive(d.num_samples, who, "num_samples");
        if (d.p_min_w > d.p_max_w) {
            out.push_back({who, "p_min_w", "p_min_w exceeds p_max_w"});
        }
    }

    positive(s.server.gpu_freq_hz, "server", "gpu_freq_hz");
    positive(s.server.gpu_cores, "server", "gpu_cores");
    positive(s.server.flops_per_cycle, "server", "flops_per_cycle");

    positive(s.env.subcarrier_bandwidth_hz, "env", "subcarrier_bandwidth_hz");
    positive(s.env.channel_gain, "env", "channel_gain");
    positive(s.env.pathloss_exp, "env", "pathloss_exp");
    positive(s.env.noise_power_w, "env", "noise_power_w");
    if (s.env.num_rbs < 1) {
        out.push_back({"env", "num_rbs", "must be >= 1"});
    }

    const auto& w = s.workload;
    positive(w.device_flops, "workload", "device_flops");
    positive(w.server_flops, "workload", "server_flops");
    positive(w.minibatch, "workload", "minibatch");
    positive(static_cast<double>(w.activation_dim), "workload", "activation_dim");
    positive(w.payload_bits_full, "workload", "payload_bits_full");
    if (w.q_min_bits < 1) {
        out.push_back({"workload", "q_min_bits", "must be >= 1"});
    }
    if (w.q_max_bits > 32) {
        out.push_back({"workload", "q_max_bits", "must be <= 32"});
    }
    if (w.q_min_bits > w.q_max_bits) {
        out.push_back({"workload", "q_min_bits", "q_min_bits exceeds q_max_bits"});
    }
    if (w.overhead_bits < 0) {
        out.push_back({"workload", "overhead_bits", "must be >= 0"});
    }
    if (w.activation_dim > 0 && w.payload_bits_full > 0.0) {
        const double exact = static_cast<double>(w.activation_dim) * w.q_max_bits;
        const double slack = static_cast<double>(w.overhead_bits) + kPayloadConsistencyTol * exact;
        if (std::abs(w.payload_bits_full - exact) > slack) {
            out.push_back({"workload", "payload_bits_full",
                           "inconsistent with activation_dim * q_max_bits"});
        }
    }

    positive(s.t_max_s, "scenario", "t_max_s");
    return out;
}

/// Draws a scenario and validates it, throwing ConfigError on the first
/// violation. Device i uses its own child stream, so the draw for one device
/// does not depend on how many devices precede it.
inline Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    check_config(cfg);
    const CounterRng root(seed);
    const CounterRng device_rng = root.child(1);
    const CounterRng server_rng = root.child(2);

    Scenario s;
    s.rng_seed = seed;
    s.t_max_s = cfg.t_max_s;
    s.env = cfg.env;
    s.workload = cfg.workload;

    s.server.gpu_freq_hz = server_rng.uniform(0, cfg.server_freq_hz.lo, cfg.server_freq_hz.hi);
    s.server.gpu_cores = detail::draw_int(server_rng, 1, cfg.server_cores);
    s.server.flops_per_cycle =
        server_rng.uniform(2, cfg.server_flops_per_cycle.lo, cfg.server_flops_per_cycle.hi);

    s.devices.reserve(static_cast<std::size_t>(cfg.num_devices));
    for (int i = 0; i < cfg.num_devices; ++i) {
        const CounterRng r = device_rng.child(static_cast<std::uint64_t>(i));
        DeviceProfile d;
        d.id = i;
        d.distance_m = r.uniform(0, cfg.distance_m.lo, cfg.distance_m.hi);
        d.p_max_w = r.uniform(1, cfg.p_max_w.lo, cfg.p_max_w.hi);
        d.p_min_w = r.uniform(2, cfg.p_min_w.lo, cfg.p_min_w.hi);
        d.gpu_freq_hz = r.uniform(3, cfg.device_freq_hz.lo, cfg.device_freq_hz.hi);
        d.gpu_cores = detail::draw_int(r, 4, cfg.device_cores);
        d.flops_per_cycle = r.uniform(5, cfg.device_flops_per_cycle.lo, cfg.device_flops_per_cycle.hi);
        d.kappa1 = r.uniform(6, cfg.kappa1.lo, cfg.kappa1.hi);
        d.num_samples = detail::draw_int(r, 7, cfg.num_samples);
        s.devices.push_back(d);
    }
    if (const auto v = validate_scenario(s); !v.empty()) {
        throw ConfigError("config yields an invalid scenario: " + v.front().subject + " " + v.front().field + ": " +
                          v.front().message);
    }
    return s;
}

} // namespace sflam
