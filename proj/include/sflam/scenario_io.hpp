#pragma once

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sflam/error.hpp"
#include "sflam/scenario.hpp"

namespace sflam {

using json = nlohmann::json;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << text;
}

/// Parses JSON text; syntax errors report the 1-based line number.
inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw ConfigError(origin + ":" + std::to_string(line) + ": parse error: " + e.what());
    }
}

/// Reject keys outside `allowed` so typos do not silently fall back to defaults.
inline void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& section) {
    if (!obj.is_object()) {
        throw ConfigError("section '" + section + "' must be an object");
    }
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key())) {
            const auto qualified = section.empty() ? item.key() : section + "." + item.key();
            throw ConfigError("unknown config key '" + qualified + "'");
        }
    }
}

template <class T>
void read_scalar(const json& obj, const char* key, T& out, const std::string& section) {
    if (!obj.contains(key)) {
        return;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError("config key '" + section + "." + key + "' must be a number");
    }
    out = v.get<T>();
}

inline void read_range(const json& obj, const char* key, Range& out, const std::string& section) {
    if (!obj.contains(key)) {
        return;
    }
    const auto& v = obj.at(key);
    const auto name = section + "." + key;
    if (v.is_number()) {
        out = {v.get<double>(), v.get<double>()};
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        out = {v[0].get<double>(), v[1].get<double>()};
    } else {
        throw ConfigError("config key '" + name + "' must be a number or [lo, hi]");
    }
}

} // namespace detail

/// Parses the scenario config schema documented in docs/config.md. Missing
/// keys keep their defaults; unknown keys and bad ranges throw ConfigError.
inline ScenarioConfig parse_scenario_config(const std::string& text, const std::string& origin = "<config>") {
    using namespace detail;
    const json root = parse_json(text, origin);
    check_keys(root, {"num_devices", "t_max_s", "device", "server", "env", "workload"}, "");

    ScenarioConfig cfg;
    read_scalar(root, "num_devices", cfg.num_devices, "");
    read_scalar(root, "t_max_s", cfg.t_max_s, "");

    if (root.contains("device")) {
        const auto& d = root["device"];
        check_keys(d, {"distance_m", "p_max_w", "p_min_w", "gpu_freq_hz", "gpu_cores", "flops_per_cycle",
                       "kappa1", "num_samples"},
                   "device");
        read_range(d, "distance_m", cfg.distance_m, "device");
        read_range(d, "p_max_w", cfg.p_max_w, "device");
        read_range(d, "p_min_w", cfg.p_min_w, "device");
        read_range(d, "gpu_freq_hz", cfg.device_freq_hz, "device");
        read_range(d, "gpu_cores", cfg.device_cores, "device");
        read_range(d, "flops_per_cycle", cfg.device_flops_per_cycle, "device");
        read_range(d, "kappa1", cfg.kappa1, "device");
        read_range(d, "num_samples", cfg.num_samples, "device");
    }
    if (root.contains("server")) {
        const auto& sv = root["server"];
        check_keys(sv, {"gpu_freq_hz", "gpu_cores", "flops_per_cycle"}, "server");
        read_range(sv, "gpu_freq_hz", cfg.server_freq_hz, "server");
        read_range(sv, "gpu_cores", cfg.server_cores, "server");
        read_range(sv, "flops_per_cycle", cfg.server_flops_per_cycle, "server");
    }
    if (root.contains("env")) {
        const auto& e = root["env"];
        check_keys(e, {"subcarrier_bandwidth_hz", "channel_gain", "pathloss_exp", "noise_power_w", "num_rbs"},
                   "env");
        read_scalar(e, "subcarrier_bandwidth_hz", cfg.env.subcarrier_bandwidth_hz, "env");
        read_scalar(e, "channel_gain", cfg.env.channel_gain, "env");
        read_scalar(e, "pathloss_exp", cfg.env.pathloss_exp, "env");
        read_scalar(e, "noise_power_w", cfg.env.noise_power_w, "env");
        read_scalar(e, "num_rbs", cfg.env.num_rbs, "env");
    }
    if (root.contains("workload")) {
        const auto& w = root["workload"];
        check_keys(w, {"device_flops", "server_flops", "minibatch", "activation_dim", "payload_bits_full",
                       "q_max_bits", "q_min_bits", "overhead_bits"},
                   "workload");
        read_scalar(w, "device_flops", cfg.workload.device_flops, "workload");
        read_scalar(w, "server_flops", cfg.workload.server_flops, "workload");
        read_scalar(w, "minibatch", cfg.workload.minibatch, "workload");
        read_scalar(w, "activation_dim", cfg.workload.activation_dim, "workload");
        read_scalar(w, "payload_bits_full", cfg.workload.payload_bits_full, "workload");
        read_scalar(w, "q_max_bits", cfg.workload.q_max_bits, "workload");
        read_scalar(w, "q_min_bits", cfg.workload.q_min_bits, "workload");
        read_scalar(w, "overhead_bits", cfg.workload.overhead_bits, "workload");
    }
    check_config(cfg);
    return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
    return parse_scenario_config(detail::read_file(path), path);
}

// Scenario snapshots. nlohmann::json prints doubles in shortest round-trip
// form, so dump(parse(dump(s))) is byte-stable.

inline json to_json(const Scenario& s) {
    json devices = json::array();
    for (const auto& d : s.devices) {
        devices.push_back({{"id", d.id},
                           {"distance_m", d.distance_m},
                           {"gpu_freq_hz", d.gpu_freq_hz},
                           {"gpu_cores", d.gpu_cores},
                           {"flops_per_cycle", d.flops_per_cycle},
                           {"kappa1", d.kappa1},
                           {"p_min_w", d.p_min_w},
                           {"p_max_w", d.p_max_w},
                           {"num_samples", d.num_samples}});
    }
    const auto& w = s.workload;
    return {
        {"format", "sflam-scenario/1"},
        {"rng_seed", s.rng_seed},
        {"t_max_s", s.t_max_s},
        {"server",
         {{"gpu_freq_hz", s.server.gpu_freq_hz},
          {"gpu_cores", s.server.gpu_cores},
          {"flops_per_cycle", s.server.flops_per_cycle}}},
        {"env",
         {{"subcarrier_bandwidth_hz", s.env.subcarrier_bandwidth_hz},
          {"channel_gain", s.env.channel_gain},
          {"pathloss_exp", s.env.pathloss_exp},
          {"noise_power_w", s.env.noise_power_w},
          {"num_rbs", s.env.num_rbs}}},
        {"workload",
         {{"device_flops", w.device_flops},
          {"server_flops", w.server_flops},
          {"minibatch", w.minibatch},
          {"activation_dim", w.activation_dim},
          {"payload_bits_full", w.payload_bits_full},
          {"q_max_bits", w.q_max_bits},
          {"q_min_bits", w.q_min_bits},
          {"overhead_bits", w.overhead_bits}}},
        {"devices", devices},
    };
}

inline Scenario scenario_from_json(const json& j) {
    try {
        if (j.value("format", "") != "sflam-scenario/1") {
            throw ConfigError("scenario snapshot: missing or unsupported 'format'");
        }
        Scenario s;
        s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        s.t_max_s = j.at("t_max_s").get<double>();

        const auto& sv = j.at("server");
        s.server = {sv.at("gpu_freq_hz").get<double>(), sv.at("gpu_cores").get<int>(),
                    sv.at("flops_per_cycle").get<double>()};

        const auto& e = j.at("env");
        s.env = {e.at("subcarrier_bandwidth_hz").get<double>(), e.at("channel_gain").get<double>(),
                 e.at("pathloss_exp").get<double>(), e.at("noise_power_w").get<double>(),
                 e.at("num_rbs").get<int>()};

        const auto& w = j.at("workload");
        s.workload = {w.at("device_flops").get<double>(),
                      w.at("server_flops").get<double>(),
                      w.at("minibatch").get<int>(),
                      w.at("activation_dim").get<std::int64_t>(),
                      w.at("payload_bits_full").get<double>(),
                      w.at("q_max_bits").get<int>(),
                      w.at("q_min_bits").get<int>(),
                      w.at("overhead_bits").get<std::int64_t>()};

        for (const auto& d : j.at("devices")) {
            s.devices.push_back({d.at("id").get<int>(), d.at("distance_m").get<double>(),
                                 d.at("gpu_freq_hz").get<double>(), d.at("gpu_cores").get<int>(),
                                 d.at("flops_per_cycle").get<double>(), d.at("kappa1").get<double>(),
                                 d.at("p_min_w").get<double>(), d.at("p_max_w").get<double>(),
                                 d.at("num_samples").get<int>()});
        }
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario snapshot: ") + e.what());
    }
}

inline std::string serialize_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

inline Scenario deserialize_scenario(const std::string& text, const std::string& origin = "<scenario>") {
    return scenario_from_json(detail::parse_json(text, origin));
}

inline Scenario load_scenario(const std::string& path) {
    return deserialize_scenario(detail::read_file(path), path);
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    detail::write_file(path, serialize_scenario(s));
}

} // namespace sflam
