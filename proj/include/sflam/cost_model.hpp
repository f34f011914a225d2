#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sflam/error.hpp"
#include "sflam/quantizer.hpp"
#include "sflam/scenario.hpp"

namespace sflam {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

/// Per-device latency and energy for one round. Infinite communication time
/// marks a device with no uplink.
struct CostBreakdown {
    double t_cmp_dev_s = 0.0;
    double t_cmp_srv_s = 0.0;
    double t_com_s = 0.0;
    double e_cmp_j = 0.0;
    double e_com_j = 0.0;
    double t_total_s = 0.0;
    double e_total_j = 0.0;

    bool feasible() const noexcept { return std::isfinite(t_total_s); }
};

/// One device's slice of a RoundDecision.
struct DeviceDecision {
    double power_w = 0.0;
    int q_bits = 0;
    std::optional<int> rb;

    bool participating() const noexcept { return rb.has_value(); }
};

/// Optimization variables of one round: power, bit width and resource block
/// per device. A device participates iff it holds a resource block.
struct RoundDecision {
    std::vector<double> power_w;
    std::vector<int> q_bits;
    std::vector<std::optional<int>> rb_assignment;

    std::size_t size() const noexcept { return power_w.size(); }

    bool participating(std::size_t n) const { return rb_assignment.at(n).has_value(); }

    std::vector<bool> participation() const {
        std::vector<bool> a(rb_assignment.size());
        for (std::size_t n = 0; n < a.size(); ++n) {
            a[n] = rb_assignment[n].has_value();
        }
        return a;
    }

    int participants() const {
        int k = 0;
        for (const auto& rb : rb_assignment) {
            k += rb.has_value() ? 1 : 0;
        }
        return k;
    }

    DeviceDecision device(std::size_t n) const { return {power_w.at(n), q_bits.at(n), rb_assignment.at(n)}; }

    static RoundDecision empty(std::size_t n) {
        return {std::vector<double>(n, 0.0), std::vector<int>(n, 0), std::vector<std::optional<int>>(n)};
    }
};

inline double device_compute_time(const DeviceProfile& dev, const WorkloadModel& w) {
    return w.device_flops / (dev.gpu_freq_hz * dev.gpu_cores * dev.flops_per_cycle);
}

/// kappa1 * f^3 * T_cmp: power times time.
inline double device_compute_energy(const DeviceProfile& dev, const WorkloadModel& w) {
    const double f = dev.gpu_freq_hz;
    return dev.kappa1 * f * f * f * device_compute_time(dev, w);
}

/// Server energy is not modeled.
inline double server_compute_time(const ServerProfile& srv, const WorkloadModel& w) {
    return w.server_flops / (srv.gpu_freq_hz * srv.gpu_cores * srv.flops_per_cycle);
}

/// Linear SNR per watt: h_o * d^-gamma / N_o.
inline double snr_per_watt(const DeviceProfile& dev, const WirelessEnv& env) {
    return env.channel_gain * std::pow(dev.distance_m, -env.pathloss_exp) / env.noise_power_w;
}

/// Shannon rate on one resource block; zero when the device holds none.
inline double uplink_rate(double p_w, const DeviceProfile& dev, const WirelessEnv& env, bool participating) {
    if (!participating) {
        return 0.0;
    }
    return env.subcarrier_bandwidth_hz * std::log2(1.0 + p_w * snr_per_watt(dev, env));
}

struct TimeEnergy {
    double time_s = 0.0;
    double energy_j = 0.0;
};

/// Uplink time and energy. A positive payload over a zero rate is infeasible
/// and reported as infinite time and energy.
inline TimeEnergy comm_time_energy(double payload_bits, double rate_bps, double p_w) {
    if (payload_bits <= 0.0) {
        return {0.0, 0.0};
    }
    if (!(rate_bps > 0.0)) {
        return {kInfeasible, kInfeasible};
    }
    const double t = payload_bits / rate_bps;
    return {t, p_w * t};
}

/// Activation payload at q bits (scaled from the full-precision size).
inline double activation_payload(const WorkloadModel& w, int q_bits) {
    return approx_payload_bits(w.payload_bits_full, q_bits, w.q_max_bits);
}

inline CostBreakdown round_cost(const DeviceProfile& dev, const ServerProfile& srv, const WirelessEnv& env,
                                const WorkloadModel& w, const DeviceDecision& dd) {
    CostBreakdown c;
    c.t_cmp_dev_s = device_compute_time(dev, w);
    c.e_cmp_j = device_compute_energy(dev, w);
    c.t_cmp_srv_s = server_compute_time(srv, w);
    const double rate = uplink_rate(dd.power_w, dev, env, dd.participating());
    const auto com = comm_time_energy(activation_payload(w, dd.q_bits), rate, dd.power_w);
    c.t_com_s = com.time_s;
    c.e_com_j = com.energy_j;
    c.t_total_s = c.t_cmp_dev_s + c.t_com_s + c.t_cmp_srv_s;
    c.e_total_j = c.e_cmp_j + c.e_com_j;
    return c;
}

/// Cost of device n as if it held a resource block (RBs are homogeneous).
inline CostBreakdown device_cost_if_assigned(const Scenario& s, std::size_t n, double p_w, int q_bits) {
    return round_cost(s.devices.at(n), s.server, s.env, s.workload, {p_w, q_bits, 0});
}

inline std::vector<CostBreakdown> round_costs(const Scenario& s, const RoundDecision& d) {
    std::vector<CostBreakdown> out;
    out.reserve(s.devices.size());
    for (std::size_t n = 0; n < s.devices.size(); ++n) {
        out.push_back(round_cost(s.devices[n], s.server, s.env, s.workload, d.device(n)));
    }
    return out;
}

/// Sum of a_n * E_n, reduced in device order.
inline double system_energy(std::span<const CostBreakdown> costs, const std::vector<bool>& participation) {
    double total = 0.0;
    for (std::size_t n = 0; n < costs.size(); ++n) {
        if (participation.at(n)) {
            total += costs[n].e_total_j;
        }
    }
    return total;
}

/// Per-device efficiency ln(1 + q) / E.
inline double device_efficiency(int q_bits, double e_total_j) {
    if (!(e_total_j > 0.0)) {
        throw ArgumentError("efficiency: participating device has non-positive energy");
    }
    return std::log1p(static_cast<double>(q_bits)) / e_total_j;
}

/// System efficiency: sum over participants of ln(1 + q_n) / E_n.
inline double efficiency(std::span<const int> q_bits, std::span<const double> e_total_j,
                         const std::vector<bool>& participation) {
    if (q_bits.size() != e_total_j.size() || q_bits.size() != participation.size()) {
        throw ArgumentError("efficiency: length mismatch");
    }
    double total = 0.0;
    for (std::size_t n = 0; n < q_bits.size(); ++n) {
        if (participation[n]) {
            total += device_efficiency(q_bits[n], e_total_j[n]);
        }
    }
    return total;
}

inline double efficiency(const RoundDecision& d, std::span<const CostBreakdown> costs) {
    std::vector<double> e(costs.size());
    for (std::size_t n = 0; n < costs.size(); ++n) {
        e[n] = costs[n].e_total_j;
    }
    return efficiency(d.q_bits, e, d.participation());
}

/// Relative slack used when checking the deadline, to absorb rounding in
/// quantities recomputed from the same inputs.
inline constexpr double kDeadlineRelTol = 1e-12;

inline bool meets_deadline(double t_total_s, double t_max_s) {
    return t_total_s <= t_max_s * (1.0 + kDeadlineRelTol);
}

/// Constraint check for a full decision: deadline, power and bit-width bounds
/// for participants, and a one-to-one RB assignment. Empty iff feasible.
inline std::vector<std::string> check_decision(const Scenario& s, const RoundDecision& d,
                                               std::optional<double> t_max = {}) {
    const double t_max_s = t_max.value_or(s.t_max_s);
    std::vector<std::string> out;
    const std::size_t n_dev = s.devices.size();
    if (d.power_w.size() != n_dev || d.q_bits.size() != n_dev || d.rb_assignment.size() != n_dev) {
        out.emplace_back("decision size does not match device count");
        return out;
    }
    std::vector<int> rb_owner(static_cast<std::size_t>(s.env.num_rbs), -1);
    for (std::size_t n = 0; n < n_dev; ++n) {
        if (!d.rb_assignment[n]) {
            continue;
        }
        const auto& dev = s.devices[n];
        const std::string who = "device " + std::to_string(dev.id);
        const int rb = *d.rb_assignment[n];
        if (rb < 0 || rb >= s.env.num_rbs) {
            out.push_back(who + ": RB index out of range");
            continue;
        }
        if (rb_owner[static_cast<std::size_t>(rb)] >= 0) {
            out.push_back(who + ": RB " + std::to_string(rb) + " already assigned");
        }
        rb_owner[static_cast<std::size_t>(rb)] = static_cast<int>(n);
        if (d.power_w[n] < dev.p_min_w || d.power_w[n] > dev.p_max_w) {
            out.push_back(who + ": power outside [p_min, p_max]");
        }
        if (d.q_bits[n] < s.workload.q_min_bits || d.q_bits[n] > s.workload.q_max_bits) {
            out.push_back(who + ": q_bits outside [q_min, q_max]");
            continue;
        }
        const auto c = round_cost(dev, s.server, s.env, s.workload, d.device(n));
        if (!meets_deadline(c.t_total_s, t_max_s)) {
            out.push_back(who + ": round time exceeds T_max");
        }
    }
    return out;
}

} // namespace sflam
