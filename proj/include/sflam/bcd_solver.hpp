#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sflam/cost_model.hpp"
#include "sflam/parallel.hpp"
#include "sflam/power_sca.hpp"
#include "sflam/quant_search.hpp"
#include "sflam/rb_matching.hpp"

namespace sflam {

struct BcdConfig {
    double eps_p = 1e-6;  // on ||p^i - p^{i-1}||_2
    double eps_q = 0.5;   // on ||q^i - q^{i-1}||_2; below 1 means "unchanged"
    double eps_z = 0.5;   // on the Hamming distance between assignments
    int max_iters = 50;
    ScaConfig sca;
};

struct BcdIterate {
    double dp = 0.0;
    double dq = 0.0;
    double dz = 0.0;
    double efficiency = 0.0;
};

struct RoundSolution {
    RoundDecision decision;
    std::vector<CostBreakdown> per_device;
    double system_energy_j = 0.0;
    double system_efficiency = 0.0;
    int iterations = 0;
    bool converged = false;
    bool no_feasible_device = false;
    std::vector<BcdIterate> trace;
};

/// Time left for the uplink once device and server compute are paid.
inline double uplink_budget(const Scenario& s, std::size_t n, double t_max_s) {
    return t_max_s - device_compute_time(s.devices[n], s.workload) - server_compute_time(s.server, s.workload);
}

/// Power block: per-device SCA at fixed bit widths. Devices that cannot meet
/// the deadline at q are parked at p_max, the power that leaves the most room
/// for the next bit-width step.
inline std::vector<double> solve_power_block(const Scenario& s, std::span<const int> q_bits, double t_max_s,
                                             const ScaConfig& cfg) {
    std::vector<double> p(s.devices.size());
    parallel_for(s.devices.size(), [&](std::size_t n) {
        const auto r = solve_power(s.devices[n], s.env, activation_payload(s.workload, q_bits[n]),
                                   uplink_budget(s, n, t_max_s), cfg);
        p[n] = r.feasible ? r.p_star : s.devices[n].p_max_w;
    });
    return p;
}

/// Bit-width block: per-device exhaustive search at fixed power. Devices with
/// no feasible width get q_min (their matching weight is zero either way).
inline std::vector<int> solve_quant_block(const Scenario& s, std::span<const double> power_w, double t_max_s) {
    std::vector<int> q(s.devices.size());
    parallel_for(s.devices.size(), [&](std::size_t n) {
        const auto r = solve_quantization(s.devices[n], s.env, power_w[n], uplink_budget(s, n, t_max_s), s.workload);
        q[n] = r.feasible ? r.q_star : s.workload.q_min_bits;
    });
    return q;
}

inline std::vector<std::optional<int>> solve_rb_block(const Scenario& s, std::span<const double> power_w,
                                                      std::span<const int> q_bits, double t_max_s) {
    return solve_assignment(build_weights(s, power_w, q_bits, t_max_s)).rb_of_device;
}

/// Assembles costs and aggregates for a decision, first dropping any
/// participant that breaks a constraint.
inline RoundSolution finalize_round(const Scenario& s, RoundDecision d, double t_max_s) {
    for (std::size_t n = 0; n < d.size(); ++n) {
        if (d.rb_assignment[n] && device_weight(s, n, d.power_w[n], d.q_bits[n], t_max_s) <= 0.0) {
            d.rb_assignment[n].reset();
        }
    }
    RoundSolution sol;
    sol.per_device = round_costs(s, d);
    sol.system_energy_j = system_energy(sol.per_device, d.participation());
    sol.system_efficiency = efficiency(d, sol.per_device);
    sol.no_feasible_device = d.participants() == 0;
    sol.decision = std::move(d);
    return sol;
}

namespace detail {

inline double l2_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

inline double l2_diff(std::span<const int> a, std::span<const int> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double hamming(std::span<const std::optional<int>> a, std::span<const std::optional<int>> b) {
    double k = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        k += a[i] != b[i] ? 1.0 : 0.0;
    }
    return k;
}

inline double decision_efficiency(const Scenario& s, const RoundDecision& d) {
    const auto costs = round_costs(s, d);
    return efficiency(d, costs);
}

} // namespace detail

/// Block coordinate descent over power, bit width and RB assignment, in that
/// order, until all three blocks stop moving or max_iters is reached.
inline RoundSolution solve_round(const Scenario& s, const BcdConfig& cfg = {}, std::optional<double> t_max = {}) {
    if (!(cfg.eps_p > 0.0 && cfg.eps_q > 0.0 && cfg.eps_z > 0.0) || cfg.max_iters < 1) {
        throw ArgumentError("solve_round: invalid BcdConfig");
    }
    const double t_max_s = t_max.value_or(s.t_max_s);
    const std::size_t n_dev = s.devices.size();

    RoundDecision d;
    d.q_bits.assign(n_dev, s.workload.q_max_bits);
    d.power_w.resize(n_dev);
    d.rb_assignment.assign(n_dev, std::nullopt);
    for (std::size_t n = 0; n < n_dev; ++n) {
        d.power_w[n] = s.devices[n].p_max_w;
        if (n < static_cast<std::size_t>(s.env.num_rbs)) {
            d.rb_assignment[n] = static_cast<int>(n);
        }
    }

    std::vector<BcdIterate> trace;
    bool converged = false;
    int iters = 0;
    while (iters < cfg.max_iters) {
        auto p = solve_power_block(s, d.q_bits, t_max_s, cfg.sca);
        auto q = solve_quant_block(s, p, t_max_s);
        auto z = solve_rb_block(s, p, q, t_max_s);

        BcdIterate step;
        step.dp = detail::l2_diff(p, d.power_w);
        step.dq = detail::l2_diff(q, d.q_bits);
        step.dz = detail::hamming(z, d.rb_assignment);
        d = {std::move(p), std::move(q), std::move(z)};
        step.efficiency = detail::decision_efficiency(s, d);
        trace.push_back(step);
        ++iters;

        if (step.dp < cfg.eps_p && step.dq < cfg.eps_q && step.dz < cfg.eps_z) {
            converged = true;
            break;
        }
    }

    auto sol = finalize_round(s, std::move(d), t_max_s);
    sol.iterations = iters;
    sol.converged = converged;
    sol.trace = std::move(trace);
    return sol;
}

} // namespace sflam
