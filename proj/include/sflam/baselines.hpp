#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "sflam/bcd_solver.hpp"
#include "sflam/rng.hpp"

namespace sflam {

/// Uplink power used by the equal-power baseline.
inline constexpr double kEqualPowerW = 1.5;

enum class Scheme { Proposed, EqualPower, RandomRb, NoQuant };

inline std::string_view scheme_name(Scheme s) {
    switch (s) {
    case Scheme::Proposed: return "proposed";
    case Scheme::EqualPower: return "ep";
    case Scheme::RandomRb: return "rb";
    case Scheme::NoQuant: return "nq";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view name) {
    for (const auto s : {Scheme::Proposed, Scheme::EqualPower, Scheme::RandomRb, Scheme::NoQuant}) {
        if (scheme_name(s) == name) {
            return s;
        }
    }
    throw ArgumentError("unknown scheme '" + std::string(name) + "' (expected proposed|ep|rb|nq)");
}

/// Equal power: every device transmits at 1.5 W. A device whose power range
/// excludes 1.5 W cannot take part. Bit widths and RBs are optimized.
inline RoundSolution ep_scheme(const Scenario& s, const BcdConfig& /*cfg*/ = {}, std::optional<double> t_max = {}) {
    const double t_max_s = t_max.value_or(s.t_max_s);
    std::vector<double> p(s.devices.size(), kEqualPowerW);
    auto q = solve_quant_block(s, p, t_max_s);
    auto z = solve_rb_block(s, p, q, t_max_s);
    auto sol = finalize_round(s, {std::move(p), std::move(q), std::move(z)}, t_max_s);
    sol.iterations = 1;
    sol.converged = true;
    return sol;
}

/// No quantization management: q = q_max everywhere; power and RBs optimized.
inline RoundSolution nq_scheme(const Scenario& s, const BcdConfig& cfg = {}, std::optional<double> t_max = {}) {
    const double t_max_s = t_max.value_or(s.t_max_s);
    std::vector<int> q(s.devices.size(), s.workload.q_max_bits);
    auto p = solve_power_block(s, q, t_max_s, cfg.sca);
    auto z = solve_rb_block(s, p, q, t_max_s);
    auto sol = finalize_round(s, {std::move(p), std::move(q), std::move(z)}, t_max_s);
    sol.iterations = 1;
    sol.converged = true;
    return sol;
}

/// Random bandwidth allocation: power and bit widths from the SCA and
/// exhaustive-search blocks, RBs handed to a uniformly random subset of the
/// devices that can meet the deadline.
inline RoundSolution rb_scheme(const Scenario& s, const BcdConfig& cfg, std::uint64_t seed,
                               std::optional<double> t_max = {}) {
    const double t_max_s = t_max.value_or(s.t_max_s);
    const std::size_t n_dev = s.devices.size();

    std::vector<int> q(n_dev, s.workload.q_max_bits);
    std::vector<double> p(n_dev);
    for (std::size_t n = 0; n < n_dev; ++n) {
        p[n] = s.devices[n].p_max_w;
    }
    int iters = 0;
    bool converged = false;
    while (iters < cfg.max_iters) {
        auto p_next = solve_power_block(s, q, t_max_s, cfg.sca);
        auto q_next = solve_quant_block(s, p_next, t_max_s);
        const bool still = detail::l2_diff(p_next, p) < cfg.eps_p && detail::l2_diff(q_next, q) < cfg.eps_q;
        p = std::move(p_next);
        q = std::move(q_next);
        ++iters;
        if (still) {
            converged = true;
            break;
        }
    }

    std::vector<std::size_t> eligible;
    for (std::size_t n = 0; n < n_dev; ++n) {
        if (device_weight(s, n, p[n], q[n], t_max_s) > 0.0) {
            eligible.push_back(n);
        }
    }
    // Partial Fisher-Yates: the first k slots become a uniform random subset.
    const CounterRng rng = CounterRng(seed).child(0x52B);
    const std::size_t k = std::min(eligible.size(), static_cast<std::size_t>(s.env.num_rbs));
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(i, static_cast<std::int64_t>(i), static_cast<std::int64_t>(eligible.size() - 1)));
        std::swap(eligible[i], eligible[j]);
    }
    std::vector<std::optional<int>> z(n_dev);
    for (std::size_t i = 0; i < k; ++i) {
        z[eligible[i]] = static_cast<int>(i);
    }

    auto sol = finalize_round(s, {std::move(p), std::move(q), std::move(z)}, t_max_s);
    sol.iterations = iters;
    sol.converged = converged;
    return sol;
}

inline RoundSolution run_scheme(Scheme scheme, const Scenario& s, const BcdConfig& cfg, std::uint64_t seed,
                                std::optional<double> t_max = {}) {
    switch (scheme) {
    case Scheme::Proposed: return solve_round(s, cfg, t_max);
    case Scheme::EqualPower: return ep_scheme(s, cfg, t_max);
    case Scheme::RandomRb: return rb_scheme(s, cfg, seed, t_max);
    case Scheme::NoQuant: return nq_scheme(s, cfg, t_max);
    }
    throw ArgumentError("run_scheme: unknown scheme");
}

// ---------------------------------------------------------------------------
// Framework-level round costs

enum class Framework { FL, SL, SFL, SFLAM };

inline std::string_view framework_name(Framework f) {
    switch (f) {
    case Framework::FL: return "FL";
    case Framework::SL: return "SL";
    case Framework::SFL: return "SFL";
    case Framework::SFLAM: return "SFLAM";
    }
    return "?";
}

/// Whole-model constants needed by federated learning, where each device
/// trains and uploads the full model.
struct FrameworkWorkload {
    double full_model_flops_dev = 558.99e9;     // ViT-B/32, one mini-batch
    double model_bits = 333.64 * kBitsPerMiB;  // ViT-B/32 parameters
};

struct FrameworkCost {
    double time_cmp_s = 0.0;
    double time_com_s = 0.0;
    double time_s = 0.0;
    double energy_cmp_j = 0.0;
    double energy_com_j = 0.0;
    double energy_j = 0.0;
};

/// One round of a framework over the participants of `decision`, using its
/// powers and RBs. Phase times are maxima over devices for the parallel
/// frameworks and sums for sequential split learning; energies always sum.
///
///  FL:    full-model compute on the device, then full-model upload.
///  SL:    devices take turns; each turn is device compute + activation upload
///         at q_max + server compute.
///  SFL:   the same per-device pipeline at q_max, all devices in parallel.
///  SFLAM: SFL with the decision's bit widths.
/// Downlink transfers are neglected throughout.
inline FrameworkCost framework_round_cost(Framework kind, const Scenario& s, const FrameworkWorkload& fw,
                                          const RoundDecision& decision) {
    if (fw.full_model_flops_dev < s.workload.device_flops) {
        throw ArgumentError("FrameworkWorkload: full-model FLOPs below device-side FLOPs");
    }
    FrameworkCost out;
    const double t_srv = server_compute_time(s.server, s.workload);
    for (std::size_t n = 0; n < s.devices.size(); ++n) {
        if (!decision.participating(n)) {
            continue;
        }
        const auto& dev = s.devices[n];
        const double p = decision.power_w[n];
        const double rate = uplink_rate(p, dev, s.env, true);

        double t_cmp = 0.0;
        double e_cmp = 0.0;
        double payload = 0.0;
        double t_srv_n = t_srv;
        if (kind == Framework::FL) {
            const double f = dev.gpu_freq_hz;
            t_cmp = fw.full_model_flops_dev / (f * dev.gpu_cores * dev.flops_per_cycle);
            e_cmp = dev.kappa1 * f * f * f * t_cmp;
            payload = fw.model_bits;
            t_srv_n = 0.0;
        } else {
            t_cmp = device_compute_time(dev, s.workload);
            e_cmp = device_compute_energy(dev, s.workload);
            const int q = kind == Framework::SFLAM ? decision.q_bits[n] : s.workload.q_max_bits;
            payload = activation_payload(s.workload, q);
        }
        const auto com = comm_time_energy(payload, rate, p);
        const double t_total = t_cmp + com.time_s + t_srv_n;

        if (kind == Framework::SL) {
            out.time_cmp_s += t_cmp + t_srv_n;
            out.time_com_s += com.time_s;
            out.time_s += t_total;
        } else {
            out.time_cmp_s = std::max(out.time_cmp_s, t_cmp + t_srv_n);
            out.time_com_s = std::max(out.time_com_s, com.time_s);
            out.time_s = std::max(out.time_s, t_total);
        }
        out.energy_cmp_j += e_cmp;
        out.energy_com_j += com.energy_j;
        out.energy_j += e_cmp + com.energy_j;
    }
    return out;
}

} // namespace sflam
