#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sflam/cost_model.hpp"
#include "sflam/error.hpp"

namespace sflam {

struct ScaConfig {
    double tol = 1e-9;     // stop when |p^{i+1} - p^i| <= tol
    int max_iters = 200;
    double damping = 0.5;  // in (0, 1]
    int max_retries = 40;  // damping halvings per iteration
};

struct PowerResult {
    double p_star = 0.0;
    bool feasible = false;
    std::vector<double> trace;  // iterates p^0, p^1, ...
};

/// Relative slack kept below the uplink budget by the power solver.
inline constexpr double kBudgetMargin = 1e-12;

/// Constants of the uplink model for one device: T_com(p) = A0 / log2(1 + B0 p)
/// and E_com(p) = p * T_com(p).
struct UplinkModel {
    double a0 = 0.0;  // payload / bandwidth
    double b0 = 0.0;  // SNR per watt

    UplinkModel(const DeviceProfile& dev, const WirelessEnv& env, double payload_bits)
        : a0(payload_bits / env.subcarrier_bandwidth_hz), b0(snr_per_watt(dev, env)) {}

    double time(double p) const { return a0 / std::log2(1.0 + b0 * p); }
    double energy(double p) const { return p * time(p); }

    double energy_slope(double p) const {
        const double l2 = std::log2(1.0 + b0 * p);
        return a0 / l2 - a0 * b0 * p / (std::numbers::ln2 * (1.0 + b0 * p) * l2 * l2);
    }

    double time_slope(double p) const {
        const double ln = std::log1p(b0 * p);
        return -a0 * b0 * std::numbers::ln2 / ((1.0 + b0 * p) * ln * ln);
    }

    /// Smallest power meeting T_com(p) <= budget * (1 - kBudgetMargin), or +inf
    /// when none exists. Inverts the closed form, then steps up ulp by ulp until
    /// the direct evaluation agrees. The margin keeps the result feasible under
    /// other algebraically equal evaluations of T_com.
    double min_power_for(double budget) const {
        if (!(budget > 0.0)) {
            return kInfeasible;
        }
        budget *= 1.0 - kBudgetMargin;
        double p = std::expm1(std::numbers::ln2 * a0 / budget) / b0;
        if (!std::isfinite(p)) {
            return kInfeasible;
        }
        for (int i = 0; i < 64 && time(p) > budget; ++i) {
            p = std::nextafter(p, kInfeasible);
        }
        return p;
    }
};

/// First-order expansion of E_com around p_i, evaluated at p.
inline double taylor_energy(double p_i, double p, const DeviceProfile& dev, const WirelessEnv& env,
                            double payload_bits) {
    const UplinkModel m(dev, env, payload_bits);
    return m.energy(p_i) + m.energy_slope(p_i) * (p - p_i);
}

/// First-order expansion of T_com around p_i, evaluated at p. T_com is convex
/// in p, so this never exceeds the true time.
inline double taylor_time(double p_i, double p, const DeviceProfile& dev, const WirelessEnv& env,
                          double payload_bits) {
    const UplinkModel m(dev, env, payload_bits);
    return m.time(p_i) + m.time_slope(p_i) * (p - p_i);
}

/// Minimum-energy uplink power for one device by successive convex
/// approximation. `t_budget_s` is the time left for the uplink after device
/// and server compute.
///
/// Each step minimizes the affine energy surrogate over the powers that meet
/// the budget under the exact T_com, so every iterate is feasible. The step is
/// damped; a step that raises the true energy is retried with half the damping.
inline PowerResult solve_power(const DeviceProfile& dev, const WirelessEnv& env, double payload_bits,
                               double t_budget_s, const ScaConfig& cfg = {}) {
    if (!(cfg.tol > 0.0) || !(cfg.damping > 0.0 && cfg.damping <= 1.0) || cfg.max_iters < 1) {
        throw ArgumentError("solve_power: invalid ScaConfig");
    }
    if (dev.p_min_w > dev.p_max_w) {
        throw ArgumentError("solve_power: p_min exceeds p_max");
    }
    PowerResult res;
    if (!(t_budget_s > 0.0)) {
        return res;
    }
    const UplinkModel m(dev, env, payload_bits);
    if (payload_bits <= 0.0) {
        res.p_star = dev.p_min_w;
        res.feasible = true;
        res.trace = {dev.p_min_w};
        return res;
    }
    if (m.time(dev.p_max_w) > t_budget_s) {
        return res;
    }

    // Feasible interval under the exact constraint: [lo, p_max].
    const double lo = std::max(dev.p_min_w, std::min(m.min_power_for(t_budget_s), dev.p_max_w));
    const double hi = dev.p_max_w;

    auto fail = [&](const char* what) {
        throw NumericalError(std::string("solve_power: ") + what, res.trace);
    };

    double p = hi;
    res.trace.push_back(p);
    for (int it = 0; it < cfg.max_iters; ++it) {
        const double slope = m.energy_slope(p);
        if (!std::isfinite(slope)) {
            fail("non-finite energy slope");
        }
        // The surrogate is affine in p, so its minimum over [lo, hi] is an endpoint.
        const double target = slope > 0.0 ? lo : (slope < 0.0 ? hi : p);

        const double e_now = m.energy(p);
        double step = cfg.damping;
        double next = p + step * (target - p);
        for (int r = 0; r < cfg.max_retries && m.energy(next) > e_now; ++r) {
            step *= 0.5;
            next = p + step * (target - p);
        }
        if (!std::isfinite(next)) {
            fail("non-finite iterate");
        }
        if (m.energy(next) > e_now) {
            next = p;
        }
        res.trace.push_back(next);
        const bool converged = std::abs(next - p) <= cfg.tol;
        p = next;
        if (converged) {
            // The surrogate minimizer is feasible by construction; take it when
            // it is at least as good as the damped iterate.
            if (m.energy(target) <= m.energy(p)) {
                p = target;
            }
            break;
        }
    }
    res.p_star = std::clamp(p, lo, hi);
    res.feasible = m.time(res.p_star) <= t_budget_s;
    return res;
}

} // namespace sflam
