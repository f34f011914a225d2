#pragma once

#include <cmath>

#include "sflam/cost_model.hpp"

namespace sflam {

struct QuantResult {
    int q_star = 0;
    double eff_star = 0.0;
    bool feasible = false;
};

/// Best integer bit width for one device at fixed power: exhaustive search of
/// [q_min, q_max] maximizing ln(1+q) / (E_cmp + E_com(q)) subject to the uplink
/// time fitting in `t_budget_s`. Ties go to the larger q.
inline QuantResult solve_quantization(const DeviceProfile& dev, const WirelessEnv& env, double p_w,
                                      double t_budget_s, const WorkloadModel& w) {
    QuantResult best;
    const double rate = uplink_rate(p_w, dev, env, true);
    const double e_cmp = device_compute_energy(dev, w);
    for (int q = w.q_min_bits; q <= w.q_max_bits; ++q) {
        const auto com = comm_time_energy(activation_payload(w, q), rate, p_w);
        if (!(com.time_s <= t_budget_s)) {
            continue;
        }
        const double eff = std::log1p(static_cast<double>(q)) / (e_cmp + com.energy_j);
        if (!best.feasible || eff >= best.eff_star) {
            best = {q, eff, true};
        }
    }
    return best;
}

} // namespace sflam
