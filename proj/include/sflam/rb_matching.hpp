#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sflam/cost_model.hpp"
#include "sflam/error.hpp"

namespace sflam {

/// Balanced device x (RB + virtual RB) weight matrix, row-major. Columns at or
/// beyond n_rbs are virtual and carry zero weight.
struct MatchingInstance {
    int n_devices = 0;
    int n_rbs = 0;
    std::vector<double> weights;

    double at(int n, int m) const { return weights[static_cast<std::size_t>(n) * n_devices + m]; }
    double& at(int n, int m) { return weights[static_cast<std::size_t>(n) * n_devices + m]; }
};

struct Assignment {
    std::vector<std::optional<int>> rb_of_device;
    double objective = 0.0;
};

/// Edge weight of device n: its efficiency ln(1+q)/E when the round deadline and
/// the power and bit-width bounds hold at (p, q), else 0.
inline double device_weight(const Scenario& s, std::size_t n, double p_w, int q_bits, double t_max_s) {
    const auto& dev = s.devices.at(n);
    if (!(p_w >= dev.p_min_w && p_w <= dev.p_max_w)) {
        return 0.0;
    }
    if (q_bits < s.workload.q_min_bits || q_bits > s.workload.q_max_bits) {
        return 0.0;
    }
    const auto c = device_cost_if_assigned(s, n, p_w, q_bits);
    if (!meets_deadline(c.t_total_s, t_max_s)) {
        return 0.0;
    }
    return device_efficiency(q_bits, c.e_total_j);
}

/// RBs share bandwidth and gain model, so each real column repeats the device weight.
inline MatchingInstance build_weights(const Scenario& s, std::span<const double> power_w,
                                      std::span<const int> q_bits, double t_max_s) {
    const int n = static_cast<int>(s.devices.size());
    const int m = s.env.num_rbs;
    if (n < m) {
        throw ArgumentError("build_weights: fewer devices than resource blocks");
    }
    if (power_w.size() != s.devices.size() || q_bits.size() != s.devices.size()) {
        throw ArgumentError("build_weights: decision length mismatch");
    }
    MatchingInstance inst{n, m, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (int i = 0; i < n; ++i) {
        const double w = device_weight(s, static_cast<std::size_t>(i), power_w[i], q_bits[i], t_max_s);
        for (int j = 0; j < m; ++j) {
            inst.at(i, j) = w;
        }
    }
    return inst;
}

inline MatchingInstance build_weights(const Scenario& s, std::span<const double> power_w,
                                      std::span<const int> q_bits) {
    return build_weights(s, power_w, q_bits, s.t_max_s);
}

/// Maximum-weight perfect matching on the balanced graph (Hungarian method with
/// potentials, O(n^3)). Devices landing on a virtual column, or on a real
/// column with zero weight, get no RB.
inline Assignment solve_assignment(const MatchingInstance& inst) {
    const int n = inst.n_devices;
    if (n < 0 || inst.weights.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw ArgumentError("solve_assignment: weight matrix must be square");
    }
    if (inst.n_rbs > n) {
        throw ArgumentError("solve_assignment: more resource blocks than devices");
    }

    // Minimize cost = -weight. Rows are devices, 1-based with a sentinel column 0.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = row_of_col[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = -inst.at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of_col[j0] != 0);
        do {
            const int j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.rb_of_device.assign(static_cast<std::size_t>(n), std::nullopt);
    for (int j = 1; j <= n; ++j) {
        const int dev = row_of_col[j] - 1;
        const int col = j - 1;
        if (col < inst.n_rbs && inst.at(dev, col) > 0.0) {
            out.rb_of_device[static_cast<std::size_t>(dev)] = col;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (const auto& rb = out.rb_of_device[static_cast<std::size_t>(i)]) {
            out.objective += inst.at(i, *rb);
        }
    }
    return out;
}

/// Sum of weights of a given assignment (device order).
inline double assignment_objective(const MatchingInstance& inst, std::span<const std::optional<int>> rb_of_device) {
    double total = 0.0;
    for (int i = 0; i < inst.n_devices; ++i) {
        if (const auto& rb = rb_of_device[static_cast<std::size_t>(i)]) {
            total += inst.at(i, *rb);
        }
    }
    return total;
}

} // namespace sflam
