#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sflam/error.hpp"
#include "sflam/rng.hpp"

namespace sflam {

/// 2^q uniformly spaced magnitudes spanning [a_min, a_max].
struct QuantGrid {
    double a_min = 0.0;
    double a_max = 0.0;
    int q_bits = 1;

    double intervals() const noexcept { return std::ldexp(1.0, q_bits) - 1.0; }

    double spacing() const noexcept { return a_max > a_min ? (a_max - a_min) / intervals() : 0.0; }

    bool degenerate() const noexcept { return !(a_max > a_min); }

    /// Grid point chi_k. The top point is pinned to a_max exactly.
    double point(double k) const noexcept {
        return k >= intervals() ? a_max : a_min + k * spacing();
    }
};

struct QuantizedVector {
    std::vector<double> values;
    QuantGrid grid;
};

inline QuantGrid make_grid(std::span<const double> a, int q_bits) {
    if (a.empty()) {
        throw ArgumentError("quantize: empty input vector");
    }
    if (q_bits < 1 || q_bits > 32) {
        throw ArgumentError("quantize: q_bits must lie in [1, 32]");
    }
    double lo = std::abs(a[0]);
    double hi = lo;
    for (const double v : a) {
        if (!std::isfinite(v)) {
            throw ArgumentError("quantize: non-finite element");
        }
        lo = std::min(lo, std::abs(v));
        hi = std::max(hi, std::abs(v));
    }
    return {lo, hi, q_bits};
}

/// Stochastic rounding of one magnitude onto the grid. `u` is uniform on [0, 1).
inline double round_magnitude(const QuantGrid& g, double mag, double u) noexcept {
    if (g.degenerate()) {
        return mag;
    }
    const double top = g.intervals();
    const double k = std::clamp(std::floor((mag - g.a_min) / g.spacing()), 0.0, top - 1.0);
    const double lower = g.point(k);
    const double upper = g.point(k + 1.0);
    if (mag <= lower) {
        return lower;
    }
    if (mag >= upper) {
        return upper;
    }
    // Probability of the lower endpoint.
    const double iota = (upper - mag) / (upper - lower);
    return u < iota ? lower : upper;
}

/// Unbiased stochastic quantization of `a` with q_bits per magnitude.
/// Element d draws rng.uniform(d), so chunks can be quantized independently.
/// Zero elements keep sign 0 and therefore map to 0.
inline QuantizedVector quantize(std::span<const double> a, int q_bits, const CounterRng& rng) {
    QuantizedVector out;
    out.grid = make_grid(a, q_bits);
    out.values.resize(a.size());
    if (out.grid.degenerate()) {
        std::copy(a.begin(), a.end(), out.values.begin());
        return out;
    }
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double mag = round_magnitude(out.grid, std::abs(a[d]), rng.uniform(d));
        out.values[d] = a[d] > 0.0 ? mag : (a[d] < 0.0 ? -mag : 0.0);
    }
    return out;
}

/// Exact bit count of a quantized tensor: q * dim + overhead.
inline constexpr std::int64_t payload_bits(std::int64_t activation_dim, int q_bits, std::int64_t overhead_bits) {
    return static_cast<std::int64_t>(q_bits) * activation_dim + overhead_bits;
}

/// Payload at q bits scaled from the full-precision size s_o at q_max.
inline double approx_payload_bits(double s_o, int q_bits, int q_max) {
    if (q_bits > q_max) {
        throw ArgumentError("approx_payload_bits: q_bits exceeds q_max");
    }
    if (q_bits < 0 || q_max < 1) {
        throw ArgumentError("approx_payload_bits: bit widths must be positive");
    }
    return s_o * static_cast<double>(q_bits) / static_cast<double>(q_max);
}

/// Quantization variance constant: E||Q(a) - a||^2 <= delta * ||a||^2.
inline double delta_bound(int q_bits, std::int64_t dim) {
    if (q_bits < 1 || dim < 1) {
        throw ArgumentError("delta_bound: q_bits and dim must be >= 1");
    }
    return (1.0 + std::sqrt(2.0 * static_cast<double>(dim) - 1.0)) / (2.0 * (std::ldexp(1.0, q_bits) - 1.0));
}

} // namespace sflam
