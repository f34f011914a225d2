#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sflam/error.hpp"
#include "sflam/quantizer.hpp"

namespace sflam {

/// Constants of the convergence bound for quantized split federated training.
///
/// Two symbols are overloaded in the literature and are named apart here:
/// `strong_mu` is the strong-convexity modulus (not the payload overhead bits)
/// and `gamma_shift` is the step-size shift (not the path-loss exponent).
///
/// Gradient divergence between local and global objectives (heterogeneity)
/// enters none of the formulas below and has no field.
struct BoundParams {
    double smooth_S = 1.0;     // smoothness of the local losses
    double strong_mu = 1.0;    // strong convexity
    double gamma_shift = 1.0;  // step-size schedule shift
    std::vector<double> sigma_sq;  // per-device gradient variance
    double grad_bound_G = 1.0;     // bound on the stochastic gradient norm
    std::vector<double> rho;       // aggregation weights, sum to 1
    std::vector<double> a;         // participation levels in (0, 1]
    double hess_L = 0.0;           // bound on the activation Hessian norm
    double act_norm_sq = 0.0;      // ||activation||^2
    int n_devices = 0;
    int round_k = 1;
    int horizon_K = 1;  // horizon used by the initial-gap term
    double init_gap = 0.0;  // E||w_0 - w*||^2
};

/// Throws ArgumentError on the first broken invariant.
inline void check_bound_params(const BoundParams& bp) {
    const auto n = static_cast<std::size_t>(bp.n_devices);
    if (bp.n_devices < 1 || bp.sigma_sq.size() != n || bp.rho.size() != n || bp.a.size() != n) {
        throw ArgumentError("BoundParams: per-device vectors must all have n_devices entries");
    }
    if (!(bp.smooth_S > 0.0 && bp.strong_mu > 0.0 && bp.gamma_shift > 0.0)) {
        throw ArgumentError("BoundParams: S, mu and gamma must be positive");
    }
    if (bp.round_k < 0 || bp.horizon_K < 0) {
        throw ArgumentError("BoundParams: round indices must be non-negative");
    }
    const double rho_sum = std::accumulate(bp.rho.begin(), bp.rho.end(), 0.0);
    if (std::abs(rho_sum - 1.0) > 1e-9) {
        throw ArgumentError("BoundParams: rho must sum to 1");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(bp.a[i] > 0.0 && bp.a[i] <= 1.0)) {
            throw ArgumentError("BoundParams: participation a_n must lie in (0, 1]");
        }
        if (bp.sigma_sq[i] < 0.0 || bp.rho[i] < 0.0) {
            throw ArgumentError("BoundParams: sigma^2 and rho must be non-negative");
        }
    }
    if (bp.act_norm_sq < 0.0 || bp.init_gap < 0.0) {
        throw ArgumentError("BoundParams: norms must be non-negative");
    }
}

namespace detail {

struct BoundCoefficients {
    double c1;  // 8 S N / (mu^2 (gamma + k))
    double c2;  // 768 S^2 / (mu^3 (gamma + k) (gamma + 1))
    double c3;  // S (gamma + 1) / (2 (gamma + K))
};

inline BoundCoefficients bound_coefficients(const BoundParams& bp) {
    const double S = bp.smooth_S;
    const double mu = bp.strong_mu;
    const double g = bp.gamma_shift;
    const double gk = g + bp.round_k;
    return {8.0 * S * bp.n_devices / (mu * mu * gk), 768.0 * S * S / (mu * mu * mu * gk * (g + 1.0)),
            S * (g + 1.0) / (2.0 * (g + bp.horizon_K))};
}

} // namespace detail

/// The L^2 * delta * ||A||^2 * B term: the part of the bound due to quantizing
/// activations with q bits.
inline double quantization_penalty(const BoundParams& bp, int q_bits, std::int64_t dim) {
    check_bound_params(bp);
    const auto c = detail::bound_coefficients(bp);
    double sum_rho = 0.0;
    double sum_a = 0.0;
    for (std::size_t n = 0; n < bp.a.size(); ++n) {
        sum_rho += bp.rho[n] * bp.rho[n] * (3.0 + 1.0 / bp.a[n]);
        sum_a += 3.0 * bp.a[n];
    }
    const double B = c.c1 * sum_rho + c.c2 * sum_a;
    return bp.hess_L * bp.hess_L * delta_bound(q_bits, dim) * bp.act_norm_sq * B;
}

/// Upper bound on E[L(w_k)] - L(w*) after k rounds with q-bit activations.
inline double theorem1_bound(const BoundParams& bp, int q_bits, std::int64_t dim) {
    check_bound_params(bp);
    const auto c = detail::bound_coefficients(bp);
    const double G2 = bp.grad_bound_G * bp.grad_bound_G;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t n = 0; n < bp.a.size(); ++n) {
        s1 += bp.rho[n] * bp.rho[n] * (2.0 * bp.sigma_sq[n] + G2 + G2 / bp.a[n]);
        s2 += bp.rho[n] * (2.0 * bp.sigma_sq[n] + G2);
    }
    return c.c1 * s1 + c.c2 * s2 + c.c3 * bp.init_gap + quantization_penalty(bp, q_bits, dim);
}

/// Alternate form: the quantization variance inflates sigma^2 and G^2 inside
/// the first two terms instead of appearing as a separate penalty.
inline double theorem1_bound_inflated(const BoundParams& bp, int q_bits, std::int64_t dim) {
    check_bound_params(bp);
    const auto c = detail::bound_coefficients(bp);
    const double extra = bp.hess_L * bp.hess_L * delta_bound(q_bits, dim) * bp.act_norm_sq;
    const double G2 = bp.grad_bound_G * bp.grad_bound_G + extra;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t n = 0; n < bp.a.size(); ++n) {
        const double sig = bp.sigma_sq[n] + extra;
        s1 += bp.rho[n] * bp.rho[n] * (2.0 * sig + G2 + G2 / bp.a[n]);
        s2 += bp.rho[n] * (2.0 * sig + G2);
    }
    return c.c1 * s1 + c.c2 * s2 + c.c3 * bp.init_gap;
}

} // namespace sflam
