#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sflam/error.hpp"
#include "sflam/parallel.hpp"
#include "sflam/quantizer.hpp"
#include "sflam/rng.hpp"

namespace sflam {

/// Desk-scale split model: the device holds a linear embedding W (hidden x
/// feature), the server a linear head w (hidden), prediction w^T W x, squared
/// loss. Devices upload the quantized embedding output each step.
struct ToyConfig {
    int n_devices = 4;
    int samples_per_device = 64;
    int feature_dim = 8;
    int hidden_dim = 16;
    int minibatch = 16;
    double lr = 0.02;
    int local_epochs = 1;
    int rounds = 200;
    std::optional<int> q_bits = 32;  // nullopt disables quantization
    double heterogeneity = 0.0;      // per-device label shift scale
    double noise_std = 0.1;
    double init_scale = 0.3;
    std::uint64_t seed = 0;
};

/// loss[0] is the initial global loss, loss[k] the loss after round k.
struct LossTrace {
    std::vector<double> loss;

    double initial() const { return loss.front(); }
    double final_loss() const { return loss.back(); }
};

struct ToyData {
    std::vector<std::vector<double>> x;  // per device, samples * feature_dim, row-major
    std::vector<std::vector<double>> y;  // per device
    std::vector<double> rho;             // D_n / sum D
};

struct ToyModel {
    std::vector<double> embed;  // hidden x feature, row-major
    std::vector<double> head;   // hidden
};

inline void check_toy_config(const ToyConfig& c) {
    if (c.n_devices < 1 || c.samples_per_device < 1 || c.feature_dim < 1 || c.hidden_dim < 1 || c.minibatch < 1 ||
        c.local_epochs < 1 || c.rounds < 0) {
        throw ArgumentError("ToyConfig: dimensions and counts must be positive");
    }
    if (!(c.lr > 0.0) || c.heterogeneity < 0.0 || c.noise_std < 0.0) {
        throw ArgumentError("ToyConfig: lr must be positive, heterogeneity and noise non-negative");
    }
    if (c.q_bits && (*c.q_bits < 1 || *c.q_bits > 32)) {
        throw ArgumentError("ToyConfig: q_bits must lie in [1, 32]");
    }
}

/// Synthetic regression data: shared true weights, Gaussian features, label
/// noise, and a per-device label offset scaled by `heterogeneity`.
inline ToyData make_toy_data(const ToyConfig& c) {
    const CounterRng root = CounterRng(c.seed).child(0xDA7A);
    const CounterRng beta_rng = root.child(0);
    const auto F = static_cast<std::size_t>(c.feature_dim);
    std::vector<double> beta(F);
    for (std::size_t f = 0; f < F; ++f) {
        beta[f] = beta_rng.normal(f);
    }

    ToyData d;
    d.x.resize(static_cast<std::size_t>(c.n_devices));
    d.y.resize(static_cast<std::size_t>(c.n_devices));
    for (int n = 0; n < c.n_devices; ++n) {
        const CounterRng r = root.child(1 + static_cast<std::uint64_t>(n));
        const double shift = c.heterogeneity * r.child(0).normal(0);
        const CounterRng xr = r.child(1);
        const CounterRng er = r.child(2);
        auto& xs = d.x[static_cast<std::size_t>(n)];
        auto& ys = d.y[static_cast<std::size_t>(n)];
        xs.resize(static_cast<std::size_t>(c.samples_per_device) * F);
        ys.resize(static_cast<std::size_t>(c.samples_per_device));
        for (std::size_t i = 0; i < ys.size(); ++i) {
            double dot = 0.0;
            for (std::size_t f = 0; f < F; ++f) {
                xs[i * F + f] = xr.normal(i * F + f);
                dot += beta[f] * xs[i * F + f];
            }
            ys[i] = dot + shift + c.noise_std * er.normal(i);
        }
    }
    const double total = static_cast<double>(c.n_devices) * c.samples_per_device;
    d.rho.assign(static_cast<std::size_t>(c.n_devices), c.samples_per_device / total);
    return d;
}

inline ToyModel init_toy_model(const ToyConfig& c) {
    const CounterRng r = CounterRng(c.seed).child(0x1417);
    ToyModel m;
    m.embed.resize(static_cast<std::size_t>(c.hidden_dim) * c.feature_dim);
    m.head.resize(static_cast<std::size_t>(c.hidden_dim));
    const double se = c.init_scale / std::sqrt(static_cast<double>(c.feature_dim));
    const double sh = c.init_scale / std::sqrt(static_cast<double>(c.hidden_dim));
    for (std::size_t i = 0; i < m.embed.size(); ++i) {
        m.embed[i] = se * r.child(0).normal(i);
    }
    for (std::size_t i = 0; i < m.head.size(); ++i) {
        m.head[i] = sh * r.child(1).normal(i);
    }
    return m;
}

namespace detail {

inline void embed_forward(const ToyModel& m, const double* x, int hidden, int features, std::vector<double>& h) {
    h.assign(static_cast<std::size_t>(hidden), 0.0);
    for (int j = 0; j < hidden; ++j) {
        double acc = 0.0;
        for (int f = 0; f < features; ++f) {
            acc += m.embed[static_cast<std::size_t>(j) * features + f] * x[f];
        }
        h[static_cast<std::size_t>(j)] = acc;
    }
}

inline double head_forward(const ToyModel& m, const std::vector<double>& h) {
    return std::inner_product(h.begin(), h.end(), m.head.begin(), 0.0);
}

} // namespace detail

/// Global loss sum_n rho_n L_n on unquantized activations.
inline double toy_global_loss(const ToyConfig& c, const ToyData& d, const ToyModel& m) {
    std::vector<double> h;
    double total = 0.0;
    const auto F = static_cast<std::size_t>(c.feature_dim);
    for (std::size_t n = 0; n < d.y.size(); ++n) {
        double local = 0.0;
        for (std::size_t i = 0; i < d.y[n].size(); ++i) {
            detail::embed_forward(m, &d.x[n][i * F], c.hidden_dim, c.feature_dim, h);
            const double r = detail::head_forward(m, h) - d.y[n][i];
            local += 0.5 * r * r;
        }
        total += d.rho[n] * local / static_cast<double>(d.y[n].size());
    }
    return total;
}

/// Local SGD on one device starting from the global model. The head gradient
/// is taken at the quantized activation, and the activation gradient the
/// server returns is applied at the device's unquantized output.
inline ToyModel toy_local_update(const ToyConfig& c, const ToyData& d, std::size_t n, ToyModel m,
                                 const CounterRng& rng) {
    const auto F = static_cast<std::size_t>(c.feature_dim);
    const auto H = static_cast<std::size_t>(c.hidden_dim);
    const auto& xs = d.x[n];
    const auto& ys = d.y[n];
    const std::size_t count = ys.size();

    std::vector<std::size_t> order(count);
    std::vector<double> h, g_embed(H * F), g_head(H);
    std::uint64_t step = 0;
    for (int epoch = 0; epoch < c.local_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        const CounterRng shuffle = rng.child(0).child(static_cast<std::uint64_t>(epoch));
        for (std::size_t i = count; i > 1; --i) {
            const auto j = static_cast<std::size_t>(shuffle.uniform_int(i, 0, static_cast<std::int64_t>(i - 1)));
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < count; start += static_cast<std::size_t>(c.minibatch), ++step) {
            const std::size_t stop = std::min(count, start + static_cast<std::size_t>(c.minibatch));
            std::fill(g_embed.begin(), g_embed.end(), 0.0);
            std::fill(g_head.begin(), g_head.end(), 0.0);
            const CounterRng qrng = rng.child(1).child(step);
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t i = order[b];
                const double* x = &xs[i * F];
                detail::embed_forward(m, x, c.hidden_dim, c.feature_dim, h);
                if (!std::all_of(h.begin(), h.end(), [](double v) { return std::isfinite(v); })) {
                    m.head.assign(H, std::numeric_limits<double>::quiet_NaN());
                    return m;
                }
                const std::vector<double> act =
                    c.q_bits ? quantize(h, *c.q_bits, qrng.child(b - start)).values : h;
                const double r = detail::head_forward(m, act) - ys[i];
                for (std::size_t j = 0; j < H; ++j) {
                    g_head[j] += r * act[j];
                    const double g_act = r * m.head[j];
                    for (std::size_t f = 0; f < F; ++f) {
                        g_embed[j * F + f] += g_act * x[f];
                    }
                }
            }
            const double scale = c.lr / static_cast<double>(stop - start);
            for (std::size_t k = 0; k < g_embed.size(); ++k) {
                m.embed[k] -= scale * g_embed[k];
            }
            for (std::size_t j = 0; j < H; ++j) {
                m.head[j] -= scale * g_head[j];
            }
        }
    }
    return m;
}

/// Weighted average of device models, reduced in device order.
inline ToyModel toy_aggregate(const std::vector<ToyModel>& models, const std::vector<double>& rho) {
    ToyModel out{std::vector<double>(models.front().embed.size(), 0.0),
                 std::vector<double>(models.front().head.size(), 0.0)};
    for (std::size_t n = 0; n < models.size(); ++n) {
        for (std::size_t k = 0; k < out.embed.size(); ++k) {
            out.embed[k] += rho[n] * models[n].embed[k];
        }
        for (std::size_t k = 0; k < out.head.size(); ++k) {
            out.head[k] += rho[n] * models[n].head[k];
        }
    }
    return out;
}

/// Runs K rounds of split federated training and records the global loss.
/// Quantization randomness is keyed by (round, device, step, sample), so the
/// trace does not depend on the thread count or on q.
inline LossTrace run_toy_training(const ToyConfig& c) {
    check_toy_config(c);
    const ToyData data = make_toy_data(c);
    ToyModel global = init_toy_model(c);
    const CounterRng train_rng = CounterRng(c.seed).child(0x7EA1);

    LossTrace trace;
    trace.loss.push_back(toy_global_loss(c, data, global));
    std::vector<ToyModel> local(static_cast<std::size_t>(c.n_devices));
    for (int k = 1; k <= c.rounds; ++k) {
        const CounterRng round_rng = train_rng.child(static_cast<std::uint64_t>(k));
        parallel_for(local.size(), [&](std::size_t n) {
            local[n] = toy_local_update(c, data, n, global, round_rng.child(n));
        });
        global = toy_aggregate(local, data.rho);
        const double loss = toy_global_loss(c, data, global);
        if (!std::isfinite(loss)) {
            throw DivergenceError("toy training diverged at round " + std::to_string(k), k);
        }
        trace.loss.push_back(loss);
    }
    return trace;
}

/// Least-squares loss floor of the model class (the product head^T embed can
/// represent any linear map, so the optimum is the pooled weighted regression).
inline double toy_optimal_loss(const ToyConfig& c) {
    check_toy_config(c);
    const ToyData d = make_toy_data(c);
    const auto F = static_cast<std::size_t>(c.feature_dim);
    // Weighted normal equations: sum_n rho_n / D_n * X_n^T X_n beta = ... X_n^T y_n.
    std::vector<double> A(F * F, 0.0), b(F, 0.0);
    for (std::size_t n = 0; n < d.y.size(); ++n) {
        const double w = d.rho[n] / static_cast<double>(d.y[n].size());
        for (std::size_t i = 0; i < d.y[n].size(); ++i) {
            const double* x = &d.x[n][i * F];
            for (std::size_t r = 0; r < F; ++r) {
                b[r] += w * x[r] * d.y[n][i];
                for (std::size_t s = 0; s < F; ++s) {
                    A[r * F + s] += w * x[r] * x[s];
                }
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < F; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < F; ++r) {
            if (std::abs(A[r * F + col]) > std::abs(A[piv * F + col])) {
                piv = r;
            }
        }
        for (std::size_t s = 0; s < F; ++s) {
            std::swap(A[col * F + s], A[piv * F + s]);
        }
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < F; ++r) {
            const double f = A[r * F + col] / A[col * F + col];
            for (std::size_t s = col; s < F; ++s) {
                A[r * F + s] -= f * A[col * F + s];
            }
            b[r] -= f * b[col];
        }
    }
    std::vector<double> beta(F);
    for (std::size_t r = F; r-- > 0;) {
        double acc = b[r];
        for (std::size_t s = r + 1; s < F; ++s) {
            acc -= A[r * F + s] * beta[s];
        }
        beta[r] = acc / A[r * F + r];
    }
    double total = 0.0;
    for (std::size_t n = 0; n < d.y.size(); ++n) {
        double local = 0.0;
        for (std::size_t i = 0; i < d.y[n].size(); ++i) {
            const double pred = std::inner_product(beta.begin(), beta.end(), &d.x[n][i * F], 0.0);
            local += 0.5 * (pred - d.y[n][i]) * (pred - d.y[n][i]);
        }
        total += d.rho[n] * local / static_cast<double>(d.y[n].size());
    }
    return total;
}

/// Empirical check of the quantized-gradient variance inequality on the
/// activation gradient at the initial model. Reported, not asserted: the
/// constants on the right are themselves estimates.
struct GradientVarianceReport {
    double measured = 0.0;       // sigma_sq_hat + E_Q ||g(Q(A)) - g(A)||^2
    double sigma_sq_hat = 0.0;   // E_xi ||g(A) - mean g||^2
    double hess_norm = 0.0;      // ||head||^2, the activation Hessian norm
    double delta = 0.0;
    double act_norm_sq = 0.0;    // mean ||A||^2
    double bound = 0.0;          // sigma^2 + L^2 delta ||A||^2
};

inline GradientVarianceReport toy_gradient_variance(const ToyConfig& c, int q_bits, int draws) {
    check_toy_config(c);
    const ToyData d = make_toy_data(c);
    const ToyModel m = init_toy_model(c);
    const auto F = static_cast<std::size_t>(c.feature_dim);
    const auto H = static_cast<std::size_t>(c.hidden_dim);
    const CounterRng rng = CounterRng(c.seed).child(0x6A7);

    std::vector<std::vector<double>> acts;
    std::vector<double> labels;
    std::vector<double> h;
    for (std::size_t n = 0; n < d.y.size(); ++n) {
        for (std::size_t i = 0; i < d.y[n].size(); ++i) {
            detail::embed_forward(m, &d.x[n][i * F], c.hidden_dim, c.feature_dim, h);
            acts.push_back(h);
            labels.push_back(d.y[n][i]);
        }
    }
    auto grad = [&](const std::vector<double>& a, double y) {
        const double r = detail::head_forward(m, a) - y;
        std::vector<double> g(H);
        for (std::size_t j = 0; j < H; ++j) {
            g[j] = r * m.head[j];
        }
        return g;
    };

    const double count = static_cast<double>(acts.size());
    std::vector<double> mean(H, 0.0);
    GradientVarianceReport rep;
    for (std::size_t s = 0; s < acts.size(); ++s) {
        const auto g = grad(acts[s], labels[s]);
        for (std::size_t j = 0; j < H; ++j) {
            mean[j] += g[j] / count;
        }
        rep.act_norm_sq += std::inner_product(acts[s].begin(), acts[s].end(), acts[s].begin(), 0.0) / count;
    }
    for (std::size_t s = 0; s < acts.size(); ++s) {
        const auto g = grad(acts[s], labels[s]);
        for (std::size_t j = 0; j < H; ++j) {
            rep.sigma_sq_hat += (g[j] - mean[j]) * (g[j] - mean[j]) / count;
        }
        // E_Q g(Q(A)) = g(A), so the cross term with g(A) - mean vanishes.
        for (int t = 0; t < draws; ++t) {
            const auto gq = grad(quantize(acts[s], q_bits, rng.child(s).child(static_cast<std::uint64_t>(t))).values,
                                 labels[s]);
            for (std::size_t j = 0; j < H; ++j) {
                rep.measured += (gq[j] - g[j]) * (gq[j] - g[j]) / (count * draws);
            }
        }
    }
    rep.measured += rep.sigma_sq_hat;
    rep.hess_norm = std::inner_product(m.head.begin(), m.head.end(), m.head.begin(), 0.0);
    rep.delta = delta_bound(q_bits, c.hidden_dim);
    rep.bound = rep.sigma_sq_hat + rep.hess_norm * rep.hess_norm * rep.delta * rep.act_norm_sq;
    return rep;
}

} // namespace sflam
