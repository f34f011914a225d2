// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion with the
// measured runtime against its budget. `acceptance N` runs criterion N only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "sflam/sflam.hpp"
#include "support/oracles.hpp"

using namespace sflam;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

std::size_t max_threads() { return std::max(8u, std::thread::hardware_concurrency()); }

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome quantizer_correctness() {
    const CounterRng rng(0xAC01);
    const int vectors = 100;
    const int draws = 10000;
    const int q_choices[] = {2, 5, 8, 16};

    struct PerVector {
        std::size_t dim = 0;
        std::size_t outside = 0;
        std::size_t outside_zero_se = 0;
        double err_ratio = 0.0;  // measured / (delta * ||a||^2)
    };
    std::vector<PerVector> res(vectors);
    parallel_for(vectors, [&](std::size_t v) {
        const auto g = rng.child(v);
        const auto dim = static_cast<std::size_t>(g.uniform_int(0, 1, 512));
        const int q = q_choices[v % 4];
        std::vector<double> a(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            a[d] = g.child(1).normal(d);
        }
        std::vector<double> sum(dim, 0.0), sum2(dim, 0.0);
        double err = 0.0;
        for (int t = 0; t < draws; ++t) {
            const auto out = quantize(a, q, g.child(2).child(static_cast<std::uint64_t>(t)));
            for (std::size_t d = 0; d < dim; ++d) {
                const double x = out.values[d];
                sum[d] += x;
                sum2[d] += x * x;
                err += (x - a[d]) * (x - a[d]);
            }
        }
        double norm2 = 0.0;
        std::size_t outside = 0, outside_zero_se = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            norm2 += a[d] * a[d];
            const double mean = sum[d] / draws;
            const double var = std::max(sum2[d] / draws - mean * mean, 0.0) * draws / (draws - 1.0);
            const double se = std::sqrt(var / draws);
            if (std::abs(mean - a[d]) > 3.0 * se + 1e-12 * std::abs(a[d])) {
                ++outside;
                outside_zero_se += se == 0.0 ? 1 : 0;
            }
        }
        res[v] = {dim, outside, outside_zero_se, (err / draws) / (delta_bound(q, static_cast<std::int64_t>(dim)) * norm2)};
    });

    std::size_t elements = 0, outside = 0, zero_se = 0;
    double worst_ratio = 0.0;
    for (const auto& r : res) {
        elements += r.dim;
        outside += r.outside;
        zero_se += r.outside_zero_se;
        worst_ratio = std::max(worst_ratio, r.err_ratio);
    }
    const bool mean_ok = outside == 0;
    const bool var_ok = worst_ratio <= 1.05;
    // Reference: a two-sided 3-sigma test flags about 0.27% of unbiased elements.
    return {mean_ok && var_ok,
            fmt("%zu of %zu elements outside 3 SE, %zu of them never rounded away from one grid point "
                "(%.1f expected by chance at 0.27%%); "
                "max E||Q(a)-a||^2 / (delta ||a||^2) = %.4f (limit 1.05)",
                outside, elements, zero_se, 0.0027 * static_cast<double>(elements), worst_ratio)};
}

Outcome delta_formula() {
    bool ok = delta_bound(1, 1) == 1.0 && std::abs(delta_bound(5, 1) - 1.0 / 31.0) <= 1e-12;
    for (std::int64_t d : {std::int64_t{1}, std::int64_t{10}, std::int64_t{768 * 50}}) {
        for (int q = 1; q < 32; ++q) {
            ok = ok && delta_bound(q + 1, d) < delta_bound(q, d);
        }
    }
    return {ok, fmt("delta(1,1)=%.17g, delta(5,1)-1/31=%.3g", delta_bound(1, 1), delta_bound(5, 1) - 1.0 / 31.0)};
}

Outcome payload_arithmetic() {
    const double per_image_mib = static_cast<double>(payload_bits(50 * 768, 32, 0)) / kBitsPerMiB;
    const double batch_mib = 0.146 * 128;
    const WorkloadModel w = ScenarioConfig{}.workload;
    const bool image_ok = std::abs(per_image_mib - 0.146) < 0.0005;
    const bool batch_ok = std::abs(batch_mib - 18.688) < 1e-12 && w.payload_bits_full == 18.688 * kBitsPerMiB;
    const bool half_ok = approx_payload_bits(w.payload_bits_full, 16, 32) * 2.0 == w.payload_bits_full;
    return {image_ok && batch_ok && half_ok,
            fmt("per-image %.4f MiB, batch %.3f MiB, q=16 payload %.4f MiB", per_image_mib,
                w.payload_bits_full / kBitsPerMiB, approx_payload_bits(w.payload_bits_full, 16, 32) / kBitsPerMiB)};
}

Outcome sca_optimality() {
    const CounterRng rng(0xAC04);
    const WirelessEnv env = ScenarioConfig{}.env;
    int checked = 0, bad_opt = 0, bad_time = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; checked < 200; ++i) {
        const auto g = rng.child(i);
        DeviceProfile d;
        d.distance_m = g.uniform(0, 50, 1000);
        d.p_min_w = g.uniform(1, 0.01, 0.5);
        d.p_max_w = g.uniform(2, d.p_min_w, 2.0);
        const double payload = g.uniform(3, 1e6, 18.688 * kBitsPerMiB);
        const double budget = g.uniform(4, 0.2, 60.0);
        auto t_com = [&](double p) { return payload / oracle::rate(p, d, env); };
        if (t_com(d.p_max_w) > budget) {
            continue;
        }
        ++checked;
        const auto r = solve_power(d, env, payload, budget);
        if (!r.feasible || t_com(r.p_star) > budget || r.p_star < d.p_min_w || r.p_star > d.p_max_w) {
            ++bad_time;
            continue;
        }
        double best = INFINITY;
        for (int k = 0; k < 10000; ++k) {
            const double p = d.p_min_w + (d.p_max_w - d.p_min_w) * k / 9999.0;
            if (t_com(p) <= budget) {
                best = std::min(best, p * t_com(p));
            }
        }
        const double ratio = r.p_star * t_com(r.p_star) / best;
        worst = std::max(worst, ratio);
        bad_opt += ratio > 1.001 ? 1 : 0;
    }
    return {bad_opt == 0 && bad_time == 0,
            fmt("%d instances, worst E(p*)/E_grid = %.6f (limit 1.001), %d time violations", checked, worst, bad_time)};
}

Outcome taylor_surrogates() {
    const CounterRng rng(0xAC05);
    const WirelessEnv env = ScenarioConfig{}.env;
    double worst_e = 0.0, worst_t = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto g = rng.child(i);
        DeviceProfile d;
        d.distance_m = g.uniform(0, 50, 1000);
        const double payload = g.uniform(1, 1e6, 2e8);
        const double p = g.uniform(2, 0.05, 2.0);
        auto t_com = [&](double x) { return payload / oracle::rate(x, d, env); };
        const double h = 1e-5 * p;
        const double fd_e = ((p + h) * t_com(p + h) - (p - h) * t_com(p - h)) / (2 * h);
        const double fd_t = (t_com(p + h) - t_com(p - h)) / (2 * h);
        // Slopes read off the surrogates themselves.
        const double s_e = taylor_energy(p, p + 1.0, d, env, payload) - taylor_energy(p, p, d, env, payload);
        const double s_t = taylor_time(p, p + 1.0, d, env, payload) - taylor_time(p, p, d, env, payload);
        worst_e = std::max(worst_e, std::abs(s_e - fd_e) / std::abs(fd_e));
        worst_t = std::max(worst_t, std::abs(s_t - fd_t) / std::abs(fd_t));
    }
    return {worst_e <= 1e-6 && worst_t <= 1e-6,
            fmt("max relative error dE/dp %.2e, dT/dp %.2e (limit 1e-6)", worst_e, worst_t)};
}

Outcome quant_search_oracle() {
    const CounterRng rng(0xAC06);
    const ScenarioConfig cfg;
    int mismatches = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto g = rng.child(i);
        DeviceProfile d;
        d.distance_m = g.uniform(0, 50, 1000);
        d.gpu_freq_hz = g.uniform(1, 1e9, 1.5e9);
        d.gpu_cores = static_cast<int>(g.uniform_int(2, 4, 6));
        d.flops_per_cycle = 1.0;
        d.kappa1 = g.uniform(3, 1e-29, 1e-27);
        const double p = g.uniform(4, 0.1, 2.0);
        const double budget = g.uniform(5, 0.5, 80.0);
        const auto& w = cfg.workload;

        // Re-evaluation: descending scan, strict improvement, so ties keep the larger q.
        QuantResult want;
        const double rate = uplink_rate(p, d, cfg.env, true);
        const double e_cmp = device_compute_energy(d, w);
        for (int q = w.q_max_bits; q >= w.q_min_bits; --q) {
            const auto c = comm_time_energy(activation_payload(w, q), rate, p);
            if (c.time_s > budget) {
                continue;
            }
            const double eff = std::log1p(static_cast<double>(q)) / (e_cmp + c.energy_j);
            if (!want.feasible || eff > want.eff_star) {
                want = {q, eff, true};
            }
        }
        const auto got = solve_quantization(d, cfg.env, p, budget, w);
        const bool same = got.feasible == want.feasible &&
                          (!want.feasible || (got.q_star == want.q_star && got.eff_star == want.eff_star));
        mismatches += same ? 0 : 1;
    }
    return {mismatches == 0, fmt("%d of 200 instances differ", mismatches)};
}

Outcome matching_optimality() {
    const CounterRng rng(0xAC07);
    int mismatches = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto g = rng.child(t);
        const int n = static_cast<int>(g.uniform_int(0, 1, 8));
        const int m = static_cast<int>(g.uniform_int(1, 1, n));
        MatchingInstance inst{n, m, std::vector<double>(static_cast<std::size_t>(n * n), 0.0)};
        std::uint64_t k = 2;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                inst.at(i, j) = g.uniform(k++) < 0.2 ? 0.0 : g.uniform(k++, 0.0, 10.0);
            }
        }
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = 0.0;
        do {
            // Sum in device order, as the solver reports it.
            double v = 0.0;
            for (int i = 0; i < n; ++i) {
                const int col = perm[static_cast<std::size_t>(i)];
                if (col < m && inst.at(i, col) > 0.0) {
                    v += inst.at(i, col);
                }
            }
            best = std::max(best, v);
        } while (std::next_permutation(perm.begin(), perm.end()));
        mismatches += solve_assignment(inst).objective == best ? 0 : 1;
    }
    return {mismatches == 0, fmt("%d of 100 instances differ from the permutation maximum", mismatches)};
}

Outcome bcd_end_to_end() {
    struct Result {
        bool infeasible = false;
        bool beaten = false;
        double ratio = INFINITY;
    };
    auto run = [](std::optional<double> t_max, std::uint64_t seed) {
        ScenarioConfig cfg;
        cfg.num_devices = 10;
        cfg.env.num_rbs = 4;
        const auto s = generate_scenario(cfg, 1000 + seed);
        const double t = t_max.value_or(s.t_max_s);
        const auto sol = solve_round(s, {}, t);
        const double sampled = oracle::best_random_efficiency(s, t, 500, seed);
        return Result{!check_decision(s, sol.decision, t).empty(), sol.system_efficiency < sampled,
                      sampled > 0 ? sol.system_efficiency / sampled : INFINITY};
    };
    auto tally = [&](std::optional<double> t_max, int& infeasible, int& beaten, double& min_ratio) {
        std::vector<Result> res(20);
        parallel_for(res.size(), [&](std::size_t seed) { res[seed] = run(t_max, seed); });
        infeasible = beaten = 0;
        min_ratio = INFINITY;
        for (const auto& r : res) {
            infeasible += r.infeasible ? 1 : 0;
            beaten += r.beaten ? 1 : 0;
            min_ratio = std::min(min_ratio, r.ratio);
        }
    };
    int infeasible, beaten;
    double min_ratio;
    tally(std::nullopt, infeasible, beaten, min_ratio);

    // Reported only: at deadlines that admit one or two devices the p/q blocks
    // can stall at a coordinate-wise optimum.
    std::ostringstream tight;
    for (double t : {3.0, 3.5, 5.0}) {
        int ti, tb;
        double tr;
        tally(t, ti, tb, tr);
        tight << fmt(" T=%.1f: %d infeasible, %d beaten, min ratio %.4f;", t, ti, tb, tr);
    }
    return {infeasible == 0 && beaten == 0,
            fmt("scenario deadline: %d infeasible, %d beaten by sampling, min BCD/sampled ratio %.4f | info:%s",
                infeasible, beaten, min_ratio, tight.str().c_str())};
}

Outcome sweep_orderings() {
    const std::vector<double> t_list{3.0, 4.0, 5.0, 7.5, 10.0, 20.0, 50.0};
    std::vector<std::uint64_t> seeds(20);
    std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
    const auto rows = run_sweep(ScenarioConfig{}, t_list,
                                {Scheme::Proposed, Scheme::EqualPower, Scheme::RandomRb, Scheme::NoQuant}, seeds);

    struct Acc {
        double eff = 0, energy = 0, q = 0, part = 0;
    };
    auto mean_over = [&](Scheme sch, std::optional<double> t) {
        Acc a;
        int n = 0;
        for (const auto& r : rows) {
            if (r.scheme == sch && (!t || r.t_max_s == *t)) {
                a.eff += r.efficiency;
                a.energy += r.avg_energy_j;
                a.q += r.avg_q;
                a.part += r.participants;
                ++n;
            }
        }
        a.eff /= n;
        a.energy /= n;
        a.q /= n;
        a.part /= n;
        return a;
    };
    const auto prop = mean_over(Scheme::Proposed, {});
    const auto ep = mean_over(Scheme::EqualPower, {});
    const auto rb = mean_over(Scheme::RandomRb, {});
    const auto nq = mean_over(Scheme::NoQuant, {});
    bool ok = prop.eff >= ep.eff && prop.eff >= rb.eff && prop.eff >= nq.eff && prop.energy <= nq.energy;

    std::ostringstream qs, ps;
    double prev_q = -1, prev_p = -1;
    for (double t : t_list) {
        const auto a = mean_over(Scheme::Proposed, t);
        ok = ok && a.q >= prev_q && a.part >= prev_p;
        prev_q = a.q;
        prev_p = a.part;
        qs << (qs.tellp() ? " " : "") << fmt("%.2f", a.q);
        ps << (ps.tellp() ? " " : "") << fmt("%.1f", a.part);
    }
    return {ok, fmt("eff proposed %.2f ep %.2f rb %.2f nq %.2f; energy proposed %.3f nq %.3f; avg_q(T) [%s]; "
                    "participants(T) [%s]",
                    prop.eff, ep.eff, rb.eff, nq.eff, prop.energy, nq.energy, qs.str().c_str(), ps.str().c_str())};
}

Outcome framework_orderings() {
    const std::vector<int> counts{1, 2, 4, 8, 16};
    bool ok = true;
    std::string first;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto rows = run_compare_frameworks(generate_scenario(ScenarioConfig{}, seed), counts, 50.0);
        double prev_sl = 0.0;
        for (std::size_t i = 0; i < rows.size(); i += 4) {
            const auto& fl = rows[i].cost;
            const auto& sl = rows[i + 1].cost;
            const auto& sfl = rows[i + 2].cost;
            const auto& sflam = rows[i + 3].cost;
            const double max_other = std::max({sl.energy_cmp_j, sfl.energy_cmp_j, sflam.energy_cmp_j});
            const bool here = sl.time_s > prev_sl && fl.energy_cmp_j >= max_other && sflam.time_s <= sfl.time_s;
            if (!here && first.empty()) {
                first = fmt(" (first violation: seed %d, N=%d)", static_cast<int>(seed), rows[i].n_devices);
            }
            ok = ok && here;
            prev_sl = sl.time_s;
        }
    }
    return {ok, "5 scenarios, N in {1,2,4,8,16}: SL time increasing, FL compute energy maximal, SFLAM time <= SFL" +
                    first};
}

Outcome bound_evaluator() {
    bool dec_q = true, dec_k = true, zero_pen = true;
    double worst_ratio_err = 0.0;
    for (double S : {0.5, 2.0}) {
        for (double mu : {0.2, 1.0}) {
            for (double gam : {1.0, 10.0}) {
                for (double L : {0.0, 0.5, 2.0}) {
                    BoundParams bp;
                    bp.smooth_S = S;
                    bp.strong_mu = mu;
                    bp.gamma_shift = gam;
                    bp.sigma_sq = {1.0, 0.3, 2.0, 0.7};
                    bp.grad_bound_G = 2.0;
                    bp.rho = {0.4, 0.3, 0.2, 0.1};
                    bp.a = {1.0, 0.6, 0.9, 0.3};
                    bp.hess_L = L;
                    bp.act_norm_sq = 3.0;
                    bp.n_devices = 4;
                    bp.horizon_K = 200;
                    bp.init_gap = 5.0;
                    const std::int64_t dim = 38400;
                    for (int k = 0; k <= 100; ++k) {
                        bp.round_k = k;
                        if (L > 0) {
                            for (int q = 1; q < 32; ++q) {
                                dec_q = dec_q && theorem1_bound(bp, q + 1, dim) < theorem1_bound(bp, q, dim);
                            }
                            const double r = quantization_penalty(bp, 5, dim) / quantization_penalty(bp, 8, dim);
                            const double want = delta_bound(5, dim) / delta_bound(8, dim);
                            worst_ratio_err = std::max(worst_ratio_err, std::abs(r - want) / want);
                        } else {
                            zero_pen = zero_pen && quantization_penalty(bp, 5, dim) == 0.0;
                        }
                        if (k < 100) {
                            const double here = theorem1_bound(bp, 5, dim);
                            bp.round_k = k + 1;
                            dec_k = dec_k && theorem1_bound(bp, 5, dim) < here;
                            bp.round_k = k;
                        }
                    }
                }
            }
        }
    }
    return {dec_q && dec_k && zero_pen && worst_ratio_err <= 1e-12,
            fmt("decreasing in q: %s, in k: %s, zero penalty at L=0: %s, max ratio error %.2e",
                dec_q ? "yes" : "no", dec_k ? "yes" : "no", zero_pen ? "yes" : "no", worst_ratio_err)};
}

Outcome toy_trainer() {
    const int seeds = 10;
    const std::vector<std::optional<int>> qs{std::nullopt, 32, 3, 5, 8};
    std::vector<LossTrace> traces(qs.size() * seeds);
    parallel_for(traces.size(), [&](std::size_t i) {
        ToyConfig c;
        c.q_bits = qs[i / seeds];
        c.seed = i % seeds;
        traces[i] = run_toy_training(c);
    });
    auto trace = [&](std::size_t qi, int s) -> const LossTrace& { return traces[qi * seeds + s]; };

    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
        for (std::size_t k = 0; k < trace(0, s).loss.size(); ++k) {
            worst = std::max(worst, std::abs(trace(1, s).loss[k] - trace(0, s).loss[k]) / trace(0, s).loss[k]);
        }
    }

    // One-sided paired t-tests on final losses: H1 says fewer bits give a larger loss.
    auto paired = [&](std::size_t lo, std::size_t hi, double& mean_diff, double& p_expected, double& p_reverse) {
        std::vector<double> d(seeds);
        for (int s = 0; s < seeds; ++s) {
            d[s] = trace(lo, s).final_loss() - trace(hi, s).final_loss();
        }
        mean_diff = std::accumulate(d.begin(), d.end(), 0.0) / seeds;
        double ss = 0.0;
        for (double x : d) {
            ss += (x - mean_diff) * (x - mean_diff);
        }
        const double sd = std::sqrt(ss / (seeds - 1));
        if (sd == 0.0) {
            p_expected = mean_diff > 0 ? 0.0 : 1.0;
            p_reverse = mean_diff < 0 ? 0.0 : 1.0;
            return;
        }
        const double t = mean_diff / (sd / std::sqrt(static_cast<double>(seeds)));
        const boost::math::students_t dist(seeds - 1);
        p_expected = boost::math::cdf(boost::math::complement(dist, t));
        p_reverse = boost::math::cdf(dist, t);
    };
    double m35, pe35, pr35, m58, pe58, pr58;
    paired(2, 3, m35, pe35, pr35);
    paired(3, 4, m58, pe58, pr58);
    auto mean_final = [&](std::size_t qi) {
        double s = 0.0;
        for (int i = 0; i < seeds; ++i) {
            s += trace(qi, i).final_loss();
        }
        return s / seeds;
    };
    const bool reversed = (m35 < 0 && pr35 < 0.05) || (m58 < 0 && pr58 < 0.05);
    return {worst <= 0.01 && !reversed,
            fmt("32-bit vs unquantized max rel. diff %.2e (limit 1e-2); mean final loss q3 %.6g q5 %.6g q8 %.6g; "
                "one-sided paired p: q3>q5 %.3g, q5>q8 %.3g",
                worst, mean_final(2), mean_final(3), mean_final(4), pe35, pe58)};
}

Outcome determinism() {
    const auto s = generate_scenario(ScenarioConfig{}, 77);
    BoundInput bound;
    bound.params.sigma_sq = {1.0, 2.0};
    bound.params.rho = {0.5, 0.5};
    bound.params.a = {1.0, 0.5};
    bound.params.n_devices = 2;
    bound.params.hess_L = 1.0;
    bound.params.act_norm_sq = 2.0;
    bound.activation_dim = 768;
    ToyConfig toy;
    toy.rounds = 30;

    auto run_all = [&] {
        std::vector<std::string> out;
        out.push_back(cmd_generate(ScenarioConfig{}, 77));
        for (const auto sch : {Scheme::Proposed, Scheme::EqualPower, Scheme::RandomRb, Scheme::NoQuant}) {
            out.push_back(cmd_solve(s, 8.0, sch, 5).csv);
        }
        out.push_back(cmd_sweep(ScenarioConfig{}, {4.0, 10.0},
                                {Scheme::Proposed, Scheme::EqualPower, Scheme::RandomRb, Scheme::NoQuant}, {0, 1, 2})
                          .csv);
        out.push_back(cmd_compare_frameworks(s, {1, 2, 4, 8, 16}, 50.0).csv);
        out.push_back(cmd_bound(bound, {2, 4, 8, 16}).csv);
        out.push_back(cmd_toy_train(toy, {std::nullopt, 3, 8}, {0, 1}).csv);
        return out;
    };
    set_thread_count(1);
    const auto a = run_all();
    const auto b = run_all();
    set_thread_count(max_threads());
    const auto c = run_all();
    const auto d = run_all();
    const bool ok = a == b && a == c && a == d;
    return {ok, fmt("9 command outputs identical across reruns at 1 and %zu threads: %s", max_threads(),
                    ok ? "yes" : "no")};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "quantizer unbiasedness and variance bound", 30.0, quantizer_correctness},
        {2, "delta formula", 1.0, delta_formula},
        {3, "payload arithmetic", 1.0, payload_arithmetic},
        {4, "SCA power optimality vs grid oracle", 10.0, sca_optimality},
        {5, "Taylor surrogate slopes vs finite differences", 1.0, taylor_surrogates},
        {6, "bit-width search vs brute force", 5.0, quant_search_oracle},
        {7, "RB matching vs permutation enumeration", 20.0, matching_optimality},
        {8, "BCD feasibility and sampling lower bound", 60.0, bcd_end_to_end},
        {9, "scheme orderings over the T_max sweep", 300.0, sweep_orderings},
        {10, "framework time and energy orderings", 60.0, framework_orderings},
        {11, "convergence bound evaluator", 1.0, bound_evaluator},
        {12, "toy split trainer", 120.0, toy_trainer},
        {13, "determinism across reruns and thread counts", 120.0, determinism},
    };
    std::optional<int> only;
    if (argc > 1) {
        only = std::atoi(argv[1]);
    }

    set_thread_count(max_threads());
    int failed = 0;
    int ran = 0;
    for (const auto& c : all) {
        if (only && c.id != *only) {
            continue;
        }
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        set_thread_count(max_threads());
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("[%s] AC%d %s (%.2fs, budget %.0fs%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    c.budget_s, in_time ? "" : ", OVER BUDGET", o.detail.c_str());
        std::fflush(stdout);
    }
    if (ran == 0) {
        std::fprintf(stderr, "unknown criterion\n");
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
