#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sflam/toy_trainer.hpp"

using namespace sflam;

TEST(ToyTrainer, ConvergesAtFullPrecision) {
    ToyConfig c;
    c.q_bits = 32;
    const auto trace = run_toy_training(c);
    ASSERT_EQ(trace.loss.size(), static_cast<std::size_t>(c.rounds + 1));
    EXPECT_LE(trace.final_loss(), 0.1 * trace.initial());
    EXPECT_GE(trace.final_loss(), toy_optimal_loss(c) * (1 - 1e-9));
}

TEST(ToyTrainer, ThirtyTwoBitsTracksUnquantized) {
    ToyConfig c;
    c.q_bits = std::nullopt;
    const auto ref = run_toy_training(c);
    c.q_bits = 32;
    const auto q32 = run_toy_training(c);
    for (std::size_t k = 0; k < ref.loss.size(); ++k) {
        EXPECT_NEAR(q32.loss[k], ref.loss[k], 0.01 * ref.loss[k]) << "round " << k;
    }
}

TEST(ToyTrainer, DeterministicGivenSeed) {
    ToyConfig c;
    c.q_bits = 4;
    c.rounds = 20;
    EXPECT_EQ(run_toy_training(c).loss, run_toy_training(c).loss);
    set_thread_count(4);
    const auto par = run_toy_training(c);
    set_thread_count(0);
    EXPECT_EQ(par.loss, run_toy_training(c).loss);
}

TEST(ToyTrainer, AggregationOfIdenticalModelsIsNoOp) {
    ToyConfig c;
    const auto m = init_toy_model(c);
    const std::vector<ToyModel> models(4, m);
    const std::vector<double> rho(4, 0.25);
    const auto agg = toy_aggregate(models, rho);
    for (std::size_t i = 0; i < m.embed.size(); ++i) {
        EXPECT_NEAR(agg.embed[i], m.embed[i], 1e-15 * std::max(1.0, std::abs(m.embed[i])));
    }
    for (std::size_t i = 0; i < m.head.size(); ++i) {
        EXPECT_NEAR(agg.head[i], m.head[i], 1e-15 * std::max(1.0, std::abs(m.head[i])));
    }
}

TEST(ToyTrainer, IdenticalDevicesUpdateIdentically) {
    ToyConfig c;
    c.n_devices = 3;
    c.q_bits = std::nullopt;
    auto data = make_toy_data(c);
    data.x[1] = data.x[2] = data.x[0];
    data.y[1] = data.y[2] = data.y[0];
    const auto m = init_toy_model(c);
    // Same data and same shuffle stream: updates coincide and aggregation returns them.
    const CounterRng r(1);
    std::vector<ToyModel> local;
    for (std::size_t n = 0; n < 3; ++n) {
        local.push_back(toy_local_update(c, data, n, m, r));
    }
    const auto agg = toy_aggregate(local, data.rho);
    for (std::size_t i = 0; i < agg.head.size(); ++i) {
        EXPECT_NEAR(agg.head[i], local[0].head[i], 1e-14);
    }
}

TEST(ToyTrainer, RhoSumsToOne) {
    ToyConfig c;
    c.n_devices = 7;
    const auto d = make_toy_data(c);
    EXPECT_NEAR(std::accumulate(d.rho.begin(), d.rho.end(), 0.0), 1.0, 1e-12);
}

TEST(ToyTrainer, DivergenceReportsRound) {
    ToyConfig c;
    c.lr = 50.0;
    c.rounds = 100;
    try {
        run_toy_training(c);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_GE(e.round(), 1);
        EXPECT_LE(e.round(), 100);
    }
}

TEST(ToyTrainer, InvalidConfigRejected) {
    ToyConfig c;
    c.lr = 0.0;
    EXPECT_THROW(run_toy_training(c), ArgumentError);
    c = {};
    c.hidden_dim = 0;
    EXPECT_THROW(run_toy_training(c), ArgumentError);
    c = {};
    c.q_bits = 0;
    EXPECT_THROW(run_toy_training(c), ArgumentError);
}

TEST(ToyTrainer, HeterogeneityRaisesLossFloor) {
    ToyConfig c;
    const double iid = toy_optimal_loss(c);
    c.heterogeneity = 2.0;
    EXPECT_GT(toy_optimal_loss(c), iid);
}

TEST(ToyGradientVariance, MeasuredWithinEstimatedBound) {
    ToyConfig c;
    for (int q : {3, 5, 8}) {
        const auto rep = toy_gradient_variance(c, q, 20);
        EXPECT_GE(rep.measured, rep.sigma_sq_hat * (1 - 1e-9));
        EXPECT_LE(rep.measured, rep.bound * 1.05) << "q=" << q;
    }
}
