#include <doctest.h>

#include <cmath>

#include "aecqtl/dataset.hpp"
#include "aecqtl/errors.hpp"
#include "aecqtl/metrics.hpp"
#include "aecqtl/optimizer.hpp"

using namespace aecqtl;

namespace {

HybridModel small_model(ModelKind kind = ModelKind::TLQNN) {
    return HybridModel(config_for_features(kind, 1, 16));
}

FeatureSet blobs(std::size_t per_class, std::uint64_t seed) {
    return gen_synthetic(16, per_class, 3.0, seed, 6.0);
}

} // namespace

TEST_CASE("learning-rate schedule") {
    TrainConfig c;
    CHECK(lr_at(c, 1) == 0.01);
    CHECK(lr_at(c, 10) == 0.01);
    CHECK(lr_at(c, 11) == doctest::Approx(0.001).epsilon(1e-15));
    CHECK(lr_at(c, 20) == doctest::Approx(0.001).epsilon(1e-15));
    for (int e = 1; e <= 100; ++e) {
        const double expected = 0.01 * std::pow(0.1, (e - 1) / 10);
        REQUIRE(lr_at(c, e) == doctest::Approx(expected).epsilon(1e-14));
    }
    c.decay_every = 3;
    c.decay_factor = 0.5;
    CHECK(lr_at(c, 4) == doctest::Approx(0.005));
    CHECK(lr_at(c, 7) == doctest::Approx(0.0025));
}

TEST_CASE("train config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.lr0 = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.decay_factor = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.decay_factor = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.repeats = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("Adam steps") {
    SUBCASE("first step moves by lr") {
        auto s = AdamState::for_size(1);
        double p[] = {2.0};
        const double g[] = {1.0};
        adam_step(s, p, g, 0.01);
        CHECK(p[0] == doctest::Approx(2.0 - 0.01 / (1 + 1e-8)).epsilon(1e-15));
        CHECK(s.t == 1);
        CHECK(s.m[0] == doctest::Approx(0.1));
        CHECK(s.v[0] == doctest::Approx(0.001));
    }
    SUBCASE("zero gradient leaves parameters alone") {
        auto s = AdamState::for_size(3);
        double p[] = {1.0, -2.0, 3.0};
        const double g[] = {0.0, 0.0, 0.0};
        adam_step(s, p, g, 0.01);
        CHECK(p[0] == 1.0);
        CHECK(p[1] == -2.0);
        CHECK(p[2] == 3.0);
    }
    SUBCASE("constant gradient: second step no larger than the first") {
        // With bias correction both steps equal lr * g / (|g| + eps).
        auto s = AdamState::for_size(1);
        double p[] = {0.0};
        const double g[] = {-0.37};
        adam_step(s, p, g, 0.05);
        const double d1 = p[0];
        adam_step(s, p, g, 0.05);
        const double d2 = p[0] - d1;
        CHECK(std::abs(d2) <= std::abs(d1) * (1 + 1e-6));
        CHECK(d2 == doctest::Approx(0.05 * 0.37 / (0.37 + 1e-8)).epsilon(1e-12));
    }
    SUBCASE("non-finite gradient aborts") {
        auto s = AdamState::for_size(2);
        double p[] = {0.0, 0.0};
        const double g[] = {1.0, INFINITY};
        CHECK_THROWS_AS(adam_step(s, p, g, 0.01), TrainingError);
    }
}

TEST_CASE("flatten round trip") {
    const auto m = small_model(ModelKind::TLQCNN);
    Rng rng(4);
    const auto p = init_params(m, rng);
    const auto flat = flatten(p);
    CHECK(flat.size() == p.size());
    CHECK(flat.front() == p.theta.front());
    CHECK(flat.back() == p.b.back());
    ModelParams q = m.zero_params();
    unflatten(flat, q);
    CHECK(q.theta == p.theta);
    CHECK(q.W == p.W);
    CHECK(q.b == p.b);
}

TEST_CASE("training mechanics") {
    const auto m = small_model();
    TrainConfig c;
    c.epochs = 1;
    c.batch_size = 4;

    SUBCASE("one epoch on four samples is one step") {
        const auto data = blobs(2, 1);
        const auto r = train(m, data, data, c, 5);
        CHECK(r.steps == 1);
        CHECK(r.curve.size() == 1);
        CHECK(r.seed == 5);
    }
    SUBCASE("short last batch") {
        const auto data = blobs(5, 1);  // 10 samples -> 4 + 4 + 2
        c.epochs = 2;
        const auto r = train(m, data, data, c, 5);
        CHECK(r.steps == 6);
    }
    SUBCASE("same seed, same bits") {
        const auto data = blobs(6, 2);
        c.epochs = 3;
        const auto a = train(m, data, data, c, 9);
        const auto b = train(m, data, data, c, 9);
        REQUIRE(a.curve.size() == b.curve.size());
        for (std::size_t i = 0; i < a.curve.size(); ++i) {
            CHECK(a.curve[i].mean_train_loss == b.curve[i].mean_train_loss);
            CHECK(a.curve[i].test_accuracy == b.curve[i].test_accuracy);
        }
        CHECK(flatten(a.params) == flatten(b.params));

        c.workers = 3;
        const auto threaded = train(m, data, data, c, 9);
        CHECK(flatten(threaded.params) == flatten(a.params));

        const auto other = train(m, data, data, c, 10);
        CHECK(flatten(other.params) != flatten(a.params));
    }
    SUBCASE("mismatched dims are rejected") {
        const auto data = blobs(2, 1);
        const auto wide = gen_synthetic(32, 2, 3.0, 1);
        CHECK_THROWS_AS(train(m, data, wide, c, 1), ConfigError);
        CHECK_THROWS_AS(train(m, FeatureSet{16, 2, {}}, data, c, 1), ConfigError);
    }
}

TEST_CASE("training reduces loss on separable data") {
    const auto m = small_model();
    const auto data = blobs(16, 3);
    TrainConfig c;
    c.epochs = 6;
    c.lr0 = 0.05;
    c.decay_every = 3;
    c.decay_factor = 0.5;
    const auto r = train(m, data, data, c, 1);
    CHECK(r.curve.back().mean_train_loss < r.curve.front().mean_train_loss);
}

TEST_CASE("evaluate") {
    const auto m = small_model();
    const auto data = blobs(4, 8);
    Rng rng(2);
    const auto p = init_params(m, rng);
    const auto ev = evaluate(m, p, data);
    REQUIRE(ev.predictions.size() == 8);
    double loss = 0.0;
    int hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto t = forward(m, p, data.samples[i].features);
        CHECK(ev.predictions[i] == t.predicted);
        CHECK(ev.scores[i] == t.probabilities[1]);
        loss += -std::log(t.probabilities[static_cast<std::size_t>(data.samples[i].label)]);
        hits += t.predicted == data.samples[i].label;
    }
    CHECK(ev.mean_loss == doctest::Approx(loss / 8).epsilon(1e-12));
    CHECK(ev.accuracy == 100.0 * hits / 8);
    const auto threaded = evaluate(m, p, data, 4);
    CHECK(threaded.scores == ev.scores);
}

TEST_CASE("repeats") {
    const auto m = small_model();
    const auto data = blobs(3, 4);
    TrainConfig c;
    c.epochs = 1;
    c.seed = 40;
    c.repeats = 1;
    const auto one = run_repeats(m, data, data, c);
    REQUIRE(one.size() == 1);
    CHECK(flatten(one[0].params) == flatten(train(m, data, data, c, 40).params));

    c.repeats = 5;
    int callbacks = 0;
    const auto five = run_repeats(m, data, data, c, [&](int, const EpochRecord&) { ++callbacks; });
    REQUIRE(five.size() == 5);
    CHECK(callbacks == 5);
    for (int r = 0; r < 5; ++r) CHECK(five[static_cast<std::size_t>(r)].seed == 40u + r);

    std::vector<double> accs;
    for (const auto& r : five) accs.push_back(r.final_test.accuracy);
    double mean = 0.0;
    for (double a : accs) mean += a;
    mean /= 5;
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    const auto ms = mean_std(accs);
    CHECK(std::abs(ms.mean - mean) < 1e-12);
    CHECK(std::abs(ms.std - std::sqrt(var / 5)) < 1e-12);
}
