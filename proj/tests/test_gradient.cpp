#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aecqtl/errors.hpp"
#include "aecqtl/gradient.hpp"
#include "aecqtl/random.hpp"
#include "oracles.hpp"

using namespace aecqtl;
using std::numbers::pi;

namespace {

HybridModel make(ModelKind kind, int n, int layers, int classes = 2) {
    ModelConfig c;
    c.kind = kind;
    c.n_qubits = n;
    c.layers = layers;
    c.num_classes = classes;
    c.feature_dim = std::size_t{1} << n;
    return HybridModel(c);
}

std::vector<double> random_features(std::size_t dim, Rng& rng) {
    std::vector<double> x(dim);
    for (double& v : x) v = rng.normal();
    return x;
}

struct Mismatch {
    std::size_t count = 0;
    double worst = 0.0;
};

Mismatch compare(const std::vector<double>& got, const std::vector<double>& ref) {
    Mismatch m;
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (!oracle::grad_close(got[i], ref[i])) ++m.count;
        m.worst = std::max(m.worst, std::abs(got[i] - ref[i]));
    }
    return m;
}

void check_against_fd(ModelKind kind, int n, int layers, int instances, std::uint64_t seed) {
    const auto model = make(kind, n, layers);
    Rng rng(seed);
    for (int i = 0; i < instances; ++i) {
        const auto p = init_params(model, rng);
        const auto x = random_features(model.config().feature_dim, rng);
        const int y = static_cast<int>(rng.below(2));
        const auto exact = sample_gradient(model, p, x, y);
        const auto fd = fd_grad(model, p, x, y, 1e-5);
        CHECK(exact.loss == fd.loss);
        const auto t = compare(exact.d_theta, fd.d_theta);
        const auto w = compare(exact.d_W, fd.d_W);
        const auto b = compare(exact.d_b, fd.d_b);
        INFO("instance " << i << " worst theta diff " << t.worst);
        CHECK(t.count == 0);
        CHECK(w.count == 0);
        CHECK(b.count == 0);
    }
}

} // namespace

TEST_CASE("cross-entropy") {
    const double sure[] = {1.0, 0.0};
    const double half[] = {0.5, 0.5};
    const double skew[] = {0.9, 0.1};
    CHECK(std::abs(ce_loss(sure, 0)) < 1e-9);
    CHECK(ce_loss(half, 1) == doctest::Approx(std::log(2.0)));
    CHECK(ce_loss(skew, 1) == doctest::Approx(-std::log(0.1)));
    CHECK(ce_loss(sure, 1) == doctest::Approx(-std::log(1e-12)));
    CHECK(ce_loss(sure, 1) >= 0.0);
    CHECK_THROWS_AS(ce_loss(half, 2), ConfigError);
    CHECK_THROWS_AS(ce_loss(half, -1), ConfigError);
}

TEST_CASE("classical backward closed forms") {
    const auto model = make(ModelKind::TLQNN, 3, 1);
    auto p = model.zero_params();
    p.W = {0.1, 0.2, 0.3, -0.4, -0.5, -0.6};

    ForwardTrace half = forward_from_expectations(model, model.zero_params(), {1, 1, 1});
    const auto g = backward_classical(model, half, 0, p);
    CHECK(g.d_b == std::vector<double>{-0.5, 0.5});
    CHECK(g.d_W == std::vector<double>{-0.5, -0.5, -0.5, 0.5, 0.5, 0.5});
    // d_m = W^T g
    CHECK(g.d_m[0] == doctest::Approx(0.1 * -0.5 + -0.4 * 0.5));
    CHECK(g.d_m[2] == doctest::Approx(0.3 * -0.5 + -0.6 * 0.5));

    ForwardTrace exact = half;
    exact.probabilities = {0.0, 1.0};
    const auto z = backward_classical(model, exact, 1, p);
    for (double v : z.d_W) CHECK(v == 0.0);
    for (double v : z.d_b) CHECK(v == 0.0);
    for (double v : z.d_m) CHECK(v == 0.0);
}

TEST_CASE("classical backward matches finite differences of the head") {
    const auto model = make(ModelKind::TLQCNN, 5, 1, 3);
    Rng rng(21);
    const auto p = init_params(model, rng);
    const std::vector<double> m = {0.3, -0.8, 0.5};
    const int y = 2;
    const auto g = backward_classical(model, forward_from_expectations(model, p, m), y, p);
    auto loss_at = [&](const ModelParams& q, const std::vector<double>& mv) {
        return ce_loss(forward_from_expectations(model, q, mv).probabilities, y);
    };
    const double h = 1e-6;
    for (std::size_t i = 0; i < p.W.size(); ++i) {
        auto up = p, dn = p;
        up.W[i] += h;
        dn.W[i] -= h;
        CHECK(oracle::grad_close(g.d_W[i], (loss_at(up, m) - loss_at(dn, m)) / (2 * h)));
    }
    for (std::size_t i = 0; i < p.b.size(); ++i) {
        auto up = p, dn = p;
        up.b[i] += h;
        dn.b[i] -= h;
        CHECK(oracle::grad_close(g.d_b[i], (loss_at(up, m) - loss_at(dn, m)) / (2 * h)));
    }
    for (std::size_t k = 0; k < m.size(); ++k) {
        auto up = m, dn = m;
        up[k] += h;
        dn[k] -= h;
        CHECK(oracle::grad_close(g.d_m[k], (loss_at(p, up) - loss_at(p, dn)) / (2 * h)));
    }
}

TEST_CASE("shift rule on a single rotation") {
    // <Z> after RY(t)|0> is cos t.
    Circuit c;
    c.n_qubits = 1;
    c.add(GateOp::ry(0, AngleRef::param(0)));
    c.num_slots = 1;
    auto shift_grad = [&](double theta) {
        auto z = [&](double t) {
            StateVector s(1);
            const double a[] = {t};
            run(c, a, s);
            return expect_z(s, 0);
        };
        return (z(theta + pi / 2) - z(theta - pi / 2)) / 2;
    };
    CHECK(shift_grad(pi / 2) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(shift_grad(0.0)) < 1e-15);
    CHECK(shift_grad(pi / 3) == doctest::Approx(-std::sin(pi / 3)).epsilon(1e-14));
}

TEST_CASE("param-shift against finite differences") {
    SUBCASE("TLQNN n=4 L=2") { check_against_fd(ModelKind::TLQNN, 4, 2, 20, 101); }
    SUBCASE("TLQCNN n=4 L=2") { check_against_fd(ModelKind::TLQCNN, 4, 2, 20, 102); }
    SUBCASE("TLQNN n=5 L=2") { check_against_fd(ModelKind::TLQNN, 5, 2, 20, 103); }
    SUBCASE("TLQCNN n=5 L=2") { check_against_fd(ModelKind::TLQCNN, 5, 2, 20, 104); }
    SUBCASE("TLQNN n=9 L=1") { check_against_fd(ModelKind::TLQNN, 9, 1, 20, 105); }
    SUBCASE("TLQCNN n=9 L=1") { check_against_fd(ModelKind::TLQCNN, 9, 1, 20, 106); }
}

TEST_CASE("multi-class head gradients") {
    const auto model = make(ModelKind::TLQNN, 3, 1, 4);
    Rng rng(7);
    const auto p = init_params(model, rng);
    const auto x = random_features(8, rng);
    const auto exact = sample_gradient(model, p, x, 3);
    const auto fd = fd_grad(model, p, x, 3, 1e-5);
    CHECK(compare(exact.d_theta, fd.d_theta).count == 0);
    CHECK(compare(exact.d_W, fd.d_W).count == 0);
    CHECK(compare(exact.d_b, fd.d_b).count == 0);
}

TEST_CASE("evaluation count and determinism") {
    const auto model = make(ModelKind::TLQCNN, 5, 2);
    Rng rng(3);
    const auto p = init_params(model, rng);
    const auto x = random_features(32, rng);
    const auto trace = forward(model, p, x);
    const auto cg = backward_classical(model, trace, 1, p);

    std::size_t evals = 0;
    const auto a = param_shift_grad(model, p, x, cg.d_m, &evals);
    CHECK(evals == 2 * model.num_slots());
    const auto b = param_shift_grad(model, p, x, cg.d_m);
    CHECK(a == b);

    evals = 0;
    sample_gradient(model, p, x, 1, &evals);
    CHECK(evals == 2 * model.num_slots());
}

TEST_CASE("fd_grad rejects a non-positive step") {
    const auto model = make(ModelKind::TLQNN, 2, 1);
    const double x[] = {1, 0, 0, 0};
    CHECK_THROWS_AS(fd_grad(model, model.zero_params(), x, 0, 0.0), ConfigError);
}

TEST_CASE("batch gradient is the per-sample mean") {
    const auto model = make(ModelKind::TLQNN, 3, 1);
    Rng rng(13);
    const auto p = init_params(model, rng);
    const auto x1 = random_features(8, rng);
    const auto x2 = random_features(8, rng);
    const auto g1 = sample_gradient(model, p, x1, 0);
    const auto g2 = sample_gradient(model, p, x2, 1);

    const LabeledView one[] = {{x1, 0}};
    const auto b1 = batch_gradient(model, p, one);
    CHECK(b1.loss == g1.loss);
    CHECK(b1.d_theta == g1.d_theta);

    const LabeledView twice[] = {{x1, 0}, {x1, 0}};
    const auto bt = batch_gradient(model, p, twice);
    for (std::size_t i = 0; i < g1.d_theta.size(); ++i) CHECK(bt.d_theta[i] == doctest::Approx(g1.d_theta[i]).epsilon(1e-15));

    const LabeledView pair[] = {{x1, 0}, {x2, 1}};
    const auto bp = batch_gradient(model, p, pair);
    CHECK(std::abs(bp.loss - (g1.loss + g2.loss) / 2) < 1e-12);
    for (std::size_t i = 0; i < g1.d_theta.size(); ++i) {
        REQUIRE(std::abs(bp.d_theta[i] - (g1.d_theta[i] + g2.d_theta[i]) / 2) < 1e-12);
    }
    for (std::size_t i = 0; i < g1.d_W.size(); ++i) {
        REQUIRE(std::abs(bp.d_W[i] - (g1.d_W[i] + g2.d_W[i]) / 2) < 1e-12);
    }

    // Worker count does not change a single bit.
    const auto threaded = batch_gradient(model, p, pair, 4);
    CHECK(threaded.d_theta == bp.d_theta);
    CHECK(threaded.loss == bp.loss);

    CHECK_THROWS_AS(batch_gradient(model, p, std::span<const LabeledView>{}), ConfigError);
}
