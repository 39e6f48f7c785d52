#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "aecqtl/checkpoint.hpp"
#include "aecqtl/errors.hpp"

using namespace aecqtl;

namespace {

Checkpoint sample(ModelKind kind) {
    const auto config = config_for_features(kind, 2, 30);
    const HybridModel model(config);
    Rng rng(6);
    TrainConfig t;
    t.epochs = 7;
    t.lr0 = 0.003;
    return {config, init_params(model, rng), 6, t};
}

Checkpoint parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_checkpoint(in);
}

} // namespace

TEST_CASE("checkpoint round trip") {
    for (auto kind : {ModelKind::TLQNN, ModelKind::TLQCNN}) {
        const auto c = sample(kind);
        const std::string text = format_checkpoint(c);
        CHECK(text.rfind("aecqtl-checkpoint,1\n", 0) == 0);
        const auto back = parse_text(text);
        CHECK(back.config.kind == kind);
        CHECK(back.config.n_qubits == 5);
        CHECK(back.config.feature_dim == 30);
        CHECK(back.seed == 6);
        CHECK(back.train.epochs == 7);
        CHECK(back.train.lr0 == 0.003);
        CHECK(back.params.theta == c.params.theta);
        CHECK(back.params.W == c.params.W);
        CHECK(back.params.b == c.params.b);
        CHECK(format_checkpoint(back) == text);
    }

    const auto path = std::filesystem::temp_directory_path() / "aecqtl_test_ckpt.txt";
    const auto c = sample(ModelKind::TLQCNN);
    save_checkpoint(c, path);
    CHECK(format_checkpoint(load_checkpoint(path)) == format_checkpoint(c));
    std::filesystem::remove(path);
}

TEST_CASE("checkpoint validation") {
    const std::string good = format_checkpoint(sample(ModelKind::TLQNN));
    auto replace = [&](const std::string& from, const std::string& to) {
        std::string t = good;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    CHECK_THROWS_AS(parse_text(replace("aecqtl-checkpoint,1", "aecqtl-checkpoint,2")), ParseError);
    CHECK_THROWS_AS(parse_text(replace("qubits,5", "qubits,6")), ConfigError);
    CHECK_THROWS_AS(parse_text(replace("model,tlqnn", "model,cctl")), ConfigError);
    CHECK_THROWS_AS(parse_text(replace("layers,2", "layers,3")), ConfigError);  // theta count off
    CHECK_THROWS_AS(parse_text(replace("theta,45", "theta,44")), ParseError);
    CHECK_THROWS_AS(parse_text(good + "extra\n"), ParseError);
    CHECK_THROWS_AS(parse_text(good.substr(0, good.find("\nb,") + 1)), ParseError);
    CHECK_THROWS_AS(parse_text(replace("seed,6", "seed,six")), ParseError);
}
