// Command-line front end: synthesize/split feature files, train, evaluate,
// and gradient-check hybrid models.
//
// Exit codes: 0 success, 1 usage error, 2 data/config error, 3 check failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aecqtl/checkpoint.hpp"
#include "aecqtl/dataset.hpp"
#include "aecqtl/errors.hpp"
#include "aecqtl/gradient.hpp"
#include "aecqtl/metrics.hpp"
#include "aecqtl/optimizer.hpp"
#include "aecqtl/parallel.hpp"

namespace fs = std::filesystem;
using namespace aecqtl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCheck = 3;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw ConfigError("write to " + path.string() + " failed");
    }
}

std::string roc_csv(const RocCurve& curve) {
    std::string out = "fpr,tpr\n";
    for (const auto& p : curve.points) {
        out += format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
    }
    return out;
}

std::string curve_csv(const std::vector<EpochRecord>& curve) {
    std::string out = "epoch,mean_train_loss,test_accuracy\n";
    for (const auto& r : curve) {
        out += std::to_string(r.epoch) + "," + format_double(r.mean_train_loss) + "," +
               format_double(r.test_accuracy) + "\n";
    }
    return out;
}

struct SynthArgs {
    std::size_t dim = 512;
    std::size_t per_class = 384;
    double sep = 4.0;
    double offset = 0.0;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_synth(const SynthArgs& a) {
    const FeatureSet set = gen_synthetic(a.dim, a.per_class, a.sep, a.seed, a.offset);
    write_aefv(set, a.out);
    std::cout << "wrote " << set.size() << " samples (dim " << set.dim << ") to " << a.out << "\n";
    return kExitOk;
}

struct SplitArgs {
    std::string in;
    std::string train_out;
    std::string test_out;
    std::size_t train_per_class = 256;
    std::size_t test_per_class = 128;
    std::uint64_t seed = 1;
};

int cmd_split(const SplitArgs& a) {
    const FeatureSet set = read_aefv(a.in);
    const Split s = split(set, {a.train_per_class, a.test_per_class, a.seed});
    write_aefv(s.train, a.train_out);
    write_aefv(s.test, a.test_out);
    std::cout << "train " << s.train.size() << " samples -> " << a.train_out << "\n"
              << "test " << s.test.size() << " samples -> " << a.test_out << "\n";
    return kExitOk;
}

struct TrainArgs {
    std::string model = "tlqnn";
    int layers = 4;
    int qubits = 0;
    std::string train_path;
    std::string test_path;
    TrainConfig config;
    std::string out_dir;
    bool roc_pooled = false;
    bool quiet = false;
    int workers = 0;
};

int cmd_train(TrainArgs a) {
    const ModelKind kind = parse_model_kind(a.model);
    const FeatureSet train_set = read_aefv(a.train_path);
    const FeatureSet test_set = read_aefv(a.test_path);
    if (train_set.dim != test_set.dim) {
        throw ConfigError("train dim " + std::to_string(train_set.dim) + " != test dim " +
                          std::to_string(test_set.dim));
    }
    const int classes = std::max({2, train_set.class_count, test_set.class_count});
    ModelConfig config = config_for_features(kind, a.layers, train_set.dim, classes);
    if (a.qubits > 0 && a.qubits != config.n_qubits) {
        throw ConfigError("--qubits " + std::to_string(a.qubits) + " does not fit " +
                          std::to_string(train_set.dim) + "-dimensional features (needs " +
                          std::to_string(config.n_qubits) + ")");
    }
    const HybridModel model(config);
    a.config.workers = resolve_workers(a.workers);
    a.config.validate();

    const ParamCount pc = model.counts();
    std::cout << "model " << model_kind_name(kind) << ": " << config.n_qubits << " qubits, "
              << config.layers << " layers, feature dim " << config.feature_dim
              << ", parameters " << pc.quantum << " quantum + " << pc.classical
              << " classical = " << pc.total() << "\n";

    const auto runs = run_repeats(model, train_set, test_set, a.config,
                                  [&](int r, const EpochRecord& rec) {
                                      if (!a.quiet) {
                                          std::cout << "run " << r << " epoch " << rec.epoch
                                                    << " loss " << rec.mean_train_loss
                                                    << " test_acc " << rec.test_accuracy << "\n";
                                      }
                                  });

    const fs::path out_dir = a.out_dir;
    fs::create_directories(out_dir);
    std::vector<double> accs;
    std::vector<double> losses;
    std::vector<double> pooled_scores;
    std::vector<int> pooled_truth;
    const std::vector<int> truth = test_set.labels();
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        const fs::path dir = out_dir / ("run" + std::to_string(r));
        fs::create_directories(dir);
        write_text(dir / "loss_curve.csv", curve_csv(run.curve));
        save_checkpoint({config, run.params, run.seed, a.config}, dir / "checkpoint.txt");
        accs.push_back(run.final_test.accuracy);
        losses.push_back(run.curve.back().mean_train_loss);
        if (a.roc_pooled || r == 0) {
            pooled_scores.insert(pooled_scores.end(), run.final_test.scores.begin(),
                                 run.final_test.scores.end());
            pooled_truth.insert(pooled_truth.end(), truth.begin(), truth.end());
        }
    }
    const MeanStd acc = mean_std(accs);
    const MeanStd loss = mean_std(losses);
    RocCurve roc = roc_auc(pooled_scores, pooled_truth);
    write_text(out_dir / "roc.csv", roc_csv(roc));

    std::string summary =
        "model,source_dim,qubits,layers,params_quantum,params_classical,acc_mean,acc_std,"
        "final_loss_mean,auc\n";
    summary += std::string(model_kind_name(kind)) + "," + std::to_string(config.feature_dim) +
               "," + std::to_string(config.n_qubits) + "," + std::to_string(config.layers) + "," +
               std::to_string(pc.quantum) + "," + std::to_string(pc.classical) + "," +
               format_double(acc.mean) + "," + format_double(acc.std) + "," +
               format_double(loss.mean) + "," + format_double(roc.auc) + "\n";
    write_text(out_dir / "summary.csv", summary);
    std::cout << "accuracy " << acc.mean << " +- " << acc.std << " %, final loss " << loss.mean
              << ", auc " << roc.auc << "\n";
    return kExitOk;
}

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string roc_out;
    int workers = 0;
};

int cmd_eval(const EvalArgs& a) {
    const Checkpoint ckpt = load_checkpoint(a.checkpoint);
    const FeatureSet set = read_aefv(a.data);
    if (set.dim != ckpt.config.feature_dim) {
        throw ConfigError("checkpoint expects feature dim " +
                          std::to_string(ckpt.config.feature_dim) + ", data has " +
                          std::to_string(set.dim));
    }
    const HybridModel model(ckpt.config);
    const Evaluation ev = evaluate(model, ckpt.params, set, resolve_workers(a.workers));
    std::cout << "samples " << set.size() << "\n";
    std::cout << "accuracy " << format_double(ev.accuracy) << "\n";
    std::cout << "loss " << format_double(ev.mean_loss) << "\n";
    const std::vector<int> truth = set.labels();
    const bool both = std::count(truth.begin(), truth.end(), 1) > 0 &&
                      std::count(truth.begin(), truth.end(), 1) < static_cast<long>(truth.size());
    if (both) {
        const RocCurve roc = roc_auc(ev.scores, truth);
        std::cout << "auc " << format_double(roc.auc) << "\n";
        if (!a.roc_out.empty()) {
            write_text(a.roc_out, roc_csv(roc));
        }
    } else {
        std::cout << "auc n/a (single-class data)\n";
        if (!a.roc_out.empty()) {
            throw ConfigError("--roc needs both classes in the data");
        }
    }
    return kExitOk;
}

struct InitArgs {
    std::string model = "tlqnn";
    int layers = 4;
    std::size_t dim = 512;
    int classes = 2;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_init(const InitArgs& a) {
    const ModelConfig config = config_for_features(parse_model_kind(a.model), a.layers, a.dim,
                                                   a.classes);
    const HybridModel model(config);
    Rng rng(a.seed);
    Checkpoint ckpt{config, init_params(model, rng), a.seed, TrainConfig{}};
    save_checkpoint(ckpt, a.out);
    std::cout << "wrote untrained " << model_kind_name(config.kind) << " checkpoint to " << a.out
              << "\n";
    return kExitOk;
}

struct GradcheckArgs {
    std::string model = "tlqnn";
    int qubits = 4;
    int layers = 2;
    std::uint64_t seed = 1;
    double tolerance = 1e-5;
    double step = 1e-5;
    int instances = 1;
};

int cmd_gradcheck(const GradcheckArgs& a) {
    // Deviation is |ps - fd| / max(|fd|, 1e-3): relative for ordinary
    // gradients, an absolute floor of tolerance * 1e-3 near zero.
    constexpr double kScaleFloor = 1e-3;
    const ModelKind kind = parse_model_kind(a.model);
    ModelConfig config;
    config.kind = kind;
    config.n_qubits = a.qubits;
    config.layers = a.layers;
    config.feature_dim = std::size_t{1} << std::clamp(a.qubits, 1, kMaxQubits);
    const HybridModel model(config);
    Rng rng(a.seed);

    double worst = 0.0;
    std::string worst_name = "-";
    for (int inst = 0; inst < a.instances; ++inst) {
        const ModelParams params = init_params(model, rng);
        std::vector<double> x(config.feature_dim);
        for (double& v : x) {
            v = rng.normal();
        }
        const int y = static_cast<int>(rng.below(model.num_classes()));
        const GradientBundle exact = sample_gradient(model, params, x, y);
        const GradientBundle fd = fd_grad(model, params, x, y, a.step);
        auto scan = [&](const std::vector<double>& e, const std::vector<double>& f,
                        const char* name) {
            for (std::size_t i = 0; i < e.size(); ++i) {
                const double dev = std::abs(e[i] - f[i]) / std::max(std::abs(f[i]), kScaleFloor);
                if (dev > worst || std::isnan(dev)) {
                    worst = dev;
                    worst_name = "instance " + std::to_string(inst) + " " + name + "[" +
                                 std::to_string(i) + "]";
                }
            }
        };
        scan(exact.d_theta, fd.d_theta, "theta");
        scan(exact.d_W, fd.d_W, "W");
        scan(exact.d_b, fd.d_b, "b");
    }
    const bool pass = worst <= a.tolerance;
    std::cout << (pass ? "PASS" : "FAIL") << " " << model_kind_name(kind) << " qubits "
              << a.qubits << " layers " << a.layers << " slots " << model.num_slots()
              << ": max relative deviation " << worst << " (tolerance " << a.tolerance
              << ", worst " << worst_name << ")\n";
    return pass ? kExitOk : kExitCheck;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Amplitude-encoded hybrid quantum transfer-learning toolkit"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate a two-class Gaussian feature file");
    s->add_option("--dim", synth.dim, "Feature dimension")->check(CLI::Range(2, 1 << 20));
    s->add_option("--per-class", synth.per_class, "Samples per class")->check(CLI::PositiveNumber);
    s->add_option("--sep", synth.sep, "Class separation along the first axis")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--offset", synth.offset, "Common shift of both class means along the first axis");
    s->add_option("--seed", synth.seed, "Random seed");
    s->add_option("--out", synth.out, "Output AEFV path")->required();

    SplitArgs sp;
    auto* spc = app.add_subcommand("split", "Class-balanced train/test split of an AEFV file");
    spc->add_option("--in", sp.in, "Input AEFV")->required();
    spc->add_option("--train-out", sp.train_out, "Train AEFV output")->required();
    spc->add_option("--test-out", sp.test_out, "Test AEFV output")->required();
    spc->add_option("--train-per-class", sp.train_per_class)->check(CLI::PositiveNumber);
    spc->add_option("--test-per-class", sp.test_per_class)->check(CLI::PositiveNumber);
    spc->add_option("--seed", sp.seed);

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train with mini-batch Adam and write run artifacts");
    t->add_option("--model", tr.model, "tlqnn or tlqcnn")
        ->check(CLI::IsMember({"tlqnn", "tlqcnn"}, CLI::ignore_case));
    t->add_option("--layers", tr.layers, "Ansatz layers (TLQNN) or FC layers (TLQCNN)")
        ->check(CLI::PositiveNumber);
    t->add_option("--qubits", tr.qubits, "Expected register size (checked against the data)");
    t->add_option("--train", tr.train_path, "Training AEFV")->required()->check(CLI::ExistingFile);
    t->add_option("--test", tr.test_path, "Test AEFV")->required()->check(CLI::ExistingFile);
    t->add_option("--epochs", tr.config.epochs)->check(CLI::PositiveNumber);
    t->add_option("--batch", tr.config.batch_size)->check(CLI::PositiveNumber);
    t->add_option("--lr", tr.config.lr0)->check(CLI::PositiveNumber);
    t->add_option("--decay", tr.config.decay_factor, "Learning-rate decay factor")
        ->check(CLI::Range(0.0, 1.0));
    t->add_option("--decay-every", tr.config.decay_every, "Epochs between decays")
        ->check(CLI::PositiveNumber);
    t->add_option("--repeats", tr.config.repeats)->check(CLI::PositiveNumber);
    t->add_option("--seed", tr.config.seed, "Seed of the first run; run r uses seed + r");
    t->add_option("--out-dir", tr.out_dir)->required();
    t->add_flag("--roc-pooled", tr.roc_pooled, "Pool test scores over all runs for the ROC/AUC");
    t->add_flag("--quiet", tr.quiet, "Suppress per-epoch progress");
    t->add_option("--workers", tr.workers, "Worker threads (default: $AECQTL_WORKERS or cores)");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Accuracy and AUC of a checkpoint on an AEFV file");
    e->add_option("--checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
    e->add_option("--data", ev.data)->required()->check(CLI::ExistingFile);
    e->add_option("--roc", ev.roc_out, "Write ROC points as CSV");
    e->add_option("--workers", ev.workers);

    InitArgs in;
    auto* i = app.add_subcommand("init", "Write a freshly initialized checkpoint");
    i->add_option("--model", in.model)->check(CLI::IsMember({"tlqnn", "tlqcnn"}, CLI::ignore_case));
    i->add_option("--layers", in.layers)->check(CLI::PositiveNumber);
    i->add_option("--dim", in.dim, "Feature dimension")->check(CLI::PositiveNumber);
    i->add_option("--classes", in.classes)->check(CLI::Range(2, 64));
    i->add_option("--seed", in.seed);
    i->add_option("--out", in.out)->required();

    GradcheckArgs gc;
    auto* g = app.add_subcommand("gradcheck", "Parameter-shift vs finite-difference gradients");
    g->add_option("--model", gc.model)->check(CLI::IsMember({"tlqnn", "tlqcnn"}, CLI::ignore_case));
    g->add_option("--qubits", gc.qubits)->check(CLI::Range(2, 10));
    g->add_option("--layers", gc.layers)->check(CLI::PositiveNumber);
    g->add_option("--seed", gc.seed);
    g->add_option("--tolerance", gc.tolerance)->check(CLI::PositiveNumber);
    g->add_option("--step", gc.step, "Finite-difference step")->check(CLI::PositiveNumber);
    g->add_option("--instances", gc.instances)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kExitUsage;
    }

    try {
        if (s->parsed()) {
            return cmd_synth(synth);
        }
        if (spc->parsed()) {
            return cmd_split(sp);
        }
        if (t->parsed()) {
            return cmd_train(tr);
        }
        if (e->parsed()) {
            return cmd_eval(ev);
        }
        if (i->parsed()) {
            return cmd_init(in);
        }
        if (g->parsed()) {
            return cmd_gradcheck(gc);
        }
    } catch (const aecqtl::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
