#include "aecqtl/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

#include "aecqtl/dataset.hpp"
#include "aecqtl/errors.hpp"

namespace aecqtl {

namespace {

constexpr std::string_view kTag = "aecqtl-checkpoint";

void append_values(std::string& out, const std::vector<double>& values) {
    for (double v : values) {
        out += ',';
        out += format_double(v);
    }
}

struct LineReader {
    std::istream& in;
    std::size_t line_no = 0;

    std::vector<std::string> next(std::string_view key) {
        std::string line;
        if (!std::getline(in, line)) {
            throw ParseError(line_no + 1, "missing '" + std::string(key) + "' record");
        }
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            fields.push_back(f);
        }
        if (fields.empty() || fields[0] != key) {
            throw ParseError(line_no, "expected '" + std::string(key) + "' record");
        }
        return fields;
    }

    template <class T>
    T number(const std::string& text) const {
        T v{};
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ParseError(line_no, "bad number '" + text + "'");
        }
        return v;
    }

    template <class T>
    T scalar(std::string_view key) {
        const auto f = next(key);
        if (f.size() != 2) {
            throw ParseError(line_no, "'" + std::string(key) + "' takes one value");
        }
        return number<T>(f[1]);
    }

    std::vector<double> values(const std::vector<std::string>& f, std::size_t first,
                               std::size_t count) const {
        if (f.size() != first + count) {
            throw ParseError(line_no, "expected " + std::to_string(count) + " values, found " +
                                          std::to_string(f.size() - std::min(f.size(), first)));
        }
        std::vector<double> out;
        out.reserve(count);
        for (std::size_t i = first; i < f.size(); ++i) {
            out.push_back(number<double>(f[i]));
        }
        return out;
    }
};

} // namespace

std::string format_checkpoint(const Checkpoint& c) {
    std::string out;
    out += std::string(kTag) + ",1\n";
    out += "model," + std::string(model_kind_name(c.config.kind)) + "\n";
    out += "qubits," + std::to_string(c.config.n_qubits) + "\n";
    out += "layers," + std::to_string(c.config.layers) + "\n";
    out += "classes," + std::to_string(c.config.num_classes) + "\n";
    out += "feature_dim," + std::to_string(c.config.feature_dim) + "\n";
    out += "seed," + std::to_string(c.seed) + "\n";
    out += "epochs," + std::to_string(c.train.epochs) + "\n";
    out += "batch," + std::to_string(c.train.batch_size) + "\n";
    out += "lr0," + format_double(c.train.lr0) + "\n";
    out += "decay_every," + std::to_string(c.train.decay_every) + "\n";
    out += "decay_factor," + format_double(c.train.decay_factor) + "\n";
    out += "theta," + std::to_string(c.params.theta.size());
    append_values(out, c.params.theta);
    out += "\nW," + std::to_string(c.params.b.size()) + "," +
           std::to_string(c.params.b.empty() ? 0 : c.params.W.size() / c.params.b.size());
    append_values(out, c.params.W);
    out += "\nb," + std::to_string(c.params.b.size());
    append_values(out, c.params.b);
    out += "\n";
    return out;
}

Checkpoint parse_checkpoint(std::istream& in) {
    LineReader r{in};
    const auto header = r.next(kTag);
    if (header.size() != 2 || header[1] != "1") {
        throw ParseError(r.line_no, "unsupported checkpoint version");
    }
    Checkpoint c;
    c.config.kind = parse_model_kind(r.next("model").at(1));
    c.config.n_qubits = r.scalar<int>("qubits");
    c.config.layers = r.scalar<int>("layers");
    c.config.num_classes = r.scalar<int>("classes");
    c.config.feature_dim = r.scalar<std::size_t>("feature_dim");
    c.seed = r.scalar<std::uint64_t>("seed");
    c.train.epochs = r.scalar<int>("epochs");
    c.train.batch_size = r.scalar<std::size_t>("batch");
    c.train.lr0 = r.scalar<double>("lr0");
    c.train.decay_every = r.scalar<int>("decay_every");
    c.train.decay_factor = r.scalar<double>("decay_factor");

    const auto theta = r.next("theta");
    if (theta.size() < 2) {
        throw ParseError(r.line_no, "theta record needs a count");
    }
    c.params.theta = r.values(theta, 2, r.number<std::size_t>(theta[1]));
    const auto w = r.next("W");
    if (w.size() < 3) {
        throw ParseError(r.line_no, "W record needs rows and cols");
    }
    c.params.W = r.values(w, 3, r.number<std::size_t>(w[1]) * r.number<std::size_t>(w[2]));
    const auto b = r.next("b");
    if (b.size() < 2) {
        throw ParseError(r.line_no, "b record needs a count");
    }
    c.params.b = r.values(b, 2, r.number<std::size_t>(b[1]));
    std::string rest;
    if (std::getline(in, rest)) {
        throw ParseError(r.line_no + 1, "trailing content after 'b' record");
    }

    const HybridModel model(c.config);
    if (c.params.b.size() != model.num_classes() ||
        c.params.W.size() != model.num_classes() * model.num_measured()) {
        throw ConfigError("checkpoint head shape disagrees with its header");
    }
    model.check(c.params);
    return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const std::string text = format_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw ConfigError("write to " + path.string() + " failed");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    return parse_checkpoint(in);
}

} // namespace aecqtl
