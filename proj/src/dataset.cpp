#include "aecqtl/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "aecqtl/errors.hpp"
#include "aecqtl/random.hpp"

namespace aecqtl {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <class T>
bool parse_number(std::string_view text, T& value) {
    if (text.empty()) {
        return false;
    }
    const char* first = text.data();
    const char* last = text.data() + text.size();
    // from_chars rejects a leading '+', which we do too.
    auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc{} && ptr == last;
}

std::size_t parse_count(std::string_view text, std::size_t line, const char* what) {
    std::size_t v = 0;
    if (!parse_number(text, v)) {
        throw ParseError(line, std::string("bad ") + what + " '" + std::string(text) + "'");
    }
    return v;
}

} // namespace

void FeatureSet::validate() const {
    if (class_count < 1) {
        throw ConfigError("feature set needs at least one class");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        if (s.features.size() != dim) {
            throw ConfigError("sample " + std::to_string(i) + " has " +
                              std::to_string(s.features.size()) + " features, expected " +
                              std::to_string(dim));
        }
        if (s.label < 0 || s.label >= class_count) {
            throw ConfigError("sample " + std::to_string(i) + " has label " +
                              std::to_string(s.label) + " outside 0.." +
                              std::to_string(class_count - 1));
        }
        for (double v : s.features) {
            if (!std::isfinite(v)) {
                throw ConfigError("sample " + std::to_string(i) + " has a non-finite feature");
            }
        }
    }
}

std::vector<LabeledView> FeatureSet::views() const {
    std::vector<LabeledView> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back({s.features, s.label});
    }
    return out;
}

std::vector<int> FeatureSet::labels() const {
    std::vector<int> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(s.label);
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        throw ConfigError("cannot format value");
    }
    return std::string(buf, ptr);
}

FeatureSet parse_aefv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) {
            return false;
        }
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    };

    if (!next_line()) {
        throw ParseError(1, "empty file");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        throw ParseError(1, "byte order mark not allowed");
    }
    const auto header = split_fields(line);
    if (header.size() != 5 || header[0] != "aefv") {
        throw ParseError(1, "expected header 'aefv,1,<dim>,<sample_count>,<class_count>'");
    }
    if (header[1] != "1") {
        throw ParseError(1, "unsupported AEFV version '" + std::string(header[1]) + "'");
    }
    FeatureSet set;
    set.dim = parse_count(header[2], 1, "dim");
    const std::size_t count = parse_count(header[3], 1, "sample_count");
    const std::size_t classes = parse_count(header[4], 1, "class_count");
    if (set.dim == 0 || classes == 0) {
        throw ParseError(1, "dim and class_count must be positive");
    }
    set.class_count = static_cast<int>(classes);
    set.samples.reserve(count);

    while (next_line()) {
        if (line.empty()) {
            throw ParseError(line_no, "blank line");
        }
        if (set.samples.size() == count) {
            throw ParseError(line_no, "more rows than the header's sample_count " +
                                          std::to_string(count));
        }
        const auto fields = split_fields(line);
        if (fields.size() != set.dim + 1) {
            throw ParseError(line_no, "expected label plus " + std::to_string(set.dim) +
                                          " values, found " + std::to_string(fields.size() - 1));
        }
        Sample s;
        if (!parse_number(fields[0], s.label)) {
            throw ParseError(line_no, "bad label '" + std::string(fields[0]) + "'");
        }
        if (s.label < 0 || s.label >= set.class_count) {
            throw ParseError(line_no, "label " + std::to_string(s.label) + " out of range");
        }
        s.features.resize(set.dim);
        for (std::size_t j = 0; j < set.dim; ++j) {
            double v = 0.0;
            if (!parse_number(fields[j + 1], v) || !std::isfinite(v)) {
                throw ParseError(line_no, "bad value '" + std::string(fields[j + 1]) +
                                              "' in column " + std::to_string(j + 1));
            }
            s.features[j] = v;
        }
        set.samples.push_back(std::move(s));
    }
    if (set.samples.size() != count) {
        throw ParseError(line_no + 1, "header declares " + std::to_string(count) +
                                          " samples, found " +
                                          std::to_string(set.samples.size()));
    }
    return set;
}

FeatureSet read_aefv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    return parse_aefv(in);
}

std::string format_aefv(const FeatureSet& set) {
    set.validate();
    std::string out = "aefv,1," + std::to_string(set.dim) + "," +
                      std::to_string(set.samples.size()) + "," + std::to_string(set.class_count) +
                      "\n";
    for (const auto& s : set.samples) {
        out += std::to_string(s.label);
        for (double v : s.features) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

void write_aefv(const FeatureSet& set, const std::filesystem::path& path) {
    const std::string text = format_aefv(set);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw ConfigError("write to " + path.string() + " failed");
    }
}

FeatureSet gen_synthetic(std::size_t dim, std::size_t per_class, double separation,
                         std::uint64_t seed, double offset) {
    if (dim < 2) {
        throw ConfigError("synthetic features need dim >= 2");
    }
    if (!(separation >= 0.0) || !std::isfinite(offset)) {
        throw ConfigError("separation must be non-negative");
    }
    Rng rng(seed);
    FeatureSet set;
    set.dim = dim;
    set.class_count = 2;
    set.samples.reserve(2 * per_class);
    for (int label = 0; label < 2; ++label) {
        const double center = offset + (label == 0 ? separation : -separation);
        for (std::size_t i = 0; i < per_class; ++i) {
            Sample s;
            s.label = label;
            s.features.resize(dim);
            for (double& v : s.features) {
                v = rng.normal();
            }
            s.features[0] += center;
            set.samples.push_back(std::move(s));
        }
    }
    return set;
}

Split split(const FeatureSet& set, const SplitSpec& spec) {
    if (spec.per_class_train < 1 || spec.per_class_test < 1) {
        throw ConfigError("split counts must be at least 1");
    }
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(set.class_count));
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        by_class.at(static_cast<std::size_t>(set.samples[i].label)).push_back(i);
    }
    const std::size_t need = spec.per_class_train + spec.per_class_test;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].size() < need) {
            throw ConfigError("class " + std::to_string(c) + " has " +
                              std::to_string(by_class[c].size()) + " samples, split needs " +
                              std::to_string(need));
        }
    }
    Rng rng(spec.seed);
    Split out;
    out.train.dim = out.test.dim = set.dim;
    out.train.class_count = out.test.class_count = set.class_count;
    for (auto& idx : by_class) {
        rng.shuffle(std::span<std::size_t>(idx));
        for (std::size_t k = 0; k < need; ++k) {
            auto& dst = k < spec.per_class_train ? out.train : out.test;
            dst.samples.push_back(set.samples[idx[k]]);
        }
    }
    return out;
}

} // namespace aecqtl
