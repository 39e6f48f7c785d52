#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "aecqtl/gradient.hpp"

namespace aecqtl {

struct Sample {
    int label = 0;
    std::vector<double> features;
};

/// Labeled feature vectors produced by a frozen source network (or the
/// synthetic generator below).
struct FeatureSet {
    std::size_t dim = 0;
    int class_count = 0;
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }

    /// Throws ConfigError on ragged rows, bad labels or non-finite values.
    void validate() const;

    std::vector<LabeledView> views() const;
    std::vector<int> labels() const;
};

// AEFV v1 text format:
//   aefv,1,<dim>,<sample_count>,<class_count>
//   <label>,<f0>,...,<f{dim-1}>        (one line per sample)
// Values are shortest round-trip decimals; lines end in LF (CRLF accepted on
// read); a UTF-8 BOM is rejected.

FeatureSet parse_aefv(std::istream& in);
FeatureSet read_aefv(const std::filesystem::path& path);
std::string format_aefv(const FeatureSet& set);
void write_aefv(const FeatureSet& set, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Two Gaussian classes with identity covariance: class 0 centered at
/// (offset + separation) e_1, class 1 at (offset - separation) e_1. Samples
/// are emitted class 0 first, then class 1; normals come from Rng::normal.
FeatureSet gen_synthetic(std::size_t dim, std::size_t per_class, double separation,
                         std::uint64_t seed, double offset = 0.0);

struct SplitSpec {
    std::size_t per_class_train = 0;
    std::size_t per_class_test = 0;
    std::uint64_t seed = 0;
};

struct Split {
    FeatureSet train;
    FeatureSet test;
};

/// Seeded per-class shuffle; the first per_class_train of each class go to
/// train, the next per_class_test to test. Output is grouped by class.
Split split(const FeatureSet& set, const SplitSpec& spec);

} // namespace aecqtl
