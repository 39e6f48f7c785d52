#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "aecqtl/dataset.hpp"
#include "aecqtl/errors.hpp"

using namespace aecqtl;

namespace {

FeatureSet parse(const std::string& text) {
    std::istringstream in(text);
    return parse_aefv(in);
}

std::size_t error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("parse well-formed AEFV") {
    const auto s = parse("aefv,1,4,2,2\n0,1,2,3,4\n1,-0.5,0,1e-3,7\n");
    CHECK(s.dim == 4);
    CHECK(s.class_count == 2);
    REQUIRE(s.size() == 2);
    CHECK(s.samples[1].label == 1);
    CHECK(s.samples[1].features == std::vector<double>{-0.5, 0, 1e-3, 7});

    const auto crlf = parse("aefv,1,2,1,2\r\n1,3,4\r\n");
    CHECK(crlf.samples[0].features == std::vector<double>{3, 4});
    CHECK(s.labels() == std::vector<int>{0, 1});
}

TEST_CASE("AEFV errors carry line numbers") {
    CHECK(error_line("aefv,1,4,2,2\n0,1,2,3,4\n1,1,2,3\n") == 3);
    CHECK(error_line("aefv,1,2,1,2\n2,1,1\n") == 2);    // label out of range
    CHECK(error_line("aefv,1,2,1,2\n0,nan,1\n") == 2);  // non-finite
    CHECK(error_line("aefv,1,2,1,2\n0,1,inf\n") == 2);
    CHECK(error_line("aefv,1,2,1,2\n0,x,1\n") == 2);
    CHECK(error_line("aefv,2,2,1,2\n0,1,1\n") == 1);  // version
    CHECK(error_line("afv,1,2,1,2\n0,1,1\n") == 1);
    CHECK(error_line("\xEF\xBB\xBF" "aefv,1,2,1,2\n0,1,1\n") == 1);
    CHECK(error_line("aefv,1,2,2,2\n0,1,1\n") > 0);         // too few rows
    CHECK(error_line("aefv,1,2,1,2\n0,1,1\n1,1,1\n") == 3);  // too many rows
    CHECK(error_line("aefv,1,2,1,2\n0,1,1\n\n") == 3);       // trailing blank line
    CHECK(error_line("") == 1);
}

TEST_CASE("AEFV round trip is lossless") {
    Rng rng(17);
    FeatureSet s;
    s.dim = 7;
    s.class_count = 3;
    for (int i = 0; i < 20; ++i) {
        Sample smp;
        smp.label = i % 3;
        for (int k = 0; k < 7; ++k) smp.features.push_back(rng.normal() * std::pow(10.0, k - 3));
        s.samples.push_back(smp);
    }
    s.samples[0].features[0] = 0.1;
    s.samples[0].features[1] = 5e-324;
    s.samples[0].features[2] = -1.7976931348623157e308;
    const std::string text = format_aefv(s);
    CHECK(text.rfind("aefv,1,7,20,3\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');
    const auto back = parse(text);
    for (std::size_t i = 0; i < s.size(); ++i) {
        REQUIRE(back.samples[i].label == s.samples[i].label);
        REQUIRE(back.samples[i].features == s.samples[i].features);
    }
    CHECK(format_aefv(back) == text);

    const auto path = std::filesystem::temp_directory_path() / "aecqtl_test_roundtrip.aefv";
    write_aefv(s, path);
    CHECK(format_aefv(read_aefv(path)) == text);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_aefv(path), ConfigError);
}

TEST_CASE("format_double") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.0) == "-2");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("synthetic generator") {
    const auto a = gen_synthetic(512, 256, 4.0, 7);
    const auto b = gen_synthetic(512, 256, 4.0, 7);
    CHECK(format_aefv(a) == format_aefv(b));
    CHECK(a.size() == 512);
    CHECK(a.samples[0].label == 0);
    CHECK(a.samples[511].label == 1);
    CHECK_NOTHROW(a.validate());

    // The best threshold on the first coordinate separates the classes.
    std::vector<std::pair<double, int>> by_first;
    for (const auto& s : a.samples) by_first.emplace_back(s.features[0], s.label);
    std::sort(by_first.begin(), by_first.end());
    std::size_t best = 0;
    std::size_t ones_below = 0;
    const std::size_t zeros_total = 256;
    for (std::size_t cut = 0; cut <= by_first.size(); ++cut) {
        // Predict 1 below the cut, 0 above (class 1 sits at -delta).
        const std::size_t zeros_below = cut - ones_below;
        best = std::max(best, ones_below + (zeros_total - zeros_below));
        if (cut < by_first.size() && by_first[cut].second == 1) ++ones_below;
    }
    CHECK(static_cast<double>(best) / 512 >= 0.99);

    // Class means sit at +-delta on the first axis, near 0 elsewhere.
    double m0 = 0, m1 = 0, other = 0;
    for (const auto& s : a.samples) (s.label == 0 ? m0 : m1) += s.features[0];
    for (const auto& s : a.samples) other += s.features[5];
    CHECK(m0 / 256 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(m1 / 256 == doctest::Approx(-4.0).epsilon(0.05));
    CHECK(std::abs(other / 512) < 0.2);

    const auto shifted = gen_synthetic(8, 50, 2.0, 3, 10.0);
    double s0 = 0;
    for (const auto& s : shifted.samples) if (s.label == 0) s0 += s.features[0];
    CHECK(s0 / 50 == doctest::Approx(12.0).epsilon(0.05));

    CHECK(format_aefv(gen_synthetic(8, 4, 1.0, 1)) != format_aefv(gen_synthetic(8, 4, 1.0, 2)));
    CHECK_THROWS_AS(gen_synthetic(1, 4, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(gen_synthetic(8, 4, -1.0, 1), ConfigError);
}

TEST_CASE("split") {
    const auto set = gen_synthetic(4, 10, 1.0, 5);
    const auto sp = split(set, {6, 4, 11});
    CHECK(sp.train.size() == 12);
    CHECK(sp.test.size() == 8);
    auto count = [](const FeatureSet& s, int c) {
        const auto l = s.labels();
        return std::count(l.begin(), l.end(), c);
    };
    CHECK(count(sp.train, 0) == 6);
    CHECK(count(sp.train, 1) == 6);
    CHECK(count(sp.test, 0) == 4);
    CHECK(count(sp.test, 1) == 4);

    std::set<std::vector<double>> seen;
    for (const auto& s : sp.train.samples) seen.insert(s.features);
    for (const auto& s : sp.test.samples) CHECK(seen.count(s.features) == 0);

    const auto again = split(set, {6, 4, 11});
    CHECK(format_aefv(again.train) == format_aefv(sp.train));
    CHECK(format_aefv(again.test) == format_aefv(sp.test));
    CHECK(format_aefv(split(set, {6, 4, 12}).train) != format_aefv(sp.train));

    const auto big = gen_synthetic(4, 300, 1.0, 5);
    try {
        split(big, {256, 128, 1});
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("class 0") != std::string::npos);
    }
}
