#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "csigan/dataset.hpp"
#include "csigan/models.hpp"
#include "test_helpers.hpp"

using namespace csigan;

namespace {

SynthParams small_params(std::uint64_t seed = 1, double noise = 0.1) {
    SynthParams p;
    p.train_per_class = 12;
    p.test_per_class = 6;
    p.seed = seed;
    p.noise_sigma = noise;
    return p;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("synth_generate: default sizes match the experiment layout") {
    SynthParams p;
    DatasetSplit split = synth_generate(p);
    CHECK(split.train.size() == 6400);
    CHECK(split.test.size() == 3200);
    CHECK(split.width() == 120);
    CHECK(split.templates.size() == 16);
    for (const auto& s : split.train) {
        CHECK(s.values.size() == 120);
        CHECK(s.label >= 1);
        CHECK(s.label <= 16);
    }
}

TEST_CASE("synth_generate: zero noise gives the template exactly; same seed is bit-identical") {
    SynthParams p = small_params(3, 0.0);
    DatasetSplit a = synth_generate(p);
    for (const auto& s : a.train)
        CHECK((s.values - a.templates[static_cast<std::size_t>(s.label - 1)]).cwiseAbs().maxCoeff() ==
              0.0);

    DatasetSplit b = synth_generate(p);
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train[i].label == b.train[i].label);
        for (Eigen::Index j = 0; j < 120; ++j)
            CHECK(a.train[i].values(j) == b.train[i].values(j));
    }
}

TEST_CASE("synth_generate: unattainable separation fails with diagnostics") {
    SynthParams p = small_params(4, 50.0);
    p.max_retries = 5;
    CHECK_THROWS_WITH_AS((void)synth_generate(p),
                         doctest::Contains("could not separate class templates"),
                         std::runtime_error);
}

TEST_CASE("normalize: affine midpoint, exact endpoints, round-trip") {
    DatasetSplit split;
    split.meta.classes = 2;
    for (double v : {0.0, 10.0, 5.0, 2.5}) {
        CsiSample s;
        s.values = Eigen::VectorXd::Constant(120, v);
        s.label = 1;
        split.train.push_back(s);
    }
    split.test.push_back(split.train.front());
    DatasetSplit raw = split;

    normalize(split);
    CHECK(split.norm.fitted);
    CHECK(split.train[2].values(0) == 0.0);     // 5 is the midpoint of [0, 10]
    CHECK(split.train[0].values(0) == -1.0);    // exact endpoints
    CHECK(split.train[1].values(0) == 1.0);

    double max_abs = 0.0;
    for (const auto& s : split.train) max_abs = std::max(max_abs, s.values.cwiseAbs().maxCoeff());
    CHECK(max_abs == 1.0);

    for (std::size_t i = 0; i < split.train.size(); ++i)
        for (Eigen::Index j = 0; j < 120; ++j)
            CHECK(split.norm.invert(split.train[i].values(j)) ==
                  doctest::Approx(raw.train[i].values(j)).epsilon(1e-12));

    DatasetSplit degenerate;
    CsiSample s;
    s.values = Eigen::VectorXd::Zero(120);
    s.label = 1;
    degenerate.train.push_back(s);
    CHECK_THROWS_AS(normalize(degenerate), std::invalid_argument);
}

TEST_CASE("normalize: test values outside the train range are clamped") {
    DatasetSplit split;
    split.meta.classes = 2;
    CsiSample lo, hi, wild;
    lo.values = Eigen::VectorXd::Constant(120, 0.0);
    lo.label = 1;
    hi.values = Eigen::VectorXd::Constant(120, 10.0);
    hi.label = 2;
    wild.values = Eigen::VectorXd::Constant(120, 12.0);  // beyond the train range
    wild.values(0) = -3.0;
    wild.label = 1;
    split.train = {lo, hi};
    split.test = {wild};
    normalize(split);
    CHECK(split.test[0].values(0) == -1.0);
    CHECK(split.test[0].values(1) == 1.0);

    DatasetSplit noisy = synth_generate(small_params(5, 0.1));
    normalize(noisy);
    for (const auto& s : noisy.test) {
        CHECK(s.values.maxCoeff() <= 1.0);
        CHECK(s.values.minCoeff() >= -1.0);
    }
}

TEST_CASE("select_labeled_subset: sizes, per-class equality, distinctness") {
    DatasetSplit split = synth_generate(small_params(6));
    select_labeled_subset(split, 1, 77);
    CHECK(split.labeled_idx.size() == 16);

    for (int per_class : {1, 3, 12}) {
        for (std::uint64_t seed : {1ull, 9ull}) {
            select_labeled_subset(split, per_class, seed);
            REQUIRE(split.labeled_idx.size() == static_cast<std::size_t>(per_class) * 16);
            std::vector<int> counts(17, 0);
            std::vector<int> seen;
            for (int idx : split.labeled_idx) {
                counts[static_cast<std::size_t>(split.train[static_cast<std::size_t>(idx)].label)]++;
                seen.push_back(idx);
            }
            std::sort(seen.begin(), seen.end());
            CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
            for (int m = 1; m <= 16; ++m) CHECK(counts[static_cast<std::size_t>(m)] == per_class);
        }
    }

    // full train set is a valid subset
    select_labeled_subset(split, 12, 3);
    CHECK(split.labeled_idx.size() == split.train.size());
    CHECK_THROWS_AS(select_labeled_subset(split, 13, 3), std::invalid_argument);
}

TEST_CASE("csv: round-trip, sidecar metadata, malformed rows") {
    const auto path = temp_file("csigan_test_data.csv");
    DatasetSplit split = synth_generate(small_params(8, 0.1));
    save_csv(split, path.string());
    CHECK(std::filesystem::exists(path.string() + ".meta.json"));

    DatasetSplit loaded = load_csv(path.string());
    REQUIRE(loaded.train.size() == split.train.size());
    REQUIRE(loaded.test.size() == split.test.size());
    CHECK(loaded.meta.classes == 16);
    CHECK(loaded.meta.noise_sigma == doctest::Approx(0.1));
    for (std::size_t i = 0; i < split.train.size(); ++i) {
        CHECK(loaded.train[i].label == split.train[i].label);
        CHECK((loaded.train[i].values - split.train[i].values).cwiseAbs().maxCoeff() <= 1e-9);
    }

    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".meta.json");

    // empty file
    {
        std::ofstream os(path);
    }
    CHECK_THROWS_AS((void)load_csv(path.string()), std::runtime_error);

    // a row with 119 values errors with its line number
    {
        std::ofstream os(path);
        for (int i = 0; i < 119; ++i) os << "0.5,";
        os << "3,train\n";
    }
    CHECK_THROWS_WITH_AS((void)load_csv(path.string()), doctest::Contains("line 1"),
                         std::runtime_error);

    // non-numeric value
    {
        std::ofstream os(path);
        os << "abc";
        for (int i = 1; i < 120; ++i) os << ",0.5";
        os << ",3,train\n";
    }
    CHECK_THROWS_WITH_AS((void)load_csv(path.string()), doctest::Contains("non-numeric"),
                         std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("nearest-template classifier confirms the dataset is learnable") {
    DatasetSplit split = synth_generate(SynthParams{});  // defaults
    normalize(split);
    REQUIRE(split.templates.size() == 16);

    auto nearest = [&](const Eigen::VectorXd& v) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int m = 0; m < 16; ++m) {
            const double d = (v - split.templates[static_cast<std::size_t>(m)]).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = m + 1;
            }
        }
        return best;
    };

    int correct = 0;
    for (const auto& s : split.test)
        if (nearest(s.values) == s.label) ++correct;
    const double acc = 100.0 * correct / static_cast<double>(split.test.size());
    INFO("nearest-template accuracy = ", acc);
    CHECK(acc > 99.0);

    // noiseless data is matched perfectly
    SynthParams clean;
    clean.noise_sigma = 0.0;
    clean.train_per_class = 4;
    clean.test_per_class = 2;
    DatasetSplit noiseless = synth_generate(clean);
    normalize(noiseless);
    int all = 0;
    for (const auto& s : noiseless.test) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int m = 0; m < 16; ++m) {
            const double d = (s.values - noiseless.templates[static_cast<std::size_t>(m)]).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = m + 1;
            }
        }
        if (best == s.label) ++all;
    }
    CHECK(all == static_cast<int>(noiseless.test.size()));
}
