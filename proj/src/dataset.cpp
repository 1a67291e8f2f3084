#include "csigan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csigan/errors.hpp"
#include "csigan/models.hpp"
#include "csigan/rng.hpp"

namespace csigan {

namespace {

Eigen::VectorXd draw_template(const SynthParams& p, std::mt19937_64& rng) {
    const int w = arch::sample_width;
    Eigen::VectorXd t = Eigen::VectorXd::Zero(w);

    std::uniform_real_distribution<double> amp(p.sine_amp_min, p.sine_amp_max);
    std::uniform_real_distribution<double> freq(p.sine_freq_min, p.sine_freq_max);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int s = 0; s < p.sine_count; ++s) {
        const double a = amp(rng), f = freq(rng), ph = phase(rng);
        for (int i = 0; i < w; ++i)
            t(i) += a * std::sin(2.0 * std::numbers::pi * f * i / w + ph);
    }

    std::uniform_int_distribution<int> seg_count(p.offset_segments_min, p.offset_segments_max);
    const int segments = seg_count(rng);
    std::vector<int> bounds = {0, w};
    std::uniform_int_distribution<int> cut(1, w - 1);
    while (static_cast<int>(bounds.size()) < segments + 1) {
        const int c = cut(rng);
        if (std::find(bounds.begin(), bounds.end(), c) == bounds.end()) bounds.push_back(c);
    }
    std::sort(bounds.begin(), bounds.end());
    std::uniform_real_distribution<double> level(-p.offset_amp, p.offset_amp);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        const double off = level(rng);
        for (int i = bounds[s]; i < bounds[s + 1]; ++i) t(i) += off;
    }
    return t;
}

double min_pairwise_distance(const std::vector<Eigen::VectorXd>& templates) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < templates.size(); ++a)
        for (std::size_t b = a + 1; b < templates.size(); ++b)
            best = std::min(best, (templates[a] - templates[b]).norm());
    return best;
}

std::vector<CsiSample> draw_samples(const SynthParams& p,
                                    const std::vector<Eigen::VectorXd>& templates,
                                    int per_class, const char* noise_tag) {
    std::vector<CsiSample> samples;
    samples.reserve(static_cast<std::size_t>(p.classes) * per_class);
    for (int m = 0; m < p.classes; ++m) {
        auto rng = make_engine(derive_seed(p.seed, noise_tag, static_cast<std::uint64_t>(m)));
        std::normal_distribution<double> noise(0.0, p.noise_sigma);
        for (int j = 0; j < per_class; ++j) {
            CsiSample s;
            s.label = m + 1;
            s.values = templates[static_cast<std::size_t>(m)];
            for (Eigen::Index i = 0; i < s.values.size(); ++i) s.values(i) += noise(rng);
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

DatasetSplit synth_generate(const SynthParams& p) {
    require(p.classes >= 2, "synth_generate: need at least 2 classes");
    require(p.train_per_class >= 1 && p.test_per_class >= 1,
            "synth_generate: per-class counts must be >= 1");
    require(p.noise_sigma >= 0.0, "synth_generate: noise_sigma must be >= 0");

    const double min_sep =
        p.min_separation_factor * p.noise_sigma * std::sqrt(double(arch::sample_width));

    std::vector<Eigen::VectorXd> templates;
    double got = 0.0;
    int attempt = 0;
    for (; attempt < p.max_retries; ++attempt) {
        templates.clear();
        for (int m = 0; m < p.classes; ++m) {
            auto rng = make_engine(derive_seed(p.seed, "template", static_cast<std::uint64_t>(m),
                                               static_cast<std::uint64_t>(attempt)));
            templates.push_back(draw_template(p, rng));
        }
        got = min_pairwise_distance(templates);
        if (got > min_sep) break;
    }
    ensure(attempt < p.max_retries,
           "synth_generate: could not separate class templates after " +
               std::to_string(p.max_retries) + " redraws (min distance " + std::to_string(got) +
               ", required > " + std::to_string(min_sep) + "); lower noise_sigma");

    DatasetSplit split;
    split.meta = p;
    split.templates = templates;
    split.train = draw_samples(p, templates, p.train_per_class, "train-noise");
    split.test = draw_samples(p, templates, p.test_per_class, "test-noise");
    return split;
}

void normalize(DatasetSplit& split) {
    require(!split.train.empty(), "normalize: empty train set");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : split.train) {
        lo = std::min(lo, s.values.minCoeff());
        hi = std::max(hi, s.values.maxCoeff());
    }
    require(hi > lo, "normalize: degenerate train set (min == max)");

    split.norm.lo = lo;
    split.norm.hi = hi;
    split.norm.fitted = true;
    auto apply = [&](Eigen::VectorXd& v, bool clamp) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            double y = split.norm.apply(v(i));
            if (clamp) y = std::clamp(y, -1.0, 1.0);
            v(i) = y;
        }
    };
    for (auto& s : split.train) apply(s.values, false);
    for (auto& s : split.test) apply(s.values, true);
    for (auto& t : split.templates) apply(t, false);
}

void select_labeled_subset(DatasetSplit& split, int per_class, std::uint64_t seed) {
    require(per_class >= 1, "select_labeled_subset: per_class must be >= 1");
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(split.classes()));
    for (std::size_t i = 0; i < split.train.size(); ++i) {
        const int label = split.train[i].label;
        require(label >= 1 && label <= split.classes(),
                "select_labeled_subset: train sample without a valid label");
        by_class[static_cast<std::size_t>(label - 1)].push_back(static_cast<int>(i));
    }

    split.labeled_idx.clear();
    for (std::size_t m = 0; m < by_class.size(); ++m) {
        auto& pool = by_class[m];
        require(per_class <= static_cast<int>(pool.size()),
                "select_labeled_subset: per_class exceeds per-class train count");
        auto rng = make_engine(derive_seed(seed, "labeled-subset", m));
        std::shuffle(pool.begin(), pool.end(), rng);
        for (int j = 0; j < per_class; ++j) split.labeled_idx.push_back(pool[static_cast<std::size_t>(j)]);
    }
    std::sort(split.labeled_idx.begin(), split.labeled_idx.end());
}

void save_csv(const DatasetSplit& split, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    ensure(os.good(), "save_csv: cannot open for writing: " + path);
    auto write_rows = [&os](const std::vector<CsiSample>& samples, const char* tag) {
        for (const auto& s : samples) {
            for (Eigen::Index i = 0; i < s.values.size(); ++i)
                os << format_value(s.values(i)) << ',';
            os << s.label << ',' << tag << '\n';
        }
    };
    write_rows(split.train, "train");
    write_rows(split.test, "test");
    ensure(os.good(), "save_csv: write failed: " + path);

    nlohmann::json meta{
        {"classes", split.meta.classes},
        {"train_per_class", split.meta.train_per_class},
        {"test_per_class", split.meta.test_per_class},
        {"seed", split.meta.seed},
        {"noise_sigma", split.meta.noise_sigma},
        {"sine_count", split.meta.sine_count},
        {"sine_amp", {split.meta.sine_amp_min, split.meta.sine_amp_max}},
        {"sine_freq", {split.meta.sine_freq_min, split.meta.sine_freq_max}},
        {"offset_segments", {split.meta.offset_segments_min, split.meta.offset_segments_max}},
        {"offset_amp", split.meta.offset_amp},
        {"min_separation_factor", split.meta.min_separation_factor},
        {"template_recipe",
         "per class: sum of random-frequency random-phase sinusoids plus a random "
         "piecewise-constant offset; samples add per-channel Gaussian noise"},
    };
    std::ofstream ms(path + ".meta.json", std::ios::trunc);
    ensure(ms.good(), "save_csv: cannot write sidecar metadata for " + path);
    ms << meta.dump(2) << '\n';
}

DatasetSplit load_csv(const std::string& path) {
    std::ifstream is(path);
    ensure(is.good(), "load_csv: cannot open: " + path);

    DatasetSplit split;
    split.meta.classes = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        ensure(static_cast<int>(fields.size()) == arch::sample_width + 2,
               "load_csv: line " + std::to_string(line_no) + ": expected " +
                   std::to_string(arch::sample_width + 2) + " fields, found " +
                   std::to_string(fields.size()));

        CsiSample s;
        s.values.resize(arch::sample_width);
        for (int i = 0; i < arch::sample_width; ++i) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(fields[static_cast<std::size_t>(i)], &pos);
            } catch (const std::exception&) {
                ensure(false, "load_csv: line " + std::to_string(line_no) +
                                  ": non-numeric value in column " + std::to_string(i + 1));
            }
            ensure(pos == fields[static_cast<std::size_t>(i)].size(),
                   "load_csv: line " + std::to_string(line_no) + ": trailing junk in column " +
                       std::to_string(i + 1));
            s.values(i) = v;
        }
        try {
            s.label = std::stoi(fields[arch::sample_width]);
        } catch (const std::exception&) {
            ensure(false, "load_csv: line " + std::to_string(line_no) + ": bad label field");
        }
        const int label = s.label;
        const std::string& tag = fields[arch::sample_width + 1];
        if (tag == "train")
            split.train.push_back(std::move(s));
        else if (tag == "test")
            split.test.push_back(std::move(s));
        else
            ensure(false, "load_csv: line " + std::to_string(line_no) + ": unknown split tag '" +
                              tag + "'");
        split.meta.classes = std::max(split.meta.classes, label);
    }
    ensure(!split.train.empty() || !split.test.empty(), "load_csv: no samples in " + path);

    std::ifstream ms(path + ".meta.json");
    if (ms.good()) {
        nlohmann::json meta = nlohmann::json::parse(ms, nullptr, false);
        if (!meta.is_discarded()) {
            split.meta.classes = meta.value("classes", split.meta.classes);
            split.meta.train_per_class = meta.value("train_per_class", 0);
            split.meta.test_per_class = meta.value("test_per_class", 0);
            split.meta.seed = meta.value("seed", std::uint64_t{0});
            split.meta.noise_sigma = meta.value("noise_sigma", 0.0);
        }
    }
    return split;
}

}  // namespace csigan
