#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace csigan {

inline constexpr int kUnlabeled = 0;

// One CSI measurement: 120 per-channel amplitudes plus a 1-based location
// label (0 = unlabeled).
struct CsiSample {
    Eigen::VectorXd values;
    int label = kUnlabeled;
};

// Parameters of the synthetic CSI generator. Each class gets a fixed
// template curve (a few random sinusoids plus a random piecewise-constant
// offset); samples are the template plus white per-channel Gaussian noise.
struct SynthParams {
    int classes = 16;
    int train_per_class = 400;
    int test_per_class = 200;
    std::uint64_t seed = 1;
    double noise_sigma = 0.12;

    int sine_count = 3;
    double sine_amp_min = 0.4;
    double sine_amp_max = 1.0;
    double sine_freq_min = 0.5;   // cycles across the 120 channels
    double sine_freq_max = 6.0;
    int offset_segments_min = 4;
    int offset_segments_max = 7;
    double offset_amp = 0.6;

    // Templates are redrawn until every pair is at least
    // min_separation_factor * noise_sigma * sqrt(width) apart in L2.
    double min_separation_factor = 5.0;
    int max_retries = 100;
};

// Affine map fitted on the training range so train values span [-1, 1].
struct NormTransform {
    double lo = -1.0;
    double hi = 1.0;
    bool fitted = false;

    double apply(double x) const { return ((x - lo) + (x - hi)) / (hi - lo); }
    double invert(double y) const { return (y * (hi - lo) + lo + hi) / 2.0; }
};

struct DatasetSplit {
    std::vector<CsiSample> train;
    std::vector<CsiSample> test;
    std::vector<int> labeled_idx;  // indices into train
    std::vector<Eigen::VectorXd> templates;  // empty when loaded from file
    SynthParams meta;
    NormTransform norm;

    int classes() const { return meta.classes; }
    int width() const { return train.empty() ? 0 : static_cast<int>(train.front().values.size()); }
};

// Draw the synthetic dataset: per-class templates (seeded by (seed, class)),
// fresh noise for train and test. Throws if template separation cannot be
// achieved within max_retries redraws.
DatasetSplit synth_generate(const SynthParams& params);

// Fit the affine transform on the train min/max, apply to train and test
// (test clamped into [-1, 1]). Fatal on a degenerate (constant) train set.
void normalize(DatasetSplit& split);

// Uniform per-class sample without replacement from the train set.
void select_labeled_subset(DatasetSplit& split, int per_class, std::uint64_t seed);

// CSV row: 120 comma-separated values, label, split tag (train/test).
// A sidecar <path>.meta.json records the generator parameters.
void save_csv(const DatasetSplit& split, const std::string& path);
DatasetSplit load_csv(const std::string& path);

}  // namespace csigan
