#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csigan/trainer.hpp"

namespace csigan {

// Model tags accepted by the sweep.
inline constexpr const char* kModelDcgan = "dcgan";
inline constexpr const char* kModelCnn = "cnn";
inline constexpr const char* kModelDcganSimplifiedG = "dcgan_simplified_g";

struct SweepSpec {
    std::vector<int> budgets = {16, 32, 64, 128, 1600, 3200, 6400};  // total labeled samples
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<std::string> models = {kModelDcgan, kModelCnn};
    TrainConfig base;  // epochs, batch size, optimizers; budget/seed/flags filled per cell

    void validate(const DatasetSplit& data) const;
};

struct SweepCell {
    int budget = 0;
    std::string model;
    std::uint64_t seed = 0;
    double accuracy = 0.0;  // percent
    bool failed = false;
    std::string error;
};

struct SweepAggregate {
    int budget = 0;
    std::string model;
    double mean = 0.0;
    double stddev = 0.0;
    int seeds = 0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells;

    std::vector<SweepAggregate> aggregates() const;
    double mean_accuracy(int budget, const std::string& model) const;
};

// Runs every (budget, model, seed) cell. Within a (budget, seed) pair all
// models train on the identical labeled subset and the identical unlabeled
// pool. A failed cell is recorded and the sweep continues. `jobs` > 1 runs
// cells on worker threads; results are deterministic regardless.
SweepResult run_sweep(const SweepSpec& spec, const DatasetSplit& data, int jobs = 1,
                      bool verbose = false);

void save_sweep_csv(const SweepResult& result, const std::string& path);
void save_sweep_summary_csv(const SweepResult& result, const std::string& path);

// Console table mirroring the layout budget | model A | model B | ...
std::string format_sweep_table(const SweepResult& result);

// ---- fake-sample dumps -------------------------------------------------------

struct FakeDump {
    int epoch = 0;
    Eigen::MatrixXd samples;     // width x count, tanh range
    std::vector<int> predicted;  // 1-based labels from the classifier head
};

struct DumpSpec {
    std::vector<int> epochs = {0, 1, 10, 100};
    int samples_per_epoch = 16;
};

// Trains with `config` and snapshots generated samples (with classifier
// predictions) at each listed epoch boundary; epoch 0 is before any update.
std::vector<FakeDump> run_fake_dumps(const TrainConfig& config, const DatasetSplit& data,
                                     const DumpSpec& dump, TrainHistory* history = nullptr);

void save_fake_dump_csv(const FakeDump& dump, const std::string& path);

// Real train samples for side-by-side comparison: up to `per_class` per label.
void save_real_reference_csv(const DatasetSplit& data, int per_class, const std::string& path);

}  // namespace csigan
