#include "csigan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "csigan/errors.hpp"
#include "csigan/rng.hpp"

namespace csigan {

namespace {

TrainConfig cell_config(const SweepSpec& spec, const SweepCell& cell, int classes) {
    TrainConfig cfg = spec.base;
    cfg.seed = cell.seed;
    cfg.labeled_per_class = cell.budget / classes;
    cfg.cnn_only = cell.model == kModelCnn;
    cfg.simplified_g = cell.model == kModelDcganSimplifiedG;
    return cfg;
}

}  // namespace

void SweepSpec::validate(const DatasetSplit& data) const {
    require(!budgets.empty(), "sweep: need at least one budget");
    require(!seeds.empty(), "sweep: need at least one seed");
    require(!models.empty(), "sweep: need at least one model");
    for (const auto& m : models)
        require(m == kModelDcgan || m == kModelCnn || m == kModelDcganSimplifiedG,
                "sweep: unknown model tag '" + m + "'");
    const int classes = data.classes();
    for (int b : budgets) {
        require(b >= classes && b % classes == 0,
                "sweep: budget " + std::to_string(b) + " is not a multiple of " +
                    std::to_string(classes) + " classes");
        require(static_cast<std::size_t>(b) <= data.train.size(),
                "sweep: budget " + std::to_string(b) + " exceeds the train set");
    }
}

std::vector<SweepAggregate> SweepResult::aggregates() const {
    std::vector<SweepAggregate> out;
    for (int budget : spec.budgets) {
        for (const auto& model : spec.models) {
            SweepAggregate agg;
            agg.budget = budget;
            agg.model = model;
            std::vector<double> acc;
            for (const auto& c : cells)
                if (c.budget == budget && c.model == model && !c.failed) acc.push_back(c.accuracy);
            agg.seeds = static_cast<int>(acc.size());
            if (!acc.empty()) {
                double sum = 0.0;
                for (double a : acc) sum += a;
                agg.mean = sum / acc.size();
                double ss = 0.0;
                for (double a : acc) ss += (a - agg.mean) * (a - agg.mean);
                agg.stddev = acc.size() > 1 ? std::sqrt(ss / (acc.size() - 1)) : 0.0;
            }
            out.push_back(std::move(agg));
        }
    }
    return out;
}

double SweepResult::mean_accuracy(int budget, const std::string& model) const {
    for (const auto& a : aggregates())
        if (a.budget == budget && a.model == model && a.seeds > 0) return a.mean;
    ensure(false, "sweep: no successful cells for budget " + std::to_string(budget) +
                      ", model " + model);
    return 0.0;
}

SweepResult run_sweep(const SweepSpec& spec, const DatasetSplit& data, int jobs, bool verbose) {
    spec.validate(data);
    require(jobs >= 1, "sweep: jobs must be >= 1");

    SweepResult result;
    result.spec = spec;
    for (int budget : spec.budgets)
        for (std::uint64_t seed : spec.seeds)
            for (const auto& model : spec.models) {
                SweepCell cell;
                cell.budget = budget;
                cell.seed = seed;
                cell.model = model;
                result.cells.push_back(std::move(cell));
            }

    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= result.cells.size()) return;
            SweepCell& cell = result.cells[i];
            try {
                DatasetSplit split = data;
                // The labeled subset depends on (seed, budget) only, so paired
                // models inside a cell see identical labels.
                select_labeled_subset(split, cell.budget / split.classes(),
                                      derive_seed(cell.seed, "sweep-subset",
                                                  static_cast<std::uint64_t>(cell.budget)));
                TrainConfig cfg = cell_config(spec, cell, split.classes());
                TrainResult run = train(cfg, split);
                cell.accuracy = run.history.epochs.back().test_accuracy;
            } catch (const std::exception& e) {
                cell.failed = true;
                cell.error = e.what();
            }
            if (verbose) {
                std::lock_guard<std::mutex> lock(io_mutex);
                if (cell.failed)
                    std::fprintf(stderr, "sweep: budget %d %s seed %llu FAILED: %s\n", cell.budget,
                                 cell.model.c_str(),
                                 static_cast<unsigned long long>(cell.seed), cell.error.c_str());
                else
                    std::fprintf(stderr, "sweep: budget %d %s seed %llu -> %.2f%%\n", cell.budget,
                                 cell.model.c_str(),
                                 static_cast<unsigned long long>(cell.seed), cell.accuracy);
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

void save_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    ensure(os.good(), "sweep: cannot open for writing: " + path);
    os << "budget,model,seed,accuracy,status\n";
    char buf[64];
    for (const auto& c : result.cells) {
        std::snprintf(buf, sizeof(buf), "%.6f", c.accuracy);
        os << c.budget << ',' << c.model << ',' << c.seed << ',' << (c.failed ? "" : buf) << ','
           << (c.failed ? "failed" : "ok") << '\n';
    }
    ensure(os.good(), "sweep: write failed: " + path);
}

void save_sweep_summary_csv(const SweepResult& result, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    ensure(os.good(), "sweep: cannot open for writing: " + path);
    os << "budget,model,mean_accuracy,std_accuracy,seeds\n";
    char buf[96];
    for (const auto& a : result.aggregates()) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%.6f,%.6f,%d\n", a.budget, a.model.c_str(), a.mean,
                      a.stddev, a.seeds);
        os << buf;
    }
    ensure(os.good(), "sweep: write failed: " + path);
}

std::string format_sweep_table(const SweepResult& result) {
    const auto aggs = result.aggregates();
    std::ostringstream os;
    os << "Labeled samples";
    for (const auto& model : result.spec.models) {
        os << " | " << model;
    }
    os << '\n';
    for (int budget : result.spec.budgets) {
        os << budget;
        for (const auto& model : result.spec.models) {
            const SweepAggregate* found = nullptr;
            for (const auto& a : aggs)
                if (a.budget == budget && a.model == model) found = &a;
            char buf[64];
            if (found && found->seeds > 0) {
                if (found->seeds > 1)
                    std::snprintf(buf, sizeof(buf), "%.2f%% (±%.2f)", found->mean, found->stddev);
                else
                    std::snprintf(buf, sizeof(buf), "%.2f%%", found->mean);
            } else {
                std::snprintf(buf, sizeof(buf), "failed");
            }
            os << " | " << buf;
        }
        os << '\n';
    }
    return os.str();
}

std::vector<FakeDump> run_fake_dumps(const TrainConfig& config, const DatasetSplit& data,
                                     const DumpSpec& dump, TrainHistory* history) {
    require(!dump.epochs.empty(), "dump-fakes: need at least one epoch");
    require(dump.samples_per_epoch >= 1, "dump-fakes: samples_per_epoch must be >= 1");
    require(!config.cnn_only, "dump-fakes: requires a generator (cnn_only is set)");
    for (int e : dump.epochs)
        require(e >= 0 && e <= config.epochs,
                "dump-fakes: epoch " + std::to_string(e) + " outside the training budget of " +
                    std::to_string(config.epochs) + " epochs");

    std::vector<FakeDump> dumps;
    auto observer = [&](int epoch, Generator* gen, DiscClassNet& net) {
        if (std::find(dump.epochs.begin(), dump.epochs.end(), epoch) == dump.epochs.end()) return;
        ensure(gen != nullptr, "dump-fakes: trainer produced no generator");
        auto rng = make_engine(derive_seed(config.seed, "dump-latents",
                                           static_cast<std::uint64_t>(epoch)));
        const Eigen::MatrixXd z = sample_latents(gen->latent_dim(), dump.samples_per_epoch, rng);
        FakeDump d;
        d.epoch = epoch;
        d.samples = gen->forward(z);
        const Eigen::MatrixXd logits = net.logits(d.samples);
        d.predicted.resize(static_cast<std::size_t>(d.samples.cols()));
        for (Eigen::Index n = 0; n < logits.cols(); ++n) {
            Eigen::Index best = 0;
            logits.col(n).maxCoeff(&best);
            d.predicted[static_cast<std::size_t>(n)] = static_cast<int>(best) + 1;
        }
        dumps.push_back(std::move(d));
    };

    TrainResult run = train(config, data, observer);
    if (history) *history = run.history;
    return dumps;
}

void save_fake_dump_csv(const FakeDump& dump, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    ensure(os.good(), "dump-fakes: cannot open for writing: " + path);
    os << "epoch,predicted_label";
    for (Eigen::Index i = 0; i < dump.samples.rows(); ++i) os << ",v" << i;
    os << '\n';
    char buf[32];
    for (Eigen::Index n = 0; n < dump.samples.cols(); ++n) {
        os << dump.epoch << ',' << dump.predicted[static_cast<std::size_t>(n)];
        for (Eigen::Index i = 0; i < dump.samples.rows(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.10g", dump.samples(i, n));
            os << ',' << buf;
        }
        os << '\n';
    }
    ensure(os.good(), "dump-fakes: write failed: " + path);
}

void save_real_reference_csv(const DatasetSplit& data, int per_class, const std::string& path) {
    require(per_class >= 1, "dump-fakes: per_class must be >= 1");
    std::ofstream os(path, std::ios::trunc);
    ensure(os.good(), "dump-fakes: cannot open for writing: " + path);
    os << "label";
    for (int i = 0; i < data.width(); ++i) os << ",v" << i;
    os << '\n';
    std::vector<int> taken(static_cast<std::size_t>(data.classes()) + 1, 0);
    char buf[32];
    for (const auto& s : data.train) {
        if (s.label < 1 || taken[static_cast<std::size_t>(s.label)] >= per_class) continue;
        ++taken[static_cast<std::size_t>(s.label)];
        os << s.label;
        for (Eigen::Index i = 0; i < s.values.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.10g", s.values(i));
            os << ',' << buf;
        }
        os << '\n';
    }
    ensure(os.good(), "dump-fakes: write failed: " + path);
}

}  // namespace csigan
