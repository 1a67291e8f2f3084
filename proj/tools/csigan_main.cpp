// csigan: semi-supervised GAN experiments on synthetic CSI fingerprints.
//
// Subcommands: generate-data, train, evaluate, sweep, dump-fakes.
// Every option can also come from a key=value config file (--config);
// the effective configuration is echoed and saved next to the outputs.
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <vector>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "csigan/checkpoint.hpp"
#include "csigan/experiments.hpp"

namespace fs = std::filesystem;
using namespace csigan;

namespace {

struct DataOptions {
    std::string path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--data", path, "dataset CSV (written by generate-data)")->required();
    }

    DatasetSplit load_normalized() const {
        DatasetSplit split = load_csv(path);
        normalize(split);
        return split;
    }
};

struct TrainOptions {
    TrainConfig cfg;
    std::uint64_t subset_seed = 0;  // defaults to the training seed

    void attach(CLI::App* cmd, bool with_model_flags = true) {
        cmd->add_option("--epochs", cfg.epochs, "training epochs")->capture_default_str();
        cmd->add_option("--batch-size", cfg.batch_size, "minibatch size")->capture_default_str();
        cmd->add_option("--labeled-per-class", cfg.labeled_per_class,
                        "labeled samples per location")
            ->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "master training seed")->capture_default_str();
        cmd->add_option("--steps-per-epoch", cfg.steps_per_epoch,
                        "cap on minibatch iterations per epoch (0 = full pass)")
            ->capture_default_str();
        cmd->add_option("--subset-seed", subset_seed,
                        "seed for the labeled-subset draw (default: --seed)")
            ->capture_default_str();
        cmd->add_option("--lr-gan", cfg.gan_opt.lr, "Adam learning rate for the discriminator")
            ->capture_default_str();
        cmd->add_option("--beta1-gan", cfg.gan_opt.beta1, "Adam beta1 for the discriminator")
            ->capture_default_str();
        cmd->add_option("--lr-gen", cfg.gen_opt.lr, "Adam learning rate for the generator")
            ->capture_default_str();
        cmd->add_option("--beta1-gen", cfg.gen_opt.beta1, "Adam beta1 for the generator")
            ->capture_default_str();
        cmd->add_option("--lr-cls", cfg.cls_opt.lr, "Adam learning rate for the classifier head")
            ->capture_default_str();
        cmd->add_option("--beta1-cls", cfg.cls_opt.beta1, "Adam beta1 for the classifier head")
            ->capture_default_str();
        if (with_model_flags) {
            cmd->add_flag("--cnn-only", cfg.cnn_only, "supervised baseline (classifier only)");
            cmd->add_flag("--simplified-g", cfg.simplified_g,
                          "ablation: dense-only generator");
            cmd->add_flag("--phase-wise", cfg.phase_wise,
                          "full classifier pass, then discriminator pass, then generator steps");
        }
    }

    std::uint64_t effective_subset_seed() const {
        return subset_seed ? subset_seed : cfg.seed;
    }
};

void write_config_echo(CLI::App* cmd, const std::string& out_dir) {
    const std::string echo = cmd->config_to_str(true, false);
    std::cout << "# effective configuration\n" << echo;
    if (!out_dir.empty()) {
        std::ofstream os(fs::path(out_dir) / "config_used.cfg");
        ensure(os.good(), "cannot write config echo in " + out_dir);
        os << echo;
    }
}

void make_out_dir(const std::string& out_dir) {
    if (!out_dir.empty()) fs::create_directories(out_dir);
}

void enable_config_file(CLI::App* cmd) {
    // the value is consumed by expand_config_args before CLI11 parses;
    // the sink only exists so the option is accepted and shown in --help
    static std::string sink;
    cmd->add_option("--config", sink,
                    "key=value config file; same-named flags override file values");
}

// Expand `--config <file>` into synthetic `--key value` arguments inserted
// right after the subcommand, so explicit command-line flags (which come
// later and are scanned first here) win over file values.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (config_path.empty()) return args;

    std::ifstream is(config_path);
    if (!is.good()) throw CLI::FileError::Missing(config_path);

    auto user_has = [&args](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };

    std::vector<std::string> injected;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::FileError(config_path + ": line " + std::to_string(line_no) +
                                 ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\"");
            const auto e = s.find_last_not_of(" \t\r\"");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        key = strip(key);
        value = strip(value);
        if (key.empty() || key == "config" || user_has(key)) continue;
        // multi-value keys (budgets, seeds, models, dump-epochs) expand to
        // separate tokens
        std::vector<std::string> parts;
        std::stringstream vs(value);
        std::string part;
        while (vs >> part) parts.push_back(part);
        if (parts.size() <= 1) {
            injected.push_back("--" + key + "=" + value);
        } else {
            injected.push_back("--" + key);
            for (auto& p : parts) injected.push_back(p);
        }
    }

    // place injected values just after the subcommand token
    std::vector<std::string> out;
    std::size_t at = 0;
    if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
        out.push_back(args[0]);
        at = 1;
    }
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(at), args.end());
    return out;
}

int run_app(int argc, char** argv) {
    CLI::App app{"semi-supervised GAN label-budget experiments on synthetic CSI fingerprints"};
    app.require_subcommand(1);

    // ---- generate-data ----
    auto* gen_cmd = app.add_subcommand("generate-data", "draw the synthetic CSI dataset");
    enable_config_file(gen_cmd);
    SynthParams synth;
    std::string gen_out = "data";
    gen_cmd->add_option("--out", gen_out, "output directory")->capture_default_str();
    gen_cmd->add_option("--classes", synth.classes, "number of locations")->capture_default_str();
    gen_cmd->add_option("--train-per-class", synth.train_per_class, "train samples per location")
        ->capture_default_str();
    gen_cmd->add_option("--test-per-class", synth.test_per_class, "test samples per location")
        ->capture_default_str();
    gen_cmd->add_option("--seed", synth.seed, "dataset seed")->capture_default_str();
    gen_cmd->add_option("--noise-sigma", synth.noise_sigma, "per-channel noise level")
        ->capture_default_str();

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train one model and save checkpoints");
    enable_config_file(train_cmd);
    DataOptions train_data;
    TrainOptions train_opts;
    std::string train_out = "run";
    train_data.attach(train_cmd);
    train_opts.attach(train_cmd);
    train_cmd->add_option("--out", train_out, "output directory")->capture_default_str();

    // ---- evaluate ----
    auto* eval_cmd = app.add_subcommand("evaluate", "classification accuracy of a checkpoint");
    enable_config_file(eval_cmd);
    DataOptions eval_data;
    std::string eval_ckpt;
    eval_data.attach(eval_cmd);
    eval_cmd->add_option("--checkpoint", eval_ckpt, "disc/classifier checkpoint")->required();

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "label-budget study across models and seeds");
    enable_config_file(sweep_cmd);
    DataOptions sweep_data;
    TrainOptions sweep_opts;
    SweepSpec sweep_spec;
    std::string sweep_out = "sweep";
    int sweep_jobs = 1;
    sweep_data.attach(sweep_cmd);
    sweep_opts.attach(sweep_cmd, /*with_model_flags=*/false);
    sweep_cmd->add_option("--budgets", sweep_spec.budgets, "labeled-sample budgets")
        ->capture_default_str();
    sweep_cmd->add_option("--seeds", sweep_spec.seeds, "training seeds")->capture_default_str();
    sweep_cmd->add_option("--models", sweep_spec.models,
                          "models: dcgan, cnn, dcgan_simplified_g")
        ->capture_default_str();
    sweep_cmd->add_option("--jobs", sweep_jobs, "parallel sweep cells")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "output directory")->capture_default_str();

    // ---- dump-fakes ----
    auto* dump_cmd = app.add_subcommand("dump-fakes",
                                        "snapshot generated samples across training epochs");
    enable_config_file(dump_cmd);
    DataOptions dump_data;
    TrainOptions dump_opts;
    DumpSpec dump_spec;
    std::string dump_out = "fakes";
    dump_data.attach(dump_cmd);
    dump_opts.attach(dump_cmd);
    dump_opts.cfg.labeled_per_class = 1;  // the visual study uses 16 labels
    dump_cmd->add_option("--dump-epochs", dump_spec.epochs, "epoch boundaries to dump")
        ->capture_default_str();
    dump_cmd->add_option("--samples-per-epoch", dump_spec.samples_per_epoch,
                         "generated samples per dump")
        ->capture_default_str();
    dump_cmd->add_option("--out", dump_out, "output directory")->capture_default_str();

    try {
        std::vector<std::string> args = expand_config_args(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 1;     // usage/config errors map to exit code 1
    }

    if (gen_cmd->parsed()) {
        make_out_dir(gen_out);
        write_config_echo(gen_cmd, gen_out);
        DatasetSplit split = synth_generate(synth);
        const std::string path = (fs::path(gen_out) / "dataset.csv").string();
        save_csv(split, path);
        std::printf("wrote %zu train + %zu test samples to %s\n", split.train.size(),
                    split.test.size(), path.c_str());
        return 0;
    }

    if (train_cmd->parsed()) {
        make_out_dir(train_out);
        write_config_echo(train_cmd, train_out);
        DatasetSplit split = train_data.load_normalized();
        select_labeled_subset(split, train_opts.cfg.labeled_per_class,
                              train_opts.effective_subset_seed());
        TrainResult res = train(train_opts.cfg, split);
        res.history.save_csv((fs::path(train_out) / "history.csv").string());
        save_checkpoint((fs::path(train_out) / "disc.ckpt").string(), *res.net);
        if (res.generator)
            save_checkpoint((fs::path(train_out) / "gen.ckpt").string(), *res.generator);
        std::printf("final test accuracy: %.2f%%\n",
                    res.history.epochs.back().test_accuracy);
        return 0;
    }

    if (eval_cmd->parsed()) {
        DatasetSplit split = eval_data.load_normalized();
        auto net = load_discriminator(eval_ckpt);
        const double acc = evaluate_accuracy(*net, split.test);
        std::printf("accuracy: %.2f%% on %zu test samples\n", acc, split.test.size());
        return 0;
    }

    if (sweep_cmd->parsed()) {
        make_out_dir(sweep_out);
        write_config_echo(sweep_cmd, sweep_out);
        DatasetSplit split = sweep_data.load_normalized();
        sweep_spec.base = sweep_opts.cfg;
        SweepResult result = run_sweep(sweep_spec, split, sweep_jobs, /*verbose=*/true);
        save_sweep_csv(result, (fs::path(sweep_out) / "sweep.csv").string());
        save_sweep_summary_csv(result, (fs::path(sweep_out) / "sweep_summary.csv").string());
        const std::string table = format_sweep_table(result);
        std::cout << table;
        std::ofstream ts(fs::path(sweep_out) / "sweep_table.txt");
        ts << table;
        return 0;
    }

    if (dump_cmd->parsed()) {
        make_out_dir(dump_out);
        write_config_echo(dump_cmd, dump_out);
        DatasetSplit split = dump_data.load_normalized();
        select_labeled_subset(split, dump_opts.cfg.labeled_per_class,
                              dump_opts.effective_subset_seed());
        TrainHistory history;
        auto dumps = run_fake_dumps(dump_opts.cfg, split, dump_spec, &history);
        history.save_csv((fs::path(dump_out) / "history.csv").string());
        for (const auto& d : dumps) {
            const std::string path =
                (fs::path(dump_out) / ("fakes_epoch" + std::to_string(d.epoch) + ".csv")).string();
            save_fake_dump_csv(d, path);
        }
        save_real_reference_csv(split, dump_spec.samples_per_epoch,
                                (fs::path(dump_out) / "reals.csv").string());
        std::printf("dumped %zu epoch snapshots to %s\n", dumps.size(), dump_out.c_str());
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
