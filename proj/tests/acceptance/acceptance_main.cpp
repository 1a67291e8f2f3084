// Acceptance suite: runs every gate end to end and prints one PASS/FAIL
// line per criterion. Exit code 0 only if all pass.
//
// Usage: acceptance_tests <path-to-csigan-cli> [--quick]
//   --quick runs criteria 1-4 and 10 only (no training studies).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "csigan/checkpoint.hpp"
#include "csigan/experiments.hpp"
#include "csigan/grad_check.hpp"
#include "csigan/losses.hpp"
#include "csigan/rng.hpp"
#include "../test_helpers.hpp"

namespace fs = std::filesystem;
using namespace csigan;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// Training study configuration shared by criteria 5-9: short runs that keep
// the full protocol (interleaved C/D/G steps over the unlabeled pool).
TrainConfig study_config() {
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.batch_size = 32;
    cfg.steps_per_epoch = 48;
    return cfg;
}

constexpr std::uint64_t kDataSeed = 1;

// ---- criterion 1: gradient correctness --------------------------------------

bool full_generator_grad_ok(double* err_out) {
    GeneratorNet gen(17);
    auto refs = gen.params();
    {
        auto rng = make_engine(23);
        std::normal_distribution<double> small(0.0, 0.05);
        for (auto& r : refs) {
            Eigen::Map<Eigen::VectorXd> v(r.value, r.size());
            if (r.name.ends_with(".bias"))
                for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = small(rng);
            else
                v *= 5.0;
        }
    }
    Eigen::MatrixXd z;
    for (std::uint64_t zs = 1; zs <= 30; ++zs) {
        z = oracle::random_map(arch::latent_dim, 1, 1600 + zs);
        gen.forward(z);
        if (gen.preactivation_clearance() > 1e-5) break;
    }
    if (gen.preactivation_clearance() <= 1e-5) return false;

    Eigen::VectorXd r = oracle::random_map(arch::sample_width, 1, 24);
    Eigen::VectorXd theta0 = oracle::read_params(refs);
    auto f = [&](const Eigen::VectorXd& theta) {
        oracle::write_params(refs, theta);
        double val = (gen.forward(z).col(0).array() * r.array()).sum();
        oracle::write_params(refs, theta0);
        return val;
    };
    gen.forward(z);
    gen.zero_grad();
    gen.backward(r);
    Eigen::VectorXd analytic = oracle::read_grads(refs);
    auto res = grad_check(f, theta0, analytic, 1e-6, 300, 77);
    *err_out = std::max(*err_out, res.max_rel_err);
    return res.max_rel_err < 1e-4;
}

bool full_discriminator_grad_ok(double* err_out) {
    DiscClassNet net(19);
    auto refs = net.params();
    {
        auto rng = make_engine(29);
        std::normal_distribution<double> small(0.0, 0.05);
        for (auto& r : refs) {
            Eigen::Map<Eigen::VectorXd> v(r.value, r.size());
            if (r.name.ends_with(".bias"))
                for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = small(rng);
            else if (r.name.starts_with("head."))
                v *= 0.4;
            else
                v *= 15.0;
        }
    }
    Eigen::MatrixXd x;
    for (std::uint64_t xs = 1; xs <= 30; ++xs) {
        x = oracle::random_map(arch::sample_width, 1, 1700 + xs);
        net.logits(x);
        if (net.preactivation_clearance() > 1e-5) break;
    }
    if (net.preactivation_clearance() <= 1e-5) return false;

    Eigen::VectorXd theta0 = oracle::read_params(refs);
    auto f = [&](const Eigen::VectorXd& theta) {
        oracle::write_params(refs, theta);
        double val = lambda_real_prob(net.logits(x).col(0));
        oracle::write_params(refs, theta0);
        return val;
    };
    Eigen::VectorXd c = net.logits(x).col(0);
    const double q = lambda_real_prob(c);
    Eigen::MatrixXd d_logits = softmax(c) * q * (1.0 - q);
    net.zero_grad();
    net.backward_from_logits(d_logits, false, true);
    Eigen::VectorXd analytic = oracle::read_grads(refs);
    auto res = grad_check(f, theta0, analytic, 1e-6, 300, 78);
    *err_out = std::max(*err_out, res.max_rel_err);
    return res.max_rel_err < 1e-4;
}

void criterion_1() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    bool ok = true;

    // every layer kind on small shapes
    auto check_layer = [&](auto& layer, const Eigen::MatrixXd& x, int batch,
                           std::uint64_t proj_seed) {
        auto fwd = [&](const Eigen::MatrixXd& in) -> Eigen::MatrixXd {
            if constexpr (requires { layer.forward(in, batch); })
                return layer.forward(in, batch);
            else
                return layer.forward(in);
        };
        Eigen::MatrixXd out0 = fwd(x);
        if (layer.preactivation_clearance() <= 1e-5) return false;
        Eigen::VectorXd r = oracle::random_map(static_cast<int>(out0.size()), 1, proj_seed);
        Eigen::Map<const Eigen::MatrixXd> r_mat(r.data(), out0.rows(), out0.cols());
        auto refs = layer.params("layer");
        Eigen::VectorXd theta0 = oracle::read_params(refs);
        auto f = [&](const Eigen::VectorXd& theta) {
            oracle::write_params(refs, theta);
            double val = (fwd(x).array() * r_mat.array()).sum();
            oracle::write_params(refs, theta0);
            return val;
        };
        fwd(x);
        layer.zero_grad();
        layer.backward(r_mat, true);
        Eigen::VectorXd analytic = oracle::read_grads(refs);
        auto res = grad_check(f, theta0, analytic, 1e-6);
        worst = std::max(worst, res.max_rel_err);
        return res.max_rel_err < 1e-4;
    };

    bool layer_ok = false;
    for (std::uint64_t s = 1; s <= 30 && !layer_ok; ++s) {
        DenseLayer dense(7, 5, Act::Relu);
        auto rng = make_engine(700 + s);
        dense.init_weights(rng, 0.6);
        Eigen::MatrixXd x = oracle::random_map(7, 3, 800 + s);
        dense.forward(x);
        if (dense.preactivation_clearance() <= 1e-5) continue;
        layer_ok = check_layer(dense, x, 3, 900 + s);
        break;
    }
    ok &= layer_ok;

    bool conv_ok = false;
    for (std::uint64_t s = 1; s <= 30 && !conv_ok; ++s) {
        ConvLayer conv(3, 2, 4, Act::LeakyRelu);
        auto rng = make_engine(1000 + s);
        conv.init_weights(rng, 0.5);
        Eigen::MatrixXd x = oracle::random_map(18, 2, 1100 + s);
        conv.forward(x, 2);
        if (conv.preactivation_clearance() <= 1e-5) continue;
        conv_ok = check_layer(conv, x, 2, 1200 + s);
        break;
    }
    ok &= conv_ok;

    bool deconv_ok = false;
    for (std::uint64_t s = 1; s <= 30 && !deconv_ok; ++s) {
        DeconvLayer dec(5, 3, 2, Act::Relu, 2);
        auto rng = make_engine(1300 + s);
        dec.init_weights(rng, 0.4);
        Eigen::MatrixXd x = oracle::random_map(16, 3, 1400 + s);
        dec.forward(x, 2);
        if (dec.preactivation_clearance() <= 1e-5) continue;
        deconv_ok = check_layer(dec, x, 2, 1500 + s);
        break;
    }
    ok &= deconv_ok;

    ok &= full_generator_grad_ok(&worst);
    ok &= full_discriminator_grad_ok(&worst);

    const double elapsed = seconds_since(t0);
    ok &= elapsed < 60.0;
    report(1, ok,
           fmt("gradient correctness: max rel err %.3g (< 1e-4), runtime %.1fs (< 60s)", worst,
               elapsed));
}

// ---- criterion 2: Toeplitz equivalence + adjointness -------------------------

void criterion_2() {
    double worst_toeplitz = 0.0, worst_adjoint = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto rng = make_engine(7000 + seed);
        std::uniform_int_distribution<int> taps_d(2, 5), in_d(1, 4), out_d(1, 4), w_d(6, 16),
            crop_d(0, 1);
        const int taps = taps_d(rng), in_s = in_d(rng), out_s = out_d(rng);
        const int w = std::max(w_d(rng), taps);
        auto bank = oracle::random_bank(taps, in_s, out_s, 100 + seed);
        auto a = oracle::random_map(w, in_s, 200 + seed);

        worst_toeplitz = std::max(
            worst_toeplitz,
            (conv1d_forward(a, bank) - oracle::conv_toeplitz(a, bank)).cwiseAbs().maxCoeff());
        const int crop = crop_d(rng);
        worst_toeplitz = std::max(worst_toeplitz, (deconv1d_forward(a, bank, crop) -
                                                   oracle::deconv_toeplitz(a, bank, crop))
                                                      .cwiseAbs()
                                                      .maxCoeff());

        auto bank0 = oracle::random_bank(taps, in_s, out_s, 300 + seed, false);
        auto v = oracle::random_map(w - taps + 1, out_s, 400 + seed);
        const double lhs = (conv1d_forward(a, bank0).array() * v.array()).sum();
        const double rhs = (a.array() * deconv1d_forward(v, transpose_bank(bank0)).array()).sum();
        worst_adjoint =
            std::max(worst_adjoint, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    const bool ok = worst_toeplitz <= 1e-12 && worst_adjoint <= 1e-10;
    report(2, ok,
           fmt("Toeplitz equivalence %.3g (<= 1e-12), adjoint identity %.3g (<= 1e-10)",
               worst_toeplitz, worst_adjoint));
}

// ---- criterion 3: architecture fidelity --------------------------------------

void criterion_3() {
    bool ok = true;
    std::string detail = "dimensions: ";
    try {
        GeneratorNet gen(1);
        DiscClassNet net(2);
        ok &= gen.fc.p.out_dim() == 3456;
        ok &= gen.up1.out_width(108) == 112;
        ok &= gen.up2.out_width(112) == 116;
        ok &= gen.up3.out_width(116) == 120;
        ok &= gen.out.out_width(120) == 120;
        ok &= net.conv1.out_width(120) == 116;
        ok &= net.conv2.out_width(116) == 112;
        ok &= net.conv3.out_width(112) == 108;
        ok &= net.head.p.in_dim() == 3456;
        ok &= net.head.p.out_dim() == 16;
        Eigen::MatrixXd z = oracle::random_map(100, 2, 5);
        ok &= net.logits(gen.forward(z)).rows() == 16;
        detail += "fc 3456, deconv 112/116/120, conv 116/112/108, 16 logits";
    } catch (const std::exception& e) {
        ok = false;
        detail += std::string("exception: ") + e.what();
    }
    report(3, ok, detail);
}

// ---- criterion 4: head consistency -------------------------------------------

void criterion_4() {
    double worst_lambda = 0.0, worst_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Eigen::VectorXd c = 3.0 * oracle::random_map(16, 1, 9000 + seed);
        const double q = lambda_real_prob(c);
        const double z = c.array().exp().sum();
        worst_lambda = std::max(worst_lambda, std::abs(q - z / (z + 1.0)));
        worst_sum = std::max(worst_sum, std::abs(softmax(c).sum() - 1.0));
    }
    const bool ok = worst_lambda <= 1e-12 && worst_sum <= 1e-12;
    report(4, ok,
           fmt("lambda vs Z/(Z+1) %.3g (<= 1e-12), softmax sum %.3g (<= 1e-12)", worst_lambda,
               worst_sum));
}

// ---- criteria 5-8: label-budget studies --------------------------------------

struct StudyResults {
    // (budget, model) -> per-seed accuracies
    std::map<std::pair<int, std::string>, std::vector<double>> acc;

    double mean(int budget, const std::string& model) const {
        const auto& v = acc.at({budget, model});
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    }
};

StudyResults run_studies(const DatasetSplit& data) {
    StudyResults results;
    const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    const std::vector<int> budgets = {16, 32, 64, 128, 1600, 3200, 6400};

    SweepSpec spec;
    spec.base = study_config();
    spec.seeds = seeds;

    // dcgan across every budget; cnn and the simplified ablation at the ends
    spec.budgets = budgets;
    spec.models = {kModelDcgan};
    SweepResult dcgan = run_sweep(spec, data, 1, true);

    spec.budgets = {16, 6400};
    spec.models = {kModelCnn, kModelDcganSimplifiedG};
    SweepResult ends = run_sweep(spec, data, 1, true);

    auto collect = [&](const SweepResult& r) {
        for (const auto& c : r.cells) {
            ensure(!c.failed, "acceptance study cell failed: " + c.error);
            results.acc[{c.budget, c.model}].push_back(c.accuracy);
        }
    };
    collect(dcgan);
    collect(ends);
    return results;
}

void criteria_5_to_8(const StudyResults& r) {
    // 5: supervised parity at full labels
    const double dcgan_full = r.mean(6400, kModelDcgan);
    const double cnn_full = r.mean(6400, kModelCnn);
    report(5, std::abs(dcgan_full - cnn_full) <= 3.0,
           fmt("full-label parity: dcgan %.2f%% vs cnn %.2f%% (gap %.2f <= 3)", dcgan_full,
               cnn_full, std::abs(dcgan_full - cnn_full)));

    // 6: low-label advantage
    const double dcgan_16 = r.mean(16, kModelDcgan);
    const double cnn_16 = r.mean(16, kModelCnn);
    report(6, dcgan_16 - cnn_16 >= 10.0,
           fmt("low-label advantage: dcgan %.2f%% vs cnn %.2f%% (gap %.2f >= 10)", dcgan_16,
               cnn_16, dcgan_16 - cnn_16));

    // 7: budget robustness
    double dcgan_min = 100.0, dcgan_max = 0.0;
    for (int b : {16, 32, 64, 128, 1600, 3200, 6400}) {
        const double m = r.mean(b, kModelDcgan);
        dcgan_min = std::min(dcgan_min, m);
        dcgan_max = std::max(dcgan_max, m);
    }
    const bool flat = dcgan_max - dcgan_min <= 6.0;
    const bool cnn_drop = cnn_full - cnn_16 >= 10.0;
    report(7, flat && cnn_drop,
           fmt("budget robustness: dcgan spread %.2f (<= 6), cnn drop %.2f (>= 10)",
               dcgan_max - dcgan_min, cnn_full - cnn_16));

    // 8: ablation direction
    const double simp_16 = r.mean(16, kModelDcganSimplifiedG);
    const double simp_full = r.mean(6400, kModelDcganSimplifiedG);
    const bool low_gap = dcgan_16 - simp_16 >= 5.0;
    const bool full_gap = std::abs(dcgan_full - simp_full) <= 3.0;
    report(8, low_gap && full_gap,
           fmt("ablation: at 16 labels %.2f%% vs %.2f%% (gap %.2f >= 5); at 6400 %.2f%% vs "
               "%.2f%% (gap %.2f <= 3)",
               dcgan_16, simp_16, dcgan_16 - simp_16, dcgan_full, simp_full,
               std::abs(dcgan_full - simp_full)));
}

// ---- criterion 9: fake-sample progression ------------------------------------

void criterion_9(const DatasetSplit& data) {
    DatasetSplit split = data;
    select_labeled_subset(split, 1, derive_seed(kDataSeed, "sweep-subset", 16));

    TrainConfig cfg = study_config();
    cfg.epochs = 100;
    cfg.labeled_per_class = 1;
    cfg.seed = 1;

    DumpSpec dump;
    dump.epochs = {0, cfg.epochs};
    dump.samples_per_epoch = 512;
    auto dumps = run_fake_dumps(cfg, split, dump);
    ensure(dumps.size() == 2, "criterion 9: expected dumps at epochs 0 and final");

    // real class means in normalized space
    std::vector<Eigen::VectorXd> class_mean(16, Eigen::VectorXd::Zero(120));
    std::vector<int> counts(16, 0);
    for (const auto& s : split.train) {
        class_mean[static_cast<std::size_t>(s.label - 1)] += s.values;
        counts[static_cast<std::size_t>(s.label - 1)] += 1;
    }
    for (int m = 0; m < 16; ++m) class_mean[static_cast<std::size_t>(m)] /= counts[static_cast<std::size_t>(m)];

    // mean L2 of each epoch's fakes to the real mean of their predicted class;
    // a class nobody predicts falls back to the whole fake cloud.
    auto class_distance = [&](const FakeDump& d, int cls) {
        double sum = 0.0;
        int n = 0;
        for (Eigen::Index j = 0; j < d.samples.cols(); ++j)
            if (d.predicted[static_cast<std::size_t>(j)] == cls + 1) {
                sum += (d.samples.col(j) - class_mean[static_cast<std::size_t>(cls)]).norm();
                ++n;
            }
        if (n == 0) {
            for (Eigen::Index j = 0; j < d.samples.cols(); ++j)
                sum += (d.samples.col(j) - class_mean[static_cast<std::size_t>(cls)]).norm();
            n = static_cast<int>(d.samples.cols());
        }
        return sum / n;
    };

    int improved = 0;
    for (int m = 0; m < 16; ++m)
        if (class_distance(dumps[1], m) < class_distance(dumps[0], m)) ++improved;
    report(9, improved >= 12,
           fmt("fake progression: final-epoch fakes closer for %d/16 classes (>= 12)", improved));
}

// ---- criterion 10: CLI determinism -------------------------------------------

std::string file_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    ensure(is.good(), "cannot read " + p.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
    const std::string cmd = cli + " " + args + " > " + log.string() + " 2>&1";
    return std::system(cmd.c_str());
}

void criterion_10(const std::string& cli) {
    const fs::path work = fs::temp_directory_path() / "csigan_acceptance_determinism";
    fs::remove_all(work);
    fs::create_directories(work);
    bool ok = true;
    std::string detail = "bit-identical CSVs:";

    auto expect_same = [&](const fs::path& a, const fs::path& b, const char* what) {
        const bool same = file_bytes(a) == file_bytes(b);
        ok &= same;
        detail += fmt(" %s=%s", what, same ? "yes" : "NO");
    };

    const std::string data_args = " --train-per-class 24 --test-per-class 8 --seed 5";
    ok &= run_cli(cli, "generate-data --out " + (work / "d1").string() + data_args,
                  work / "g1.log") == 0;
    ok &= run_cli(cli, "generate-data --out " + (work / "d2").string() + data_args,
                  work / "g2.log") == 0;
    expect_same(work / "d1" / "dataset.csv", work / "d2" / "dataset.csv", "generate-data");

    const std::string data_csv = (work / "d1" / "dataset.csv").string();
    const std::string train_args = " --data " + data_csv +
                                   " --epochs 2 --batch-size 16 --labeled-per-class 2 "
                                   "--steps-per-epoch 4 --seed 9";
    ok &= run_cli(cli, "train --out " + (work / "t1").string() + train_args, work / "t1.log") == 0;
    ok &= run_cli(cli, "train --out " + (work / "t2").string() + train_args, work / "t2.log") == 0;
    expect_same(work / "t1" / "history.csv", work / "t2" / "history.csv", "train-history");
    expect_same(work / "t1" / "disc.ckpt", work / "t2" / "disc.ckpt", "train-checkpoint");

    const std::string eval_args =
        " --data " + data_csv + " --checkpoint " + (work / "t1" / "disc.ckpt").string();
    ok &= run_cli(cli, "evaluate" + eval_args, work / "e1.log") == 0;
    ok &= run_cli(cli, "evaluate" + eval_args, work / "e2.log") == 0;
    expect_same(work / "e1.log", work / "e2.log", "evaluate-stdout");

    const std::string sweep_args = " --data " + data_csv +
                                   " --budgets 16 32 --seeds 1 2 --models cnn --epochs 2 "
                                   "--batch-size 16 --steps-per-epoch 2";
    ok &= run_cli(cli, "sweep --out " + (work / "s1").string() + sweep_args, work / "s1.log") == 0;
    ok &= run_cli(cli, "sweep --out " + (work / "s2").string() + sweep_args, work / "s2.log") == 0;
    expect_same(work / "s1" / "sweep.csv", work / "s2" / "sweep.csv", "sweep");

    const std::string dump_args = " --data " + data_csv +
                                  " --epochs 2 --batch-size 16 --labeled-per-class 1 "
                                  "--steps-per-epoch 2 --seed 3 --dump-epochs 0 2 "
                                  "--samples-per-epoch 4";
    ok &= run_cli(cli, "dump-fakes --out " + (work / "f1").string() + dump_args,
                  work / "f1.log") == 0;
    ok &= run_cli(cli, "dump-fakes --out " + (work / "f2").string() + dump_args,
                  work / "f2.log") == 0;
    expect_same(work / "f1" / "fakes_epoch2.csv", work / "f2" / "fakes_epoch2.csv", "dump-fakes");

    report(10, ok, "determinism of repeated commands:" + detail.substr(detail.find(':') + 1));
    fs::remove_all(work);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <csigan-cli-path> [--quick]\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    const bool quick = argc > 2 && std::string(argv[2]) == "--quick";

    const auto t0 = Clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();

    if (!quick) {
        std::printf("-- generating the default synthetic dataset (seed %llu)\n",
                    static_cast<unsigned long long>(kDataSeed));
        std::fflush(stdout);
        SynthParams params;
        params.seed = kDataSeed;
        DatasetSplit data = synth_generate(params);
        normalize(data);

        const auto t5 = Clock::now();
        StudyResults studies = run_studies(data);
        std::printf("-- studies finished in %.1f min\n", seconds_since(t5) / 60.0);
        criteria_5_to_8(studies);
        criterion_9(data);
    } else {
        std::printf("-- quick mode: criteria 5-9 skipped\n");
    }

    criterion_10(cli);

    std::printf("== acceptance %s (%d failure%s, %.1f min)\n", g_failures == 0 ? "PASSED" : "FAILED",
                g_failures, g_failures == 1 ? "" : "s", seconds_since(t0) / 60.0);
    return g_failures == 0 ? 0 : 1;
}
