#include "csigan/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "csigan/errors.hpp"
#include "csigan/losses.hpp"
#include "csigan/rng.hpp"

namespace csigan {

namespace {

// Epoch-local shuffled order over an index list; batches wrap cyclically
// within the epoch. Reseeded from the master seed at every epoch.
std::vector<int> shuffled_order(std::vector<int> indices, std::uint64_t master,
                                std::string_view tag, int epoch) {
    auto rng = make_engine(derive_seed(master, tag, static_cast<std::uint64_t>(epoch)));
    std::shuffle(indices.begin(), indices.end(), rng);
    return indices;
}

Eigen::MatrixXd gather_columns(const std::vector<CsiSample>& samples,
                               const std::vector<int>& idx) {
    Eigen::MatrixXd x(samples.front().values.size(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
        x.col(static_cast<Eigen::Index>(j)) = samples[static_cast<std::size_t>(idx[j])].values;
    return x;
}

}  // namespace

void TrainConfig::validate(const DatasetSplit& data) const {
    require(epochs >= 1, "train config: epochs must be >= 1");
    require(batch_size >= 1, "train config: batch_size must be >= 1");
    require(labeled_per_class >= 1, "train config: labeled_per_class must be >= 1");
    require(steps_per_epoch >= 0, "train config: steps_per_epoch must be >= 0");
    require(!data.train.empty(), "train config: empty train set");
    require(!data.test.empty(), "train config: empty test set");
    require(static_cast<std::size_t>(labeled_per_class) * data.classes() <= data.train.size(),
            "train config: labeled_per_class exceeds the train set");
    require(!(cnn_only && simplified_g),
            "train config: cnn_only and simplified_g are mutually exclusive");
    const int width = data.width();
    require(width == arch::sample_width, "train config: dataset width must be 120");
}

void TrainHistory::save_csv(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    ensure(os.good(), "history: cannot open for writing: " + path);
    os << "epoch,c_loss,d_loss,g_loss,test_accuracy\n";
    char buf[160];
    for (const auto& e : epochs) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,%.10g\n", e.epoch,
                      e.classifier_loss, e.discriminator_loss, e.generator_loss,
                      e.test_accuracy);
        os << buf;
    }
    ensure(os.good(), "history: write failed: " + path);
}

Eigen::MatrixXd sample_latents(int latent_dim, int count, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd z(latent_dim, count);
    for (Eigen::Index n = 0; n < count; ++n)
        for (Eigen::Index i = 0; i < latent_dim; ++i) z(i, n) = gauss(rng);
    return z;
}

double train_classifier_step(DiscClassNet& net, AdamOpt& cls_opt, const LabeledBatch& batch) {
    if (batch.labels.empty()) {
        std::fprintf(stderr, "warning: classifier step skipped on an empty batch\n");
        return 0.0;
    }
    require(batch.x.cols() == static_cast<Eigen::Index>(batch.labels.size()),
            "classifier step: samples/labels size mismatch");
    std::vector<int> idx0(batch.labels.size());
    for (std::size_t i = 0; i < batch.labels.size(); ++i) {
        require(batch.labels[i] >= 1 && batch.labels[i] <= arch::num_classes,
                "classifier step: label out of range");
        idx0[i] = batch.labels[i] - 1;
    }

    const Eigen::MatrixXd& c = net.logits(batch.x);
    Eigen::MatrixXd d_logits;
    const double loss = classifier_loss_grad(c, idx0, d_logits);
    net.zero_grad();
    net.backward_from_logits(d_logits, /*want_input_grad=*/false);
    cls_opt.step();
    return loss;
}

double train_discriminator_step(DiscClassNet& net, AdamOpt& disc_opt, const UnlabeledBatch& real,
                                Generator& gen, std::mt19937_64& latent_rng) {
    require(real.cols() >= 1, "discriminator step: empty real batch");
    const int n = static_cast<int>(real.cols());

    // 1:1 real/fake mixing.
    const Eigen::MatrixXd z = sample_latents(gen.latent_dim(), n, latent_rng);
    const Eigen::MatrixXd fake = gen.forward(z);

    Eigen::MatrixXd x(real.rows(), 2 * n);
    x.leftCols(n) = real;
    x.rightCols(n) = fake;

    const Eigen::MatrixXd& c = net.logits(x);
    Eigen::MatrixXd d_real, d_fake;
    const double loss_real = discriminator_loss_grad(c.leftCols(n), 1.0, d_real);
    const double loss_fake = discriminator_loss_grad(c.rightCols(n), 0.0, d_fake);

    Eigen::MatrixXd d_logits(c.rows(), 2 * n);
    d_logits.leftCols(n) = d_real / 2.0;  // mean over the mixed batch of 2n
    d_logits.rightCols(n) = d_fake / 2.0;

    net.zero_grad();
    net.backward_from_logits(d_logits, /*want_input_grad=*/false);
    disc_opt.step();
    return 0.5 * (loss_real + loss_fake);
}

double train_generator_step(Generator& gen, AdamOpt& gen_opt, DiscClassNet& net, int batch_size,
                            std::mt19937_64& latent_rng) {
    require(batch_size >= 1, "generator step: batch_size must be >= 1");
    const Eigen::MatrixXd z = sample_latents(gen.latent_dim(), batch_size, latent_rng);
    const Eigen::MatrixXd& fake = gen.forward(z);

    const Eigen::MatrixXd& c = net.logits(fake);
    Eigen::MatrixXd d_logits;
    // Non-saturating objective: push lambda(D(G(z))) toward the real label.
    const double loss = discriminator_loss_grad(c, 1.0, d_logits);

    const Eigen::MatrixXd d_fake =
        net.backward_from_logits(d_logits, /*want_input_grad=*/true,
                                 /*accumulate_param_grads=*/false);
    gen.zero_grad();
    gen.backward(d_fake);
    gen_opt.step();
    return loss;
}

double evaluate_accuracy(DiscClassNet& net, const std::vector<CsiSample>& test_set) {
    require(!test_set.empty(), "evaluate: empty test set");
    const int chunk = 256;
    int correct = 0;
    for (std::size_t start = 0; start < test_set.size(); start += chunk) {
        const int n = static_cast<int>(std::min<std::size_t>(chunk, test_set.size() - start));
        Eigen::MatrixXd x(test_set.front().values.size(), n);
        for (int j = 0; j < n; ++j) x.col(j) = test_set[start + static_cast<std::size_t>(j)].values;
        const Eigen::MatrixXd& c = net.logits(x);
        for (int j = 0; j < n; ++j) {
            Eigen::Index best = 0;
            c.col(j).maxCoeff(&best);
            if (static_cast<int>(best) + 1 == test_set[start + static_cast<std::size_t>(j)].label)
                ++correct;
        }
    }
    return 100.0 * correct / static_cast<double>(test_set.size());
}

TrainResult train(const TrainConfig& config, const DatasetSplit& data,
                  const EpochObserver& observer) {
    config.validate(data);

    TrainResult result;
    result.net = std::make_unique<DiscClassNet>(derive_seed(config.seed, "disc"));
    if (!config.cnn_only)
        result.generator = make_generator(config.simplified_g, derive_seed(config.seed, "gen"));

    AdamOpt cls_opt(config.cls_opt, result.net->params());
    AdamOpt disc_opt(config.gan_opt, result.net->params());
    std::unique_ptr<AdamOpt> gen_opt;
    if (result.generator)
        gen_opt = std::make_unique<AdamOpt>(config.gen_opt, result.generator->params());

    // The labeled subset must be prepared by the caller; default to the full
    // train set when every sample is requested.
    std::vector<int> labeled = data.labeled_idx;
    if (labeled.empty() &&
        static_cast<std::size_t>(config.labeled_per_class) * data.classes() == data.train.size()) {
        labeled.resize(data.train.size());
        std::iota(labeled.begin(), labeled.end(), 0);
    }
    require(labeled.size() ==
                static_cast<std::size_t>(config.labeled_per_class) * data.classes(),
            "train: labeled subset size does not match labeled_per_class");

    auto latent_rng = make_engine(derive_seed(config.seed, "latents"));

    std::vector<int> all_train(data.train.size());
    std::iota(all_train.begin(), all_train.end(), 0);

    std::vector<int> labeled_order, unlabeled_order;
    const int labeled_batch = std::min<int>(config.batch_size, static_cast<int>(labeled.size()));
    auto labeled_batch_at = [&](int step) {
        LabeledBatch b;
        std::vector<int> idx(static_cast<std::size_t>(labeled_batch));
        for (int j = 0; j < labeled_batch; ++j)
            idx[static_cast<std::size_t>(j)] =
                labeled_order[(static_cast<std::size_t>(step) * labeled_batch + j) %
                              labeled_order.size()];
        b.x = gather_columns(data.train, idx);
        b.labels.reserve(idx.size());
        for (int i : idx) b.labels.push_back(data.train[static_cast<std::size_t>(i)].label);
        return b;
    };
    auto unlabeled_batch_at = [&](int step) {
        std::vector<int> idx(static_cast<std::size_t>(config.batch_size));
        for (int j = 0; j < config.batch_size; ++j)
            idx[static_cast<std::size_t>(j)] =
                unlabeled_order[(static_cast<std::size_t>(step) * config.batch_size + j) %
                                unlabeled_order.size()];
        return UnlabeledBatch(gather_columns(data.train, idx));
    };

    const int full_pass_steps =
        static_cast<int>((data.train.size() + config.batch_size - 1) / config.batch_size);
    const int labeled_pass_steps =
        static_cast<int>((labeled.size() + labeled_batch - 1) / labeled_batch);
    int gan_steps = config.steps_per_epoch > 0 ? config.steps_per_epoch : full_pass_steps;
    int cnn_steps = config.steps_per_epoch > 0
                        ? std::min(config.steps_per_epoch, labeled_pass_steps)
                        : labeled_pass_steps;

    if (observer) observer(0, result.generator.get(), *result.net);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        labeled_order = shuffled_order(labeled, config.seed, "labeled-order", epoch);
        unlabeled_order = shuffled_order(all_train, config.seed, "unlabeled-order", epoch);

        double c_sum = 0.0, d_sum = 0.0, g_sum = 0.0;
        int c_n = 0, d_n = 0, g_n = 0;

        if (config.cnn_only) {
            for (int s = 0; s < cnn_steps; ++s) {
                c_sum += train_classifier_step(*result.net, cls_opt, labeled_batch_at(s));
                ++c_n;
            }
        } else if (config.phase_wise) {
            for (int s = 0; s < labeled_pass_steps; ++s) {
                c_sum += train_classifier_step(*result.net, cls_opt, labeled_batch_at(s));
                ++c_n;
            }
            for (int s = 0; s < gan_steps; ++s) {
                d_sum += train_discriminator_step(*result.net, disc_opt, unlabeled_batch_at(s),
                                                  *result.generator, latent_rng);
                ++d_n;
            }
            for (int s = 0; s < gan_steps; ++s) {
                g_sum += train_generator_step(*result.generator, *gen_opt, *result.net,
                                              config.batch_size, latent_rng);
                ++g_n;
            }
        } else {
            for (int s = 0; s < gan_steps; ++s) {
                c_sum += train_classifier_step(*result.net, cls_opt, labeled_batch_at(s));
                ++c_n;
                d_sum += train_discriminator_step(*result.net, disc_opt, unlabeled_batch_at(s),
                                                  *result.generator, latent_rng);
                ++d_n;
                g_sum += train_generator_step(*result.generator, *gen_opt, *result.net,
                                              config.batch_size, latent_rng);
                ++g_n;
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.classifier_loss = c_n ? c_sum / c_n : 0.0;
        stats.discriminator_loss = d_n ? d_sum / d_n : 0.0;
        stats.generator_loss = g_n ? g_sum / g_n : 0.0;
        stats.test_accuracy = evaluate_accuracy(*result.net, data.test);
        ensure(std::isfinite(stats.classifier_loss) && std::isfinite(stats.discriminator_loss) &&
                   std::isfinite(stats.generator_loss),
               "train: non-finite loss at epoch " + std::to_string(epoch));
        result.history.epochs.push_back(stats);

        if (observer) observer(epoch, result.generator.get(), *result.net);
    }
    return result;
}

}  // namespace csigan
