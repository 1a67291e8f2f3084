#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "csigan/adam.hpp"
#include "csigan/dataset.hpp"
#include "csigan/models.hpp"

namespace csigan {

struct TrainConfig {
    int epochs = 100;
    int batch_size = 32;
    int labeled_per_class = 400;
    std::uint64_t seed = 1;

    bool cnn_only = false;      // supervised baseline: classifier steps only
    bool simplified_g = false;  // ablation generator
    bool phase_wise = false;    // full C pass, then full D pass, then G steps
    int steps_per_epoch = 0;    // 0 = one full pass over the unlabeled pool

    AdamHyper gan_opt{2e-4, 0.5, 0.999, 1e-8};  // discriminator head
    AdamHyper gen_opt{2e-4, 0.5, 0.999, 1e-8};  // generator
    AdamHyper cls_opt{1e-3, 0.9, 0.999, 1e-8};  // classifier head

    void validate(const DatasetSplit& data) const;
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double classifier_loss = 0.0;
    double discriminator_loss = 0.0;
    double generator_loss = 0.0;
    double test_accuracy = 0.0;  // percent
};

struct TrainHistory {
    std::vector<EpochStats> epochs;

    void save_csv(const std::string& path) const;
};

// A batch the discriminator/generator steps may see: samples only, no labels.
using UnlabeledBatch = Eigen::MatrixXd;  // width x B

struct LabeledBatch {
    Eigen::MatrixXd x;        // width x B
    std::vector<int> labels;  // 1-based
};

// Called before training (epoch 0) and after each epoch. `gen` is null for
// the supervised baseline.
using EpochObserver = std::function<void(int epoch, Generator* gen, DiscClassNet& net)>;

struct TrainResult {
    std::unique_ptr<Generator> generator;  // null when cnn_only
    std::unique_ptr<DiscClassNet> net;
    TrainHistory history;
};

// ---- single optimization steps (exposed for tests) -------------------------

// Classifier step: mean categorical cross-entropy of the softmax head.
// Returns the loss; no-op with a warning on an empty batch.
double train_classifier_step(DiscClassNet& net, AdamOpt& cls_opt, const LabeledBatch& batch);

// Discriminator step: draws |real| fresh latents, generates fakes, and takes
// one Adam step on the binary cross-entropy of the lambda head (1 = real,
// 0 = fake). Generator parameters are not touched.
double train_discriminator_step(DiscClassNet& net, AdamOpt& disc_opt, const UnlabeledBatch& real,
                                Generator& gen, std::mt19937_64& latent_rng);

// Generator step: fresh latents, one Adam step on the non-saturating loss
// (binary cross-entropy of lambda(D(G(z))) against target 1).
// Discriminator parameters are not touched.
double train_generator_step(Generator& gen, AdamOpt& gen_opt, DiscClassNet& net, int batch_size,
                            std::mt19937_64& latent_rng);

// ---- full training ----------------------------------------------------------

// The two-step iterative protocol: per epoch, iterate minibatches running
// classifier step (labeled subset), discriminator step (unlabeled pool plus
// equal fakes), generator step, in that order. cnn_only runs classifier
// steps only. Deterministic given config and dataset.
TrainResult train(const TrainConfig& config, const DatasetSplit& data,
                  const EpochObserver& observer = {});

// Percent of test samples whose predicted class matches the label.
double evaluate_accuracy(DiscClassNet& net, const std::vector<CsiSample>& test_set);

// Draw a latent_dim x count matrix of standard Gaussian latents.
Eigen::MatrixXd sample_latents(int latent_dim, int count, std::mt19937_64& rng);

}  // namespace csigan
