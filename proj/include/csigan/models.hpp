#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "csigan/layers.hpp"

namespace csigan {

// Fixed architecture constants shared by the generator and the
// discriminator/classifier.
namespace arch {
inline constexpr int latent_dim = 100;
inline constexpr int sample_width = 120;   // CSI channels per sample
inline constexpr int num_classes = 16;
inline constexpr int kernel_taps = 5;
inline constexpr int feature_slices = 32;  // kernels per hidden layer
inline constexpr int reshape_width = 108;
inline constexpr int flat_features = reshape_width * feature_slices;  // 3456
inline constexpr int output_crop = 2;      // keeps the output layer width at 120
inline constexpr double init_stddev = 0.02;
}  // namespace arch

struct ClassifyResult {
    Eigen::VectorXd probabilities;  // length 16, sums to 1
    int predicted_class = 0;        // 1-based, matches dataset labels
};

// Common surface for the full and the simplified generator so the trainer
// can swap them.
class Generator {
  public:
    virtual ~Generator() = default;

    virtual std::string_view kind() const = 0;
    virtual int latent_dim() const = 0;
    virtual std::uint64_t build_seed() const = 0;

    // z: latent_dim x B  ->  sample_width x B, values in [-1, 1].
    virtual const Eigen::MatrixXd& forward(const Eigen::MatrixXd& z) = 0;
    // Upstream gradient w.r.t. the generated samples; accumulates parameter
    // gradients. Must follow a forward().
    virtual void backward(const Eigen::MatrixXd& d_samples) = 0;

    virtual void zero_grad() = 0;
    virtual std::vector<ParamRef> params() = 0;

    // Smallest kink clearance across layers for the last forward (see
    // DenseLayer::preactivation_clearance).
    virtual double preactivation_clearance() const = 0;

    // Single-sample convenience.
    Eigen::VectorXd generate(const Eigen::VectorXd& z);
};

// Deconvolutional generator: dense 100->3456, reshape to a 108-wide 32-slice
// map, three 32-kernel transposed convolutions (widths 112, 116, 120), and a
// single-kernel cropped transposed convolution with tanh output at width 120.
class GeneratorNet final : public Generator {
  public:
    explicit GeneratorNet(std::uint64_t seed);

    std::string_view kind() const override { return "generator"; }
    int latent_dim() const override { return arch::latent_dim; }
    std::uint64_t build_seed() const override { return seed_; }

    const Eigen::MatrixXd& forward(const Eigen::MatrixXd& z) override;
    void backward(const Eigen::MatrixXd& d_samples) override;
    void zero_grad() override;
    std::vector<ParamRef> params() override;
    double preactivation_clearance() const override;

    DenseLayer fc;
    DeconvLayer up1, up2, up3;
    DeconvLayer out;

  private:
    std::uint64_t seed_;
    int batch_ = 0;
    Eigen::MatrixXd reshaped_;
    Eigen::MatrixXd samples_;
};

// Ablation generator: a single dense layer with tanh output, no
// deconvolutional stack.
class SimplifiedGeneratorNet final : public Generator {
  public:
    explicit SimplifiedGeneratorNet(std::uint64_t seed);

    std::string_view kind() const override { return "simplified_generator"; }
    int latent_dim() const override { return arch::latent_dim; }
    std::uint64_t build_seed() const override { return seed_; }

    const Eigen::MatrixXd& forward(const Eigen::MatrixXd& z) override;
    void backward(const Eigen::MatrixXd& d_samples) override;
    void zero_grad() override;
    std::vector<ParamRef> params() override;
    double preactivation_clearance() const override;

    DenseLayer fc;

  private:
    std::uint64_t seed_;
};

// Shared-weight discriminator/classifier: three 32-kernel convolutions
// (widths 116, 112, 108) with LeakyReLU, flatten to 3456, dense to 16
// logits. The discriminator head applies lambda_real_prob to the logits,
// the classifier head applies softmax to the same logits.
class DiscClassNet {
  public:
    explicit DiscClassNet(std::uint64_t seed);

    std::uint64_t build_seed() const { return seed_; }

    // x: sample_width x B  ->  num_classes x B logits (shared by both heads).
    const Eigen::MatrixXd& logits(const Eigen::MatrixXd& x);
    // d_logits: num_classes x B. Returns d_x (sample_width x B) when
    // want_input_grad.
    Eigen::MatrixXd backward_from_logits(const Eigen::MatrixXd& d_logits,
                                         bool want_input_grad = false,
                                         bool accumulate_param_grads = true);

    // q = lambda(logits), the probability the sample is real.
    double discriminate(const Eigen::VectorXd& x);
    // Softmax head plus 1-based argmax prediction.
    ClassifyResult classify(const Eigen::VectorXd& x);

    void zero_grad();
    std::vector<ParamRef> params();
    double preactivation_clearance() const;

    ConvLayer conv1, conv2, conv3;
    DenseLayer head;

  private:
    std::uint64_t seed_;
    int batch_ = 0;
    Eigen::MatrixXd flat_;
    Eigen::MatrixXd logits_;
};

GeneratorNet build_generator(std::uint64_t seed);
SimplifiedGeneratorNet build_simplified_generator(std::uint64_t seed);
DiscClassNet build_discriminator(std::uint64_t seed);

// Factory used by the trainer and checkpoint loader.
std::unique_ptr<Generator> make_generator(bool simplified, std::uint64_t seed);

}  // namespace csigan
