#include "csigan/models.hpp"

#include <algorithm>

#include "csigan/errors.hpp"
#include "csigan/losses.hpp"
#include "csigan/rng.hpp"

namespace csigan {

namespace {

// FC activations (flat x B, flat = width*slices slice-major) <-> batched maps
// ((B*width) x slices).
Eigen::MatrixXd columns_to_batch_map(const Eigen::MatrixXd& cols, int width, int slices) {
    const int batch = static_cast<int>(cols.cols());
    Eigen::MatrixXd map(static_cast<Eigen::Index>(batch) * width, slices);
    for (int n = 0; n < batch; ++n)
        for (int h = 0; h < slices; ++h)
            map.col(h).segment(static_cast<Eigen::Index>(n) * width, width) =
                cols.col(n).segment(static_cast<Eigen::Index>(h) * width, width);
    return map;
}

Eigen::MatrixXd batch_map_to_columns(const Eigen::MatrixXd& map, int width, int slices) {
    const int batch = static_cast<int>(map.rows()) / width;
    Eigen::MatrixXd cols(static_cast<Eigen::Index>(width) * slices, batch);
    for (int n = 0; n < batch; ++n)
        for (int h = 0; h < slices; ++h)
            cols.col(n).segment(static_cast<Eigen::Index>(h) * width, width) =
                map.col(h).segment(static_cast<Eigen::Index>(n) * width, width);
    return cols;
}

void check_widths_generator(const GeneratorNet& g) {
    int w = arch::reshape_width;
    w = g.up1.out_width(w);
    ensure(w == 112, "generator: first upsample width must be 112");
    w = g.up2.out_width(w);
    ensure(w == 116, "generator: second upsample width must be 116");
    w = g.up3.out_width(w);
    ensure(w == 120, "generator: third upsample width must be 120");
    w = g.out.out_width(w);
    ensure(w == arch::sample_width, "generator: output width must be 120");
}

void check_widths_discriminator(const ConvLayer& c1, const ConvLayer& c2, const ConvLayer& c3) {
    int w = c1.out_width(arch::sample_width);
    ensure(w == 116, "discriminator: first conv width must be 116");
    w = c2.out_width(w);
    ensure(w == 112, "discriminator: second conv width must be 112");
    w = c3.out_width(w);
    ensure(w == arch::reshape_width, "discriminator: third conv width must be 108");
    ensure(w * arch::feature_slices == arch::flat_features,
           "discriminator: flattened feature count must be 3456");
}

}  // namespace

Eigen::VectorXd Generator::generate(const Eigen::VectorXd& z) {
    require(z.size() == latent_dim(), "generate: latent vector has wrong length");
    require(z.allFinite(), "generate: latent vector must be finite");
    return forward(z);
}

// ---- GeneratorNet -----------------------------------------------------------

GeneratorNet::GeneratorNet(std::uint64_t seed)
    : fc(arch::latent_dim, arch::flat_features, Act::Relu),
      up1(arch::kernel_taps, arch::feature_slices, arch::feature_slices, Act::Relu),
      up2(arch::kernel_taps, arch::feature_slices, arch::feature_slices, Act::Relu),
      up3(arch::kernel_taps, arch::feature_slices, arch::feature_slices, Act::Relu),
      out(arch::kernel_taps, arch::feature_slices, 1, Act::Tanh, arch::output_crop),
      seed_(seed) {
    auto rng = make_engine(derive_seed(seed, "generator-init"));
    fc.init_weights(rng, arch::init_stddev);
    up1.init_weights(rng, arch::init_stddev);
    up2.init_weights(rng, arch::init_stddev);
    up3.init_weights(rng, arch::init_stddev);
    out.init_weights(rng, arch::init_stddev);
    check_widths_generator(*this);
}

const Eigen::MatrixXd& GeneratorNet::forward(const Eigen::MatrixXd& z) {
    require(z.rows() == arch::latent_dim, "generator: latent dimension mismatch");
    require(z.cols() >= 1, "generator: empty batch");
    batch_ = static_cast<int>(z.cols());

    const Eigen::MatrixXd& a = fc.forward(z);  // 3456 x B
    reshaped_ = columns_to_batch_map(a, arch::reshape_width, arch::feature_slices);
    const Eigen::MatrixXd& u1 = up1.forward(reshaped_, batch_);
    const Eigen::MatrixXd& u2 = up2.forward(u1, batch_);
    const Eigen::MatrixXd& u3 = up3.forward(u2, batch_);
    const Eigen::MatrixXd& x = out.forward(u3, batch_);  // (B*120) x 1
    samples_ = map_to_columns(x, arch::sample_width);
    return samples_;
}

void GeneratorNet::backward(const Eigen::MatrixXd& d_samples) {
    require(d_samples.rows() == arch::sample_width && d_samples.cols() == batch_,
            "generator: upstream gradient shape mismatch");
    Eigen::MatrixXd d = columns_to_map(d_samples);  // (B*120) x 1
    d = out.backward(d);
    d = up3.backward(d);
    d = up2.backward(d);
    d = up1.backward(d);
    Eigen::MatrixXd d_fc = batch_map_to_columns(d, arch::reshape_width, arch::feature_slices);
    fc.backward(d_fc, /*want_input_grad=*/false);
}

void GeneratorNet::zero_grad() {
    fc.zero_grad();
    up1.zero_grad();
    up2.zero_grad();
    up3.zero_grad();
    out.zero_grad();
}

double GeneratorNet::preactivation_clearance() const {
    return std::min({fc.preactivation_clearance(), up1.preactivation_clearance(),
                     up2.preactivation_clearance(), up3.preactivation_clearance(),
                     out.preactivation_clearance()});
}

std::vector<ParamRef> GeneratorNet::params() {
    std::vector<ParamRef> refs;
    auto add = [&refs](std::vector<ParamRef> r) {
        for (auto& x : r) refs.push_back(std::move(x));
    };
    add(fc.params("fc"));
    add(up1.params("up1"));
    add(up2.params("up2"));
    add(up3.params("up3"));
    add(out.params("out"));
    return refs;
}

// ---- SimplifiedGeneratorNet -------------------------------------------------

SimplifiedGeneratorNet::SimplifiedGeneratorNet(std::uint64_t seed)
    : fc(arch::latent_dim, arch::sample_width, Act::Tanh), seed_(seed) {
    auto rng = make_engine(derive_seed(seed, "generator-init"));
    fc.init_weights(rng, arch::init_stddev);
}

const Eigen::MatrixXd& SimplifiedGeneratorNet::forward(const Eigen::MatrixXd& z) {
    require(z.rows() == arch::latent_dim, "generator: latent dimension mismatch");
    return fc.forward(z);
}

void SimplifiedGeneratorNet::backward(const Eigen::MatrixXd& d_samples) {
    fc.backward(d_samples, /*want_input_grad=*/false);
}

void SimplifiedGeneratorNet::zero_grad() { fc.zero_grad(); }

std::vector<ParamRef> SimplifiedGeneratorNet::params() { return fc.params("fc"); }

double SimplifiedGeneratorNet::preactivation_clearance() const {
    return fc.preactivation_clearance();
}

// ---- DiscClassNet -----------------------------------------------------------

DiscClassNet::DiscClassNet(std::uint64_t seed)
    : conv1(arch::kernel_taps, 1, arch::feature_slices, Act::LeakyRelu),
      conv2(arch::kernel_taps, arch::feature_slices, arch::feature_slices, Act::LeakyRelu),
      conv3(arch::kernel_taps, arch::feature_slices, arch::feature_slices, Act::LeakyRelu),
      head(arch::flat_features, arch::num_classes, Act::None),
      seed_(seed) {
    auto rng = make_engine(derive_seed(seed, "discriminator-init"));
    conv1.init_weights(rng, arch::init_stddev);
    conv2.init_weights(rng, arch::init_stddev);
    conv3.init_weights(rng, arch::init_stddev);
    head.init_weights(rng, arch::init_stddev);
    check_widths_discriminator(conv1, conv2, conv3);
}

const Eigen::MatrixXd& DiscClassNet::logits(const Eigen::MatrixXd& x) {
    require(x.rows() == arch::sample_width, "discriminator: input width mismatch");
    require(x.cols() >= 1, "discriminator: empty batch");
    batch_ = static_cast<int>(x.cols());

    Eigen::MatrixXd in_map = columns_to_map(x);  // (B*120) x 1
    const Eigen::MatrixXd& a1 = conv1.forward(in_map, batch_);
    const Eigen::MatrixXd& a2 = conv2.forward(a1, batch_);
    const Eigen::MatrixXd& a3 = conv3.forward(a2, batch_);
    flat_ = batch_map_to_columns(a3, arch::reshape_width, arch::feature_slices);  // 3456 x B
    logits_ = head.forward(flat_);
    return logits_;
}

Eigen::MatrixXd DiscClassNet::backward_from_logits(const Eigen::MatrixXd& d_logits,
                                                   bool want_input_grad,
                                                   bool accumulate_param_grads) {
    require(d_logits.rows() == arch::num_classes && d_logits.cols() == batch_,
            "discriminator: upstream gradient shape mismatch");
    Eigen::MatrixXd d = head.backward(d_logits, true, accumulate_param_grads);
    Eigen::MatrixXd d_map =
        columns_to_batch_map(d, arch::reshape_width, arch::feature_slices);
    d_map = conv3.backward(d_map, true, accumulate_param_grads);
    d_map = conv2.backward(d_map, true, accumulate_param_grads);
    d_map = conv1.backward(d_map, want_input_grad, accumulate_param_grads);
    if (!want_input_grad) return Eigen::MatrixXd();
    return map_to_columns(d_map, arch::sample_width);
}

double DiscClassNet::discriminate(const Eigen::VectorXd& x) {
    return lambda_real_prob(logits(x).col(0));
}

ClassifyResult DiscClassNet::classify(const Eigen::VectorXd& x) {
    ClassifyResult res;
    const Eigen::MatrixXd& c = logits(x);
    res.probabilities = softmax(c.col(0));
    Eigen::Index best = 0;
    c.col(0).maxCoeff(&best);
    res.predicted_class = static_cast<int>(best) + 1;
    return res;
}

void DiscClassNet::zero_grad() {
    conv1.zero_grad();
    conv2.zero_grad();
    conv3.zero_grad();
    head.zero_grad();
}

double DiscClassNet::preactivation_clearance() const {
    return std::min({conv1.preactivation_clearance(), conv2.preactivation_clearance(),
                     conv3.preactivation_clearance(), head.preactivation_clearance()});
}

std::vector<ParamRef> DiscClassNet::params() {
    std::vector<ParamRef> refs;
    auto add = [&refs](std::vector<ParamRef> r) {
        for (auto& x : r) refs.push_back(std::move(x));
    };
    add(conv1.params("conv1"));
    add(conv2.params("conv2"));
    add(conv3.params("conv3"));
    add(head.params("head"));
    return refs;
}

// ---- builders ---------------------------------------------------------------

GeneratorNet build_generator(std::uint64_t seed) { return GeneratorNet(seed); }

SimplifiedGeneratorNet build_simplified_generator(std::uint64_t seed) {
    return SimplifiedGeneratorNet(seed);
}

DiscClassNet build_discriminator(std::uint64_t seed) { return DiscClassNet(seed); }

std::unique_ptr<Generator> make_generator(bool simplified, std::uint64_t seed) {
    if (simplified) return std::make_unique<SimplifiedGeneratorNet>(seed);
    return std::make_unique<GeneratorNet>(seed);
}

}  // namespace csigan
