#include "csigan/layers.hpp"

#include <limits>

#include "csigan/errors.hpp"

namespace csigan {

namespace {

void check_bank(const ConvKernelBank& bank) {
    require(bank.taps >= 1 && bank.in_slices >= 1 && bank.out_slices >= 1,
            "kernel bank: taps, in_slices, out_slices must all be >= 1");
    require(bank.stride == 1, "kernel bank: only stride 1 is supported");
    require(bank.kernels.rows() == static_cast<Eigen::Index>(bank.taps) * bank.in_slices &&
                bank.kernels.cols() == bank.out_slices && bank.bias.size() == bank.out_slices,
            "kernel bank: inconsistent array shapes");
}

void fill_gaussian(Eigen::Ref<Eigen::MatrixXd> m, std::mt19937_64& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

ParamRef make_ref(const std::string& name, Eigen::MatrixXd& value, Eigen::MatrixXd& grad) {
    return ParamRef{name, value.data(), grad.data(), value.rows(), value.cols()};
}

ParamRef make_ref(const std::string& name, Eigen::VectorXd& value, Eigen::VectorXd& grad) {
    return ParamRef{name, value.data(), grad.data(), value.size(), 1};
}

double kink_clearance(const Eigen::MatrixXd& pre, Act act) {
    if (act != Act::Relu && act != Act::LeakyRelu)
        return std::numeric_limits<double>::infinity();
    return pre.cwiseAbs().minCoeff();
}

}  // namespace

ConvKernelBank transpose_bank(const ConvKernelBank& bank) {
    check_bank(bank);
    ConvKernelBank t(bank.taps, bank.out_slices, bank.in_slices);
    t.stride = bank.stride;
    for (int k = 0; k < bank.out_slices; ++k)
        for (int d = 0; d < bank.in_slices; ++d)
            for (int tap = 0; tap < bank.taps; ++tap) t.at(d, tap, k) = bank.at(k, tap, d);
    return t;
}

Eigen::VectorXd dense_forward(const Eigen::VectorXd& x, const DenseParams& p) {
    require(x.size() == p.weight.cols(), "dense_forward: input dimension mismatch");
    require(p.bias.size() == p.weight.rows(), "dense_forward: bias dimension mismatch");
    return p.weight * x + p.bias;
}

Eigen::MatrixXd conv1d_forward_batch(const Eigen::MatrixXd& a, int batch,
                                     const ConvKernelBank& bank) {
    check_bank(bank);
    require(batch >= 1 && a.rows() % batch == 0, "conv1d: rows not divisible by batch");
    const int in_width = static_cast<int>(a.rows()) / batch;
    require(a.cols() == bank.in_slices, "conv1d: slice count mismatch");
    const int out_width = conv_output_width(in_width, bank.taps, bank.stride);

    // im2col: P(n*W_out + i, d*F + t) = a(n*W_in + i + t, d)
    Eigen::MatrixXd patches(static_cast<Eigen::Index>(batch) * out_width,
                            static_cast<Eigen::Index>(bank.taps) * bank.in_slices);
    for (int d = 0; d < bank.in_slices; ++d)
        for (int t = 0; t < bank.taps; ++t)
            for (int n = 0; n < batch; ++n)
                patches.col(d * bank.taps + t).segment(static_cast<Eigen::Index>(n) * out_width, out_width) =
                    a.col(d).segment(static_cast<Eigen::Index>(n) * in_width + t, out_width);

    Eigen::MatrixXd out = patches * bank.kernels;
    out.rowwise() += bank.bias.transpose();
    return out;
}

FeatureMap conv1d_forward(const FeatureMap& a, const ConvKernelBank& bank) {
    return conv1d_forward_batch(a, 1, bank);
}

Eigen::MatrixXd deconv1d_forward_batch(const Eigen::MatrixXd& v, int batch,
                                       const ConvKernelBank& bank, int crop) {
    check_bank(bank);
    require(batch >= 1 && v.rows() % batch == 0, "deconv1d: rows not divisible by batch");
    const int in_width = static_cast<int>(v.rows()) / batch;
    require(v.cols() == bank.in_slices, "deconv1d: slice count mismatch");
    const int full_width = bank.stride * (in_width - 1) + bank.taps;
    const int out_width = deconv_output_width(in_width, bank.taps, bank.stride, crop);

    // Spread GEMM: M(n*W_in + i, k*F + t) = sum_d v(i,d) kernel_k(t,d)
    Eigen::MatrixXd spread(bank.in_slices, static_cast<Eigen::Index>(bank.taps) * bank.out_slices);
    for (int k = 0; k < bank.out_slices; ++k)
        for (int t = 0; t < bank.taps; ++t)
            for (int d = 0; d < bank.in_slices; ++d)
                spread(d, static_cast<Eigen::Index>(k) * bank.taps + t) = bank.at(k, t, d);
    Eigen::MatrixXd m = v * spread;

    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(batch) * full_width,
                                                 bank.out_slices);
    for (int k = 0; k < bank.out_slices; ++k)
        for (int t = 0; t < bank.taps; ++t)
            for (int n = 0; n < batch; ++n)
                full.col(k).segment(static_cast<Eigen::Index>(n) * full_width + t, in_width) +=
                    m.col(static_cast<Eigen::Index>(k) * bank.taps + t)
                        .segment(static_cast<Eigen::Index>(n) * in_width, in_width);
    full.rowwise() += bank.bias.transpose();

    if (crop == 0) return full;
    Eigen::MatrixXd out(static_cast<Eigen::Index>(batch) * out_width, bank.out_slices);
    for (int n = 0; n < batch; ++n)
        out.middleRows(static_cast<Eigen::Index>(n) * out_width, out_width) =
            full.middleRows(static_cast<Eigen::Index>(n) * full_width + crop, out_width);
    return out;
}

FeatureMap deconv1d_forward(const FeatureMap& v, const ConvKernelBank& bank, int crop) {
    return deconv1d_forward_batch(v, 1, bank, crop);
}

// ---- DenseLayer -------------------------------------------------------------

DenseLayer::DenseLayer(int in_dim, int out_dim, Act act, double leak)
    : p(in_dim, out_dim), g(in_dim, out_dim), act_(act), leak_(leak) {
    require(in_dim >= 1 && out_dim >= 1, "dense layer: dimensions must be >= 1");
}

void DenseLayer::init_weights(std::mt19937_64& rng, double stddev) {
    fill_gaussian(p.weight, rng, stddev);
    p.bias.setZero();
}

const Eigen::MatrixXd& DenseLayer::forward(const Eigen::MatrixXd& x) {
    require(x.rows() == p.weight.cols(), "dense layer: input dimension mismatch");
    x_cache_ = x;
    out_.noalias() = p.weight * x;
    out_.colwise() += p.bias;
    pre_clearance_ = kink_clearance(out_, act_);
    apply_activation(out_, act_, leak_);
    has_cache_ = true;
    return out_;
}

Eigen::MatrixXd DenseLayer::backward(const Eigen::MatrixXd& d_out, bool want_input_grad,
                                     bool accumulate_param_grads) {
    ensure(has_cache_, "dense layer: backward without a cached forward");
    require(d_out.rows() == out_.rows() && d_out.cols() == out_.cols(),
            "dense layer: upstream gradient shape mismatch");
    Eigen::MatrixXd d_pre =
        d_out.cwiseProduct(activation_deriv_from_output(out_, act_, leak_));
    if (accumulate_param_grads) {
        g.weight.noalias() += d_pre * x_cache_.transpose();
        g.bias.noalias() += d_pre.rowwise().sum();
    }
    if (!want_input_grad) return Eigen::MatrixXd();
    return p.weight.transpose() * d_pre;
}

void DenseLayer::zero_grad() {
    g.weight.setZero();
    g.bias.setZero();
}

std::vector<ParamRef> DenseLayer::params(const std::string& prefix) {
    return {make_ref(prefix + ".weight", p.weight, g.weight),
            make_ref(prefix + ".bias", p.bias, g.bias)};
}

// ---- ConvLayer --------------------------------------------------------------

ConvLayer::ConvLayer(int taps, int in_slices, int out_slices, Act act, double leak)
    : p(taps, in_slices, out_slices), g(taps, in_slices, out_slices), act_(act), leak_(leak) {}

void ConvLayer::init_weights(std::mt19937_64& rng, double stddev) {
    fill_gaussian(p.kernels, rng, stddev);
    p.bias.setZero();
}

const Eigen::MatrixXd& ConvLayer::forward(const Eigen::MatrixXd& x, int batch) {
    require(batch >= 1 && x.rows() % batch == 0, "conv layer: rows not divisible by batch");
    require(x.cols() == p.in_slices, "conv layer: slice count mismatch");
    batch_ = batch;
    in_width_ = static_cast<int>(x.rows()) / batch;
    const int out_w = conv_output_width(in_width_, p.taps, p.stride);

    patches_.resize(static_cast<Eigen::Index>(batch) * out_w,
                    static_cast<Eigen::Index>(p.taps) * p.in_slices);
    for (int d = 0; d < p.in_slices; ++d)
        for (int t = 0; t < p.taps; ++t)
            for (int n = 0; n < batch; ++n)
                patches_.col(d * p.taps + t).segment(static_cast<Eigen::Index>(n) * out_w, out_w) =
                    x.col(d).segment(static_cast<Eigen::Index>(n) * in_width_ + t, out_w);

    out_.noalias() = patches_ * p.kernels;
    out_.rowwise() += p.bias.transpose();
    pre_clearance_ = kink_clearance(out_, act_);
    apply_activation(out_, act_, leak_);
    has_cache_ = true;
    return out_;
}

Eigen::MatrixXd ConvLayer::backward(const Eigen::MatrixXd& d_out, bool want_input_grad,
                                    bool accumulate_param_grads) {
    ensure(has_cache_, "conv layer: backward without a cached forward");
    require(d_out.rows() == out_.rows() && d_out.cols() == out_.cols(),
            "conv layer: upstream gradient shape mismatch");
    const int out_w = conv_output_width(in_width_, p.taps, p.stride);

    Eigen::MatrixXd d_pre =
        d_out.cwiseProduct(activation_deriv_from_output(out_, act_, leak_));
    if (accumulate_param_grads) {
        g.kernels.noalias() += patches_.transpose() * d_pre;
        g.bias.noalias() += d_pre.colwise().sum().transpose();
    }
    if (!want_input_grad) return Eigen::MatrixXd();

    // col2im scatter of d_pre * K^T, the transposed-convolution structure.
    Eigen::MatrixXd d_patches = d_pre * p.kernels.transpose();
    Eigen::MatrixXd d_x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(batch_) * in_width_,
                                                p.in_slices);
    for (int d = 0; d < p.in_slices; ++d)
        for (int t = 0; t < p.taps; ++t)
            for (int n = 0; n < batch_; ++n)
                d_x.col(d).segment(static_cast<Eigen::Index>(n) * in_width_ + t, out_w) +=
                    d_patches.col(d * p.taps + t).segment(static_cast<Eigen::Index>(n) * out_w, out_w);
    return d_x;
}

void ConvLayer::zero_grad() {
    g.kernels.setZero();
    g.bias.setZero();
}

std::vector<ParamRef> ConvLayer::params(const std::string& prefix) {
    return {make_ref(prefix + ".kernels", p.kernels, g.kernels),
            make_ref(prefix + ".bias", p.bias, g.bias)};
}

// ---- DeconvLayer ------------------------------------------------------------

DeconvLayer::DeconvLayer(int taps, int in_slices, int out_slices, Act act, int crop, double leak)
    : p(taps, in_slices, out_slices), g(taps, in_slices, out_slices), act_(act), leak_(leak),
      crop_(crop) {
    require(crop >= 0, "deconv layer: crop must be >= 0");
}

void DeconvLayer::init_weights(std::mt19937_64& rng, double stddev) {
    fill_gaussian(p.kernels, rng, stddev);
    p.bias.setZero();
}

Eigen::MatrixXd DeconvLayer::spread_matrix() const {
    Eigen::MatrixXd spread(p.in_slices, static_cast<Eigen::Index>(p.taps) * p.out_slices);
    for (int k = 0; k < p.out_slices; ++k)
        for (int t = 0; t < p.taps; ++t)
            for (int d = 0; d < p.in_slices; ++d)
                spread(d, static_cast<Eigen::Index>(k) * p.taps + t) = p.at(k, t, d);
    return spread;
}

const Eigen::MatrixXd& DeconvLayer::forward(const Eigen::MatrixXd& v, int batch) {
    require(batch >= 1 && v.rows() % batch == 0, "deconv layer: rows not divisible by batch");
    require(v.cols() == p.in_slices, "deconv layer: slice count mismatch");
    batch_ = batch;
    in_width_ = static_cast<int>(v.rows()) / batch;
    const int full_w = p.stride * (in_width_ - 1) + p.taps;
    const int out_w = deconv_output_width(in_width_, p.taps, p.stride, crop_);

    v_cache_ = v;
    Eigen::MatrixXd m = v * spread_matrix();

    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(batch) * full_w,
                                                 p.out_slices);
    for (int k = 0; k < p.out_slices; ++k)
        for (int t = 0; t < p.taps; ++t)
            for (int n = 0; n < batch; ++n)
                full.col(k).segment(static_cast<Eigen::Index>(n) * full_w + t, in_width_) +=
                    m.col(static_cast<Eigen::Index>(k) * p.taps + t)
                        .segment(static_cast<Eigen::Index>(n) * in_width_, in_width_);
    full.rowwise() += p.bias.transpose();

    if (crop_ == 0) {
        out_ = std::move(full);
    } else {
        out_.resize(static_cast<Eigen::Index>(batch) * out_w, p.out_slices);
        for (int n = 0; n < batch; ++n)
            out_.middleRows(static_cast<Eigen::Index>(n) * out_w, out_w) =
                full.middleRows(static_cast<Eigen::Index>(n) * full_w + crop_, out_w);
    }
    pre_clearance_ = kink_clearance(out_, act_);
    apply_activation(out_, act_, leak_);
    has_cache_ = true;
    return out_;
}

Eigen::MatrixXd DeconvLayer::backward(const Eigen::MatrixXd& d_out, bool want_input_grad,
                                      bool accumulate_param_grads) {
    ensure(has_cache_, "deconv layer: backward without a cached forward");
    require(d_out.rows() == out_.rows() && d_out.cols() == out_.cols(),
            "deconv layer: upstream gradient shape mismatch");
    const int full_w = p.stride * (in_width_ - 1) + p.taps;
    const int out_w = deconv_output_width(in_width_, p.taps, p.stride, crop_);

    Eigen::MatrixXd d_pre =
        d_out.cwiseProduct(activation_deriv_from_output(out_, act_, leak_));

    // Undo the crop: gradients of the trimmed positions are zero.
    Eigen::MatrixXd d_full;
    if (crop_ == 0) {
        d_full = std::move(d_pre);
    } else {
        d_full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(batch_) * full_w, p.out_slices);
        for (int n = 0; n < batch_; ++n)
            d_full.middleRows(static_cast<Eigen::Index>(n) * full_w + crop_, out_w) =
                d_pre.middleRows(static_cast<Eigen::Index>(n) * out_w, out_w);
    }

    // Gather back into the spread layout: dM(i, k*F+t) = d_full(i+t, k).
    Eigen::MatrixXd d_m(static_cast<Eigen::Index>(batch_) * in_width_,
                        static_cast<Eigen::Index>(p.taps) * p.out_slices);
    for (int k = 0; k < p.out_slices; ++k)
        for (int t = 0; t < p.taps; ++t)
            for (int n = 0; n < batch_; ++n)
                d_m.col(static_cast<Eigen::Index>(k) * p.taps + t)
                    .segment(static_cast<Eigen::Index>(n) * in_width_, in_width_) =
                    d_full.col(k).segment(static_cast<Eigen::Index>(n) * full_w + t, in_width_);

    if (accumulate_param_grads) {
        Eigen::MatrixXd d_spread = v_cache_.transpose() * d_m;  // D x (F*K)
        for (int k = 0; k < p.out_slices; ++k)
            for (int t = 0; t < p.taps; ++t)
                for (int d = 0; d < p.in_slices; ++d)
                    g.at(k, t, d) += d_spread(d, static_cast<Eigen::Index>(k) * p.taps + t);
        g.bias.noalias() += d_full.colwise().sum().transpose();
    }
    if (!want_input_grad) return Eigen::MatrixXd();
    return d_m * spread_matrix().transpose();
}

void DeconvLayer::zero_grad() {
    g.kernels.setZero();
    g.bias.setZero();
}

std::vector<ParamRef> DeconvLayer::params(const std::string& prefix) {
    return {make_ref(prefix + ".kernels", p.kernels, g.kernels),
            make_ref(prefix + ".bias", p.bias, g.bias)};
}

}  // namespace csigan
