#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "csigan/activations.hpp"
#include "csigan/tensor.hpp"

namespace csigan {

// Flat view of one parameter array and its gradient. Models hand these out
// so the optimizer and checkpoint I/O can iterate every array uniformly.
// Pointers stay valid as long as the owning layer is not reallocated.
struct ParamRef {
    std::string name;
    double* value = nullptr;
    double* grad = nullptr;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;

    Eigen::Index size() const { return rows * cols; }
};

struct DenseParams {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out

    DenseParams() = default;
    DenseParams(int in_dim, int out_dim)
        : weight(Eigen::MatrixXd::Zero(out_dim, in_dim)), bias(Eigen::VectorXd::Zero(out_dim)) {}

    int in_dim() const { return static_cast<int>(weight.cols()); }
    int out_dim() const { return static_cast<int>(weight.rows()); }
};

// A bank of `out_slices` kernels, each taps x in_slices. Column k of
// `kernels` holds kernel k flattened with slice-major order: entry
// (d*taps + t) is the weight for tap t of input slice d. Stride is kept as
// a field for completeness; every model here uses stride 1.
struct ConvKernelBank {
    int taps = 0;        // F
    int in_slices = 0;   // D
    int out_slices = 0;  // K
    int stride = 1;
    Eigen::MatrixXd kernels;  // (taps*in_slices) x out_slices
    Eigen::VectorXd bias;     // out_slices

    ConvKernelBank() = default;
    ConvKernelBank(int taps_, int in_slices_, int out_slices_)
        : taps(taps_),
          in_slices(in_slices_),
          out_slices(out_slices_),
          kernels(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(taps_) * in_slices_, out_slices_)),
          bias(Eigen::VectorXd::Zero(out_slices_)) {}

    double& at(int kernel, int tap, int slice) { return kernels(slice * taps + tap, kernel); }
    double at(int kernel, int tap, int slice) const { return kernels(slice * taps + tap, kernel); }
};

// Swap the kernel-index and slice-index axes: transpose_bank(b).at(k,t,d)
// == b.at(d,t,k). A convolution with bank b and a transposed convolution
// with transpose_bank(b) are exact adjoints of each other.
ConvKernelBank transpose_bank(const ConvKernelBank& bank);

// ---- stateless forward ops (single sample) -------------------------------

// W x + b, pre-activation.
Eigen::VectorXd dense_forward(const Eigen::VectorXd& x, const DenseParams& p);

// Cross-correlation, stride 1: out(i,k) = sum_{t,d} kernel_k(t,d) a(i+t,d) + bias_k.
// Output width (W - F)/S + 1.
FeatureMap conv1d_forward(const FeatureMap& a, const ConvKernelBank& bank);

// Transposed convolution: out(i+t,k) += v(i,d) kernel_k(t,d), full output
// width S(W-1)+F, then `crop` positions removed from each end.
FeatureMap deconv1d_forward(const FeatureMap& v, const ConvKernelBank& bank, int crop = 0);

// ---- batched ops ----------------------------------------------------------
// Batched maps are (batch*width) x slices, sample-major row blocks.

Eigen::MatrixXd conv1d_forward_batch(const Eigen::MatrixXd& a, int batch,
                                     const ConvKernelBank& bank);
Eigen::MatrixXd deconv1d_forward_batch(const Eigen::MatrixXd& v, int batch,
                                       const ConvKernelBank& bank, int crop = 0);

// ---- trainable layers ------------------------------------------------------
// Each layer owns parameters, same-shaped gradient buffers, and the forward
// cache needed by backward(). backward() must follow a forward() on the same
// instance; gradients are accumulated (callers zero them between steps) and
// carry whatever scaling the upstream gradient carries.

class DenseLayer {
  public:
    DenseLayer(int in_dim, int out_dim, Act act, double leak = 0.2);

    void init_weights(std::mt19937_64& rng, double stddev);

    // x: in x B  ->  out x B (activated).
    const Eigen::MatrixXd& forward(const Eigen::MatrixXd& x);
    // d_out: out x B. Returns d_x (in x B) when want_input_grad.
    Eigen::MatrixXd backward(const Eigen::MatrixXd& d_out, bool want_input_grad = true,
                             bool accumulate_param_grads = true);

    void zero_grad();
    std::vector<ParamRef> params(const std::string& prefix);

    // Distance of the last forward's pre-activations from the nearest
    // activation kink; +inf for smooth activations. Finite-difference
    // checks are only valid when this clears the probe step.
    double preactivation_clearance() const { return pre_clearance_; }

    DenseParams p;
    DenseParams g;

  private:
    Act act_;
    double leak_;
    bool has_cache_ = false;
    double pre_clearance_ = 0.0;
    Eigen::MatrixXd x_cache_;
    Eigen::MatrixXd out_;
};

class ConvLayer {
  public:
    ConvLayer(int taps, int in_slices, int out_slices, Act act, double leak = 0.2);

    void init_weights(std::mt19937_64& rng, double stddev);

    // x: (B*W_in) x D  ->  (B*W_out) x K (activated).
    const Eigen::MatrixXd& forward(const Eigen::MatrixXd& x, int batch);
    Eigen::MatrixXd backward(const Eigen::MatrixXd& d_out, bool want_input_grad = true,
                             bool accumulate_param_grads = true);

    void zero_grad();
    std::vector<ParamRef> params(const std::string& prefix);

    int out_width(int in_width) const { return conv_output_width(in_width, p.taps, p.stride); }
    double preactivation_clearance() const { return pre_clearance_; }

    ConvKernelBank p;
    ConvKernelBank g;

  private:
    Act act_;
    double leak_;
    bool has_cache_ = false;
    double pre_clearance_ = 0.0;
    int batch_ = 0;
    int in_width_ = 0;
    Eigen::MatrixXd patches_;  // (B*W_out) x (taps*D), im2col of the input
    Eigen::MatrixXd out_;
};

class DeconvLayer {
  public:
    DeconvLayer(int taps, int in_slices, int out_slices, Act act, int crop = 0,
                double leak = 0.2);

    void init_weights(std::mt19937_64& rng, double stddev);

    // v: (B*W_in) x D  ->  (B*W_out) x K (activated), W_out = W_in + F - 1 - 2*crop.
    const Eigen::MatrixXd& forward(const Eigen::MatrixXd& v, int batch);
    Eigen::MatrixXd backward(const Eigen::MatrixXd& d_out, bool want_input_grad = true,
                             bool accumulate_param_grads = true);

    void zero_grad();
    std::vector<ParamRef> params(const std::string& prefix);

    int out_width(int in_width) const {
        return deconv_output_width(in_width, p.taps, p.stride, crop_);
    }
    int crop() const { return crop_; }
    double preactivation_clearance() const { return pre_clearance_; }

    ConvKernelBank p;
    ConvKernelBank g;

  private:
    // kernels rearranged to D x (F*K) for the spread GEMM; rebuilt on demand.
    Eigen::MatrixXd spread_matrix() const;

    Act act_;
    double leak_;
    int crop_;
    bool has_cache_ = false;
    double pre_clearance_ = 0.0;
    int batch_ = 0;
    int in_width_ = 0;
    Eigen::MatrixXd v_cache_;  // (B*W_in) x D
    Eigen::MatrixXd out_;
};

}  // namespace csigan
