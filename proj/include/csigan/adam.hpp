#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "csigan/layers.hpp"

namespace csigan {

struct AdamHyper {
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Moment accumulators for one parameter array, flat. t counts completed steps.
struct AdamState {
    Eigen::ArrayXd m;
    Eigen::ArrayXd v;
    long t = 0;

    explicit AdamState(Eigen::Index size = 0)
        : m(Eigen::ArrayXd::Zero(size)), v(Eigen::ArrayXd::Zero(size)) {}
};

// One bias-corrected Adam update in place. Throws on non-finite gradients
// without touching the parameters.
void adam_step(Eigen::Map<Eigen::ArrayXd> params, Eigen::Map<const Eigen::ArrayXd> grads,
               AdamState& state, const AdamHyper& hp);

// Optimizer instance over a fixed set of parameter arrays. Two optimizers
// may point at the same arrays (the shared discriminator/classifier weights
// are trained by two different Adam configurations, each with its own
// moments).
class AdamOpt {
  public:
    AdamOpt(AdamHyper hp, std::vector<ParamRef> refs);

    void step();

    const AdamHyper& hyper() const { return hp_; }
    long steps_taken() const;

  private:
    AdamHyper hp_;
    std::vector<ParamRef> refs_;
    std::vector<AdamState> slots_;
};

}  // namespace csigan
