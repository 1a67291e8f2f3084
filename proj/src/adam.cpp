#include "csigan/adam.hpp"

#include <cmath>

#include "csigan/errors.hpp"

namespace csigan {

void adam_step(Eigen::Map<Eigen::ArrayXd> params, Eigen::Map<const Eigen::ArrayXd> grads,
               AdamState& state, const AdamHyper& hp) {
    require(params.size() == grads.size(), "adam_step: parameter/gradient size mismatch");
    require(state.m.size() == params.size() && state.v.size() == params.size(),
            "adam_step: moment shape mismatch");
    require(hp.lr > 0.0 && hp.beta1 >= 0.0 && hp.beta1 < 1.0 && hp.beta2 >= 0.0 &&
                hp.beta2 < 1.0 && hp.epsilon > 0.0,
            "adam_step: invalid hyperparameters");
    if (!grads.allFinite()) {
        Eigen::Index bad = 0;
        for (Eigen::Index i = 0; i < grads.size(); ++i)
            if (!std::isfinite(grads(i))) { bad = i; break; }
        ensure(false, "adam_step: non-finite gradient at flat index " + std::to_string(bad) +
                          " (t=" + std::to_string(state.t) + "); step aborted");
    }

    state.t += 1;
    state.m = hp.beta1 * state.m + (1.0 - hp.beta1) * grads;
    state.v = hp.beta2 * state.v + (1.0 - hp.beta2) * grads.square();
    const double m_corr = 1.0 - std::pow(hp.beta1, static_cast<double>(state.t));
    const double v_corr = 1.0 - std::pow(hp.beta2, static_cast<double>(state.t));
    params -= hp.lr * (state.m / m_corr) / ((state.v / v_corr).sqrt() + hp.epsilon);
}

AdamOpt::AdamOpt(AdamHyper hp, std::vector<ParamRef> refs) : hp_(hp), refs_(std::move(refs)) {
    slots_.reserve(refs_.size());
    for (const auto& r : refs_) slots_.emplace_back(r.size());
}

void AdamOpt::step() {
    for (std::size_t i = 0; i < refs_.size(); ++i) {
        auto& r = refs_[i];
        adam_step(Eigen::Map<Eigen::ArrayXd>(r.value, r.size()),
                  Eigen::Map<const Eigen::ArrayXd>(r.grad, r.size()), slots_[i], hp_);
    }
}

long AdamOpt::steps_taken() const { return slots_.empty() ? 0 : slots_.front().t; }

}  // namespace csigan
