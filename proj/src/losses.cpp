#include "csigan/losses.hpp"

#include <cmath>

#include "csigan/errors.hpp"

namespace csigan {

namespace {

double log_sum_exp(const Eigen::VectorXd& c) {
    const double shift = c.maxCoeff();
    return shift + std::log((c.array() - shift).exp().sum());
}

}  // namespace

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    require(logits.size() > 0, "softmax: empty logits");
    const double shift = logits.maxCoeff();
    Eigen::ArrayXd e = (logits.array() - shift).exp();
    return (e / e.sum()).matrix();
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd p(logits.rows(), logits.cols());
    for (Eigen::Index n = 0; n < logits.cols(); ++n) p.col(n) = softmax(logits.col(n));
    return p;
}

double lambda_real_prob(const Eigen::VectorXd& logits) {
    require(logits.size() > 0, "lambda_real_prob: empty logits");
    const double lse = log_sum_exp(logits);
    const double q = 1.0 / (1.0 + std::exp(-lse));
    // Keep the contract q in (0,1) strict even when lse saturates a double.
    if (q <= 0.0) return 1e-12;
    if (q >= 1.0) return 1.0 - 1e-12;
    return q;
}

Eigen::VectorXd lambda_real_prob_columns(const Eigen::MatrixXd& logits) {
    Eigen::VectorXd q(logits.cols());
    for (Eigen::Index n = 0; n < logits.cols(); ++n) q(n) = lambda_real_prob(logits.col(n));
    return q;
}

double categorical_ce(const Eigen::VectorXd& probs, int label) {
    require(label >= 0 && label < probs.size(), "categorical_ce: label out of range");
    return -std::log(clamp_prob(probs(label)));
}

double binary_ce(double q, int target) {
    require(target == 0 || target == 1, "binary_ce: target must be 0 or 1");
    const double p = clamp_prob(q);
    return target == 1 ? -std::log(p) : -std::log(1.0 - p);
}

double classifier_loss_grad(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                            Eigen::MatrixXd& d_logits) {
    const Eigen::Index batch = logits.cols();
    require(batch > 0, "classifier_loss_grad: empty batch");
    require(static_cast<Eigen::Index>(labels.size()) == batch,
            "classifier_loss_grad: labels/batch size mismatch");

    d_logits = softmax_columns(logits);
    double loss = 0.0;
    for (Eigen::Index n = 0; n < batch; ++n) {
        const int y = labels[static_cast<std::size_t>(n)];
        require(y >= 0 && y < logits.rows(), "classifier_loss_grad: label out of range");
        loss += -std::log(clamp_prob(d_logits(y, n)));
        d_logits(y, n) -= 1.0;
    }
    d_logits /= static_cast<double>(batch);
    return loss / static_cast<double>(batch);
}

double discriminator_loss_grad(const Eigen::MatrixXd& logits, double target,
                               Eigen::MatrixXd& d_logits) {
    const Eigen::Index batch = logits.cols();
    require(batch > 0, "discriminator_loss_grad: empty batch");
    require(target == 0.0 || target == 1.0, "discriminator_loss_grad: target must be 0 or 1");

    d_logits = softmax_columns(logits);
    double loss = 0.0;
    for (Eigen::Index n = 0; n < batch; ++n) {
        const double q = lambda_real_prob(logits.col(n));
        loss += binary_ce(q, static_cast<int>(target));
        d_logits.col(n) *= (q - target);
    }
    d_logits /= static_cast<double>(batch);
    return loss / static_cast<double>(batch);
}

}  // namespace csigan
