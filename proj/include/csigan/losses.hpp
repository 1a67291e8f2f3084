#pragma once

#include <Eigen/Dense>
#include <vector>

namespace csigan {

// Probabilities are clamped into [kProbFloor, 1 - kProbFloor] before any log.
inline constexpr double kProbFloor = 1e-7;

inline double clamp_prob(double p) {
    if (p < kProbFloor) return kProbFloor;
    if (p > 1.0 - kProbFloor) return 1.0 - kProbFloor;
    return p;
}

// Shift-stabilized softmax over a logit vector.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Column-wise softmax over a logits matrix (classes x batch).
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

// Discriminator head: probability that the input is real,
// sum_m exp(c_m) / (sum_m exp(c_m) + 1) = sigmoid(logsumexp(c)).
// Strictly inside (0,1).
double lambda_real_prob(const Eigen::VectorXd& logits);

// Per-column lambda head over a logits matrix.
Eigen::VectorXd lambda_real_prob_columns(const Eigen::MatrixXd& logits);

// -log p[label]; label is a 0-based class index.
double categorical_ce(const Eigen::VectorXd& probs, int label);

// -[t log q + (1-t) log(1-q)] with q clamped; target is 0 or 1.
double binary_ce(double q, int target);

// Mean categorical cross-entropy of the softmax head over a batch of logits
// (classes x B), plus the gradient w.r.t. the logits:
// d = (softmax(c) - onehot(label)) / B.
double classifier_loss_grad(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                            Eigen::MatrixXd& d_logits);

// Mean binary cross-entropy of the lambda head against a shared target
// (1 = real, 0 = fake), plus the gradient w.r.t. the logits:
// d_col = softmax(c) * (q - target) / B.
double discriminator_loss_grad(const Eigen::MatrixXd& logits, double target,
                               Eigen::MatrixXd& d_logits);

}  // namespace csigan
