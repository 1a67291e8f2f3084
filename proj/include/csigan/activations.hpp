#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace csigan {

enum class Act { None, Relu, LeakyRelu, Tanh };

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double leaky_relu(double x, double alpha) { return x > 0.0 ? x : alpha * x; }
inline double tanh_act(double x) { return std::tanh(x); }

inline Eigen::VectorXd relu(const Eigen::VectorXd& x) {
    return x.cwiseMax(0.0);
}

inline Eigen::VectorXd leaky_relu(const Eigen::VectorXd& x, double alpha) {
    return x.unaryExpr([alpha](double v) { return leaky_relu(v, alpha); });
}

inline Eigen::VectorXd tanh_act(const Eigen::VectorXd& x) {
    return x.array().tanh().matrix();
}

// In-place activation on a pre-activation matrix.
inline void apply_activation(Eigen::MatrixXd& m, Act act, double leak) {
    switch (act) {
        case Act::None:
            return;
        case Act::Relu:
            m = m.cwiseMax(0.0);
            return;
        case Act::LeakyRelu:
            m = m.unaryExpr([leak](double v) { return v > 0.0 ? v : leak * v; });
            return;
        case Act::Tanh:
            m = m.array().tanh().matrix();
            return;
    }
}

// Derivative expressed through the activated output. Valid because every
// activation here is sign-preserving (relu, leaky) or invertible (tanh),
// so the output alone determines the local slope.
inline Eigen::MatrixXd activation_deriv_from_output(const Eigen::MatrixXd& out, Act act,
                                                    double leak) {
    switch (act) {
        case Act::None:
            return Eigen::MatrixXd::Ones(out.rows(), out.cols());
        case Act::Relu:
            return out.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
        case Act::LeakyRelu:
            return out.unaryExpr([leak](double v) { return v > 0.0 ? 1.0 : leak; });
        case Act::Tanh:
            return (1.0 - out.array().square()).matrix();
    }
    return Eigen::MatrixXd();
}

}  // namespace csigan
