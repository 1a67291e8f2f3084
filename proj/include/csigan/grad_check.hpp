#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace csigan {

struct GradCheckResult {
    double max_rel_err = 0.0;
    Eigen::Index worst_index = -1;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    Eigen::Index coords_checked = 0;
};

// Central-difference check of `analytic_grad` against f around x0. When
// max_coords > 0 and x0 is larger, a seeded random subset of coordinates is
// checked instead of all of them. Relative error uses
// |a - n| / max(|a|, |n|, 1e-6).
GradCheckResult grad_check(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, const Eigen::VectorXd& analytic_grad,
                           double h = 1e-5, Eigen::Index max_coords = 0,
                           std::uint64_t seed = 1);

}  // namespace csigan
