#include "csigan/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "csigan/errors.hpp"
#include "csigan/rng.hpp"

namespace csigan {

GradCheckResult grad_check(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, const Eigen::VectorXd& analytic_grad,
                           double h, Eigen::Index max_coords, std::uint64_t seed) {
    require(h > 0.0, "grad_check: step size must be positive");
    require(x0.size() == analytic_grad.size(), "grad_check: gradient size mismatch");

    std::vector<Eigen::Index> coords(static_cast<std::size_t>(x0.size()));
    std::iota(coords.begin(), coords.end(), 0);
    if (max_coords > 0 && max_coords < x0.size()) {
        auto rng = make_engine(seed);
        std::shuffle(coords.begin(), coords.end(), rng);
        coords.resize(static_cast<std::size_t>(max_coords));
    }

    GradCheckResult res;
    Eigen::VectorXd x = x0;
    for (Eigen::Index i : coords) {
        const double orig = x(i);
        x(i) = orig + h;
        const double fp = f(x);
        x(i) = orig - h;
        const double fm = f(x);
        x(i) = orig;

        const double numeric = (fp - fm) / (2.0 * h);
        const double analytic = analytic_grad(i);
        const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
        const double rel = std::abs(numeric - analytic) / denom;
        if (rel > res.max_rel_err) {
            res.max_rel_err = rel;
            res.worst_index = i;
            res.analytic_at_worst = analytic;
            res.numeric_at_worst = numeric;
        }
        ++res.coords_checked;
    }
    return res;
}

}  // namespace csigan
