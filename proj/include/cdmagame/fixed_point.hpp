// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_FIXED_POINT_HPP
#define CDMAGAME_FIXED_POINT_HPP

#include "cdmagame/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <string>

namespace cdmagame {

struct FixedPointOptions {
    double damping = 0.5;     // x <- (1 - damping) x + damping F(x)
    double tolerance = 1e-10; // relative sup-norm of F(x) - x
    int max_iterations = 500;
};

struct FixedPointResult {
    Eigen::VectorXd x;
    double residual = 0.0;
    int iterations = 0;
};

// Relative sup-norm distance used as the stopping rule of every fixed-point solve.
inline double relative_residual(const Eigen::VectorXd &x, const Eigen::VectorXd &fx) {
    if (x.size() == 0)
        return 0.0;
    const double diff = (fx - x).cwiseAbs().maxCoeff();
    const double scale = std::max(fx.cwiseAbs().maxCoeff(), x.cwiseAbs().maxCoeff());
    if (diff == 0.0)
        return 0.0;
    return diff / std::max(scale, std::numeric_limits<double>::min());
}

// Damped fixed-point iteration. The damping factor is halved whenever the
// residual grows, which tames oscillating maps.
template <class Map>
FixedPointResult solve_fixed_point(Map &&map, Eigen::VectorXd x0, const FixedPointOptions &opt,
                                   const std::string &what) {
    FixedPointResult out;
    out.x = std::move(x0);
    double lambda = opt.damping;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iterations; ++it) {
        Eigen::VectorXd fx = map(out.x);
        const double r = relative_residual(out.x, fx);
        out.iterations = it + 1;
        out.residual = r;
        if (r <= opt.tolerance) {
            out.x = std::move(fx);
            return out;
        }
        if (r > previous)
            lambda *= 0.5;
        previous = r;
        out.x = (1.0 - lambda) * out.x + lambda * fx;
    }
    throw ConvergenceFailure(what + " did not converge in " + std::to_string(opt.max_iterations) +
                                 " iterations",
                             out.residual);
}

} // namespace cdmagame

#endif
