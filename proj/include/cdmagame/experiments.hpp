// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_EXPERIMENTS_HPP
#define CDMAGAME_EXPERIMENTS_HPP

#include "cdmagame/config.hpp"
#include "cdmagame/records.hpp"

#include <functional>
#include <vector>

namespace cdmagame {

// Runs trials on cfg.resolved_workers() threads. Records come back grouped by
// trial in increasing order, so the output does not depend on the worker count.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig &cfg);

// Left side minus right side of the load equation at which the optimum filter
// and MMSE-SIC need the same mean inverse power:
//   a b* (b*/(1+b*)) (1 - a b+/(1+b+)) - b+ (1 - exp(-a b*/(1+b*))),  b+ = beta+(b*, a).
double alpha_crossover_equation(double alpha, double betaStar);

// Root of alpha_crossover_equation in (0, 1), excluding the trivial root at 0.
// Throws NoSolutionInBracket if the function keeps one sign on the scan grid.
double solve_alpha_crossover(double betaStar);

// Deterministic parallel map over [0, count).
void parallel_for(int count, int workers, const std::function<void(int)> &body);

} // namespace cdmagame

#endif
