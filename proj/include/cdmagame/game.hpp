// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_GAME_HPP
#define CDMAGAME_GAME_HPP

#include <functional>
#include <optional>
#include <string>

namespace cdmagame {

/// Throughput function gamma(beta) of a user together with its derivative.
/// The payoff of a user is gamma(beta_k) / P_k.
struct UtilityFunction {
    std::function<double(double)> gamma;
    std::function<double(double)> gammaPrime;
    std::string description;
};

// (1 - e^{-beta})^M, the probability that an M-bit packet goes through.
UtilityFunction goodput(int M);

struct EquilibriumTarget {
    double betaStar = 0.0;
    std::optional<double> betaPlus;
    std::optional<double> betaPlusAlpha; // load betaPlus was solved for
    double solverResidual = 0.0;         // |beta* gamma'(beta*) - gamma(beta*)|
};

// Nontrivial root of beta gamma'(beta) - gamma(beta) = 0. The bracket comes from
// scanning (0, 100] in steps of 0.01 for the first change of sign after the
// initial positive region; bisection then Newton polish.
EquilibriumTarget solve_beta_star(const UtilityFunction &u);

// SINR the MMSE stage of an optimum receiver must reach so that the optimum
// capacity at load alpha equals alpha log2(1 + betaStar).
double solve_beta_plus(double betaStar, double alpha);

// Left-hand side of the beta+ equation minus alpha log2(1 + betaStar).
double beta_plus_equation(double betaPlus, double betaStar, double alpha);

double utility(double betak, double Pk, const UtilityFunction &u);

} // namespace cdmagame

#endif
