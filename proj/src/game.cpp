// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/game.hpp"
#include "cdmagame/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cdmagame {

namespace {

constexpr double kScanStep = 0.01;
constexpr double kScanEnd = 100.0;

} // namespace

UtilityFunction goodput(int M) {
    if (M < 2)
        throw InvalidParameter("goodput: M must be at least 2, got " + std::to_string(M));
    const double m = M;
    UtilityFunction u;
    // -expm1(-b) keeps 1 - e^{-b} accurate for small b
    u.gamma = [m](double b) { return b <= 0.0 ? 0.0 : std::pow(-std::expm1(-b), m); };
    u.gammaPrime = [m](double b) {
        if (b <= 0.0)
            return 0.0;
        return m * std::exp(-b) * std::pow(-std::expm1(-b), m - 1.0);
    };
    u.description = "goodput(M=" + std::to_string(M) + ")";
    return u;
}

EquilibriumTarget solve_beta_star(const UtilityFunction &u) {
    if (!u.gamma || !u.gammaPrime)
        throw InvalidParameter("solve_beta_star: gamma and gammaPrime are both required");

    // g is treated as zero when it is lost in the rounding of gamma
    auto g = [&](double b) {
        const double gb = u.gamma(b);
        const double v = b * u.gammaPrime(b) - gb;
        return std::abs(v) <= 1e-14 * std::abs(gb) ? 0.0 : v;
    };

    double lo = 0.0;
    double hi = 0.0;
    bool seenPositive = false;
    bool found = false;
    for (int i = 1; kScanStep * i <= kScanEnd + 1e-9; ++i) {
        const double b = kScanStep * i;
        const double v = g(b);
        if (v > 0.0) {
            seenPositive = true;
            lo = b;
        } else if (seenPositive) {
            hi = b;
            found = true;
            break;
        }
    }
    if (!found)
        throw NoEquilibrium("solve_beta_star: beta gamma'(beta) - gamma(beta) has no sign change on (0, 100] for " +
                            u.description);

    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    double b = 0.5 * (lo + hi);

    // Newton on g with g'(b) = b gamma''(b) estimated from gamma'
    for (int i = 0; i < 4; ++i) {
        const double h = 1e-6 * b;
        const double dg = b * (u.gammaPrime(b + h) - u.gammaPrime(b - h)) / (2 * h);
        const double v = b * u.gammaPrime(b) - u.gamma(b);
        if (dg == 0.0)
            break;
        const double next = b - v / dg;
        if (!(next > lo - 1e-12 && next < hi + 1e-12))
            break;
        if (std::abs(next * u.gammaPrime(next) - u.gamma(next)) >= std::abs(v))
            break;
        b = next;
    }

    EquilibriumTarget t;
    t.betaStar = b;
    t.solverResidual = std::abs(b * u.gammaPrime(b) - u.gamma(b));
    return t;
}

double beta_plus_equation(double bp, double betaStar, double alpha) {
    const double load = alpha * bp / (1.0 + bp);
    return alpha * std::log2(1.0 + bp) - std::numbers::log2e * load +
           std::log2(1.0 + (1.0 / (1.0 + bp)) * alpha * bp / (1.0 - load)) -
           alpha * std::log2(1.0 + betaStar);
}

double solve_beta_plus(double betaStar, double alpha) {
    if (!(betaStar > 0.0))
        throw InvalidParameter("solve_beta_plus: betaStar must be positive");
    if (!(alpha > 0.0))
        throw InvalidParameter("solve_beta_plus: alpha must be positive");

    auto F = [&](double bp) { return beta_plus_equation(bp, betaStar, alpha); };
    // feasible range: alpha b / (1 + b) < 1
    double hi = betaStar;
    if (alpha >= 1.0)
        hi = std::min(hi, std::nextafter(1.0 / (alpha - 1.0), 0.0));
    double lo = 0.0;
    const double flo = F(lo);
    const double fhi = F(hi);
    if (!(flo <= 0.0 && fhi >= 0.0))
        throw NoSolutionInBracket("solve_beta_plus: no sign change on (0, " + std::to_string(hi) +
                                  "] for alpha=" + std::to_string(alpha));

    for (int i = 0; i < 300 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) < 0.0 ? lo : hi) = mid;
    }
    const double bp = 0.5 * (lo + hi);
    if (!(alpha * bp / (1.0 + bp) < 1.0))
        throw NoSolutionInBracket("solve_beta_plus: solution violates alpha < 1 + 1/beta+");
    return bp;
}

double utility(double betak, double Pk, const UtilityFunction &u) {
    if (!(Pk > 0.0))
        throw InvalidParameter("utility: power must be positive");
    return u.gamma(betak) / Pk;
}

} // namespace cdmagame
