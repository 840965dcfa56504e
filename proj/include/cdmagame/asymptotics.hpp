// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_ASYMPTOTICS_HPP
#define CDMAGAME_ASYMPTOTICS_HPP

#include "cdmagame/channel.hpp"
#include "cdmagame/fixed_point.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace cdmagame {

/// Discretised two-dimensional channel profile rho(f, x) = P(x) |h(f, x)|^2 of a
/// large system, f in [0, 1) the normalised frequency and x in [0, alpha] the
/// user index.
///
/// Integrals over f use `fWeights` (summing to 1) and integrals over x use
/// `xWeights` (summing to alpha). `xSelfWeights[j]` is the part of node j's own
/// cell that lies before x_j; it is needed by the successive-cancellation sweep
/// whose interference integral stops at x.
struct ChannelProfile {
    Eigen::MatrixXd gain;   // nF x nX, |h(f, x)|^2
    Eigen::VectorXd power;  // nX, P(x)
    Eigen::VectorXd fWeights;
    Eigen::VectorXd xWeights;
    Eigen::VectorXd xSelfWeights;
    double alpha = 1.0;
    double sigma2 = 1.0;

    Eigen::Index nf() const noexcept { return gain.rows(); }
    Eigen::Index nx() const noexcept { return gain.cols(); }

    // rho(f, x) on the grid.
    Eigen::MatrixXd rho() const { return gain * power.asDiagonal(); }

    // H(x) = int |h(f, x)|^2 df at every x node.
    Eigen::VectorXd channel_energy() const { return gain.transpose() * fWeights; }

    // Throws InvalidParameter when shapes, signs or weight sums are inconsistent.
    void validate() const;

    // Continuous profile on uniform grids: periodic trapezoid in f, trapezoid on
    // [0, alpha] in x (nodes at both ends).
    static ChannelProfile from_function(const std::function<double(double, double)> &gain,
                                        const std::function<double(double)> &power, double alpha,
                                        double sigma2, int nf = 128, int nx = 128);

    static ChannelProfile flat(double alpha, double power, double sigma2, int nx = 128);

    // K users as atoms of mass alpha / K, using |dft_gains|^2 on nf frequencies.
    static ChannelProfile from_channels(const std::vector<MultipathChannel> &channels,
                                        const Eigen::VectorXd &powers, double alpha, double sigma2,
                                        int nf = 128);

    // Atoms given directly by their gain columns (nf x K).
    static ChannelProfile from_atoms(Eigen::MatrixXd gain, Eigen::VectorXd powers, double alpha,
                                     double sigma2);
};

enum class BetaKind { MF, MMSE, SIC };

/// SINR as a function of the user index, sampled on the x nodes of a profile.
struct BetaFunction {
    Eigen::VectorXd values;
    Eigen::VectorXd weights; // x quadrature weights, summing to alpha
    BetaKind kind = BetaKind::MMSE;
    double residual = 0.0;

    static BetaFunction constant(double beta, double alpha, int nodes = 128);
};

BetaFunction beta_mf(const ChannelProfile &profile);

// Damped fixed point of
//   b(x) = P(x) int |h(f,x)|^2 / (sigma^2 + int P(y)|h(f,y)|^2 / (1 + b(y)) dy) df.
// `initial` defaults to zero.
BetaFunction solve_beta_mmse(const ChannelProfile &profile, const FixedPointOptions &opt = {},
                             const Eigen::VectorXd *initial = nullptr);

// SINR of user x when the users above x have already been cancelled:
//   b(x) = P(x) int |h(f,x)|^2 / (sigma^2 + int_0^x P(y)|h(f,y)|^2 / (1 + b_x(y)) dy) df,
// where b_x is the MMSE SINR profile of the remaining population [0, x]. Nodes
// are solved in increasing x, each warm-started from the previous one.
BetaFunction solve_beta_sic(const ChannelProfile &profile);

struct StieltjesSolution {
    Eigen::VectorXd u;    // u(f, z) at the f nodes
    Eigen::VectorXd beta; // int rho(f, x) u(f, z) df at the x nodes
    double m = 0.0;       // Stieltjes transform int u(f, z) df
    double residual = 0.0;
    int iterations = 0;
};

// Fixed point u(f,z) = 1 / (int rho(f,y) / (1 + int rho(f',y) u(f',z) df') dy - z), z < 0.
StieltjesSolution stieltjes_u(const ChannelProfile &profile, double z, const FixedPointOptions &opt = {});

// Sum of log2(1 + b) against the x weights; bits per chip.
double capacity_mmse(const BetaFunction &beta);

// Optimum-receiver capacity from the Stieltjes transform,
//   log2(e) int_{sigma^2}^inf (1/z - m(-z)) dz,
// integrated in t = sigma^2 / z over (0, 1] by adaptive Gauss-Kronrod.
double capacity_opt_integral(const ChannelProfile &profile, double relative_tolerance = 1e-6);

// Optimum-receiver capacity from the MMSE solution:
//   C_mmse - log2(e) int b/(1+b) dx + int log2(1 + (1/sigma^2) int rho/(1+b) dx) df.
double capacity_opt_prop3(const ChannelProfile &profile);

} // namespace cdmagame

#endif
