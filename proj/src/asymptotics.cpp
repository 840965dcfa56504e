// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/asymptotics.hpp"
#include "cdmagame/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace cdmagame {

namespace {

constexpr double kLog2e = std::numbers::log2e;

Eigen::VectorXd periodic_weights(int n) {
    return Eigen::VectorXd::Constant(n, 1.0 / n);
}

// MMSE-type right-hand side for noise level `noise`:
//   F(b)_x = int rho(f,x) / (noise + D_f) df,  D_f = int rho(f,y) / (1 + b_y) dy.
Eigen::VectorXd interference_profile(const ChannelProfile &p, const Eigen::MatrixXd &rho,
                                     const Eigen::VectorXd &beta) {
    const Eigen::VectorXd w = p.xWeights.array() / (1.0 + beta.array());
    return rho * w;
}

} // namespace

void ChannelProfile::validate() const {
    if (gain.rows() == 0 || gain.cols() == 0)
        throw InvalidParameter("ChannelProfile: empty grid");
    if (power.size() != nx() || xWeights.size() != nx() || xSelfWeights.size() != nx() ||
        fWeights.size() != nf())
        throw InvalidParameter("ChannelProfile: grid sizes are inconsistent");
    if ((gain.array() < 0.0).any() || (power.array() < 0.0).any())
        throw InvalidParameter("ChannelProfile: profile must be nonnegative");
    if ((fWeights.array() <= 0.0).any() || (xWeights.array() <= 0.0).any())
        throw InvalidParameter("ChannelProfile: quadrature weights must be positive");
    if (std::abs(fWeights.sum() - 1.0) > 1e-12)
        throw InvalidParameter("ChannelProfile: frequency weights must sum to 1");
    if (!(alpha > 0.0) || std::abs(xWeights.sum() - alpha) > 1e-12 * std::max(1.0, alpha))
        throw InvalidParameter("ChannelProfile: user weights must sum to alpha");
    if (!(sigma2 > 0.0))
        throw InvalidParameter("ChannelProfile: noise variance must be positive");
}

ChannelProfile ChannelProfile::from_function(const std::function<double(double, double)> &gain,
                                             const std::function<double(double)> &power,
                                             double alpha, double sigma2, int nf, int nx) {
    if (nf < 1 || nx < 2)
        throw InvalidParameter("ChannelProfile: need nf >= 1 and nx >= 2");
    ChannelProfile p;
    p.alpha = alpha;
    p.sigma2 = sigma2;
    p.fWeights = periodic_weights(nf);
    const double h = alpha / (nx - 1);
    p.xWeights = Eigen::VectorXd::Constant(nx, h);
    p.xWeights[0] = p.xWeights[nx - 1] = h / 2;
    // trapezoid up to x_j counts half a step of node j itself, none at x = 0
    p.xSelfWeights = Eigen::VectorXd::Constant(nx, h / 2);
    p.xSelfWeights[0] = 0.0;
    p.gain.resize(nf, nx);
    p.power.resize(nx);
    for (int j = 0; j < nx; ++j) {
        const double x = h * j;
        p.power[j] = power(x);
        for (int i = 0; i < nf; ++i)
            p.gain(i, j) = gain(static_cast<double>(i) / nf, x);
    }
    p.validate();
    return p;
}

ChannelProfile ChannelProfile::flat(double alpha, double power, double sigma2, int nx) {
    return from_function([](double, double) { return 1.0; }, [power](double) { return power; },
                         alpha, sigma2, 1, nx);
}

ChannelProfile ChannelProfile::from_atoms(Eigen::MatrixXd gain, Eigen::VectorXd powers, double alpha,
                                          double sigma2) {
    const auto K = gain.cols();
    if (powers.size() != K)
        throw InvalidParameter("ChannelProfile: one power per atom is required");
    ChannelProfile p;
    p.alpha = alpha;
    p.sigma2 = sigma2;
    p.fWeights = periodic_weights(static_cast<int>(gain.rows()));
    p.xWeights = Eigen::VectorXd::Constant(K, alpha / static_cast<double>(K));
    // midpoint rule: half of each atom is decoded before its representative node
    p.xSelfWeights = p.xWeights / 2.0;
    p.gain = std::move(gain);
    p.power = std::move(powers);
    p.validate();
    return p;
}

ChannelProfile ChannelProfile::from_channels(const std::vector<MultipathChannel> &channels,
                                             const Eigen::VectorXd &powers, double alpha,
                                             double sigma2, int nf) {
    if (channels.empty())
        throw InvalidParameter("ChannelProfile: no channels");
    Eigen::MatrixXd g(nf, static_cast<Eigen::Index>(channels.size()));
    for (std::size_t k = 0; k < channels.size(); ++k)
        g.col(static_cast<Eigen::Index>(k)) = dft_gains(channels[k], static_cast<std::size_t>(nf)).cwiseAbs2();
    return from_atoms(std::move(g), powers, alpha, sigma2);
}

BetaFunction BetaFunction::constant(double beta, double alpha, int nodes) {
    BetaFunction b;
    b.values = Eigen::VectorXd::Constant(nodes, beta);
    b.weights = Eigen::VectorXd::Constant(nodes, alpha / nodes);
    return b;
}

BetaFunction beta_mf(const ChannelProfile &profile) {
    profile.validate();
    const Eigen::VectorXd H = profile.channel_energy();
    for (Eigen::Index j = 0; j < H.size(); ++j)
        if (H[j] == 0.0)
            throw DegenerateChannel("beta_mf: zero channel energy at x node " + std::to_string(j));

    // interference(x) = int int P(y)|h(f,y)|^2 |h(f,x)|^2 df dy
    const Eigen::VectorXd load = profile.rho() * profile.xWeights; // per f
    const Eigen::VectorXd interference =
        profile.gain.transpose() * profile.fWeights.cwiseProduct(load);

    BetaFunction b;
    b.kind = BetaKind::MF;
    b.weights = profile.xWeights;
    b.values = profile.power.array() * H.array().square() /
               (profile.sigma2 * H.array() + interference.array());
    return b;
}

BetaFunction solve_beta_mmse(const ChannelProfile &profile, const FixedPointOptions &opt,
                             const Eigen::VectorXd *initial) {
    profile.validate();
    const Eigen::MatrixXd rho = profile.rho();
    auto map = [&](const Eigen::VectorXd &beta) {
        const Eigen::VectorXd D = interference_profile(profile, rho, beta);
        const Eigen::VectorXd inv = (profile.sigma2 + D.array()).inverse();
        return Eigen::VectorXd(rho.transpose() * profile.fWeights.cwiseProduct(inv));
    };
    Eigen::VectorXd x0 = initial ? *initial : Eigen::VectorXd::Zero(profile.nx());
    if (x0.size() != profile.nx())
        throw InvalidParameter("solve_beta_mmse: initial guess has the wrong size");
    auto sol = solve_fixed_point(map, std::move(x0), opt, "solve_beta_mmse");

    BetaFunction b;
    b.kind = BetaKind::MMSE;
    b.values = std::move(sol.x);
    b.weights = profile.xWeights;
    b.residual = sol.residual;
    return b;
}

BetaFunction solve_beta_sic(const ChannelProfile &profile) {
    profile.validate();
    const Eigen::MatrixXd rho = profile.rho();
    const Eigen::Index nx = profile.nx();
    Eigen::VectorXd out(nx);
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(nx);
    double worst = 0.0;

    for (Eigen::Index j = 0; j < nx; ++j) {
        // users still present when node j is decoded: earlier nodes plus the part
        // of node j's own cell that lies before it
        const Eigen::Index n = j + 1;
        Eigen::VectorXd w = profile.xWeights.head(n);
        w[j] = profile.xSelfWeights[j];
        const auto sub = rho.leftCols(n);
        auto map = [&](const Eigen::VectorXd &beta) {
            const Eigen::VectorXd D = sub * (w.array() / (1.0 + beta.array())).matrix();
            const Eigen::VectorXd inv = (profile.sigma2 + D.array()).inverse();
            return Eigen::VectorXd(sub.transpose() * profile.fWeights.cwiseProduct(inv));
        };
        // the previous stage is a close starting point
        Eigen::VectorXd x0 = guess.head(n);
        if (j > 0)
            x0[j] = x0[j - 1];
        auto sol = solve_fixed_point(map, std::move(x0), FixedPointOptions{}, "solve_beta_sic");
        out[j] = sol.x[j];
        guess.head(n) = sol.x;
        worst = std::max(worst, sol.residual);
    }

    BetaFunction b;
    b.kind = BetaKind::SIC;
    b.values = std::move(out);
    b.weights = profile.xWeights;
    b.residual = worst;
    return b;
}

StieltjesSolution stieltjes_u(const ChannelProfile &profile, double z, const FixedPointOptions &opt) {
    if (!(z < 0.0))
        throw InvalidParameter("stieltjes_u: z must be negative");
    profile.validate();
    const Eigen::MatrixXd rho = profile.rho();
    auto beta_of = [&](const Eigen::VectorXd &u) {
        return Eigen::VectorXd(rho.transpose() * profile.fWeights.cwiseProduct(u));
    };
    auto map = [&](const Eigen::VectorXd &u) {
        const Eigen::VectorXd D = interference_profile(profile, rho, beta_of(u));
        return Eigen::VectorXd((D.array() - z).inverse());
    };
    // the empty-spectrum value -1/z bounds u from above
    auto sol = solve_fixed_point(map, Eigen::VectorXd::Constant(profile.nf(), -1.0 / z), opt,
                                 "stieltjes_u");
    StieltjesSolution s;
    s.beta = beta_of(sol.x);
    s.m = profile.fWeights.dot(sol.x);
    s.u = std::move(sol.x);
    s.residual = sol.residual;
    s.iterations = sol.iterations;
    return s;
}

double capacity_mmse(const BetaFunction &beta) {
    if (beta.values.size() != beta.weights.size())
        throw InvalidParameter("capacity_mmse: values and weights differ in length");
    return beta.weights.dot(beta.values.unaryExpr([](double b) { return std::log2(1.0 + b); }));
}

double capacity_opt_integral(const ChannelProfile &profile, double relative_tolerance) {
    profile.validate();
    const Eigen::MatrixXd rho = profile.rho();
    const double s2 = profile.sigma2;
    if (rho.isZero(0.0))
        return 0.0;

    // With z = s2 / t the integrand (1/z - m(-z)) dz becomes
    //   int D_f / (s2 + t D_f) df dt,  D_f = int rho(f,y) / (1 + b_y(z)) dy,
    // which is bounded on [0, 1] and needs no tail truncation.
    auto integrand = [&](double t) {
        Eigen::VectorXd D;
        if (t <= 0.0) {
            D = rho * profile.xWeights;
        } else {
            const auto sol = stieltjes_u(profile, -s2 / t);
            D = interference_profile(profile, rho, sol.beta);
        }
        return profile.fWeights.dot(Eigen::VectorXd(D.array() / (s2 + t * D.array())));
    };

    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, 0.0, 1.0, 15, relative_tolerance, &error);
    if (!std::isfinite(value) || error > relative_tolerance * std::abs(value) + 1e-300)
        throw IntegrationFailure("capacity_opt_integral: error estimate " + std::to_string(error) +
                                 " exceeds tolerance");
    return kLog2e * value;
}

double capacity_opt_prop3(const ChannelProfile &profile) {
    const BetaFunction beta = solve_beta_mmse(profile);
    const Eigen::MatrixXd rho = profile.rho();
    const Eigen::ArrayXd b = beta.values.array();
    const double linear = capacity_mmse(beta);
    const double correction = kLog2e * profile.xWeights.dot(Eigen::VectorXd(b / (1.0 + b)));
    const Eigen::VectorXd D = interference_profile(profile, rho, beta.values);
    const double gain =
        profile.fWeights.dot(Eigen::VectorXd((1.0 + D.array() / profile.sigma2).log() / std::numbers::ln2));
    return linear - correction + gain;
}

} // namespace cdmagame
