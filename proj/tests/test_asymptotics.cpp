// SPDX-License-Identifier: Apache-2.0

#include "cdmagame/asymptotics.hpp"
#include "cdmagame/errors.hpp"
#include "cdmagame/properties.hpp"
#include "cdmagame/receivers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace cdmagame;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kGolden = 0.618033988749894848;

ChannelProfile zero_profile() { return ChannelProfile::flat(0.5, 0.0, 1.0); }

} // namespace

TEST_CASE("profile validation") {
    auto p = ChannelProfile::flat(1.0, 1.0, 1.0);
    CHECK_NOTHROW(p.validate());
    CHECK_THAT(p.xWeights.sum(), WithinRel(1.0, 1e-14));
    CHECK_THAT(p.fWeights.sum(), WithinRel(1.0, 1e-14));

    auto bad = p;
    bad.power[3] = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    bad = p;
    bad.xWeights *= 2.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    bad = p;
    bad.sigma2 = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("matched-filter SINR function") {
    const auto b = beta_mf(ChannelProfile::flat(1.0, 1.0, 1.0));
    CHECK(b.kind == BetaKind::MF);
    for (auto v : b.values)
        CHECK_THAT(v, WithinRel(0.5, 1e-14));

    for (auto v : beta_mf(zero_profile()).values)
        CHECK(v == 0.0);

    // vanishing load: no interference
    const auto p = ChannelProfile::from_function([](double f, double) { return 1.0 + 0.5 * std::cos(2 * M_PI * f); },
                                                 [](double x) { return 1.0 + x; }, 1e-9, 0.5, 64, 16);
    const auto small = beta_mf(p);
    const auto H = p.channel_energy();
    for (Eigen::Index j = 0; j < p.nx(); ++j)
        CHECK_THAT(small.values[j], WithinRel(p.power[j] * H[j] / p.sigma2, 1e-8));

    auto dead = ChannelProfile::flat(1.0, 1.0, 1.0);
    dead.gain(0, 5) = 0.0;
    CHECK_THROWS_AS(beta_mf(dead), DegenerateChannel);
}

TEST_CASE("MMSE SINR function") {
    const auto b = solve_beta_mmse(ChannelProfile::flat(1.0, 1.0, 1.0));
    for (auto v : b.values)
        CHECK_THAT(v, WithinRel(kGolden, 1e-9));
    CHECK(b.residual <= 1e-10);

    for (auto v : solve_beta_mmse(zero_profile()).values)
        CHECK(v == 0.0);
}

TEST_CASE("MMSE fixed point is unique from different starts") {
    const auto p = ChannelProfile::from_function(
        [](double f, double x) { return 1.0 + 0.8 * std::cos(2 * M_PI * (f + x)); }, [](double x) { return 0.5 + x; },
        0.75, 0.3);
    const Eigen::VectorXd ten = Eigen::VectorXd::Constant(p.nx(), 10.0);
    const auto a = solve_beta_mmse(p);
    const auto b = solve_beta_mmse(p, {}, &ten);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("MMSE SINR decreases with noise") {
    auto p = ChannelProfile::from_function([](double f, double) { return 1.0 + 0.5 * std::sin(2 * M_PI * f); },
                                           [](double x) { return 1.0 + 2.0 * x; }, 0.6, 0.5, 32, 32);
    const auto low = solve_beta_mmse(p);
    p.sigma2 = 0.8;
    const auto high = solve_beta_mmse(p);
    CHECK(((low.values - high.values).array() > 0.0).all());
}

TEST_CASE("MMSE SINR function against finite systems with two power classes") {
    // K = 128 users at N = 512: half at power 1, half at power 4, flat gains
    const int N = 512, K = 128;
    Eigen::VectorXd powers(K);
    powers.head(K / 2).setConstant(1.0);
    powers.tail(K / 2).setConstant(4.0);
    const auto profile = ChannelProfile::from_atoms(Eigen::MatrixXd::Ones(1, K), powers, 0.25, 1.0);
    const auto beta = solve_beta_mmse(profile);

    RandomStream rng(42);
    double sim[2] = {0, 0};
    const int trials = 6;
    for (int t = 0; t < trials; ++t) {
        std::vector<MultipathChannel> chans(K, MultipathChannel{{cdouble(1.0, 0.0)}, 1.0});
        const auto sys = build_realization(chans, powers, N, 1.0, rng);
        for (int k = 0; k < K; ++k)
            sim[k < K / 2 ? 0 : 1] += sinr_mmse_exact(sys, k, InterferenceSet::all_but(k, K)) / (trials * K / 2);
    }
    CHECK_THAT(sim[0], WithinRel(beta.values[0], 0.03));
    CHECK_THAT(sim[1], WithinRel(beta.values[K - 1], 0.03));
}

TEST_CASE("SIC SINR function") {
    const auto p = ChannelProfile::flat(1.0, 1.0, 1.0);
    const auto b = solve_beta_sic(p);
    CHECK(b.kind == BetaKind::SIC);
    CHECK_THAT(b.values[0], WithinRel(1.0, 1e-12)); // P H / sigma^2
    for (Eigen::Index j = 1; j < b.values.size(); ++j)
        CHECK(b.values[j] < b.values[j - 1]);
    CHECK(b.residual <= 1e-10);
}

TEST_CASE("Stieltjes fixed point") {
    const auto zero = stieltjes_u(zero_profile(), -2.0);
    CHECK_THAT(zero.u[0], WithinRel(0.5, 1e-15));
    CHECK_THAT(zero.m, WithinRel(0.5, 1e-15));

    const auto flat = stieltjes_u(ChannelProfile::flat(1.0, 1.0, 1.0), -1.0);
    CHECK_THAT(flat.u[0], WithinRel(kGolden, 1e-9));
    CHECK(flat.residual <= 1e-10);

    const auto p = ChannelProfile::flat(0.7, 2.0, 1.0);
    const double z = -1e7;
    CHECK_THAT(stieltjes_u(p, z).m * -z, WithinRel(1.0, 1e-5));
    CHECK_THROWS_AS(stieltjes_u(p, 0.5), InvalidParameter);
}

TEST_CASE("MMSE capacity") {
    CHECK_THAT(capacity_mmse(BetaFunction::constant(6.48, 0.125)), WithinRel(0.362879783764, 1e-10));
    CHECK(capacity_mmse(BetaFunction::constant(0.0, 0.3)) == 0.0);
    CHECK_THAT(capacity_mmse(BetaFunction::constant(1.0, 1.0)), WithinRel(1.0, 1e-14));
}

TEST_CASE("optimum capacity of flat profiles matches the closed form") {
    // closed form for i.i.d. spreading (alpha, snr) = (1, 1) and (0.5, 2)
    CHECK_THAT(capacity_opt_integral(ChannelProfile::flat(1.0, 1.0, 1.0)), WithinRel(0.837423357042570, 1e-4));
    CHECK_THAT(capacity_opt_integral(ChannelProfile::flat(0.5, 2.0, 1.0)), WithinRel(0.713221057289632, 1e-4));
    CHECK_THAT(capacity_opt_prop3(ChannelProfile::flat(1.0, 1.0, 1.0)), WithinRel(0.837423357042570, 1e-6));
}

TEST_CASE("optimum capacity edge cases") {
    CHECK(capacity_opt_integral(zero_profile()) == 0.0);
    CHECK_THAT(capacity_opt_prop3(zero_profile()), WithinAbs(0.0, 1e-15));

    const auto noisy = ChannelProfile::flat(0.8, 1.0, 1e6);
    const double c = capacity_opt_integral(noisy);
    CHECK(c > 0.0);
    CHECK(c <= 0.8 * M_LOG2E / 1e6);
}

TEST_CASE("capacity identities on the reference profiles") {
    for (const auto &[name, profile] : reference_profiles(7)) {
        INFO(name);
        const auto c = capacity_triple(profile);
        CHECK_THAT(c.mmseIdentity, WithinRel(c.integral, 1e-3));
        CHECK_THAT(c.sic, WithinRel(c.integral, 1e-3));
        // nonlinear processing gain
        CHECK(c.mmseIdentity >= capacity_mmse(solve_beta_mmse(profile)));
    }
}

TEST_CASE("grid refinement") {
    auto gain = [](double f, double x) { return 1.0 + 0.6 * std::cos(2 * M_PI * f) * std::cos(M_PI * x); };
    auto power = [](double x) { return 1.0 + x; };
    const auto coarse = ChannelProfile::from_function(gain, power, 0.5, 0.5);
    const auto fine = ChannelProfile::from_function(gain, power, 0.5, 0.5, 256, 256);
    CHECK_THAT(capacity_mmse(solve_beta_mmse(fine)), WithinAbs(capacity_mmse(solve_beta_mmse(coarse)), 1e-4));
    CHECK_THAT(capacity_opt_prop3(fine), WithinAbs(capacity_opt_prop3(coarse), 1e-4));
    CHECK_THAT(capacity_opt_integral(fine), WithinAbs(capacity_opt_integral(coarse), 1e-4));
}
