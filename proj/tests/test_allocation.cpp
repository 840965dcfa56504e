// SPDX-License-Identifier: Apache-2.0

#include "cdmagame/allocation.hpp"
#include "cdmagame/asymptotics.hpp"
#include "cdmagame/channel.hpp"
#include "cdmagame/errors.hpp"
#include "cdmagame/properties.hpp"
#include "cdmagame/receivers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace cdmagame;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kBetaStar = 6.47460037958936;

double cv(const Eigen::VectorXd &v) {
    const double m = v.mean();
    return std::sqrt((v.array() - m).square().mean()) / m;
}

} // namespace

TEST_CASE("filter names") {
    for (auto f : {FilterKind::MF, FilterKind::MMSE, FilterKind::OPT, FilterKind::MF_SIC, FilterKind::MMSE_SIC})
        CHECK(filter_from_string(to_string(f)) == f);
    CHECK(to_string(FilterKind::MMSE_SIC) == "mmse-sic");
    CHECK_THROWS_AS(filter_from_string("zf"), InvalidParameter);
}

TEST_CASE("MMSE equilibrium powers") {
    const auto pa = pa_equilibrium(Eigen::VectorXd::Ones(4), FilterKind::MMSE, 1.0, 1.0, 1.0);
    for (auto p : pa.powers)
        CHECK_THAT(p, WithinRel(2.0, 1e-15));
    // P = 2 in b = P / (s + a P / (1 + b)) gives back b = 1
    const auto beta = solve_beta_mmse(ChannelProfile::flat(1.0, 2.0, 1.0));
    CHECK_THAT(beta.values[7], WithinRel(1.0, 1e-9));
}

TEST_CASE("matched-filter equilibrium powers") {
    const auto pa = pa_equilibrium(Eigen::Vector2d(1.0, 2.0), FilterKind::MF, 0.5, 0.5, 1.0);
    CHECK_THAT(pa.powers[0], WithinRel(2.0 / 3.0, 1e-15));
    CHECK_THAT(pa.powers[1], WithinRel(1.0 / 3.0, 1e-15));
    // two flat atoms of mass 1/4 recover the target through the large-system MF formula
    Eigen::MatrixXd gain(1, 2);
    gain << 1.0, 2.0;
    const auto b = beta_mf(ChannelProfile::from_atoms(gain, pa.powers, 0.5, 1.0));
    CHECK_THAT(b.values[0], WithinRel(0.5, 1e-14));
    CHECK_THAT(b.values[1], WithinRel(0.5, 1e-14));
}

TEST_CASE("optimum-filter equilibrium powers use beta+") {
    const auto pa = pa_equilibrium(Eigen::Vector2d(1.0, 4.0), FilterKind::OPT, 6.48, 0.125, 1.0);
    REQUIRE(pa.target.betaPlus);
    const double bp = *pa.target.betaPlus;
    CHECK_THAT(bp, WithinRel(6.11684341194076, 1e-9));
    CHECK_THAT(pa.powers[0], WithinRel(bp / (1 - 0.125 * bp / (1 + bp)), 1e-14));
    CHECK_THAT(pa.powers[1], WithinRel(pa.powers[0] / 4, 1e-14));
}

TEST_CASE("feasibility bounds") {
    const Eigen::VectorXd e = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(pa_equilibrium(e, FilterKind::MF, 2.0, 1.0, 1.0), InfeasibleLoad);
    CHECK_THROWS_AS(pa_equilibrium(e, FilterKind::MF, 2.0, 0.5, 1.0), InfeasibleLoad); // equality
    CHECK_NOTHROW(pa_equilibrium(e, FilterKind::MF, 2.0, 0.49, 1.0));
    CHECK_THROWS_AS(pa_equilibrium(e, FilterKind::MMSE, 1.0, 2.0, 1.0), InfeasibleLoad);
    CHECK_NOTHROW(pa_equilibrium(e, FilterKind::MMSE, 1.0, 1.99, 1.0));
    try {
        pa_equilibrium(e, FilterKind::MF, 2.0, 1.0, 1.0);
    } catch (const InfeasibleLoad &err) {
        CHECK(err.bound() == "alpha < 1/beta*");
    }
    CHECK_THROWS_AS(pa_equilibrium(Eigen::Vector2d(1.0, 0.0), FilterKind::MMSE, 1.0, 0.5, 1.0), DegenerateChannel);
    CHECK_THROWS_AS(pa_equilibrium(e, FilterKind::MMSE, 1.0, 0.5, 1.0, 1.3), FeasibilityViolation);
    CHECK_THROWS_AS(pa_equilibrium(e, FilterKind::MF_SIC, 1.0, 0.5, 1.0), InvalidParameter);
}

TEST_CASE("SIC closed form") {
    const auto mf = pa_sic_closed(Eigen::Vector2d(1, 1), FilterKind::MF_SIC, 1.0, 1.0, 2);
    CHECK_THAT(mf.powers[0], WithinRel(1.5, 1e-15));
    CHECK_THAT(mf.powers[1], WithinRel(1.0, 1e-15));

    const Eigen::Vector3d e(2.0, 0.5, 4.0);
    const auto pa = pa_sic_closed(e, FilterKind::MMSE_SIC, kBetaStar, 0.3, 16);
    CHECK_THAT(pa.powers[2], WithinRel(0.3 * kBetaStar / 4.0, 1e-15));

    const auto wide = pa_sic_closed(e, FilterKind::MF_SIC, 1.0, 1.0, 100000000);
    for (int k = 0; k < 3; ++k)
        CHECK_THAT(wide.powers[k] * e[k], WithinRel(1.0, 1e-7));

    CHECK_THROWS_AS(pa_sic_closed(e, FilterKind::MMSE, 1.0, 1.0, 4), InvalidParameter);
    CHECK_THROWS_AS(pa_sic_closed(e, FilterKind::MF_SIC, 1.0, 1.0, 0), InvalidParameter);
    CHECK_THROWS_AS(pa_sic_closed(e, FilterKind::MF_SIC, 1.0, 1.0, 1, 0.5), FeasibilityViolation);
}

TEST_CASE("SIC recursion") {
    const auto one = pa_sic_recursive(Eigen::VectorXd::Constant(1, 2.0), FilterKind::MF_SIC, 3.0, 0.5, 8);
    CHECK_THAT(one.powers[0], WithinRel(0.75, 1e-15));

    const auto g = pa_sic_recursive(Eigen::VectorXd::Ones(3), FilterKind::MMSE_SIC, 1.0, 1.0, 4);
    CHECK_THAT(g.powers[2], WithinRel(1.0, 1e-15));
    CHECK_THAT(g.powers[1], WithinRel(1.125, 1e-15));
    CHECK_THAT(g.powers[0], WithinRel(1.125 * 1.125, 1e-15));

    CHECK(sic_recursion_gap(100, 5, kBetaStar) <= 1e-12);
}

TEST_CASE("SIC powers decrease with rank for equal energies") {
    for (auto f : {FilterKind::MF_SIC, FilterKind::MMSE_SIC}) {
        const auto pa = pa_sic_closed(Eigen::VectorXd::Ones(20), f, kBetaStar, 1.0, 32);
        for (int k = 1; k < 20; ++k)
            CHECK(pa.powers[k] <= pa.powers[k - 1]);
    }
}

TEST_CASE("SIC allocation by user follows the decoding order") {
    const Eigen::Vector3d e(1.0, 3.0, 2.0);
    const auto order = rank_by_energy(e);
    const auto pa = sic_allocation(e, order, FilterKind::MF_SIC, 1.0, 1.0, 2);
    // ranks: user 1 first, user 2 second, user 0 last
    CHECK_THAT(pa.powers[0], WithinRel(1.0, 1e-15));
    CHECK_THAT(pa.powers[2], WithinRel(1.5 / 2.0, 1e-15));
    CHECK_THAT(pa.powers[1], WithinRel(2.25 / 3.0, 1e-15));
}

TEST_CASE("ranking by energy") {
    const Eigen::Vector4d e(0.5, 2.0, 1.0, 3.0);
    CHECK(rank_by_energy(e).ranks == std::vector<int>{4, 2, 3, 1});
    CHECK(rank_by_energy(e, EnergyDirection::Increasing).ranks == std::vector<int>{1, 3, 2, 4});
    CHECK(rank_by_energy(Eigen::VectorXd::Ones(5)).ranks == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("analytical ranking from the energy distribution") {
    // L = 1: D(E) = 1 - exp(-E)
    const Eigen::Vector4d e(0.01, std::log(2.0), 50.0, 1.2);
    const auto r = rank_by_energy_cdf(e, 1, 1.0);
    CHECK(r[0] == 4);        // ceil(4 * 0.99)
    CHECK(r[1] == 2);        // ceil(4 * 0.5)
    CHECK(r[2] == 1);        // clamped from 0
    CHECK(r[3] == 2);        // ceil(4 * 0.301)
    CHECK_THROWS_AS(rank_by_energy_cdf(e, 0, 1.0), InvalidParameter);
}

TEST_CASE("permutation codec") {
    CHECK(decode_permutation(0, 4).ranks == std::vector<int>{1, 2, 3, 4});
    CHECK(decode_permutation(5, 3).ranks == std::vector<int>{3, 2, 1});
    for (std::uint64_t s = 0; s < 24; ++s)
        CHECK(encode_permutation(decode_permutation(s, 4)) == s);
    CHECK_THROWS_AS(decode_permutation(24, 4), InvalidSignal);
    CHECK_NOTHROW(decode_permutation(2432902008176639999ULL, 20));

    const auto big = decode_permutation(12345, 40);
    CHECK_NOTHROW(big.validate());
    CHECK(big.ranks == decode_permutation(12345, 40).ranks);
    CHECK(big.ranks != decode_permutation(12346, 40).ranks);
    CHECK_THROWS_AS(encode_permutation(big), InvalidParameter);
}

TEST_CASE("decoding order validation") {
    CHECK_THROWS_AS((DecodingOrder{{1, 1, 2}}.validate()), InvalidParameter);
    CHECK_THROWS_AS((DecodingOrder{{0, 1, 2}}.validate()), InvalidParameter);
    CHECK((DecodingOrder{{2, 3, 1}}.users_by_rank()) == std::vector<std::size_t>{2, 0, 1});
}

TEST_CASE("total power") {
    PowerAllocation pa;
    pa.powers = Eigen::Vector3d(1, 2, 3);
    CHECK(total_power(pa) == 6.0);

    const Eigen::Vector3d e(0.7, 2.5, 1.3);
    for (auto f : {FilterKind::MF_SIC, FilterKind::MMSE_SIC}) {
        const auto dec = sic_allocation(e, rank_by_energy(e), f, kBetaStar, 1.0, 4);
        const auto inc = sic_allocation(e, rank_by_energy(e, EnergyDirection::Increasing), f, kBetaStar, 1.0, 4);
        CHECK(total_power(dec) < total_power(inc));
    }
}

TEST_CASE("exhaustive ordering search") {
    const auto s = ordering_search(5, 20, 3, kBetaStar, 8);
    CHECK(s.cases == 4 * 20 * 2);
    CHECK(s.decreasingMinimisesPower == s.cases);
    // by the rearrangement inequality the sum of inverse powers is largest when
    // the weakest user is decoded first, not the strongest
    CHECK(s.increasingMaximisesInversePower == s.cases);
    CHECK(s.decreasingMaximisesInversePower == 0);
}

TEST_CASE("sum of inverse powers on a hand example") {
    // K = 2, N = 1, beta* = 1, sigma^2 = 1, E = (1, 2)
    const Eigen::Vector2d e(1.0, 2.0);
    const auto dec = sic_allocation(e, rank_by_energy(e), FilterKind::MF_SIC, 1.0, 1.0, 1);
    const auto inc = sic_allocation(e, rank_by_energy(e, EnergyDirection::Increasing), FilterKind::MF_SIC, 1.0, 1.0, 1);
    CHECK_THAT(total_power(dec), WithinRel(2.0, 1e-15));
    CHECK_THAT(total_power(inc), WithinRel(2.5, 1e-15));
    CHECK_THAT(dec.powers.cwiseInverse().sum(), WithinRel(2.0, 1e-15));
    CHECK_THAT(inc.powers.cwiseInverse().sum(), WithinRel(2.5, 1e-15));
}

TEST_CASE("equilibrium SINR on fresh realizations") {
    const int K = 32, N = 256, trials = 20;
    RandomStream root(17);
    double mf = 0, mmse = 0;
    for (int t = 0; t < trials; ++t) {
        auto rng = root.substream(static_cast<std::uint64_t>(t));
        std::vector<MultipathChannel> chans;
        Eigen::VectorXd e(K);
        for (int k = 0; k < K; ++k) {
            chans.push_back(sample_multipath(4, 1.0, rng));
            e[k] = total_energy(chans.back());
        }
        const double a = static_cast<double>(K) / N;
        const auto base = build_realization(chans, Eigen::VectorXd::Ones(K), N, 1e-10, rng);
        const auto sysMf = base.with_powers(pa_equilibrium(e, FilterKind::MF, kBetaStar, a, 1e-10).powers);
        mf += sinr_mf_all(sysMf, InterferenceRule::full()).mean() / trials;
        const auto sysMmse = base.with_powers(pa_equilibrium(e, FilterKind::MMSE, kBetaStar, a, 1e-10).powers);
        for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k)
            mmse += sinr_mmse_exact(sysMmse, k, InterferenceSet::all_but(k, K)) / (trials * K);
    }
    CHECK_THAT(mf, WithinRel(kBetaStar, 0.05));
    CHECK_THAT(mmse, WithinRel(kBetaStar, 0.05));
}

TEST_CASE("equilibrium powers harden as paths are added") {
    RandomStream root(23);
    double prev = INFINITY;
    for (int L : {1, 2, 4, 8, 16}) {
        double mean = 0;
        const int draws = 1000;
        for (int d = 0; d < draws; ++d) {
            auto rng = root.substream(static_cast<std::uint64_t>(L)).substream(static_cast<std::uint64_t>(d));
            Eigen::VectorXd e(32);
            for (int k = 0; k < 32; ++k)
                e[k] = total_energy(sample_multipath(static_cast<std::size_t>(L), 1.0, rng));
            mean += cv(pa_equilibrium(e, FilterKind::MMSE, kBetaStar, 0.125, 1.0).powers) / draws;
        }
        CHECK(mean < prev);
        prev = mean;
    }
}

TEST_CASE("per-frequency interference at the MMSE equilibrium") {
    const int N = 256, L = 4;
    const double s2 = 1.0;
    // root-mean-square over draws of the coefficient of variation across n
    auto interference = [&](int K, int draws, std::uint64_t seed, double &meanLevel) {
        RandomStream root(seed);
        double cv2 = 0, level = 0;
        for (int d = 0; d < draws; ++d) {
            auto rng = root.substream(static_cast<std::uint64_t>(d));
            std::vector<MultipathChannel> chans;
            Eigen::VectorXd e(K);
            for (int k = 0; k < K; ++k) {
                chans.push_back(sample_multipath(L, 1.0, rng));
                e[k] = total_energy(chans.back());
            }
            const auto p = pa_equilibrium(e, FilterKind::MMSE, kBetaStar, static_cast<double>(K) / N, s2).powers;
            Eigen::VectorXd omega = Eigen::VectorXd::Zero(N);
            for (int k = 0; k < K; ++k)
                omega += p[k] * dft_gains(chans[static_cast<std::size_t>(k)], N).cwiseAbs2() / N;
            cv2 += cv(omega) * cv(omega);
            level += omega.mean();
        }
        meanLevel = level / draws;
        return std::sqrt(cv2 / draws);
    };
    double level8 = 0, level32 = 0, level128 = 0;
    const double cv8 = interference(8, 4000, 1, level8);
    const double cv32 = interference(32, 2000, 2, level32);
    const double cv128 = interference(128, 500, 3, level128);
    INFO("cv ratios " << cv32 / cv8 << " " << cv128 / cv32);
    CHECK(cv32 < cv8);
    CHECK(cv128 < cv32);
    // the mean square scales exactly as 1/K, so quadrupling K halves the spread
    CHECK_THAT(cv32 / cv8, WithinAbs(0.5, 0.03));
    CHECK_THAT(cv128 / cv32, WithinAbs(0.5, 0.03));

    const double a = 32.0 / N;
    CHECK_THAT(level32, WithinRel(a * kBetaStar * s2 / (1 - a * kBetaStar / (1 + kBetaStar)), 0.05));
}
