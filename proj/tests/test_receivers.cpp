// SPDX-License-Identifier: Apache-2.0

#include "cdmagame/errors.hpp"
#include "cdmagame/receivers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace cdmagame;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemRealization random_system(int K, int N, int L, std::uint64_t seed, double sigma2 = 0.1) {
    RandomStream rng(seed);
    std::vector<MultipathChannel> chans;
    Eigen::VectorXd p(K);
    for (int k = 0; k < K; ++k) {
        chans.push_back(sample_multipath(static_cast<std::size_t>(L), 1.0, rng));
        p[k] = 0.5 + rng.uniform();
    }
    return build_realization(chans, p, static_cast<std::size_t>(N), sigma2, rng);
}

// P_k v^H (G G^H + s I)^{-1} v by a dense inverse
double mmse_direct(const SystemRealization &sys, std::size_t k, const InterferenceSet &set) {
    const auto N = static_cast<Eigen::Index>(sys.N);
    Eigen::MatrixXcd R = sys.sigma2 * Eigen::MatrixXcd::Identity(N, N);
    for (auto j : set.members()) {
        const auto c = static_cast<Eigen::Index>(j);
        const Eigen::VectorXcd g = sys.freqGains.col(c).cwiseProduct(sys.spreading.col(c));
        R += sys.powers[c] * g * g.adjoint();
    }
    const auto c = static_cast<Eigen::Index>(k);
    const Eigen::VectorXcd v = sys.freqGains.col(c).cwiseProduct(sys.spreading.col(c));
    return sys.powers[c] * (v.adjoint() * R.inverse() * v)(0, 0).real();
}

} // namespace

TEST_CASE("interference sets") {
    CHECK(InterferenceSet::all_but(1, 4).members() == std::vector<std::size_t>{0, 2, 3});
    const int ranks[] = {2, 4, 1, 3};
    CHECK(InterferenceSet::decoded_after(0, ranks).members() == std::vector<std::size_t>{1, 3});
    CHECK(InterferenceSet::decoded_after(1, ranks).empty());
    CHECK(InterferenceSet::of(0, {3, 1, 3}).members() == std::vector<std::size_t>{1, 3});
    CHECK_THROWS_AS(InterferenceSet::of(1, {1, 2}), InvalidParameter);
    CHECK(InterferenceSet::all_but(0, 3).without(2).members() == std::vector<std::size_t>{1});
}

TEST_CASE("matched filter without interference") {
    const auto sys = random_system(3, 32, 4, 1);
    const double mean = sys.freqGains.col(0).cwiseAbs2().mean();
    CHECK_THAT(sinr_mf(sys, 0, InterferenceSet::of(0, {})), WithinRel(sys.powers[0] * mean / sys.sigma2, 1e-13));
}

TEST_CASE("matched filter flat single interferer") {
    // flat unit gains: b = P1 / (s + P2 / N)
    RandomStream rng(4);
    std::vector<MultipathChannel> chans(2, MultipathChannel{{1.0}, 1.0});
    const auto sys = build_realization(chans, Eigen::Vector2d(2.0, 3.0), 8, 0.5, rng);
    CHECK_THAT(sinr_mf(sys, 0, InterferenceSet::all_but(0, 2)), WithinRel(2.0 / (0.5 + 3.0 / 8), 1e-14));
}

TEST_CASE("batched matched filter agrees with the per-user form") {
    const auto sys = random_system(12, 64, 3, 2);
    const auto full = sinr_mf_all(sys, InterferenceRule::full());
    std::vector<int> ranks = {5, 3, 12, 1, 7, 2, 9, 4, 11, 6, 10, 8};
    const auto sic = sinr_mf_all(sys, InterferenceRule::sic(ranks));
    for (std::size_t k = 0; k < 12; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        CHECK_THAT(full[i], WithinRel(sinr_mf(sys, k, InterferenceSet::all_but(k, 12)), 1e-12));
        CHECK_THAT(sic[i], WithinRel(sinr_mf(sys, k, InterferenceSet::decoded_after(k, ranks)), 1e-12));
    }
}

TEST_CASE("exact MMSE matches a dense inverse") {
    // fewer interferers than chips and more interferers than chips
    for (auto [K, N] : {std::pair{6, 16}, std::pair{24, 8}}) {
        const auto sys = random_system(K, N, 2, 10 + static_cast<std::uint64_t>(K));
        for (std::size_t k = 0; k < static_cast<std::size_t>(K); k += 3) {
            const auto set = InterferenceSet::all_but(k, static_cast<std::size_t>(K));
            CHECK_THAT(sinr_mmse_exact(sys, k, set), WithinRel(mmse_direct(sys, k, set), 1e-9));
        }
    }
    const auto sys = random_system(4, 16, 2, 3);
    const Eigen::VectorXcd v = sys.freqGains.col(1).cwiseProduct(sys.spreading.col(1));
    CHECK_THAT(sinr_mmse_exact(sys, 1, InterferenceSet::of(1, {})),
               WithinRel(sys.powers[1] * v.squaredNorm() / sys.sigma2, 1e-13));
}

TEST_CASE("exact MMSE is at least the single-user bound reduction") {
    const auto sys = random_system(8, 32, 2, 5);
    for (std::size_t k = 0; k < 8; ++k) {
        const double full = sinr_mmse_exact(sys, k, InterferenceSet::all_but(k, 8));
        const double fewer = sinr_mmse_exact(sys, k, InterferenceSet::all_but(k, 8).without((k + 1) % 8));
        CHECK(fewer >= full);
    }
}

TEST_CASE("zero channel is degenerate") {
    RandomStream rng(1);
    std::vector<MultipathChannel> chans = {MultipathChannel{{0.0}, 1.0}, MultipathChannel{{1.0}, 1.0}};
    const auto sys = build_realization(chans, Eigen::Vector2d(1, 1), 8, 1.0, rng);
    CHECK_THROWS_AS(sinr_mf(sys, 0, InterferenceSet::all_but(0, 2)), DegenerateChannel);
    CHECK_THROWS_AS(sinr_mmse_exact(sys, 0, InterferenceSet::all_but(0, 2)), DegenerateChannel);
    CHECK_THROWS_AS(sinr_mf(sys, 5, InterferenceSet{}), InvalidParameter);
}

TEST_CASE("approximate MMSE on a flat equal-power system") {
    // b = P / (s + (K-1)/N P/(1+b))
    RandomStream rng(6);
    const int K = 16, N = 32;
    std::vector<MultipathChannel> chans(K, MultipathChannel{{1.0}, 1.0});
    const auto sys = build_realization(chans, Eigen::VectorXd::Ones(K), N, 1.0, rng);
    const auto beta = sinr_mmse_approx(sys, InterferenceRule::full());
    const double a = (K - 1.0) / N;
    // b^2 + b (1 + a - 1) - 1 = 0 with P = s = 1
    const double expected = (-a + std::sqrt(a * a + 4.0)) / 2.0;
    for (auto b : beta)
        CHECK_THAT(b, WithinRel(expected, 1e-9));
}

TEST_CASE("approximate MMSE tracks the exact SINR at N = 256") {
    const int K = 32, N = 256;
    const auto sys = random_system(K, N, 4, 21, 0.05);
    const auto approx = sinr_mmse_approx(sys, InterferenceRule::full());
    double meanApprox = 0, meanExact = 0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
        const double exact = sinr_mmse_exact(sys, k, InterferenceSet::all_but(k, K));
        // single users fluctuate by about 1/sqrt(N) around the deterministic value
        CHECK_THAT(approx[static_cast<Eigen::Index>(k)], WithinRel(exact, 0.25));
        meanApprox += approx[static_cast<Eigen::Index>(k)] / K;
        meanExact += exact / K;
    }
    CHECK_THAT(meanApprox, WithinRel(meanExact, 0.05));
}

TEST_CASE("approximate MMSE under SIC is an explicit backward sweep") {
    const int K = 6;
    const auto sys = random_system(K, 16, 2, 9);
    const std::vector<int> ranks = {3, 1, 6, 2, 5, 4};
    const auto beta = sinr_mmse_approx(sys, InterferenceRule::sic(ranks));
    // last decoded user sees noise only
    const auto last = 2;
    CHECK_THAT(beta[last], WithinRel(sys.powers[last] * sys.freqGains.col(last).cwiseAbs2().mean() / sys.sigma2,
                                     1e-13));
    // user at rank 5 sees only the rank-6 user
    const double N = 16;
    const Eigen::ArrayXd g4 = sys.freqGains.col(4).cwiseAbs2().array();
    const Eigen::ArrayXd load = sys.powers[last] * sys.freqGains.col(last).cwiseAbs2().array() / (N * (1 + beta[last]));
    CHECK_THAT(beta[4], WithinRel(sys.powers[4] * (g4 / (sys.sigma2 + load)).mean(), 1e-13));
    CHECK_THROWS_AS(sinr_mmse_approx(sys, InterferenceRule::sic({1, 1, 2, 3, 4, 5})), InvalidParameter);
}

TEST_CASE("finite capacity matches eigenvalues") {
    for (auto [K, N] : {std::pair{5, 12}, std::pair{12, 5}}) {
        const auto sys = random_system(K, N, 3, 30 + static_cast<std::uint64_t>(K));
        Eigen::MatrixXcd Y = sys.freqGains.cwiseProduct(sys.spreading);
        for (int k = 0; k < K; ++k)
            Y.col(k) *= std::sqrt(sys.powers[k]);
        const Eigen::MatrixXcd R = Y * Y.adjoint() / sys.sigma2;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
        const double expected = (1.0 + es.eigenvalues().array()).log().sum() / std::numbers::ln2 / N;
        CHECK_THAT(capacity_finite(sys), WithinRel(expected, 1e-10));
    }
}

TEST_CASE("sum of SIC MMSE rates equals the finite capacity") {
    // chain rule of log det: exact MMSE-SIC achieves capacity for any order
    const int K = 10, N = 24;
    const auto sys = random_system(K, N, 2, 44);
    const std::vector<int> ranks = {4, 9, 1, 7, 10, 2, 5, 8, 3, 6};
    double sum = 0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k)
        sum += std::log2(1 + sinr_mmse_exact(sys, k, InterferenceSet::decoded_after(k, ranks)));
    CHECK_THAT(sum / N, WithinRel(capacity_finite(sys), 1e-10));
}
