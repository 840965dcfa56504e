// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/properties.hpp"
#include "cdmagame/channel.hpp"
#include "cdmagame/errors.hpp"
#include "cdmagame/receivers.hpp"

#include <algorithm>
#include <cmath>

namespace cdmagame {

namespace {

std::vector<MultipathChannel> draw_channels(int K, int L, RandomStream rng) {
    std::vector<MultipathChannel> chans;
    chans.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        auto r = rng.substream(static_cast<std::uint64_t>(k));
        chans.push_back(sample_multipath(static_cast<std::size_t>(L), 1.0, r));
    }
    return chans;
}

Eigen::VectorXd energies_of(const std::vector<MultipathChannel> &chans) {
    Eigen::VectorXd e(static_cast<Eigen::Index>(chans.size()));
    for (std::size_t k = 0; k < chans.size(); ++k)
        e[static_cast<Eigen::Index>(k)] = total_energy(chans[k]);
    return e;
}

Eigen::VectorXd all_sinr(const SystemRealization &sys, FilterKind filter) {
    if (filter == FilterKind::MF)
        return sinr_mf_all(sys, InterferenceRule::full());
    Eigen::VectorXd out(static_cast<Eigen::Index>(sys.K));
    for (std::size_t k = 0; k < sys.K; ++k)
        out[static_cast<Eigen::Index>(k)] = sinr_mmse_exact(sys, k, InterferenceSet::all_but(k, sys.K));
    return out;
}

double median(std::vector<double> v) {
    if (v.empty())
        return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1)
        return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

} // namespace

DeviationScaling deviation_scaling(FilterKind filter, const std::vector<int> &Ns, double alpha, int L, int trials,
                                   std::uint64_t seed, double betaStar, double deviation) {
    if (filter != FilterKind::MF && filter != FilterKind::MMSE)
        throw InvalidParameter("deviation_scaling: only mf and mmse are supported");
    DeviationScaling out;
    const RandomStream root(seed);
    for (int N : Ns) {
        const int K = std::max(2, static_cast<int>(std::lround(alpha * N)));
        const double load = static_cast<double>(K) / N;
        std::vector<double> deltas;
        deltas.reserve(static_cast<std::size_t>(trials) * static_cast<std::size_t>(K - 1));
        for (int t = 0; t < trials; ++t) {
            const auto rng = root.substream(static_cast<std::uint64_t>(N)).substream(static_cast<std::uint64_t>(t));
            auto chans = draw_channels(K, L, rng.substream(0));
            const auto pa = pa_equilibrium(energies_of(chans), filter, betaStar, load, 1.0);
            auto spread = rng.substream(1);
            const auto sys = build_realization(std::move(chans), pa.powers, static_cast<std::size_t>(N), 1.0, spread);
            const Eigen::VectorXd before = all_sinr(sys, filter);
            Eigen::VectorXd p = pa.powers;
            p[0] = deviation * pa.powers.mean();
            const Eigen::VectorXd after = all_sinr(sys.with_powers(p), filter);
            for (int k = 1; k < K; ++k)
                deltas.push_back(std::abs(after[k] - before[k]));
        }
        out.N.push_back(N);
        out.medians.push_back(median(std::move(deltas)));
    }
    for (std::size_t i = 1; i < out.medians.size(); ++i)
        out.ratios.push_back(out.medians[i] / out.medians[i - 1]);
    return out;
}

double normalized_gain_deviation(int L, int K, int N, int draws, std::uint64_t seed) {
    const RandomStream root(seed);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(N);
    for (int t = 0; t < draws; ++t) {
        const auto chans = draw_channels(K, L, root.substream(static_cast<std::uint64_t>(t)));
        for (const auto &ch : chans)
            acc += dft_gains(ch, static_cast<std::size_t>(N)).cwiseAbs2() / total_energy(ch);
    }
    acc /= static_cast<double>(draws) * K;
    return (acc.array() - 1.0).abs().maxCoeff();
}

CapacityTriple capacity_triple(const ChannelProfile &profile) {
    CapacityTriple c;
    c.integral = capacity_opt_integral(profile);
    c.mmseIdentity = capacity_opt_prop3(profile);
    c.sic = capacity_mmse(solve_beta_sic(profile));
    return c;
}

std::vector<std::pair<std::string, ChannelProfile>> reference_profiles(std::uint64_t seed) {
    std::vector<std::pair<std::string, ChannelProfile>> out;
    out.emplace_back("flat", ChannelProfile::flat(1.0, 1.0, 1.0));

    const double a2 = 0.5;
    out.emplace_back("two-class",
                     ChannelProfile::from_function([](double, double) { return 1.0; },
                                                   [a2](double x) { return x < a2 / 2 ? 1.0 : 4.0; }, a2, 1.0, 1));

    const RandomStream root(seed);
    const int K = 64;
    for (int L : {2, 4}) {
        const auto chans = draw_channels(K, L, root.substream(static_cast<std::uint64_t>(L)));
        out.emplace_back("rayleigh-L" + std::to_string(L),
                         ChannelProfile::from_channels(chans, Eigen::VectorXd::Ones(K), 0.5, 0.1));
    }

    const double betaStar = solve_beta_star(goodput(100)).betaStar;
    const auto chans = draw_channels(K, 4, root.substream(100));
    const auto pa = pa_equilibrium(energies_of(chans), FilterKind::MMSE, betaStar, 0.125, 1.0);
    out.emplace_back("equilibrium-L4", ChannelProfile::from_channels(chans, pa.powers, 0.125, 1.0));
    return out;
}

double sic_recursion_gap(int cases, std::uint64_t seed, double betaStar) {
    const RandomStream root(seed);
    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
        auto rng = root.substream(static_cast<std::uint64_t>(c));
        const int K = 1 + static_cast<int>(rng.below(64));
        const int N = 1 + static_cast<int>(rng.below(512));
        const int L = (c % 2 == 0) ? 1 : (2 << rng.below(3)); // flat or 2, 4, 8 paths
        const auto filter = (c % 4 < 2) ? FilterKind::MF_SIC : FilterKind::MMSE_SIC;
        const Eigen::VectorXd e = energies_of(draw_channels(K, L, rng.substream(1)));
        const auto closed = pa_sic_closed(e, filter, betaStar, 1.0, N);
        const auto rec = pa_sic_recursive(e, filter, betaStar, 1.0, N);
        const double gap = ((closed.powers - rec.powers).array().abs() / closed.powers.array()).maxCoeff();
        worst = std::max(worst, gap);
    }
    return worst;
}

OrderingSearch ordering_search(int Kmax, int vectors, std::uint64_t seed, double betaStar, int N) {
    if (Kmax > 10)
        throw InvalidParameter("ordering_search: exhaustive search limited to K <= 10");
    OrderingSearch out;
    const RandomStream root(seed);
    constexpr double kTie = 1e-12;
    for (int K = 2; K <= Kmax; ++K) {
        std::uint64_t perms = 1;
        for (int i = 2; i <= K; ++i)
            perms *= static_cast<std::uint64_t>(i);
        for (int v = 0; v < vectors; ++v) {
            auto rng = root.substream(static_cast<std::uint64_t>(K)).substream(static_cast<std::uint64_t>(v));
            const Eigen::VectorXd e = energies_of(draw_channels(K, 1 + static_cast<int>(rng.below(4)), rng));
            for (auto filter : {FilterKind::MF_SIC, FilterKind::MMSE_SIC}) {
                double minPower = INFINITY, maxInverse = 0.0;
                for (std::uint64_t s = 0; s < perms; ++s) {
                    const auto pa = sic_allocation(e, decode_permutation(s, static_cast<std::size_t>(K)), filter,
                                                   betaStar, 1.0, N);
                    minPower = std::min(minPower, total_power(pa));
                    maxInverse = std::max(maxInverse, pa.powers.cwiseInverse().sum());
                }
                const auto dec = sic_allocation(e, rank_by_energy(e, EnergyDirection::Decreasing), filter,
                                                betaStar, 1.0, N);
                const auto inc = sic_allocation(e, rank_by_energy(e, EnergyDirection::Increasing), filter,
                                                betaStar, 1.0, N);
                ++out.cases;
                out.decreasingMinimisesPower += total_power(dec) <= minPower * (1 + kTie);
                out.decreasingMaximisesInversePower += dec.powers.cwiseInverse().sum() >= maxInverse * (1 - kTie);
                out.increasingMaximisesInversePower += inc.powers.cwiseInverse().sum() >= maxInverse * (1 - kTie);
            }
        }
    }
    return out;
}

} // namespace cdmagame
