// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_PROPERTIES_HPP
#define CDMAGAME_PROPERTIES_HPP

#include "cdmagame/allocation.hpp"
#include "cdmagame/asymptotics.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cdmagame {

// Median |delta beta_k| over trials and users k != 0 when user 0 leaves the
// equilibrium allocation for a power `deviation` times the mean equilibrium
// power. One entry per spreading length; ratios[i] = medians[i+1] / medians[i].
struct DeviationScaling {
    std::vector<int> N;
    std::vector<double> medians;
    std::vector<double> ratios;
};

DeviationScaling deviation_scaling(FilterKind filter, const std::vector<int> &Ns, double alpha, int L, int trials,
                                   std::uint64_t seed, double betaStar, double deviation = 10.0);

// Monte-Carlo mean over draws of (1/K) sum_j |d_{j,n}|^2 / E_j; returns the
// largest distance from 1 over the frequencies n.
double normalized_gain_deviation(int L, int K, int N, int draws, std::uint64_t seed);

struct CapacityTriple {
    double integral = 0.0;     // Stieltjes-transform integral
    double mmseIdentity = 0.0; // MMSE-based closed form
    double sic = 0.0;          // int log2(1 + beta_sic)
};

CapacityTriple capacity_triple(const ChannelProfile &profile);

// Flat, two-class power, Rayleigh atoms with L = 2 and L = 4, and an
// equilibrium-power population.
std::vector<std::pair<std::string, ChannelProfile>> reference_profiles(std::uint64_t seed);

// Largest relative difference between pa_sic_recursive and pa_sic_closed over
// random flat and frequency-selective populations (K <= 64, N <= 512).
double sic_recursion_gap(int cases, std::uint64_t seed, double betaStar);

struct OrderingSearch {
    int cases = 0;
    int decreasingMinimisesPower = 0;
    int decreasingMaximisesInversePower = 0;
    int increasingMaximisesInversePower = 0;
};

// Exhaustive search over all K! decoding orders for 2 <= K <= Kmax, both SIC
// receivers, `vectors` random energy draws per K.
OrderingSearch ordering_search(int Kmax, int vectors, std::uint64_t seed, double betaStar, int N);

} // namespace cdmagame

#endif
