// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_ALLOCATION_HPP
#define CDMAGAME_ALLOCATION_HPP

#include "cdmagame/game.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdmagame {

enum class FilterKind { MF, MMSE, OPT, MF_SIC, MMSE_SIC };

// "mf", "mmse", "opt", "mf-sic", "mmse-sic"
std::string to_string(FilterKind f);
FilterKind filter_from_string(std::string_view s);
inline bool is_sic(FilterKind f) { return f == FilterKind::MF_SIC || f == FilterKind::MMSE_SIC; }

/// ranks[u] is the 1-based decoding rank of user u; rank 1 is decoded first.
struct DecodingOrder {
    std::vector<int> ranks;

    static DecodingOrder identity(std::size_t K);
    // Throws InvalidParameter unless ranks is a permutation of 1..K.
    void validate() const;
    // users_by_rank()[r] is the user decoded at rank r + 1.
    std::vector<std::size_t> users_by_rank() const;
};

inline constexpr double kUnlimitedPower = std::numeric_limits<double>::infinity();

struct PowerAllocation {
    Eigen::VectorXd powers; // per user, linear units
    FilterKind filter = FilterKind::MF;
    std::optional<DecodingOrder> ordering;
    EquilibriumTarget target;
};

// C in P_k = C / E_k for the non-SIC receivers. For OPT, betaPlus is solved
// internally and returned through `betaPlus` when given.
double equilibrium_constant(FilterKind filter, double betaStar, double alpha, double sigma2,
                            double *betaPlus = nullptr);

PowerAllocation pa_equilibrium(const Eigen::VectorXd &energies, FilterKind filter, double betaStar,
                               double alpha, double sigma2, double pmax = kUnlimitedPower);

// SIC allocations take energies listed in decoding order (entry 0 = rank 1) and
// return powers in the same order.
PowerAllocation pa_sic_closed(const Eigen::VectorXd &energiesByRank, FilterKind filter, double betaStar,
                              double sigma2, int N, double pmax = kUnlimitedPower);

// Backward recursion from the last decoded user:
//   P_k E_k = beta* sigma^2 + (c / N) sum_{j > k} P_j E_j,
// with c = beta* (MF-SIC) or beta* / (1 + beta*) (MMSE-SIC).
PowerAllocation pa_sic_recursive(const Eigen::VectorXd &energiesByRank, FilterKind filter,
                                 double betaStar, double sigma2, int N, double pmax = kUnlimitedPower);

// Per-user SIC allocation for an arbitrary decoding order (closed form).
PowerAllocation sic_allocation(const Eigen::VectorXd &energies, const DecodingOrder &order,
                               FilterKind filter, double betaStar, double sigma2, int N,
                               double pmax = kUnlimitedPower);

enum class EnergyDirection { Decreasing, Increasing };

// Sorting rule; ties go to the lower user id.
DecodingOrder rank_by_energy(const Eigen::VectorXd &energies,
                             EnergyDirection direction = EnergyDirection::Decreasing);

// Analytical variant ceil(K (1 - D(E_k))) clamped to [1, K], D the Gamma(L, rho/L)
// distribution function of the channel energy. Ranks may repeat.
std::vector<int> rank_by_energy_cdf(const Eigen::VectorXd &energies, int L, double rho);

// Factorial-number-system codec between signals 0..K!-1 and decoding orders.
// For K > 20 the signal seeds a Fisher-Yates shuffle instead and every value is
// accepted; encode_permutation is then unavailable.
DecodingOrder decode_permutation(std::uint64_t signal, std::size_t K);
std::uint64_t encode_permutation(const DecodingOrder &order);

double total_power(const PowerAllocation &pa);

} // namespace cdmagame

#endif
