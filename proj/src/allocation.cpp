// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/allocation.hpp"
#include "cdmagame/errors.hpp"
#include "cdmagame/random.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdmagame {

namespace {

void check_energies(const Eigen::VectorXd &energies, const char *who) {
    if (energies.size() == 0)
        throw InvalidParameter(std::string(who) + ": no users");
    for (Eigen::Index k = 0; k < energies.size(); ++k) {
        if (energies[k] == 0.0)
            throw DegenerateChannel(std::string(who) + ": user " + std::to_string(k) + " has zero channel energy");
        if (!(energies[k] > 0.0))
            throw InvalidParameter(std::string(who) + ": energies must be positive");
    }
}

void enforce_pmax(const Eigen::VectorXd &powers, double pmax, const char *who) {
    for (Eigen::Index k = 0; k < powers.size(); ++k)
        if (!(powers[k] <= pmax))
            throw FeasibilityViolation(std::string(who) + ": user " + std::to_string(k) + " needs power " +
                                       std::to_string(powers[k]) + " above Pmax " + std::to_string(pmax));
}

double sic_ratio(FilterKind filter, double betaStar) {
    switch (filter) {
    case FilterKind::MF_SIC:
        return betaStar;
    case FilterKind::MMSE_SIC:
        return betaStar / (1.0 + betaStar);
    default:
        throw InvalidParameter("SIC allocation needs mf-sic or mmse-sic, got " + to_string(filter));
    }
}

void check_sic_args(double betaStar, double sigma2, int N, const char *who) {
    if (N < 1)
        throw InvalidParameter(std::string(who) + ": N must be at least 1");
    if (!(betaStar > 0.0) || !(sigma2 > 0.0))
        throw InvalidParameter(std::string(who) + ": betaStar and sigma2 must be positive");
}

const std::uint64_t kFactorial[21] = {1ULL,
                                      1ULL,
                                      2ULL,
                                      6ULL,
                                      24ULL,
                                      120ULL,
                                      720ULL,
                                      5040ULL,
                                      40320ULL,
                                      362880ULL,
                                      3628800ULL,
                                      39916800ULL,
                                      479001600ULL,
                                      6227020800ULL,
                                      87178291200ULL,
                                      1307674368000ULL,
                                      20922789888000ULL,
                                      355687428096000ULL,
                                      6402373705728000ULL,
                                      121645100408832000ULL,
                                      2432902008176640000ULL};

} // namespace

std::string to_string(FilterKind f) {
    switch (f) {
    case FilterKind::MF:
        return "mf";
    case FilterKind::MMSE:
        return "mmse";
    case FilterKind::OPT:
        return "opt";
    case FilterKind::MF_SIC:
        return "mf-sic";
    case FilterKind::MMSE_SIC:
        return "mmse-sic";
    }
    return "?";
}

FilterKind filter_from_string(std::string_view s) {
    for (auto f : {FilterKind::MF, FilterKind::MMSE, FilterKind::OPT, FilterKind::MF_SIC, FilterKind::MMSE_SIC})
        if (s == to_string(f))
            return f;
    throw InvalidParameter("unknown filter '" + std::string(s) + "'");
}

DecodingOrder DecodingOrder::identity(std::size_t K) {
    DecodingOrder o;
    o.ranks.resize(K);
    std::iota(o.ranks.begin(), o.ranks.end(), 1);
    return o;
}

void DecodingOrder::validate() const {
    std::vector<char> seen(ranks.size(), 0);
    for (int r : ranks) {
        if (r < 1 || static_cast<std::size_t>(r) > ranks.size() || seen[r - 1])
            throw InvalidParameter("DecodingOrder: ranks are not a permutation of 1..K");
        seen[r - 1] = 1;
    }
}

std::vector<std::size_t> DecodingOrder::users_by_rank() const {
    validate();
    std::vector<std::size_t> users(ranks.size());
    for (std::size_t u = 0; u < ranks.size(); ++u)
        users[ranks[u] - 1] = u;
    return users;
}

double equilibrium_constant(FilterKind filter, double betaStar, double alpha, double sigma2, double *betaPlus) {
    if (!(betaStar > 0.0) || !(alpha > 0.0) || !(sigma2 > 0.0))
        throw InvalidParameter("equilibrium_constant: betaStar, alpha and sigma2 must be positive");
    switch (filter) {
    case FilterKind::MF: {
        const double bound = 1.0 / betaStar;
        if (!(alpha < bound))
            throw InfeasibleLoad("matched filter needs alpha < 1/beta* = " + std::to_string(bound),
                                 "alpha < 1/beta*");
        return sigma2 * betaStar / (1.0 - alpha * betaStar);
    }
    case FilterKind::MMSE: {
        const double bound = 1.0 + 1.0 / betaStar;
        if (!(alpha < bound))
            throw InfeasibleLoad("MMSE filter needs alpha < 1 + 1/beta* = " + std::to_string(bound),
                                 "alpha < 1 + 1/beta*");
        return sigma2 * betaStar / (1.0 - alpha * betaStar / (1.0 + betaStar));
    }
    case FilterKind::OPT: {
        double bp = 0.0;
        try {
            bp = solve_beta_plus(betaStar, alpha);
        } catch (const NoSolutionInBracket &e) {
            throw InfeasibleLoad(std::string("optimum filter: ") + e.what(), "alpha < 1 + 1/beta+");
        }
        const double bound = 1.0 + 1.0 / bp;
        if (!(alpha < bound))
            throw InfeasibleLoad("optimum filter needs alpha < 1 + 1/beta+ = " + std::to_string(bound),
                                 "alpha < 1 + 1/beta+");
        if (betaPlus)
            *betaPlus = bp;
        return sigma2 * bp / (1.0 - alpha * bp / (1.0 + bp));
    }
    default:
        throw InvalidParameter("equilibrium_constant: SIC receivers have rank-dependent powers");
    }
}

PowerAllocation pa_equilibrium(const Eigen::VectorXd &energies, FilterKind filter, double betaStar,
                               double alpha, double sigma2, double pmax) {
    check_energies(energies, "pa_equilibrium");
    double bp = 0.0;
    const double C = equilibrium_constant(filter, betaStar, alpha, sigma2, &bp);
    PowerAllocation pa;
    pa.filter = filter;
    pa.powers = C * energies.cwiseInverse();
    pa.target.betaStar = betaStar;
    if (filter == FilterKind::OPT) {
        pa.target.betaPlus = bp;
        pa.target.betaPlusAlpha = alpha;
    }
    enforce_pmax(pa.powers, pmax, "pa_equilibrium");
    return pa;
}

PowerAllocation pa_sic_closed(const Eigen::VectorXd &energiesByRank, FilterKind filter, double betaStar,
                              double sigma2, int N, double pmax) {
    check_energies(energiesByRank, "pa_sic_closed");
    check_sic_args(betaStar, sigma2, N, "pa_sic_closed");
    const double growth = 1.0 + sic_ratio(filter, betaStar) / N;
    const auto K = energiesByRank.size();
    PowerAllocation pa;
    pa.filter = filter;
    pa.target.betaStar = betaStar;
    pa.ordering = DecodingOrder::identity(static_cast<std::size_t>(K));
    pa.powers.resize(K);
    for (Eigen::Index k = 0; k < K; ++k)
        pa.powers[k] = sigma2 * betaStar / energiesByRank[k] * std::pow(growth, static_cast<double>(K - 1 - k));
    enforce_pmax(pa.powers, pmax, "pa_sic_closed");
    return pa;
}

PowerAllocation pa_sic_recursive(const Eigen::VectorXd &energiesByRank, FilterKind filter, double betaStar,
                                 double sigma2, int N, double pmax) {
    check_energies(energiesByRank, "pa_sic_recursive");
    check_sic_args(betaStar, sigma2, N, "pa_sic_recursive");
    const double c = sic_ratio(filter, betaStar) / N;
    const auto K = energiesByRank.size();
    PowerAllocation pa;
    pa.filter = filter;
    pa.target.betaStar = betaStar;
    pa.ordering = DecodingOrder::identity(static_cast<std::size_t>(K));
    pa.powers.resize(K);
    double later = 0.0; // sum of P_j E_j over users decoded after k
    for (Eigen::Index k = K - 1; k >= 0; --k) {
        const double received = betaStar * sigma2 + c * later;
        pa.powers[k] = received / energiesByRank[k];
        later += received;
    }
    enforce_pmax(pa.powers, pmax, "pa_sic_recursive");
    return pa;
}

PowerAllocation sic_allocation(const Eigen::VectorXd &energies, const DecodingOrder &order, FilterKind filter,
                               double betaStar, double sigma2, int N, double pmax) {
    if (order.ranks.size() != static_cast<std::size_t>(energies.size()))
        throw InvalidParameter("sic_allocation: order and energies differ in length");
    const auto users = order.users_by_rank();
    Eigen::VectorXd byRank(energies.size());
    for (std::size_t r = 0; r < users.size(); ++r)
        byRank[static_cast<Eigen::Index>(r)] = energies[static_cast<Eigen::Index>(users[r])];
    PowerAllocation ranked = pa_sic_closed(byRank, filter, betaStar, sigma2, N, pmax);
    PowerAllocation pa = ranked;
    for (std::size_t r = 0; r < users.size(); ++r)
        pa.powers[static_cast<Eigen::Index>(users[r])] = ranked.powers[static_cast<Eigen::Index>(r)];
    pa.ordering = order;
    return pa;
}

DecodingOrder rank_by_energy(const Eigen::VectorXd &energies, EnergyDirection direction) {
    const auto K = static_cast<std::size_t>(energies.size());
    std::vector<std::size_t> idx(K);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return direction == EnergyDirection::Decreasing ? energies[a] > energies[b] : energies[a] < energies[b];
    });
    DecodingOrder o;
    o.ranks.resize(K);
    for (std::size_t r = 0; r < K; ++r)
        o.ranks[idx[r]] = static_cast<int>(r + 1);
    return o;
}

std::vector<int> rank_by_energy_cdf(const Eigen::VectorXd &energies, int L, double rho) {
    if (L < 1 || !(rho > 0.0))
        throw InvalidParameter("rank_by_energy_cdf: need L >= 1 and rho > 0");
    const auto K = static_cast<int>(energies.size());
    std::vector<int> ranks(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double D = boost::math::gamma_p(static_cast<double>(L), std::max(0.0, energies[k]) * L / rho);
        const int r = static_cast<int>(std::ceil(K * (1.0 - D)));
        ranks[static_cast<std::size_t>(k)] = std::clamp(r, 1, K);
    }
    return ranks;
}

DecodingOrder decode_permutation(std::uint64_t signal, std::size_t K) {
    if (K == 0)
        throw InvalidParameter("decode_permutation: K must be positive");
    DecodingOrder o;
    o.ranks.resize(K);
    if (K > 20) {
        RandomStream rng(signal);
        std::iota(o.ranks.begin(), o.ranks.end(), 1);
        for (std::size_t i = K - 1; i > 0; --i)
            std::swap(o.ranks[i], o.ranks[rng.below(i + 1)]);
        return o;
    }
    if (signal >= kFactorial[K])
        throw InvalidSignal("decode_permutation: signal " + std::to_string(signal) + " outside [0, " +
                            std::to_string(K) + "!)");
    std::vector<int> pool(K);
    std::iota(pool.begin(), pool.end(), 1);
    for (std::size_t i = 0; i < K; ++i) {
        const std::uint64_t f = kFactorial[K - 1 - i];
        const auto digit = static_cast<std::size_t>(signal / f);
        signal %= f;
        o.ranks[i] = pool[digit];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return o;
}

std::uint64_t encode_permutation(const DecodingOrder &order) {
    order.validate();
    const std::size_t K = order.ranks.size();
    if (K > 20)
        throw InvalidParameter("encode_permutation: only K <= 20 has a factorial code");
    std::uint64_t signal = 0;
    for (std::size_t i = 0; i < K; ++i) {
        std::uint64_t smaller = 0;
        for (std::size_t j = i + 1; j < K; ++j)
            smaller += order.ranks[j] < order.ranks[i];
        signal += smaller * kFactorial[K - 1 - i];
    }
    return signal;
}

double total_power(const PowerAllocation &pa) { return pa.powers.sum(); }

} // namespace cdmagame
