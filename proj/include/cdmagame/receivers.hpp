// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_RECEIVERS_HPP
#define CDMAGAME_RECEIVERS_HPP

#include "cdmagame/channel.hpp"
#include "cdmagame/fixed_point.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace cdmagame {

// Users whose signals still interfere with a tagged user.
class InterferenceSet {
public:
    InterferenceSet() = default;

    // Every user except `tagged` (no cancellation).
    static InterferenceSet all_but(std::size_t tagged, std::size_t K);

    // Users decoded after `tagged` under SIC. ranks[u] is the 1-based decoding
    // rank of user u.
    static InterferenceSet decoded_after(std::size_t tagged, std::span<const int> ranks);

    static InterferenceSet of(std::size_t tagged, std::vector<std::size_t> members);

    const std::vector<std::size_t> &members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }

    // Copy with one member removed; no-op if absent.
    InterferenceSet without(std::size_t user) const;

private:
    std::vector<std::size_t> members_;
};

// Matched-filter SINR from the frequency-domain gains; the spreading codes
// enter only through their large-system average.
double sinr_mf(const SystemRealization &sys, std::size_t k, const InterferenceSet &interferers);

// Exact MMSE SINR  P_k v^H (G G^H + sigma^2 I)^{-1} v  with v = d_k (.) w_k and G
// built from the interferer columns. Solved through a Cholesky factorisation of
// whichever Gram matrix is smaller.
double sinr_mmse_exact(const SystemRealization &sys, std::size_t k, const InterferenceSet &interferers);

struct InterferenceRule {
    enum class Kind { Full, SicOrder };
    Kind kind = Kind::Full;
    std::vector<int> ranks; // 1-based decoding rank per user, SicOrder only

    static InterferenceRule full() { return {}; }
    static InterferenceRule sic(std::vector<int> ranks) { return {Kind::SicOrder, std::move(ranks)}; }
};

// Large-system MMSE approximation evaluated on the finite realization:
//   b_k = P_k mean_n |d_kn|^2 / (sigma^2 + (1/N) sum_{j in I_k} P_j |d_jn|^2 / (1 + b_j)).
// The full rule is a coupled fixed point; the SIC rule is explicit when swept
// from the last decoded user backwards.
Eigen::VectorXd sinr_mmse_approx(const SystemRealization &sys, const InterferenceRule &rule,
                                 const FixedPointOptions &opt = {});

// Matched-filter SINR of every user under `rule`, sharing one running load
// vector so the cost is O(K N) instead of O(K^2 N).
Eigen::VectorXd sinr_mf_all(const SystemRealization &sys, const InterferenceRule &rule);

// Shannon capacity per chip, (1/N) log2 det(I + Y Y^H / sigma^2), in bits.
double capacity_finite(const SystemRealization &sys);

} // namespace cdmagame

#endif
