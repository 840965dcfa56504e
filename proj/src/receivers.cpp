// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/receivers.hpp"
#include "cdmagame/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cdmagame {

namespace {

void check_user(const SystemRealization &sys, std::size_t k, const char *who) {
    if (k >= sys.K)
        throw InvalidParameter(std::string(who) + ": user " + std::to_string(k) + " out of range");
    if (sys.freqGains.col(static_cast<Eigen::Index>(k)).cwiseAbs2().sum() == 0.0)
        throw DegenerateChannel(std::string(who) + ": user " + std::to_string(k) +
                                " has an all-zero channel");
}

Eigen::VectorXcd signature(const SystemRealization &sys, std::size_t k) {
    const auto c = static_cast<Eigen::Index>(k);
    return sys.freqGains.col(c).cwiseProduct(sys.spreading.col(c));
}

} // namespace

InterferenceSet InterferenceSet::all_but(std::size_t tagged, std::size_t K) {
    InterferenceSet s;
    s.members_.reserve(K);
    for (std::size_t j = 0; j < K; ++j)
        if (j != tagged)
            s.members_.push_back(j);
    return s;
}

InterferenceSet InterferenceSet::decoded_after(std::size_t tagged, std::span<const int> ranks) {
    if (tagged >= ranks.size())
        throw InvalidParameter("decoded_after: tagged user out of range");
    InterferenceSet s;
    for (std::size_t j = 0; j < ranks.size(); ++j)
        if (ranks[j] > ranks[tagged])
            s.members_.push_back(j);
    return s;
}

InterferenceSet InterferenceSet::of(std::size_t tagged, std::vector<std::size_t> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (std::binary_search(members.begin(), members.end(), tagged))
        throw InvalidParameter("InterferenceSet: the tagged user cannot interfere with itself");
    InterferenceSet s;
    s.members_ = std::move(members);
    return s;
}

InterferenceSet InterferenceSet::without(std::size_t user) const {
    InterferenceSet s;
    s.members_.reserve(members_.size());
    for (auto j : members_)
        if (j != user)
            s.members_.push_back(j);
    return s;
}

double sinr_mf(const SystemRealization &sys, std::size_t k, const InterferenceSet &interferers) {
    check_user(sys, k, "sinr_mf");
    const double N = static_cast<double>(sys.N);
    const Eigen::VectorXd gk = sys.freqGains.col(static_cast<Eigen::Index>(k)).cwiseAbs2();
    const double sum_k = gk.sum();

    Eigen::VectorXd load = Eigen::VectorXd::Zero(gk.size());
    for (auto j : interferers.members()) {
        const auto c = static_cast<Eigen::Index>(j);
        load += sys.powers[c] * sys.freqGains.col(c).cwiseAbs2();
    }
    const double mean_k = sum_k / N;
    const double noise = sys.sigma2 / N * sum_k;
    const double interference = gk.dot(load) / (N * N);
    return sys.powers[static_cast<Eigen::Index>(k)] * mean_k * mean_k / (noise + interference);
}

double sinr_mmse_exact(const SystemRealization &sys, std::size_t k, const InterferenceSet &interferers) {
    if (!(sys.sigma2 > 0.0))
        throw InvalidParameter("sinr_mmse_exact: noise variance must be positive");
    check_user(sys, k, "sinr_mmse_exact");

    const Eigen::VectorXcd v = signature(sys, k);
    const double pk = sys.powers[static_cast<Eigen::Index>(k)];
    const auto m = static_cast<Eigen::Index>(interferers.size());
    const auto N = static_cast<Eigen::Index>(sys.N);
    if (m == 0)
        return pk * v.squaredNorm() / sys.sigma2;

    Eigen::MatrixXcd G(N, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto j = static_cast<std::size_t>(interferers.members()[static_cast<std::size_t>(i)]);
        G.col(i) = std::sqrt(sys.powers[static_cast<Eigen::Index>(j)]) * signature(sys, j);
    }

    if (m < N) {
        // (G G^H + s I)^{-1} = (I - G (s I + G^H G)^{-1} G^H) / s; the quadratic form is
        // rewritten as a regularised least-squares residual, a sum of nonnegative terms.
        Eigen::MatrixXcd A = G.adjoint() * G;
        A.diagonal().array() += sys.sigma2;
        Eigen::LLT<Eigen::MatrixXcd> llt(A);
        if (llt.info() != Eigen::Success)
            throw Error("sinr_mmse_exact: Cholesky factorisation failed");
        const Eigen::VectorXcd c = llt.solve(G.adjoint() * v);
        const double residual = (v - G * c).squaredNorm() + sys.sigma2 * c.squaredNorm();
        return pk * residual / sys.sigma2;
    }

    Eigen::MatrixXcd R = G * G.adjoint();
    R.diagonal().array() += sys.sigma2;
    Eigen::LLT<Eigen::MatrixXcd> llt(R);
    if (llt.info() != Eigen::Success)
        throw Error("sinr_mmse_exact: Cholesky factorisation failed");
    return pk * v.dot(llt.solve(v)).real();
}

Eigen::VectorXd sinr_mmse_approx(const SystemRealization &sys, const InterferenceRule &rule,
                                 const FixedPointOptions &opt) {
    if (!(sys.sigma2 > 0.0))
        throw InvalidParameter("sinr_mmse_approx: noise variance must be positive");
    const auto K = static_cast<Eigen::Index>(sys.K);
    const double N = static_cast<double>(sys.N);
    for (std::size_t k = 0; k < sys.K; ++k)
        check_user(sys, k, "sinr_mmse_approx");

    const Eigen::MatrixXd g = sys.freqGains.cwiseAbs2(); // N x K
    if (rule.kind == InterferenceRule::Kind::SicOrder) {
        if (rule.ranks.size() != sys.K)
            throw InvalidParameter("sinr_mmse_approx: ranks must cover every user");
        std::vector<std::size_t> byRank(sys.K, sys.K);
        for (std::size_t u = 0; u < sys.K; ++u) {
            const int r = rule.ranks[u];
            if (r < 1 || static_cast<std::size_t>(r) > sys.K || byRank[static_cast<std::size_t>(r - 1)] != sys.K)
                throw InvalidParameter("sinr_mmse_approx: ranks must be a permutation of 1..K");
            byRank[static_cast<std::size_t>(r - 1)] = u;
        }
        Eigen::VectorXd beta(K);
        Eigen::VectorXd load = Eigen::VectorXd::Zero(g.rows()); // (1/N) sum over later users
        for (std::size_t r = sys.K; r-- > 0;) {
            const auto u = static_cast<Eigen::Index>(byRank[r]);
            const double b = sys.powers[u] *
                             (g.col(u).array() / (sys.sigma2 + load.array())).mean();
            beta[u] = b;
            load += sys.powers[u] * g.col(u) / (N * (1.0 + b));
        }
        return beta;
    }

    auto map = [&](const Eigen::VectorXd &beta) {
        const Eigen::VectorXd weight = sys.powers.array() / (1.0 + beta.array());
        const Eigen::VectorXd load = g * weight / N; // includes each user's own term
        Eigen::VectorXd next(K);
        for (Eigen::Index k = 0; k < K; ++k) {
            const Eigen::ArrayXd denom = sys.sigma2 + load.array() - weight[k] * g.col(k).array() / N;
            next[k] = sys.powers[k] * (g.col(k).array() / denom).mean();
        }
        return next;
    };
    return solve_fixed_point(map, Eigen::VectorXd::Zero(K), opt, "sinr_mmse_approx").x;
}

Eigen::VectorXd sinr_mf_all(const SystemRealization &sys, const InterferenceRule &rule) {
    const auto K = static_cast<Eigen::Index>(sys.K);
    const double N = static_cast<double>(sys.N);
    const Eigen::MatrixXd g = sys.freqGains.cwiseAbs2();
    const Eigen::VectorXd sums = g.colwise().sum().transpose();
    for (Eigen::Index k = 0; k < K; ++k)
        if (sums[k] == 0.0)
            throw DegenerateChannel("sinr_mf_all: user " + std::to_string(k) + " has an all-zero channel");

    auto sinr = [&](Eigen::Index k, const Eigen::VectorXd &load) {
        const double signal = sys.powers[k] * sums[k] * sums[k] / (N * N);
        const double noise = sys.sigma2 * sums[k] / N;
        return signal / (noise + g.col(k).dot(load) / (N * N));
    };

    Eigen::VectorXd out(K);
    if (rule.kind == InterferenceRule::Kind::Full) {
        const Eigen::VectorXd total = g * sys.powers;
        for (Eigen::Index k = 0; k < K; ++k)
            out[k] = sinr(k, total - sys.powers[k] * g.col(k));
        return out;
    }
    if (rule.ranks.size() != sys.K)
        throw InvalidParameter("sinr_mf_all: one rank per user is required");
    std::vector<Eigen::Index> byRank(sys.K, -1);
    for (Eigen::Index k = 0; k < K; ++k) {
        const int r = rule.ranks[static_cast<std::size_t>(k)];
        if (r < 1 || r > K || byRank[static_cast<std::size_t>(r - 1)] >= 0)
            throw InvalidParameter("sinr_mf_all: ranks are not a permutation of 1..K");
        byRank[static_cast<std::size_t>(r - 1)] = k;
    }
    Eigen::VectorXd later = Eigen::VectorXd::Zero(g.rows());
    for (auto it = byRank.rbegin(); it != byRank.rend(); ++it) {
        out[*it] = sinr(*it, later);
        later += sys.powers[*it] * g.col(*it);
    }
    return out;
}

double capacity_finite(const SystemRealization &sys) {
    if (!(sys.sigma2 > 0.0))
        throw InvalidParameter("capacity_finite: noise variance must be positive");
    const auto N = static_cast<Eigen::Index>(sys.N);
    const auto K = static_cast<Eigen::Index>(sys.K);
    Eigen::MatrixXcd Y = sys.freqGains.cwiseProduct(sys.spreading);
    for (Eigen::Index k = 0; k < K; ++k)
        Y.col(k) *= std::sqrt(sys.powers[k]);

    // det(I_N + Y Y^H / s) = det(I_K + Y^H Y / s)
    Eigen::MatrixXcd gram = (K < N) ? Eigen::MatrixXcd(Y.adjoint() * Y) : Eigen::MatrixXcd(Y * Y.adjoint());
    gram /= sys.sigma2;
    gram.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw Error("capacity_finite: Cholesky factorisation failed");
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal().real();
    return 2.0 * diag.array().log().sum() / std::numbers::ln2 / static_cast<double>(sys.N);
}

} // namespace cdmagame
