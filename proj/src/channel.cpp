// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/channel.hpp"
#include "cdmagame/errors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace cdmagame {

MultipathChannel sample_multipath(std::size_t L, double rho, RandomStream &rng,
                                  std::span<const double> profile) {
    if (L == 0)
        throw InvalidParameter("sample_multipath: path count must be at least 1");
    if (!(rho > 0.0))
        throw InvalidParameter("sample_multipath: average power must be positive");
    if (!profile.empty() && profile.size() != L)
        throw InvalidParameter("sample_multipath: profile length " + std::to_string(profile.size()) +
                               " does not match path count " + std::to_string(L));

    std::vector<double> variance(L, rho / static_cast<double>(L));
    if (!profile.empty()) {
        const double sum = std::accumulate(profile.begin(), profile.end(), 0.0);
        if (!(sum > 0.0))
            throw InvalidParameter("sample_multipath: profile must have positive mass");
        for (std::size_t l = 0; l < L; ++l) {
            if (profile[l] < 0.0)
                throw InvalidParameter("sample_multipath: negative profile entry");
            variance[l] = rho * profile[l] / sum;
        }
    }

    MultipathChannel ch;
    ch.rho = rho;
    ch.paths.reserve(L);
    for (std::size_t l = 0; l < L; ++l)
        ch.paths.push_back(rng.complex_normal(variance[l]));
    return ch;
}

Eigen::VectorXcd dft_gains(const MultipathChannel &ch, std::size_t N) {
    if (N == 0)
        throw InvalidParameter("dft_gains: N must be at least 1");

    // twiddle[m] = exp(-2 pi i m / N); indices are reduced mod N before lookup
    std::vector<cdouble> twiddle(N);
    for (std::size_t m = 0; m < N; ++m)
        twiddle[m] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) /
                                         static_cast<double>(N));

    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));
    for (std::size_t n = 0; n < N; ++n) {
        cdouble acc = 0.0;
        for (std::size_t l = 0; l < ch.paths.size(); ++l)
            acc += ch.paths[l] * twiddle[(n * l) % N];
        d[static_cast<Eigen::Index>(n)] = acc;
    }
    return d;
}

double total_energy(const MultipathChannel &ch) {
    double e = 0.0;
    for (const auto &h : ch.paths)
        e += std::norm(h);
    return e;
}

Eigen::MatrixXcd sample_spreading(std::size_t N, std::size_t K, RandomStream &rng) {
    if (N == 0 || K == 0)
        throw InvalidParameter("sample_spreading: N and K must be at least 1");
    const double variance = 1.0 / static_cast<double>(N);
    Eigen::MatrixXcd w(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(K));
    for (Eigen::Index k = 0; k < w.cols(); ++k)
        for (Eigen::Index n = 0; n < w.rows(); ++n)
            w(n, k) = rng.complex_normal(variance);
    return w;
}

Eigen::VectorXd SystemRealization::energies() const {
    return freqGains.cwiseAbs2().colwise().mean().transpose();
}

SystemRealization SystemRealization::with_powers(Eigen::VectorXd p) const {
    if (static_cast<std::size_t>(p.size()) != K)
        throw InvalidParameter("with_powers: expected " + std::to_string(K) + " powers");
    if ((p.array() < 0.0).any())
        throw InvalidParameter("with_powers: powers must be nonnegative");
    SystemRealization copy = *this;
    copy.powers = std::move(p);
    return copy;
}

SystemRealization build_realization(std::vector<MultipathChannel> channels, Eigen::VectorXd powers,
                                    std::size_t N, double sigma2, RandomStream &rng) {
    if (channels.empty())
        throw InvalidParameter("build_realization: at least one user is required");
    if (static_cast<std::size_t>(powers.size()) != channels.size())
        throw InvalidParameter("build_realization: " + std::to_string(channels.size()) +
                               " channels but " + std::to_string(powers.size()) + " powers");
    if ((powers.array() < 0.0).any())
        throw InvalidParameter("build_realization: powers must be nonnegative");
    if (!(sigma2 > 0.0))
        throw InvalidParameter("build_realization: noise variance must be positive");

    SystemRealization sys;
    sys.N = N;
    sys.K = channels.size();
    sys.freqGains.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(sys.K));
    for (std::size_t k = 0; k < sys.K; ++k)
        sys.freqGains.col(static_cast<Eigen::Index>(k)) = dft_gains(channels[k], N);
    sys.spreading = sample_spreading(N, sys.K, rng);
    sys.powers = std::move(powers);
    sys.sigma2 = sigma2;
    sys.channels = std::move(channels);
    return sys;
}

} // namespace cdmagame
