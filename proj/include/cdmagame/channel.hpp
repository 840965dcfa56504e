// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_CHANNEL_HPP
#define CDMAGAME_CHANNEL_HPP

#include "cdmagame/random.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace cdmagame {

using cdouble = std::complex<double>;

// Chip-spaced multipath channel of one user: path l has delay l chips.
struct MultipathChannel {
    std::vector<cdouble> paths; // complex path gains h_l
    double rho = 1.0;           // average channel power the paths were drawn with

    std::size_t path_count() const noexcept { return paths.size(); }
};

// Draws L i.i.d. circularly symmetric complex Gaussian paths.
//
// With an empty profile every path has variance rho / L. A non-empty profile
// gives relative path powers; it is normalised so that the variances sum to rho.
MultipathChannel sample_multipath(std::size_t L, double rho, RandomStream &rng,
                                  std::span<const double> profile = {});

// Frequency response sampled at N equispaced frequencies:
//   d_n = sum_l h_l exp(-2 pi i n l / N),  n = 0..N-1.
Eigen::VectorXcd dft_gains(const MultipathChannel &ch, std::size_t N);

// Sum of squared path magnitudes. Equals the mean of |d_n|^2 whenever N >= L.
double total_energy(const MultipathChannel &ch);

// N x K matrix with i.i.d. CN(0, 1/N) entries.
Eigen::MatrixXcd sample_spreading(std::size_t N, std::size_t K, RandomStream &rng);

// One draw of the chip-level model y = (H P^{1/2} (.) W) s + n.
struct SystemRealization {
    std::size_t N = 0;
    std::size_t K = 0;
    Eigen::MatrixXcd freqGains; // N x K, column k holds d_{k,n}
    Eigen::MatrixXcd spreading; // N x K, CN(0, 1/N) entries
    Eigen::VectorXd powers;     // length K, linear units
    double sigma2 = 1.0;
    std::vector<MultipathChannel> channels;

    double alpha() const noexcept { return static_cast<double>(K) / static_cast<double>(N); }

    // Total channel energy per user, mean_n |d_{k,n}|^2.
    Eigen::VectorXd energies() const;

    SystemRealization with_powers(Eigen::VectorXd p) const;
};

SystemRealization build_realization(std::vector<MultipathChannel> channels, Eigen::VectorXd powers,
                                    std::size_t N, double sigma2, RandomStream &rng);

} // namespace cdmagame

#endif
