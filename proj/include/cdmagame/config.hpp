// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_CONFIG_HPP
#define CDMAGAME_CONFIG_HPP

#include "cdmagame/allocation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdmagame {

enum class Ordering { Random, Decreasing, Increasing };
enum class OutputFormat { Csv, Json };

std::string to_string(Ordering o);
Ordering ordering_from_string(std::string_view s);

inline constexpr const char *kExperimentNames[] = {"theory-vs-sim", "utility-vs-L", "inverse-power-vs-alpha",
                                                   "ordering-gain-vs-L", "property-suite"};

/// Run parameters. K and L are optional because their defaults depend on the
/// experiment; use resolved_K() and resolved_L().
struct ExperimentConfig {
    std::string experiment = "theory-vs-sim";
    std::optional<int> K;
    int N = 256;
    std::optional<std::vector<int>> L;
    double sigma2 = 1e-10;
    int M = 100;
    int trials = 1000;
    std::uint64_t seed = 1;
    std::vector<FilterKind> filters = {FilterKind::MF, FilterKind::MMSE, FilterKind::OPT, FilterKind::MF_SIC,
                                       FilterKind::MMSE_SIC};
    Ordering ordering = Ordering::Random;
    std::vector<double> alphaSweep;
    std::string output = "-";
    OutputFormat format = OutputFormat::Csv;
    int workers = 0; // 0: one per hardware thread

    int resolved_K() const;
    std::vector<int> resolved_L() const;
    std::vector<double> resolved_alpha_sweep() const;
    int resolved_workers() const;

    // Throws UsageError on an unknown experiment or out-of-range value.
    void validate() const;
};

std::vector<int> parse_int_list(std::string_view s);
std::vector<double> parse_double_list(std::string_view s);
// "all" expands to every filter.
std::vector<FilterKind> parse_filters(std::string_view s);

// Sets one option by its CLI name without dashes ("K", "alpha-sweep", ...).
void apply_option(ExperimentConfig &cfg, std::string_view key, std::string_view value);

// key=value lines; '#' starts a comment; blank lines are skipped.
std::map<std::string, std::string> read_config_file(const std::string &path);

} // namespace cdmagame

#endif
