// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_RECORDS_HPP
#define CDMAGAME_RECORDS_HPP

#include "cdmagame/config.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cdmagame {

/// One output row. Unset numbers are written as empty CSV fields or JSON null.
///
/// Flags: "" per-user value, "aggregate" per-trial mean, "theory" analytical
/// value, "uniform" / "uniform-aggregate" for the uniform-power baseline,
/// "infeasible" and "unsupported" for skipped combinations, "pass" / "fail" for
/// property checks (filter = property name, power = measured, sinr = reference,
/// utility = tolerance).
struct ExperimentRecord {
    std::string experiment;
    std::optional<long long> trial;
    std::optional<long long> user;
    std::optional<long long> rank;
    std::optional<long long> L;
    std::optional<double> alpha;
    std::string filter;
    std::string ordering;
    std::optional<double> power;
    std::optional<double> sinr;
    std::optional<double> utility;
    std::string flag;
};

inline constexpr const char *kCsvHeader = "experiment,trial,user,rank,L,alpha,filter,ordering,power,sinr,utility,flag";

// Shortest decimal that reads back to the same double.
std::string format_double(double x);

void write_csv(std::ostream &os, const std::vector<ExperimentRecord> &records);
void write_json_lines(std::ostream &os, const std::vector<ExperimentRecord> &records);

// "-" writes to standard output. I/O errors name the path.
void emit_records(const std::vector<ExperimentRecord> &records, OutputFormat format, const std::string &path);

} // namespace cdmagame

#endif
