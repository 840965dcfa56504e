// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/config.hpp"
#include "cdmagame/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <thread>

namespace cdmagame {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        parts.push_back(trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return parts;
}

template <class T>
T parse_number(std::string_view s, std::string_view what) {
    s = trim(s);
    T value{};
    const auto *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (s.empty() || ec != std::errc() || ptr != end)
        throw UsageError("invalid value '" + std::string(s) + "' for " + std::string(what));
    return value;
}

bool is_experiment(std::string_view name) {
    return std::any_of(std::begin(kExperimentNames), std::end(kExperimentNames),
                       [&](const char *e) { return name == e; });
}

} // namespace

std::string to_string(Ordering o) {
    switch (o) {
    case Ordering::Random:
        return "random";
    case Ordering::Decreasing:
        return "decreasing";
    case Ordering::Increasing:
        return "increasing";
    }
    return "?";
}

Ordering ordering_from_string(std::string_view s) {
    for (auto o : {Ordering::Random, Ordering::Decreasing, Ordering::Increasing})
        if (s == to_string(o))
            return o;
    throw UsageError("unknown ordering '" + std::string(s) + "'");
}

int ExperimentConfig::resolved_K() const {
    if (K)
        return *K;
    return experiment == "ordering-gain-vs-L" ? 128 : 32;
}

std::vector<int> ExperimentConfig::resolved_L() const {
    if (L)
        return *L;
    if (experiment == "theory-vs-sim")
        return {1, 2, 4, 8};
    if (experiment == "inverse-power-vs-alpha")
        return {8};
    if (experiment == "property-suite")
        return {4};
    return {1, 2, 4, 8, 16};
}

std::vector<double> ExperimentConfig::resolved_alpha_sweep() const {
    if (!alphaSweep.empty())
        return alphaSweep;
    std::vector<double> a;
    for (int i = 2; i <= 50; ++i)
        a.push_back(i / 100.0);
    return a;
}

int ExperimentConfig::resolved_workers() const {
    if (workers > 0)
        return workers;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void ExperimentConfig::validate() const {
    if (!is_experiment(experiment))
        throw UsageError("unknown experiment '" + experiment + "'");
    if (K && *K < 1)
        throw UsageError("K must be at least 1");
    if (N < 1)
        throw UsageError("N must be at least 1");
    if (L) {
        if (L->empty())
            throw UsageError("L list is empty");
        for (int l : *L)
            if (l < 1)
                throw UsageError("path counts must be at least 1");
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw UsageError("sigma2 must be positive");
    if (M < 2)
        throw UsageError("M must be at least 2");
    if (trials < 1)
        throw UsageError("trials must be at least 1");
    if (filters.empty())
        throw UsageError("no filter selected");
    for (double a : alphaSweep)
        if (!(a > 0.0) || !std::isfinite(a))
            throw UsageError("loads in the alpha sweep must be positive");
    if (workers < 0)
        throw UsageError("workers must be nonnegative");
    if (output.empty())
        throw UsageError("output path is empty");
}

std::vector<int> parse_int_list(std::string_view s) {
    std::vector<int> out;
    for (auto part : split(s))
        out.push_back(parse_number<int>(part, "integer list"));
    return out;
}

std::vector<double> parse_double_list(std::string_view s) {
    std::vector<double> out;
    for (auto part : split(s))
        out.push_back(parse_number<double>(part, "number list"));
    return out;
}

std::vector<FilterKind> parse_filters(std::string_view s) {
    std::vector<FilterKind> out;
    for (auto part : split(s)) {
        if (part == "all")
            return {FilterKind::MF, FilterKind::MMSE, FilterKind::OPT, FilterKind::MF_SIC, FilterKind::MMSE_SIC};
        try {
            const auto f = filter_from_string(part);
            if (std::find(out.begin(), out.end(), f) == out.end())
                out.push_back(f);
        } catch (const InvalidParameter &e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

void apply_option(ExperimentConfig &cfg, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "experiment")
        cfg.experiment = std::string(value);
    else if (key == "K")
        cfg.K = parse_number<int>(value, "K");
    else if (key == "N")
        cfg.N = parse_number<int>(value, "N");
    else if (key == "L")
        cfg.L = parse_int_list(value);
    else if (key == "sigma2")
        cfg.sigma2 = parse_number<double>(value, "sigma2");
    else if (key == "M")
        cfg.M = parse_number<int>(value, "M");
    else if (key == "trials")
        cfg.trials = parse_number<int>(value, "trials");
    else if (key == "seed")
        cfg.seed = parse_number<std::uint64_t>(value, "seed");
    else if (key == "filter")
        cfg.filters = parse_filters(value);
    else if (key == "ordering")
        cfg.ordering = ordering_from_string(value);
    else if (key == "alpha-sweep")
        cfg.alphaSweep = parse_double_list(value);
    else if (key == "output")
        cfg.output = std::string(value);
    else if (key == "format") {
        if (value == "csv")
            cfg.format = OutputFormat::Csv;
        else if (value == "json")
            cfg.format = OutputFormat::Json;
        else
            throw UsageError("unknown format '" + std::string(value) + "'");
    } else if (key == "workers")
        cfg.workers = parse_number<int>(value, "workers");
    else
        throw UsageError("unknown option '" + std::string(key) + "'");
}

std::map<std::string, std::string> read_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        std::string_view v(line);
        v = trim(v.substr(0, v.find('#')));
        if (v.empty())
            continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw UsageError(path + ":" + std::to_string(lineNo) + ": expected key=value");
        auto key = trim(v.substr(0, eq));
        if (key.starts_with("--"))
            key.remove_prefix(2);
        out[std::string(key)] = std::string(trim(v.substr(eq + 1)));
    }
    return out;
}

} // namespace cdmagame
