// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/records.hpp"
#include "cdmagame/errors.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

namespace cdmagame {

namespace {

template <class T>
std::string field(const std::optional<T> &v) {
    if (!v)
        return {};
    if constexpr (std::is_floating_point_v<T>)
        return format_double(*v);
    else
        return std::to_string(*v);
}

// Names and flags are plain tokens, but quote defensively.
std::string csv_text(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

template <class T>
nlohmann::json json_value(const std::optional<T> &v) {
    if (!v)
        return nullptr;
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(*v))
            return nullptr;
        // keep the exact shortest representation in the text
        return nlohmann::json::parse(format_double(*v));
    } else {
        return *v;
    }
}

} // namespace

std::string format_double(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void write_csv(std::ostream &os, const std::vector<ExperimentRecord> &records) {
    os << kCsvHeader << '\n';
    for (const auto &r : records) {
        os << csv_text(r.experiment) << ',' << field(r.trial) << ',' << field(r.user) << ',' << field(r.rank) << ','
           << field(r.L) << ',' << field(r.alpha) << ',' << csv_text(r.filter) << ',' << csv_text(r.ordering) << ','
           << field(r.power) << ',' << field(r.sinr) << ',' << field(r.utility) << ',' << csv_text(r.flag) << '\n';
    }
}

void write_json_lines(std::ostream &os, const std::vector<ExperimentRecord> &records) {
    for (const auto &r : records) {
        nlohmann::ordered_json j;
        j["experiment"] = r.experiment;
        j["trial"] = json_value(r.trial);
        j["user"] = json_value(r.user);
        j["rank"] = json_value(r.rank);
        j["L"] = json_value(r.L);
        j["alpha"] = json_value(r.alpha);
        j["filter"] = r.filter;
        j["ordering"] = r.ordering;
        j["power"] = json_value(r.power);
        j["sinr"] = json_value(r.sinr);
        j["utility"] = json_value(r.utility);
        j["flag"] = r.flag;
        os << j.dump() << '\n';
    }
}

void emit_records(const std::vector<ExperimentRecord> &records, OutputFormat format, const std::string &path) {
    auto write = [&](std::ostream &os) {
        if (format == OutputFormat::Csv)
            write_csv(os, records);
        else
            write_json_lines(os, records);
    };
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        if (!std::cout)
            throw Error("failed writing records to standard output");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open " + path + " for writing");
    write(out);
    out.flush();
    if (!out)
        throw Error("failed writing records to " + path);
}

} // namespace cdmagame
