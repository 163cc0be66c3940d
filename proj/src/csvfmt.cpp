#include "csvfmt.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace spinmu {

std::string csv_number(double v) {
    if (v == 0.0) return "0";
    char buf[40];
    if (std::abs(v) < 1e-4) {
        std::snprintf(buf, sizeof(buf), "%.11e", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
    }
    return buf;
}

std::string csv_number(std::optional<double> v) { return v ? csv_number(*v) : std::string{}; }

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvColumns read_csv_columns(const std::string& path, const std::vector<std::string>& names) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV file: " + path);

    std::vector<std::string> header = split_csv_line(line);
    std::vector<std::size_t> idx;
    for (const auto& name : names) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ConfigError("CSV file " + path + " has no column '" + name + "'");
        idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    CsvColumns out;
    out.columns.resize(names.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        std::vector<double> parsed;
        parsed.reserve(names.size());
        bool ok = true;
        for (std::size_t k = 0; k < idx.size() && ok; ++k) {
            if (idx[k] >= fields.size() || fields[idx[k]].empty()) {
                ok = false;
                break;
            }
            try {
                parsed.push_back(std::stod(fields[idx[k]]));
            } catch (...) {
                ok = false;
            }
        }
        if (!ok) continue;
        for (std::size_t k = 0; k < parsed.size(); ++k) out.columns[k].push_back(parsed[k]);
    }
    return out;
}

}  // namespace spinmu
