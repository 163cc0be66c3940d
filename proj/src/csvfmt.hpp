#pragma once

#include <optional>
#include <string>
#include <vector>

namespace spinmu {

// Fixed float formatting for deterministic artifacts: 12 significant digits,
// scientific when |v| < 1e-4 (and nonzero).
std::string csv_number(double v);
std::string csv_number(std::optional<double> v);  // empty field when absent

// Minimal CSV reader: returns the named columns as doubles, skipping rows
// where any requested field is empty or non-numeric.
struct CsvColumns {
    std::vector<std::vector<double>> columns;
};
CsvColumns read_csv_columns(const std::string& path, const std::vector<std::string>& names);

}  // namespace spinmu
