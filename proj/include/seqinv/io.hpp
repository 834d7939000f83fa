#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "seqinv/model.hpp"
#include "seqinv/verify.hpp"

namespace seqinv {

/// Shortest round-trip text for a double ("%.17g"), "inf"/"nan" otherwise.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> meta;  // written as "# ..." lines
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string render() const;
};

/// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Observation table with columns j, Y, X.
CsvTable observation_table(const ObservationSet& obs);

/// Log-log scatter of the fit points with the fitted line; deterministic output.
std::string render_rate_svg(const RateFit& fit, const std::string& title, const std::string& x_label);

}  // namespace seqinv
