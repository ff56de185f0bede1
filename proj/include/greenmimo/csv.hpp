#pragma once

#include <string>
#include <vector>

#include "greenmimo/harness.hpp"

namespace greenmimo {

/// Writes the table as CSV: a header row, one row per grid point, floats at
/// 17 significant digits (round-trip exact), "NA" for missing values and a
/// trailing note column. A sidecar at path + ".meta" records the command,
/// seed, trials, grid and the full config. Raises Error{Structural} on I/O
/// failure, naming the path.
void emit_csv(const CurveTable& table, const std::string& path);

/// Minimal CSV read-back for verification: header names and numeric cells
/// ("NA" becomes NaN; the note column is skipped).
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvData read_csv(const std::string& path);

}  // namespace greenmimo
