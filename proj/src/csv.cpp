#include "greenmimo/csv.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "greenmimo/errors.hpp"

namespace greenmimo {

namespace {

std::string fmt(double v) {
  if (std::isnan(v) || std::isinf(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sanitize_note(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

void emit_csv(const CurveTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Structural, "cannot open '" + path + "' for writing");

  out << table.x_name;
  for (const auto& col : table.columns)
    out << ',' << col.name << "_mean" << ',' << col.name << "_se" << ','
        << col.name << "_count";
  out << ",note\n";

  for (std::size_t i = 0; i < table.x.size(); ++i) {
    out << fmt(table.x[i]);
    for (const auto& col : table.columns)
      out << ',' << fmt(col.mean[i]) << ',' << fmt(col.se[i]) << ','
          << col.count[i];
    out << ',' << (i < table.notes.size() ? sanitize_note(table.notes[i]) : "")
        << '\n';
  }
  out.flush();
  if (!out) fail(ErrorKind::Structural, "write failure on '" + path + "'");

  std::ofstream meta(path + ".meta", std::ios::trunc);
  if (!meta)
    fail(ErrorKind::Structural, "cannot open '" + path + ".meta' for writing");
  meta << "command=" << table.command << '\n';
  meta << "seed=" << table.seed << '\n';
  meta << "trials=" << table.trials << '\n';
  meta << "grid=";
  for (std::size_t i = 0; i < table.x.size(); ++i)
    meta << (i ? " " : "") << fmt(table.x[i]);
  meta << '\n';
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  meta << "timestamp_unix="
       << std::chrono::duration_cast<std::chrono::seconds>(now).count() << '\n';
  meta << serialize_config(table.config);
  meta.flush();
  if (!meta) fail(ErrorKind::Structural, "write failure on '" + path + ".meta'");
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Structural, "cannot open '" + path + "'");
  CsvData data;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {  // keep trailing empty fields
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (first) {
      data.header = cells;
      first = false;
      continue;
    }
    std::vector<double> row;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i)  // skip the note column
      row.push_back(cells[i] == "NA" ? std::nan("") : std::stod(cells[i]));
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace greenmimo
