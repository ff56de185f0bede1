#include "greenmimo/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "greenmimo/errors.hpp"

namespace greenmimo {

int SystemConfig::heavy_user_count() const {
  return static_cast<int>(std::llround(rho * K));
}

std::vector<double> SystemConfig::per_user_ser() const {
  std::vector<double> ser(static_cast<std::size_t>(K), p_e_tolerant);
  int heavy = heavy_user_count();
  for (int i = 0; i < heavy && i < K; ++i) ser[static_cast<std::size_t>(i)] = p_e_sensitive;
  return ser;
}

void SystemConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::Parse, what); };
  if (K < 1) bad("K must be >= 1");
  if (N_t < 1) bad("N_t must be >= 1");
  if (N_r < 1) bad("N_r must be >= 1");
  if (!(sigma2 >= 0.0)) bad("sigma2 must be >= 0");
  if (!(tau >= 0.0 && tau <= 1.0)) bad("tau must lie in [0,1]");
  if (!(R_s > 0.0)) bad("R_s must be > 0");
  if (!(B > 0.0)) bad("B must be > 0");
  if (!(L_h > 0 && L_h < L)) bad("need 0 < L_h < L");
  if (!(r >= 0.0)) bad("r must be >= 0");
  if (!(P_0 >= 0.0)) bad("P_0 must be >= 0");
  if (b_min < 1) bad("b_min must be >= 1");
  if (b_total < N_t * b_min) bad("b_total must be >= N_t*b_min");
  if (!(p_e_sensitive > 0.0 && p_e_sensitive < 1.0)) bad("p_e_sensitive must lie in (0,1)");
  if (!(p_e_tolerant > 0.0 && p_e_tolerant < 1.0)) bad("p_e_tolerant must lie in (0,1)");
  if (!(rho >= 0.0 && rho <= 1.0)) bad("rho must lie in [0,1]");
  if (!(P_ref > 0.0)) bad("P_ref must be > 0");
  if (Q_0 < 0) bad("Q_0 must be >= 0");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(SystemConfig&, const std::string&, int)> set;
  std::function<std::string(const SystemConfig&)> get;
};

double parse_number(const std::string& value, const std::string& key, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "line " + std::to_string(line) + ": key '" + key +
                               "' has non-numeric value '" + value + "'");
  }
  while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
  if (pos != value.size())
    fail(ErrorKind::Parse, "line " + std::to_string(line) + ": key '" + key +
                               "' has trailing characters in '" + value + "'");
  return v;
}

template <class T>
Field numeric_field(T SystemConfig::* member) {
  return Field{
      [member](SystemConfig& cfg, const std::string& value, int line_no) {
        // key name is re-reported by the caller on range errors
        double v = parse_number(value, "", line_no);
        if constexpr (std::is_integral_v<T>) {
          constexpr double hi = 0.999 * static_cast<double>(std::numeric_limits<T>::max());
          if (v != std::floor(v) || std::abs(v) > hi)
            fail(ErrorKind::Parse,
                 "line " + std::to_string(line_no) +
                     ": expected an in-range integer, got '" + value + "'");
          cfg.*member = static_cast<T>(v);
        } else {
          cfg.*member = v;
        }
      },
      [member](const SystemConfig& cfg) {
        if constexpr (std::is_integral_v<T>)
          return std::to_string(cfg.*member);
        else
          return format_double(cfg.*member);
      }};
}

// Insertion order defines the canonical serialization order.
const std::vector<std::pair<std::string, Field>>& field_table() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"K", numeric_field(&SystemConfig::K)},
      {"N_t", numeric_field(&SystemConfig::N_t)},
      {"N_r", numeric_field(&SystemConfig::N_r)},
      {"sigma2", numeric_field(&SystemConfig::sigma2)},
      {"tau", numeric_field(&SystemConfig::tau)},
      {"R_s", numeric_field(&SystemConfig::R_s)},
      {"B", numeric_field(&SystemConfig::B)},
      {"L", numeric_field(&SystemConfig::L)},
      {"L_h", numeric_field(&SystemConfig::L_h)},
      {"r", numeric_field(&SystemConfig::r)},
      {"P_0", numeric_field(&SystemConfig::P_0)},
      {"b_total", numeric_field(&SystemConfig::b_total)},
      {"b_min", numeric_field(&SystemConfig::b_min)},
      {"p_e_sensitive", numeric_field(&SystemConfig::p_e_sensitive)},
      {"p_e_tolerant", numeric_field(&SystemConfig::p_e_tolerant)},
      {"rho", numeric_field(&SystemConfig::rho)},
      {"P_ref", numeric_field(&SystemConfig::P_ref)},
      {"Q_0", numeric_field(&SystemConfig::Q_0)},
  };
  return table;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  SystemConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Parse,
           "line " + std::to_string(line_no) + ": expected key=value, got '" + stripped + "'");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& [name, f] : field_table())
      if (name == key) { field = &f; break; }
    if (field == nullptr)
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    try {
      field->set(cfg, value, line_no);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Parse) throw;
      fail(ErrorKind::Parse, std::string(e.what()) + " (key '" + key + "')");
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Parse, std::string("config: ") + e.what());
  }
  return cfg;
}

std::string serialize_config(const SystemConfig& cfg) {
  std::string out;
  for (const auto& [name, field] : field_table()) {
    out += name;
    out += '=';
    out += field.get(cfg);
    out += '\n';
  }
  return out;
}

}  // namespace greenmimo
