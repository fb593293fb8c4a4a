#pragma once

// Table output for verification rows: CSV with a fixed header per command,
// or a JSON array of row objects with the same field names.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpz/verify.hpp"

namespace kpz::report {

using verify::Command;
using verify::VerificationRow;

inline std::vector<std::string> columns(Command c) {
  switch (c) {
    case Command::Theorem2:
      return {"k", "C", "T", "lhs", "rhs", "abs_diff", "rel_diff", "nodes", "tolerance", "pass", "error"};
    case Command::Theorem1:
      return {"u", "C", "T", "lhs", "rhs", "abs_diff", "rel_diff", "nodes", "tolerance", "pass", "error"};
    case Command::TwLimit:
      return {"a", "T", "C", "u", "lhs", "rhs", "abs_diff", "rel_diff", "nonincreasing", "tolerance",
              "pass", "error"};
    case Command::McCheck:
      return {"quantity", "k", "u", "C", "T", "lhs", "rhs", "abs_diff", "rel_diff", "stderr",
              "bias_bound", "flagged", "tolerance", "pass", "error"};
  }
  return {};
}

// 17 significant digits, '.' decimal point regardless of locale.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  for (auto& ch : s) {
    if (ch == ',') ch = '.';
  }
  return s;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline nlohmann::ordered_json field(const VerificationRow& r, const std::string& name) {
  auto real = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  if (name == "quantity") return r.quantity;
  if (name == "k") return r.k ? nlohmann::ordered_json(*r.k) : nullptr;
  if (name == "u") return r.u ? real(*r.u) : nullptr;
  if (name == "a") return r.a ? real(*r.a) : nullptr;
  if (name == "C") return real(r.C);
  if (name == "T") return real(r.T);
  if (name == "lhs") return real(r.lhs);
  if (name == "rhs") return real(r.rhs);
  if (name == "abs_diff") return real(r.abs_diff);
  if (name == "rel_diff") return real(r.rel_diff);
  if (name == "nodes") return r.nodes ? nlohmann::ordered_json(*r.nodes) : nullptr;
  if (name == "stderr") return r.std_error ? real(*r.std_error) : nullptr;
  if (name == "bias_bound") return r.bias_bound ? real(*r.bias_bound) : nullptr;
  if (name == "flagged") return r.flagged ? nlohmann::ordered_json(*r.flagged) : nullptr;
  if (name == "nonincreasing") return r.nonincreasing ? nlohmann::ordered_json(*r.nonincreasing) : nullptr;
  if (name == "tolerance") return real(r.tolerance);
  if (name == "pass") return r.pass;
  if (name == "error") return r.error;
  return nullptr;
}

inline std::string csv_cell(const VerificationRow& r, const std::string& name) {
  const auto v = field(r, name);
  if (v.is_null()) {
    if (name == "lhs" || name == "rhs" || name == "abs_diff" || name == "rel_diff") return "nan";
    return "";
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_real(v.get<double>());
  return csv_quote(v.get<std::string>());
}

inline std::string to_csv(Command c, const std::vector<VerificationRow>& rows) {
  const auto cols = columns(c);
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\r\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + csv_cell(r, cols[i]);
    out += "\r\n";
  }
  return out;
}

inline std::string to_json(Command c, const std::vector<VerificationRow>& rows) {
  const auto cols = columns(c);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json obj;
    for (const auto& name : cols) obj[name] = field(r, name);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

// One line per failing row, for the diagnostic stream.
inline std::string describe_failure(Command c, const VerificationRow& r) {
  std::string s = std::string(verify::command_name(c)) + ": FAIL";
  if (!r.quantity.empty()) s += " " + r.quantity;
  if (r.k) s += " k=" + std::to_string(*r.k);
  if (r.a) s += " a=" + format_real(*r.a);
  if (r.u) s += " u=" + format_real(*r.u);
  s += " C=" + format_real(r.C) + " T=" + format_real(r.T);
  if (!r.error.empty()) return s + " error: " + r.error;
  s += " abs_diff=" + format_real(r.abs_diff) + " rel_diff=" + format_real(r.rel_diff);
  if (r.nonincreasing && !*r.nonincreasing) s += " (difference grew along T)";
  return s;
}

}  // namespace kpz::report
