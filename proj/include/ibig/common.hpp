#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <system_error>

namespace ibig {

// Tolerances shared by the engine and its checks.
inline constexpr double normalization_tolerance = 1e-9;
inline constexpr double oracle_tolerance = 1e-9;
inline constexpr double algebra_tolerance = 1e-12;
// Unnormalized sums below this are treated as total conflict.
inline constexpr double underflow_guard = 1e-300;

// A mass or argument outside its admissible range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Dempster normalization is undefined (all product mass fell on the empty set).
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Frame too large for the explicit 2^theta oracle.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Fixed 12 significant digits, locale independent. All textual output
// goes through here so golden files stay portable.
inline std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

// The double nearest to the 12-digit rendering; JSON writers emit the
// shortest round-trip form, which then equals format_number(value).
inline double round12(double value) {
  const std::string text = format_number(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

inline bool in_open_unit_interval(double m) { return m > 0.0 && m < 1.0; }

}  // namespace ibig
