// Locale-independent number formatting and small CSV helpers.
// All machine output goes through these so that a fixed seed yields
// byte-identical files regardless of host locale.
#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clipsched {

inline std::string format_double(double v, int precision = 9) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Fixed-point decimal string from an integer amount of 10^-digits units,
// e.g. scaled_decimal(1234567, 6) == "1.234567". Exact, no floating point.
inline std::string scaled_decimal(std::int64_t amount, int digits) {
  bool neg = amount < 0;
  std::uint64_t a = neg ? static_cast<std::uint64_t>(-amount) : static_cast<std::uint64_t>(amount);
  std::uint64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  std::string frac = std::to_string(a % scale);
  frac.insert(frac.begin(), digits - static_cast<int>(frac.size()), '0');
  return (neg ? "-" : "") + std::to_string(a / scale) + "." + frac;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_i64(std::string_view s, std::int64_t& out) {
  s = trim(s);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline bool parse_f64(std::string_view s, double& out) {
  s = trim(s);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace clipsched
