#pragma once

#include <boost/rational.hpp>

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "msf/errors.hpp"

namespace msf {

/// Exact truth values, distances and thresholds.
using Rational = boost::rational<std::int64_t>;

namespace detail {
inline std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw Error("malformed rational '" + std::string(whole) + "'");
  }
  return value;
}
}  // namespace detail

/// Parses "p/q" or "p".
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(detail::parse_int(text, text));
  const auto num = detail::parse_int(text.substr(0, slash), text);
  const auto den = detail::parse_int(text.substr(slash + 1), text);
  if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// a ∸ b
inline Rational truncated_sub(const Rational& a, const Rational& b) {
  return a > b ? a - b : Rational(0);
}

inline Rational abs_diff(const Rational& a, const Rational& b) { return a > b ? a - b : b - a; }

}  // namespace msf
