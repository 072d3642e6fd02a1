#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "ecm/error.hpp"

namespace ecm {

// All cycle counts are kept exact; rounding happens only when printing.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses a plain decimal literal ("17.1", "-3", "2.5e1") into an exact value.
inline std::optional<Rational> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  BigInt digits = 0;
  long scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return std::nullopt;
  long exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
    ++i;
    const auto* first = text.data() + i;
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
  }
  exponent -= scale;
  Rational value(digits);
  BigInt power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
  if (exponent >= 0) {
    value *= power;
  } else {
    value /= power;
  }
  return negative ? Rational(-value) : value;
}

// Interprets a double by its shortest round-trip decimal form, so that the
// configured 2.3 GHz is the rational 23/10 rather than the nearest binary value.
inline Rational exact(double value) {
  if (!std::isfinite(value)) throw DomainError("non-finite value has no exact representation");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw DomainError("cannot format value");
  return *parse_decimal(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

inline Rational exact(long long value) { return Rational(value); }
inline Rational exact(int value) { return Rational(value); }

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

inline bool is_integer(const Rational& value) {
  return boost::multiprecision::denominator(value) == 1;
}

inline BigInt floor_int(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  BigInt q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

inline BigInt ceil_int(const Rational& value) { return -floor_int(Rational(-value)); }

// Rounds to `decimals` fractional digits, ties away from zero.
inline Rational round_decimals(const Rational& value, unsigned decimals) {
  const BigInt scale = boost::multiprecision::pow(BigInt(10), decimals);
  const Rational scaled = value * scale;
  const Rational half(1, 2);
  BigInt units = scaled >= 0 ? floor_int(scaled + half) : BigInt(-floor_int(Rational(-scaled + half)));
  return Rational(units) / scale;
}

// Canonical text: integers without a fractional part, anything else rounded
// to one decimal ("17.1"). A value that rounds to an integer prints as one.
inline std::string format_tenths(const Rational& value) {
  const Rational rounded = round_decimals(value, 1);
  const BigInt tenths = boost::multiprecision::numerator(Rational(rounded * 10));
  BigInt magnitude = tenths < 0 ? BigInt(-tenths) : tenths;
  std::string out = tenths < 0 ? "-" : "";
  out += BigInt(magnitude / 10).str();
  const BigInt frac = BigInt(magnitude % 10);
  if (frac != 0) out += "." + frac.str();
  return out;
}

// Exact text: "2", "736/81".
inline std::string format_exact(const Rational& value) {
  if (is_integer(value)) return boost::multiprecision::numerator(value).str();
  return boost::multiprecision::numerator(value).str() + "/" +
         boost::multiprecision::denominator(value).str();
}

// Fixed-point text with the given number of decimals (ties away from zero).
inline std::string format_fixed(const Rational& value, unsigned decimals) {
  const Rational rounded = round_decimals(value, decimals);
  const BigInt scale = boost::multiprecision::pow(BigInt(10), decimals);
  const BigInt units = boost::multiprecision::numerator(Rational(rounded * scale));
  BigInt magnitude = units < 0 ? BigInt(-units) : units;
  std::string out = units < 0 ? "-" : "";
  out += BigInt(magnitude / scale).str();
  if (decimals > 0) {
    std::string frac = BigInt(magnitude % scale).str();
    out += "." + std::string(decimals - frac.size(), '0') + frac;
  }
  return out;
}

}  // namespace ecm
