#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ecm/error.hpp"
#include "ecm/model.hpp"
#include "ecm/rational.hpp"

namespace ecm {

enum class NumberStyle { kCanonical, kExact };

inline std::string format_number(const Rational& v, NumberStyle style = NumberStyle::kCanonical) {
  return style == NumberStyle::kExact ? format_exact(v) : format_tenths(v);
}

// "{T_OL || T_nOL | T_L1L2 | T_L2L3 | T_L3Mem}"
inline std::string format_ecm(const ECMInput& in, NumberStyle style = NumberStyle::kCanonical) {
  return "{" + format_number(in.t_ol, style) + " || " + format_number(in.t_nol, style) + " | " +
         format_number(in.t_l1l2, style) + " | " + format_number(in.t_l2l3, style) + " | " +
         format_number(in.t_l3mem, style) + "}";
}

// "{T_core \ T_L2 \ T_L3 \ T_Mem}"
inline std::string format_ecm(const ECMPrediction& p, NumberStyle style = NumberStyle::kCanonical) {
  return "{" + format_number(p.t_core, style) + " \\ " + format_number(p.t_l2, style) + " \\ " +
         format_number(p.t_l3, style) + " \\ " + format_number(p.t_mem, style) + "}";
}

using ECMValue = std::variant<ECMInput, ECMPrediction>;

namespace detail {

class ShorthandParser {
 public:
  explicit ShorthandParser(std::string_view text) : text_(text) {}

  ECMValue parse() {
    skip_space();
    expect('{');
    std::vector<Rational> values{number()};
    skip_space();
    ECMValue result;
    if (peek() == '|') {
      expect('|');
      expect_exact('|', "expected '||' after the first value of an input");
      values.push_back(number());
      while (skip_space(), peek() == '|') {
        expect('|');
        values.push_back(number());
      }
      if (values.size() != 5) {
        throw ParseError("input shorthand needs 5 values, got " + std::to_string(values.size()), pos_);
      }
      result = ECMInput{values[0], values[1], values[2], values[3], values[4]};
    } else if (peek() == '\\') {
      while (skip_space(), peek() == '\\') {
        expect('\\');
        values.push_back(number());
      }
      if (values.size() != 4) {
        throw ParseError("prediction shorthand needs 4 values, got " + std::to_string(values.size()),
                         pos_);
      }
      result = ECMPrediction{values[0], values[1], values[2], values[3], false};
    } else {
      throw ParseError("expected '||' or '\\' separator", pos_);
    }
    expect('}');
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing characters", pos_);
    return result;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_space();
    expect_exact(c, std::string("expected '") + c + "'");
  }

  void expect_exact(char c, const std::string& message) {
    if (peek() != c) throw ParseError(message, pos_);
    ++pos_;
  }

  Rational number() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected a number", pos_);
    if (peek() == '.') {
      ++pos_;
      const std::size_t frac = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == frac) throw ParseError("expected digits after '.'", pos_);
    }
    Rational value = *parse_decimal(text_.substr(start, pos_ - start));
    if (peek() == '/' && pos_ == start + digits_before(start)) {
      ++pos_;
      const std::size_t den_start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == den_start) throw ParseError("expected a denominator after '/'", pos_);
      const Rational den = *parse_decimal(text_.substr(den_start, pos_ - den_start));
      if (den == 0) throw ParseError("zero denominator", den_start);
      value /= den;
    }
    return value;
  }

  // Length of the digit run starting at `from`.
  std::size_t digits_before(std::size_t from) const {
    std::size_t n = 0;
    while (from + n < text_.size() && std::isdigit(static_cast<unsigned char>(text_[from + n]))) ++n;
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses either shorthand form; values are decimals or exact fractions
// ("736/81"). Throws ParseError carrying the offending character position.
inline ECMValue parse_ecm(std::string_view text) { return detail::ShorthandParser(text).parse(); }

inline ECMInput parse_ecm_input(std::string_view text) {
  auto v = parse_ecm(text);
  if (!std::holds_alternative<ECMInput>(v)) throw ParseError("expected input shorthand", 0);
  return std::get<ECMInput>(v);
}

inline ECMPrediction parse_ecm_prediction(std::string_view text) {
  auto v = parse_ecm(text);
  if (!std::holds_alternative<ECMPrediction>(v)) throw ParseError("expected prediction shorthand", 0);
  return std::get<ECMPrediction>(v);
}

}  // namespace ecm
