#include "ibc/money.hpp"

#include <cstdlib>

namespace ibc {

std::optional<Money> parse_money(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  constexpr std::int64_t kMaxWhole = INT64_MAX / Money::kUnitsPerMillion - 1;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    any_digit = true;
    const int d = c - '0';
    if (!seen_point) {
      whole = whole * 10 + d;
      if (whole > kMaxWhole) return std::nullopt;
    } else {
      if (++frac_digits > 6) return std::nullopt;
      frac = frac * 10 + d;
    }
  }
  if (!any_digit) return std::nullopt;
  for (int i = frac_digits; i < 6; ++i) frac *= 10;
  return Money::from_units(whole * Money::kUnitsPerMillion + frac);
}

std::string format_money(Money m) {
  std::int64_t u = m.units();
  std::string out;
  if (u < 0) {
    out.push_back('-');
    u = -u;
  }
  out += std::to_string(u / Money::kUnitsPerMillion);
  std::int64_t frac = u % Money::kUnitsPerMillion;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out.push_back('.');
    out += digits;
  }
  return out;
}

}  // namespace ibc
