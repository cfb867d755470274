#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ibc {

// Monetary amount held as an integer count of 1e-6 EUR millions (one euro).
// Netting, null-model weight bookkeeping and shock propagation are exact in
// this representation.
class Money {
 public:
  static constexpr std::int64_t kUnitsPerMillion = 1'000'000;

  constexpr Money() = default;

  static constexpr Money from_units(std::int64_t units) { return Money(units); }
  static Money from_millions(double millions) {
    return Money(std::llround(millions * static_cast<double>(kUnitsPerMillion)));
  }

  constexpr std::int64_t units() const { return units_; }
  constexpr double millions() const {
    return static_cast<double>(units_) / static_cast<double>(kUnitsPerMillion);
  }

  constexpr Money& operator+=(Money o) {
    units_ += o.units_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    units_ -= o.units_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return Money(a.units_ + b.units_); }
  friend constexpr Money operator-(Money a, Money b) { return Money(a.units_ - b.units_); }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t units) : units_(units) {}
  std::int64_t units_ = 0;
};

// Parses a plain decimal amount in EUR millions ("12", "0.5", "3.141593").
// At most six fractional digits; no sign, exponent or thousands separator.
std::optional<Money> parse_money(std::string_view text);

// Exact decimal rendering in EUR millions with trailing zeros trimmed.
std::string format_money(Money m);

}  // namespace ibc
