#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace ibc {

// Opaque bank identifier, stable across days.
struct BankId {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(BankId, BankId) = default;
};

using Date = std::chrono::year_month_day;

// ISO-8601 calendar date, YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

// Decimal digits only.
std::optional<BankId> parse_bank_id(std::string_view text);
std::string format_bank_id(BankId id);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
// Whole-string decimal parse; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace ibc

template <>
struct std::hash<ibc::BankId> {
  std::size_t operator()(ibc::BankId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};
