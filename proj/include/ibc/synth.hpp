#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ibc/ingest.hpp"

namespace ibc {

// Target moments of a daily overnight-market regime plus generator knobs.
struct MarketPreset {
  std::string name;
  double n_banks_mean = 0;
  double n_banks_sd = 0;
  std::uint32_t n_banks_min = 0;  // clip range for the daily active count
  std::uint32_t n_banks_max = 0;
  double n_links_mean = 0;
  double n_links_sd = 0;
  double mean_degree = 0;
  double degree_sd = 0;
  double daily_volume_mean = 0;  // EUR millions, netted
  double daily_volume_sd = 0;
  std::uint32_t n_days = 257;
  double size_tail_exponent = 2.3;
  std::uint64_t seed = 0;

  // Generator knobs.
  std::uint32_t universe = 0;          // banks that ever trade
  double size_truncation = 1000.0;     // largest latent size / smallest
  double fitness_exponent = 0.8;       // link attachment weight = size^exponent
  double activity_exponent = 0.5;      // daily activity weight = size^exponent
  double amount_exponent = 0.5;        // loan ~ (size_l * size_b)^exponent
  double amount_noise = 1.2;           // sd of the log-normal loan noise
  double role_bias = 6.0;              // spread of the persistent lender/borrower propensity
  double reverse_trade_share = 0.40;   // links that also carry a smaller opposite trade
  double min_trade = 0.05;             // EUR millions

  // Throws ConfigError if the preset cannot be generated.
  void validate() const;
};

MarketPreset preset_2006();
MarketPreset preset_2011();
// "2006-like" or "2011-like".
std::optional<MarketPreset> find_preset(std::string_view name);

// Sets one preset field by name (n_banks_mean, universe, role_bias, ...).
// Throws ConfigError for unknown fields or bad values.
void set_preset_field(MarketPreset& preset, std::string_view field, std::string_view value);
// Every settable field with its current value, in declaration order.
std::vector<std::pair<std::string, std::string>> preset_fields(const MarketPreset& preset);

// Gross transactions, ordered by (date, time). Trading days are consecutive
// weekdays starting on the first Monday of the preset's year.
std::vector<LoanTransaction> generate_market(const MarketPreset& preset);

struct ValidationCheck {
  std::string statistic;  // nodes, links, degree, volume
  double target = 0;
  double target_sd = 0;
  double observed = 0;     // mean over days
  double observed_sd = 0;
  bool pass = false;       // |observed - target| <= 2 target_sd
};

// Moments of the netted daily networks against the preset. Empty input fails
// every check with observed = 0.
std::vector<ValidationCheck> validate_against_preset(std::span<const LoanTransaction> txs,
                                                     const MarketPreset& preset);

}  // namespace ibc
