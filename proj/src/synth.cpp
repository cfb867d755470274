#include "ibc/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "ibc/errors.hpp"

namespace ibc {

namespace {

constexpr std::int64_t kTick = 10'000;  // amounts are generated in steps of 0.01 EUR millions

struct Bank {
  BankId id;
  double size = 1;
  double lend_propensity = 0.5;
};

double truncated_pareto(std::mt19937_64& rng, double exponent, double truncation) {
  // Density ~ s^-exponent on [1, truncation].
  const double a = exponent - 1.0;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return std::pow(1.0 - u * (1.0 - std::pow(truncation, -a)), -1.0 / a);
}

std::vector<std::size_t> weighted_sample(std::mt19937_64& rng, std::span<const double> weights, std::size_t k) {
  // Efraimidis-Spirakis keys u^(1/w); the k largest keys form the sample.
  std::vector<std::pair<double, std::size_t>> keys(weights.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < weights.size(); ++i) keys[i] = {std::log(unit(rng)) / weights[i], i};
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = keys[i].second;
  std::sort(out.begin(), out.end());
  return out;
}

std::chrono::sys_days first_monday(int year) {
  std::chrono::sys_days d{std::chrono::year{year} / std::chrono::January / 1};
  while (std::chrono::weekday{d} != std::chrono::Monday) d += std::chrono::days{1};
  return d;
}

// Splits `total` ticks into `parts` positive pieces.
std::vector<std::int64_t> split_ticks(std::mt19937_64& rng, std::int64_t total, int parts) {
  parts = static_cast<int>(std::min<std::int64_t>(parts, total));
  std::vector<std::int64_t> out;
  std::int64_t left = total;
  for (int p = parts; p > 1; --p) {
    std::uniform_int_distribution<std::int64_t> take(1, left - (p - 1));
    const std::int64_t piece = std::min(take(rng), left - (p - 1));
    out.push_back(piece);
    left -= piece;
  }
  out.push_back(left);
  return out;
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

void MarketPreset::validate() const {
  if (n_days == 0) throw ConfigError("preset " + name + ": n_days must be positive");
  if (n_banks_min < 2 || n_banks_max < n_banks_min)
    throw ConfigError("preset " + name + ": invalid active-bank range");
  if (universe < n_banks_max) throw ConfigError("preset " + name + ": universe smaller than the active-bank range");
  if (!(size_tail_exponent > 1.0) || !(size_truncation > 1.0))
    throw ConfigError("preset " + name + ": size law needs exponent > 1 and truncation > 1");
  if (!(mean_degree > 0) || !(daily_volume_mean > 0)) throw ConfigError("preset " + name + ": non-positive targets");
  const double max_links = static_cast<double>(n_banks_min) * (n_banks_min - 1);
  if (n_links_mean > max_links)
    throw ConfigError("preset " + name + ": more links than ordered pairs among the smallest active set");
  if (mean_degree + 3 * degree_sd >= static_cast<double>(n_banks_min - 1))
    throw ConfigError("preset " + name + ": degree target infeasible for the smallest active set");
}

MarketPreset preset_2006() {
  MarketPreset p;
  p.name = "2006-like";
  p.n_banks_mean = 128;
  p.n_banks_sd = 9;
  p.n_banks_min = 77;
  p.n_banks_max = 144;
  p.n_links_mean = 355;
  p.n_links_sd = 48;
  p.mean_degree = 5.5;
  p.degree_sd = 0.5;
  p.daily_volume_mean = 20953;
  p.daily_volume_sd = 4240;
  p.seed = 2006;
  p.universe = 175;
  return p;
}

MarketPreset preset_2011() {
  MarketPreset p;
  p.name = "2011-like";
  p.n_banks_mean = 70;
  p.n_banks_sd = 8;
  p.n_banks_min = 38;
  p.n_banks_max = 89;
  p.n_links_mean = 161;
  p.n_links_sd = 29;
  p.mean_degree = 4.5;
  p.degree_sd = 0.5;
  p.daily_volume_mean = 4261;
  p.daily_volume_sd = 1001;
  p.seed = 2011;
  p.universe = 105;
  return p;
}

std::optional<MarketPreset> find_preset(std::string_view name) {
  if (name == "2006-like" || name == "2006") return preset_2006();
  if (name == "2011-like" || name == "2011") return preset_2011();
  return std::nullopt;
}

namespace {

template <class T>
struct FieldRef {
  const char* name;
  T MarketPreset::*member;
};

constexpr FieldRef<double> kDoubleFields[] = {
    {"n_banks_mean", &MarketPreset::n_banks_mean},
    {"n_banks_sd", &MarketPreset::n_banks_sd},
    {"n_links_mean", &MarketPreset::n_links_mean},
    {"n_links_sd", &MarketPreset::n_links_sd},
    {"mean_degree", &MarketPreset::mean_degree},
    {"degree_sd", &MarketPreset::degree_sd},
    {"daily_volume_mean", &MarketPreset::daily_volume_mean},
    {"daily_volume_sd", &MarketPreset::daily_volume_sd},
    {"size_tail_exponent", &MarketPreset::size_tail_exponent},
    {"size_truncation", &MarketPreset::size_truncation},
    {"fitness_exponent", &MarketPreset::fitness_exponent},
    {"activity_exponent", &MarketPreset::activity_exponent},
    {"amount_exponent", &MarketPreset::amount_exponent},
    {"amount_noise", &MarketPreset::amount_noise},
    {"role_bias", &MarketPreset::role_bias},
    {"reverse_trade_share", &MarketPreset::reverse_trade_share},
    {"min_trade", &MarketPreset::min_trade},
};
constexpr FieldRef<std::uint32_t> kCountFields[] = {
    {"n_banks_min", &MarketPreset::n_banks_min},
    {"n_banks_max", &MarketPreset::n_banks_max},
    {"n_days", &MarketPreset::n_days},
    {"universe", &MarketPreset::universe},
};

}  // namespace

void set_preset_field(MarketPreset& preset, std::string_view field, std::string_view value) {
  auto bad = [&] { return ConfigError("preset field " + std::string(field) + ": bad value '" + std::string(value) + "'"); };
  for (const auto& f : kDoubleFields)
    if (field == f.name) {
      auto v = parse_double(value);
      if (!v || !std::isfinite(*v)) throw bad();
      preset.*f.member = *v;
      return;
    }
  auto parse_count = [&](auto& out) {
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc{} || p != value.data() + value.size()) throw bad();
  };
  for (const auto& f : kCountFields)
    if (field == f.name) return parse_count(preset.*f.member);
  if (field == "seed") return parse_count(preset.seed);
  throw ConfigError("unknown preset field '" + std::string(field) + "'");
}

std::vector<std::pair<std::string, std::string>> preset_fields(const MarketPreset& preset) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : kDoubleFields) out.emplace_back(f.name, format_double(preset.*f.member));
  for (const auto& f : kCountFields) out.emplace_back(f.name, std::to_string(preset.*f.member));
  out.emplace_back("seed", std::to_string(preset.seed));
  return out;
}

std::vector<LoanTransaction> generate_market(const MarketPreset& preset) {
  preset.validate();
  std::mt19937_64 rng(preset.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Persistent bank population.
  std::vector<Bank> banks(preset.universe);
  std::vector<double> activity(preset.universe);
  for (std::size_t k = 0; k < banks.size(); ++k) {
    banks[k].id = BankId{100 + k};
    banks[k].size = truncated_pareto(rng, preset.size_tail_exponent, preset.size_truncation);
    banks[k].lend_propensity = 1.0 / (1.0 + std::exp(-preset.role_bias * gauss(rng)));
    activity[k] = std::pow(banks[k].size, preset.activity_exponent);
  }

  const int year = preset.name.starts_with("2006") ? 2006 : preset.name.starts_with("2011") ? 2011 : 2000;
  std::chrono::sys_days day = first_monday(year);
  const double base_rate = year == 2006 ? 2.8 : year == 2011 ? 1.2 : 2.0;

  std::vector<LoanTransaction> out;
  for (std::uint32_t t = 0; t < preset.n_days; ++t, day += std::chrono::days{1}) {
    while (std::chrono::weekday{day} == std::chrono::Saturday || std::chrono::weekday{day} == std::chrono::Sunday)
      day += std::chrono::days{1};
    const Date date{day};

    const auto n_active = static_cast<std::size_t>(
        std::clamp(std::lround(preset.n_banks_mean + preset.n_banks_sd * gauss(rng)),
                   static_cast<long>(preset.n_banks_min), static_cast<long>(preset.n_banks_max)));
    const auto active = weighted_sample(rng, activity, n_active);
    const std::size_t n = active.size();

    const double degree = std::max(1.0, preset.mean_degree + preset.degree_sd * gauss(rng));
    const auto max_links = static_cast<long>(n * (n - 1) / 4);
    const auto n_links = static_cast<std::size_t>(
        std::clamp(std::lround(static_cast<double>(n) * degree / 2.0), static_cast<long>((n + 1) / 2), max_links));

    std::vector<double> fitness(n);
    for (std::size_t i = 0; i < n; ++i) fitness[i] = std::pow(banks[active[i]].size, preset.fitness_exponent);
    std::discrete_distribution<std::size_t> by_fitness(fitness.begin(), fitness.end());

    std::set<std::pair<std::size_t, std::size_t>> pairs;  // unordered, (lo, hi)
    std::vector<std::uint8_t> covered(n, 0);
    auto add_pair = [&](std::size_t u, std::size_t v) {
      if (u == v) return false;
      if (!pairs.insert({std::min(u, v), std::max(u, v)}).second) return false;
      covered[u] = covered[v] = 1;
      return true;
    };
    // Every active bank trades at least once.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t u : order) {
      if (covered[u]) continue;
      while (!add_pair(u, by_fitness(rng))) {
      }
    }
    while (pairs.size() < n_links) add_pair(by_fitness(rng), by_fitness(rng));

    // Orientation and net amounts.
    struct Link {
      std::size_t lender, borrower;
      double raw;
      std::int64_t ticks;
    };
    std::vector<Link> links;
    links.reserve(pairs.size());
    double raw_total = 0;
    for (auto [u, v] : pairs) {
      const double pu = banks[active[u]].lend_propensity;
      const double pv = banks[active[v]].lend_propensity;
      const double u_lends = pu * (1 - pv) / (pu * (1 - pv) + pv * (1 - pu));
      const bool forward = unit(rng) < u_lends;
      const double scale = std::pow(banks[active[u]].size * banks[active[v]].size, preset.amount_exponent);
      const double raw = scale * std::exp(preset.amount_noise * gauss(rng));
      links.push_back({forward ? u : v, forward ? v : u, raw, 0});
      raw_total += raw;
    }
    const double volume =
        std::clamp(preset.daily_volume_mean + preset.daily_volume_sd * gauss(rng),
                   std::max(0.1 * preset.daily_volume_mean, preset.daily_volume_mean - 3 * preset.daily_volume_sd),
                   preset.daily_volume_mean + 3 * preset.daily_volume_sd);
    const std::int64_t volume_ticks = std::llround(volume * Money::kUnitsPerMillion / kTick);
    const std::int64_t min_ticks = std::max<std::int64_t>(1, std::llround(preset.min_trade * Money::kUnitsPerMillion / kTick));
    std::int64_t assigned = 0;
    for (auto& l : links) {
      l.ticks = std::max<std::int64_t>(min_ticks, std::llround(l.raw / raw_total * static_cast<double>(volume_ticks)));
      assigned += l.ticks;
    }
    // Settle the rounding residual on the largest link.
    auto largest = std::max_element(links.begin(), links.end(), [](const Link& a, const Link& b) { return a.ticks < b.ticks; });
    largest->ticks = std::max(min_ticks, largest->ticks + (volume_ticks - assigned));

    // Gross trades.
    const std::size_t first_tx = out.size();
    std::uniform_int_distribution<std::int32_t> clock(8 * 3600, 18 * 3600 - 1);
    auto emit = [&](std::size_t lender, std::size_t borrower, std::int64_t ticks) {
      LoanTransaction tx;
      tx.date = date;
      tx.time_of_day = clock(rng);
      tx.lender = banks[active[lender]].id;
      tx.borrower = banks[active[borrower]].id;
      tx.amount = Money::from_units(ticks * kTick);
      tx.rate = std::round((base_rate + 0.05 * gauss(rng)) * 1000.0) / 1000.0;
      tx.aggressor = unit(rng) < 0.5 ? Aggressor::Lender : Aggressor::Borrower;
      out.push_back(tx);
    };
    std::uniform_int_distribution<int> n_trades(1, 3);
    for (const auto& l : links) {
      std::int64_t reverse = 0;
      if (unit(rng) < preset.reverse_trade_share)
        reverse = std::max<std::int64_t>(1, std::llround(static_cast<double>(l.ticks) * (0.1 + 0.5 * unit(rng))));
      for (std::int64_t piece : split_ticks(rng, l.ticks + reverse, n_trades(rng))) emit(l.lender, l.borrower, piece);
      if (reverse > 0) emit(l.borrower, l.lender, reverse);
    }
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(first_tx), out.end(),
              [](const LoanTransaction& a, const LoanTransaction& b) {
                return std::tie(a.time_of_day, a.lender, a.borrower) < std::tie(b.time_of_day, b.lender, b.borrower);
              });
  }
  return out;
}

std::vector<ValidationCheck> validate_against_preset(std::span<const LoanTransaction> txs,
                                                     const MarketPreset& preset) {
  std::vector<double> nodes, links, degree, volume;
  for (const auto& net : build_daily_networks(txs)) {
    nodes.push_back(static_cast<double>(net.node_count()));
    links.push_back(static_cast<double>(net.edge_count()));
    degree.push_back(net.node_count() == 0 ? 0.0
                                           : 2.0 * static_cast<double>(net.edge_count()) /
                                                 static_cast<double>(net.node_count()));
    volume.push_back(net.total_weight().millions());
  }
  auto check = [](std::string name, double target, double target_sd, std::span<const double> v) {
    ValidationCheck c{std::move(name), target, target_sd, mean_of(v), sd_of(v), false};
    c.pass = !v.empty() && std::abs(c.observed - target) <= 2 * target_sd;
    return c;
  };
  return {check("nodes", preset.n_banks_mean, preset.n_banks_sd, nodes),
          check("links", preset.n_links_mean, preset.n_links_sd, links),
          check("degree", preset.mean_degree, preset.degree_sd, degree),
          check("volume", preset.daily_volume_mean, preset.daily_volume_sd, volume)};
}

}  // namespace ibc
