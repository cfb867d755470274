#include "ibc/balance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ibc/errors.hpp"
#include "ibc/kernels.hpp"

namespace ibc {

namespace {

kernels::SheetCoefficients coefficients(const Params& p, SheetPolicy policy) {
  return {2.0 * p.theta, p.gamma, 1.0 - p.gamma, policy == SheetPolicy::Clamp};
}

void check_consistency(const BalanceSheet& bs) {
  if (bs.external_assets < 0)
    throw DataError("bank " + format_bank_id(bs.bank) + ": interbank lending exceeds total assets");
  if (bs.deposits < 0)
    throw DataError("bank " + format_bank_id(bs.bank) + ": interbank borrowing leaves negative deposits");
}

}  // namespace

void Params::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1), got " + std::to_string(theta));
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1), got " + std::to_string(gamma));
}

BalanceSheet make_balance_sheet(BankId bank, double lending, double borrowing, double tv_mean, const Params& p,
                                SheetPolicy policy) {
  p.validate();
  if (!(tv_mean > 0)) throw std::domain_error("trading volume must be positive");
  if (lending < 0 || borrowing < 0) throw std::domain_error("interbank positions must be non-negative");

  BalanceSheet bs;
  bs.bank = bank;
  bs.lending = lending;
  bs.borrowing = borrowing;
  const auto k = coefficients(p, policy);
  kernels::scalar().synthesize_sheets({{&lending, 1}, {&borrowing, 1}, {&tv_mean, 1}}, k,
                                      {{&bs.total_assets, 1},
                                       {&bs.external_assets, 1},
                                       {&bs.capital, 1},
                                       {&bs.deposits, 1}});
  if (policy == SheetPolicy::Strict) check_consistency(bs);
  bs.clamped = bs.total_assets != tv_mean / k.two_theta;
  return bs;
}

bool is_solvent(const BalanceSheet& bs, double lending_loss) {
  if (lending_loss < 0 || lending_loss > bs.lending) throw std::domain_error("lending loss outside [0, L]");
  return lending_loss < bs.capital;
}

Money capital_threshold(const BalanceSheet& bs) {
  return Money::from_units(static_cast<std::int64_t>(std::ceil(bs.capital * Money::kUnitsPerMillion)));
}

std::vector<BalanceSheet> make_balance_sheets(const DailyNetwork& net, std::span<const double> tv_mean,
                                              const Params& p, SheetPolicy policy) {
  p.validate();
  const std::size_t n = net.node_count();
  if (tv_mean.size() != n) throw std::invalid_argument("tv_mean must align with network nodes");
  std::vector<double> lending(n), borrowing(n), ta(n), a(n), c(n), d(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!(tv_mean[i] > 0)) throw std::domain_error("trading volume must be positive");
    lending[i] = net.lending(i).millions();
    borrowing[i] = net.borrowing(i).millions();
  }
  const auto k = coefficients(p, policy);
  kernels::active().synthesize_sheets({lending, borrowing, tv_mean}, k, {ta, a, c, d});

  std::vector<BalanceSheet> out(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    out[i] = {net.bank(i), ta[i], a[i], lending[i], borrowing[i], c[i], d[i], ta[i] != tv_mean[i] / k.two_theta};
    if (policy == SheetPolicy::Strict) check_consistency(out[i]);
  }
  return out;
}

}  // namespace ibc
