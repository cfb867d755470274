#pragma once

#include <span>
#include <vector>

#include "ibc/money.hpp"
#include "ibc/network.hpp"
#include "ibc/types.hpp"

namespace ibc {

// theta: interbank lending / total assets. gamma: capital / total assets.
struct Params {
  double theta = 0.2;
  double gamma = 0.05;

  // Throws ConfigError unless both lie in (0, 1).
  void validate() const;
};

// Stylized balance sheet, all items in EUR millions.
//   assets:      external assets A + interbank lending L
//   liabilities: capital C + deposits D + interbank borrowing B
struct BalanceSheet {
  BankId bank;
  double total_assets = 0;
  double external_assets = 0;
  double lending = 0;
  double borrowing = 0;
  double capital = 0;
  double deposits = 0;
  bool clamped = false;  // total assets were raised to keep A >= 0 and D >= 0
};

enum class SheetPolicy {
  Strict,  // A < 0 or D < 0 is a data inconsistency (DataError)
  Clamp,   // TA is raised to max(TA, L, B / (1 - gamma))
};

// TA = tv_mean / (2 theta), A = TA - L, C = gamma TA, D = (1 - gamma) TA - B.
BalanceSheet make_balance_sheet(BankId bank, double lending, double borrowing, double tv_mean, const Params& p,
                                SheetPolicy policy = SheetPolicy::Strict);

// Survival after losing `lending_loss` of interbank lending, evaluated in the
// capital form lending_loss < C (equivalent to (L - loss) + A - B - D > 0 by
// the balance-sheet identity, without its cancellation). Throws
// std::domain_error if the loss is negative or exceeds L.
bool is_solvent(const BalanceSheet& bs, double lending_loss);

// Smallest whole number of money units a bank must lose to be insolvent:
// ceil(C * 1e6). An integer shock s is insolvent iff s >= threshold.
Money capital_threshold(const BalanceSheet& bs);

// Balance sheets for every node of `net`. `tv_mean[i]` is the volume proxy of
// node i. Uses the active SIMD kernel; results are bit-identical to calling
// make_balance_sheet per node. With SheetPolicy::Strict the first
// inconsistent bank raises DataError.
std::vector<BalanceSheet> make_balance_sheets(const DailyNetwork& net, std::span<const double> tv_mean,
                                              const Params& p, SheetPolicy policy);

}  // namespace ibc
