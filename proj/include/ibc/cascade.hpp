#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ibc/balance.hpp"
#include "ibc/money.hpp"
#include "ibc/network.hpp"

namespace ibc {

// Outcome of one initial-default simulation.
struct CascadeResult {
  BankId seed;
  Money initial_shock;               // seed's total borrowing, lost in full
  std::uint32_t defaulted_count = 0; // knock-on defaults, seed excluded
  double node_fraction = 0;          // defaulted_count / (nodes - 1)
  Money lending_loss;                // sum over edges of loan minus repaid amount
  double loss_fraction = 0;          // lending_loss / total lending of the day
  std::uint32_t rounds = 0;          // rounds that produced at least one new default
};

enum class CascadeMeasure { Nodes, Lending };

// Immutable per-(network, sheets) data shared by every run on that day.
class CascadeModel {
 public:
  // `sheets` aligned with net.nodes().
  CascadeModel(const DailyNetwork& net, std::span<const BalanceSheet> sheets);

  const DailyNetwork& network() const { return *net_; }
  Money threshold(std::uint32_t node) const { return Money::from_units(threshold_[node]); }
  std::span<const std::int64_t> thresholds() const { return threshold_; }

 private:
  const DailyNetwork* net_;
  std::vector<std::int64_t> threshold_;  // capital_threshold per node, in units
};

struct Shock {
  BankId lender;
  Money amount;
};

// Mutable state of one cascade. Shocks are cumulative integers; bank i is in
// default iff it is the seed or its received shock reaches its capital
// threshold. Reusable across seeds via reset().
//
// Round r first declares every non-defaulted bank whose shock reached its
// threshold at the end of round r-1, then every defaulted bank whose payout
// basis changed passes the increment to its lenders. Payouts of bank i to
// lender j are a function of i's total shock S:
//   R = S - C_i;  R >= B_i  ->  L_ji;  otherwise floor(R * L_ji / B_i).
// Capital is absorbed once; later shock reaching a defaulted bank passes
// through in full proportion. The seed repays nothing. The run stops at the
// first round with no new default and no pending pass-through.
class CascadeState {
 public:
  explicit CascadeState(const CascadeModel& model);

  void reset();

  // Marks `seed` defaulted at round 0 and hits each of its lenders with the
  // full loan. Throws std::invalid_argument if the bank is not in the
  // network or has no lenders.
  void seed_default(BankId seed);

  // Payouts of defaulted bank i to each of its lenders, based on its current
  // total shock. Empty when i has no borrowing (the shock is absorbed).
  std::vector<Shock> distribute_residual(BankId bank) const;

  // One synchronous round. Returns false when the cascade has reached its
  // fixed point (nothing changed).
  bool step();

  // Runs step() to completion and returns the metrics.
  CascadeResult finish();

  CascadeResult result() const;

  Money received_shock(std::uint32_t node) const { return Money::from_units(shock_[node]); }
  // Round at which the node defaulted, -1 if it survived.
  std::int32_t default_round(std::uint32_t node) const { return round_of_[node]; }
  bool defaulted(std::uint32_t node) const { return round_of_[node] >= 0; }
  std::uint32_t round() const { return round_; }

 private:
  std::int64_t payout(std::uint32_t borrower, std::int64_t shock, std::int64_t loan) const;

  const CascadeModel* model_;
  std::uint32_t seed_ = 0;
  bool seeded_ = false;
  std::uint32_t round_ = 0;
  std::uint32_t productive_rounds_ = 0;
  std::vector<std::int64_t> shock_;
  std::vector<std::int64_t> basis_;      // shock at which payouts were last computed
  std::vector<std::int32_t> round_of_;
  std::vector<std::uint8_t> defaulted_;  // mirror of round_of_ >= 0 for the scan kernel
  std::vector<std::int64_t> incoming_;
  std::vector<std::uint32_t> dirty_;     // defaulted banks whose shock changed last round
  std::vector<std::uint32_t> scratch_;
  std::vector<std::uint32_t> touched_;
  std::int64_t lending_loss_ = 0;
  std::uint32_t defaulted_count_ = 0;
};

// Convenience wrapper: one seed on a freshly built model.
CascadeResult run_cascade(const DailyNetwork& net, std::span<const BalanceSheet> sheets, BankId seed);

// Reuses `state` (and its model); the state holds the final per-bank detail.
CascadeResult run_cascade(CascadeState& state, BankId seed);

// Strictly greater than `threshold`, on the chosen measure. Throws
// std::domain_error unless 0 < threshold < 1.
bool classify_cascade(const CascadeResult& result, double threshold, CascadeMeasure by);

}  // namespace ibc
