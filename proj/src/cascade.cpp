#include "ibc/cascade.hpp"

#include <stdexcept>

#include "ibc/kernels.hpp"

namespace ibc {

CascadeModel::CascadeModel(const DailyNetwork& net, std::span<const BalanceSheet> sheets) : net_(&net) {
  if (sheets.size() != net.node_count()) throw std::invalid_argument("one balance sheet per node required");
  threshold_.resize(sheets.size());
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    if (sheets[i].bank != net.bank(static_cast<std::uint32_t>(i)))
      throw std::invalid_argument("balance sheets must align with network nodes");
    threshold_[i] = capital_threshold(sheets[i]).units();
  }
}

CascadeState::CascadeState(const CascadeModel& model) : model_(&model) {
  const std::size_t n = model.network().node_count();
  shock_.resize(n);
  basis_.resize(n);
  round_of_.resize(n);
  defaulted_.resize(n);
  incoming_.resize(n);
  scratch_.resize(n);
  reset();
}

void CascadeState::reset() {
  std::fill(shock_.begin(), shock_.end(), 0);
  std::fill(basis_.begin(), basis_.end(), 0);
  std::fill(round_of_.begin(), round_of_.end(), -1);
  std::fill(defaulted_.begin(), defaulted_.end(), 0);
  std::fill(incoming_.begin(), incoming_.end(), 0);
  dirty_.clear();
  touched_.clear();
  seeded_ = false;
  round_ = 0;
  productive_rounds_ = 0;
  lending_loss_ = 0;
  defaulted_count_ = 0;
}

std::int64_t CascadeState::payout(std::uint32_t borrower, std::int64_t shock, std::int64_t loan) const {
  const std::int64_t residual = shock - model_->thresholds()[borrower];
  if (residual <= 0) return 0;
  const std::int64_t borrowing = model_->network().borrowing(borrower).units();
  if (residual >= borrowing) return loan;
  return static_cast<std::int64_t>(static_cast<__int128>(residual) * loan / borrowing);
}

void CascadeState::seed_default(BankId seed) {
  const DailyNetwork& net = model_->network();
  const auto idx = net.index_of(seed);
  if (!idx) throw std::invalid_argument("seed bank " + format_bank_id(seed) + " is not active on this day");
  if (net.in_degree(*idx) == 0)
    throw std::invalid_argument("seed bank " + format_bank_id(seed) + " has no interbank borrowing");
  reset();
  seeded_ = true;
  seed_ = *idx;
  round_of_[seed_] = 0;
  defaulted_[seed_] = 1;
  for (const Neighbor& lender : net.lenders_of(seed_)) {
    shock_[lender.node] += lender.weight.units();
    lending_loss_ += lender.weight.units();
  }
}

std::vector<Shock> CascadeState::distribute_residual(BankId bank) const {
  const DailyNetwork& net = model_->network();
  const auto idx = net.index_of(bank);
  if (!idx) throw std::invalid_argument("bank " + format_bank_id(bank) + " is not in the network");
  std::vector<Shock> out;
  if (net.borrowing(*idx) == Money{}) return out;
  const bool is_seed = seeded_ && *idx == seed_;
  for (const Neighbor& lender : net.lenders_of(*idx)) {
    const std::int64_t amount = is_seed ? lender.weight.units() : payout(*idx, shock_[*idx], lender.weight.units());
    out.push_back({net.bank(lender.node), Money::from_units(amount)});
  }
  return out;
}

bool CascadeState::step() {
  if (!seeded_) return false;
  const DailyNetwork& net = model_->network();
  const auto thresholds = model_->thresholds();

  const std::size_t fresh = kernels::active().scan_crossings(shock_, thresholds, defaulted_, scratch_);
  if (fresh == 0 && dirty_.empty()) return false;

  ++round_;
  if (fresh > 0) ++productive_rounds_;
  for (std::size_t k = 0; k < fresh; ++k) {
    const std::uint32_t i = scratch_[k];
    round_of_[i] = static_cast<std::int32_t>(round_);
    defaulted_[i] = 1;
    basis_[i] = thresholds[i];
    ++defaulted_count_;
  }

  // Payout increments are computed from end-of-previous-round shocks and
  // buffered, so the round is synchronous.
  touched_.clear();
  auto distribute = [&](std::uint32_t i) {
    const std::int64_t now = shock_[i];
    const std::int64_t before = basis_[i];
    if (now == before) return;
    for (const Neighbor& lender : net.lenders_of(i)) {
      const std::int64_t loan = lender.weight.units();
      const std::int64_t delta = payout(i, now, loan) - payout(i, before, loan);
      if (delta == 0) continue;
      if (incoming_[lender.node] == 0) touched_.push_back(lender.node);
      incoming_[lender.node] += delta;
    }
    basis_[i] = now;
  };
  for (std::size_t k = 0; k < fresh; ++k) distribute(scratch_[k]);
  for (std::uint32_t i : dirty_) distribute(i);

  dirty_.clear();
  for (std::uint32_t j : touched_) {
    shock_[j] += incoming_[j];
    lending_loss_ += incoming_[j];
    incoming_[j] = 0;
    if (defaulted_[j] && j != seed_) dirty_.push_back(j);
  }
  return true;
}

CascadeResult CascadeState::finish() {
  while (step()) {
  }
  return result();
}

CascadeResult CascadeState::result() const {
  const DailyNetwork& net = model_->network();
  CascadeResult r;
  if (!seeded_) return r;
  r.seed = net.bank(seed_);
  r.initial_shock = net.borrowing(seed_);
  r.defaulted_count = defaulted_count_;
  r.node_fraction = static_cast<double>(defaulted_count_) / static_cast<double>(net.node_count() - 1);
  r.lending_loss = Money::from_units(lending_loss_);
  r.loss_fraction = static_cast<double>(lending_loss_) / static_cast<double>(net.total_weight().units());
  r.rounds = productive_rounds_;
  return r;
}

CascadeResult run_cascade(CascadeState& state, BankId seed) {
  state.seed_default(seed);
  return state.finish();
}

CascadeResult run_cascade(const DailyNetwork& net, std::span<const BalanceSheet> sheets, BankId seed) {
  const CascadeModel model(net, sheets);
  CascadeState state(model);
  return run_cascade(state, seed);
}

bool classify_cascade(const CascadeResult& result, double threshold, CascadeMeasure by) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::domain_error("threshold must lie in (0, 1)");
  return (by == CascadeMeasure::Nodes ? result.node_fraction : result.loss_fraction) > threshold;
}

}  // namespace ibc
