#include "ibc/network.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "ibc/errors.hpp"

namespace ibc {

DailyNetwork::DailyNetwork(Date date, std::vector<BankId> nodes, std::vector<Edge> edges,
                           IsolatedNodes isolated)
    : date_(date), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const auto n = static_cast<std::uint32_t>(nodes_.size());
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i - 1] < nodes_[i])) throw std::invalid_argument("node ids must be sorted and unique");

  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.lender, a.borrower) < std::pair(b.lender, b.borrower);
  });
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    if (e.lender >= n || e.borrower >= n) throw std::invalid_argument("edge endpoint out of range");
    if (e.lender == e.borrower) throw std::invalid_argument("self-loop");
    if (e.weight <= Money{}) throw std::invalid_argument("non-positive edge weight");
    if (k > 0 && edges_[k - 1].lender == e.lender && edges_[k - 1].borrower == e.borrower)
      throw std::invalid_argument("duplicate edge");
  }

  out_off_.assign(n + 1, 0);
  in_off_.assign(n + 1, 0);
  lending_.assign(n, Money{});
  borrowing_.assign(n, Money{});
  for (const Edge& e : edges_) {
    ++out_off_[e.lender + 1];
    ++in_off_[e.borrower + 1];
    lending_[e.lender] += e.weight;
    borrowing_[e.borrower] += e.weight;
    total_ += e.weight;
  }
  std::partial_sum(out_off_.begin(), out_off_.end(), out_off_.begin());
  std::partial_sum(in_off_.begin(), in_off_.end(), in_off_.begin());

  out_adj_.resize(edges_.size());
  in_adj_.resize(edges_.size());
  std::vector<std::uint32_t> out_fill(out_off_.begin(), out_off_.end() - 1);
  std::vector<std::uint32_t> in_fill(in_off_.begin(), in_off_.end() - 1);
  for (const Edge& e : edges_) {
    out_adj_[out_fill[e.lender]++] = {e.borrower, e.weight};
    in_adj_[in_fill[e.borrower]++] = {e.lender, e.weight};
  }
  // Lender lists are filled in lender order because edges_ is sorted.

  // Antisymmetry: i -> j and j -> i never coexist.
  for (const Edge& e : edges_) {
    auto back = borrowers_of(e.borrower);
    if (std::any_of(back.begin(), back.end(), [&](const Neighbor& nb) { return nb.node == e.lender; }))
      throw std::invalid_argument("reciprocal edge pair");
  }

  if (isolated == IsolatedNodes::Reject) {
    for (std::uint32_t v = 0; v < n; ++v)
      if (in_degree(v) + out_degree(v) == 0) throw std::invalid_argument("isolated node");
  }
}

std::optional<std::uint32_t> DailyNetwork::index_of(BankId bank) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), bank);
  if (it == nodes_.end() || *it != bank) return std::nullopt;
  return static_cast<std::uint32_t>(it - nodes_.begin());
}

DailyNetwork net_edges(Date date, std::span<const GrossLoan> gross) {
  // Key is the unordered pair (lo, hi); value is gross lo->hi minus hi->lo.
  std::map<std::pair<BankId, BankId>, std::int64_t> net;
  for (std::size_t row = 0; row < gross.size(); ++row) {
    const GrossLoan& g = gross[row];
    if (g.amount <= Money{}) throw RejectedRecord(row, "amount must be positive");
    if (g.lender == g.borrower) throw RejectedRecord(row, "lender equals borrower");
    if (g.lender < g.borrower)
      net[{g.lender, g.borrower}] += g.amount.units();
    else
      net[{g.borrower, g.lender}] -= g.amount.units();
  }

  std::vector<BankId> nodes;
  for (const auto& [pair, amount] : net) {
    if (amount == 0) continue;
    nodes.push_back(pair.first);
    nodes.push_back(pair.second);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  auto index = [&](BankId b) {
    return static_cast<std::uint32_t>(std::lower_bound(nodes.begin(), nodes.end(), b) - nodes.begin());
  };
  std::vector<Edge> edges;
  for (const auto& [pair, amount] : net) {
    if (amount > 0)
      edges.push_back({index(pair.first), index(pair.second), Money::from_units(amount)});
    else if (amount < 0)
      edges.push_back({index(pair.second), index(pair.first), Money::from_units(-amount)});
  }
  return DailyNetwork(date, std::move(nodes), std::move(edges));
}

std::vector<Degree> degrees(const DailyNetwork& net) {
  std::vector<Degree> out(net.node_count());
  for (std::uint32_t v = 0; v < out.size(); ++v) out[v] = {net.in_degree(v), net.out_degree(v)};
  return out;
}

std::vector<std::vector<BankId>> weak_components(const DailyNetwork& net) {
  const auto n = static_cast<std::uint32_t>(net.node_count());
  std::vector<std::uint32_t> comp(n, UINT32_MAX);
  std::vector<std::vector<BankId>> out;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (comp[s] != UINT32_MAX) continue;
    const auto id = static_cast<std::uint32_t>(out.size());
    out.emplace_back();
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      out[id].push_back(net.bank(v));
      for (auto nbs : {net.lenders_of(v), net.borrowers_of(v)})
        for (const Neighbor& nb : nbs)
          if (comp[nb.node] == UINT32_MAX) {
            comp[nb.node] = id;
            stack.push_back(nb.node);
          }
    }
  }
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return out;
}

}  // namespace ibc
