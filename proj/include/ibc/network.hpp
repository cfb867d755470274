#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ibc/money.hpp"
#include "ibc/types.hpp"

namespace ibc {

// Edges point lender -> borrower. Out-degree counts distinct net borrowers a
// bank lends to, in-degree counts distinct net lenders it borrows from.
// Shocks travel against edge direction: a defaulted borrower hits its lenders.

struct GrossLoan {
  BankId lender;
  BankId borrower;
  Money amount;
};

// Edge between node indices of a DailyNetwork.
struct Edge {
  std::uint32_t lender = 0;
  std::uint32_t borrower = 0;
  Money weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  std::uint32_t node = 0;
  Money weight;
};

struct Degree {
  std::uint32_t in = 0;
  std::uint32_t out = 0;

  friend bool operator==(const Degree&, const Degree&) = default;
};

enum class IsolatedNodes {
  Reject,  // every node must have degree >= 1 (trading-active banks)
  Allow,   // null-model outputs keep the original node set
};

// Netted directed weighted loan network for one trading day. Immutable once
// built; nodes are sorted by BankId and addressed by dense index.
class DailyNetwork {
 public:
  DailyNetwork() = default;

  // Validates: sorted unique nodes, in-range endpoints, no self-loops, no
  // duplicate or reciprocal pairs, positive weights and (unless allowed)
  // no isolated nodes. Throws std::invalid_argument on violation.
  DailyNetwork(Date date, std::vector<BankId> nodes, std::vector<Edge> edges,
               IsolatedNodes isolated = IsolatedNodes::Reject);

  Date date() const { return date_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::span<const BankId> nodes() const { return nodes_; }
  BankId bank(std::uint32_t node) const { return nodes_[node]; }
  std::optional<std::uint32_t> index_of(BankId bank) const;

  // Sorted by (lender, borrower).
  std::span<const Edge> edges() const { return edges_; }

  // Lenders of `node`: banks with an edge lender -> node.
  std::span<const Neighbor> lenders_of(std::uint32_t node) const {
    return {in_adj_.data() + in_off_[node], in_adj_.data() + in_off_[node + 1]};
  }
  std::span<const Neighbor> borrowers_of(std::uint32_t node) const {
    return {out_adj_.data() + out_off_[node], out_adj_.data() + out_off_[node + 1]};
  }

  std::uint32_t in_degree(std::uint32_t node) const { return in_off_[node + 1] - in_off_[node]; }
  std::uint32_t out_degree(std::uint32_t node) const { return out_off_[node + 1] - out_off_[node]; }

  Money lending(std::uint32_t node) const { return lending_[node]; }
  Money borrowing(std::uint32_t node) const { return borrowing_[node]; }
  Money total_weight() const { return total_; }

  // Exact structural equality (date, nodes, edges and weights).
  friend bool operator==(const DailyNetwork& a, const DailyNetwork& b) {
    return a.date_ == b.date_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  Date date_{};
  std::vector<BankId> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> out_off_{0};
  std::vector<Neighbor> out_adj_;
  std::vector<std::uint32_t> in_off_{0};
  std::vector<Neighbor> in_adj_;
  std::vector<Money> lending_;
  std::vector<Money> borrowing_;
  Money total_;
};

// Aggregates gross loans per ordered pair and nets each unordered pair. The
// pair with larger gross lending becomes the net lender; exact ties vanish,
// and banks left without edges are dropped. Throws RejectedRecord (carrying
// the row index) for non-positive amounts or self-loans.
DailyNetwork net_edges(Date date, std::span<const GrossLoan> gross);

// Aligned with net.nodes().
std::vector<Degree> degrees(const DailyNetwork& net);

// Weakly connected components as BankId sets, largest first (ties broken by
// smallest member id). Every node appears exactly once.
std::vector<std::vector<BankId>> weak_components(const DailyNetwork& net);

}  // namespace ibc
