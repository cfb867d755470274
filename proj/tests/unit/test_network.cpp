#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "ibc/errors.hpp"
#include "ibc/network.hpp"
#include "support/oracles.hpp"

using namespace ibc;

namespace {

const Date kDay{std::chrono::year{2011} / 1 / 3};
constexpr BankId A{1}, B{2}, C{3}, D{4};

GrossLoan loan(BankId l, BankId b, double m) { return {l, b, Money::from_millions(m)}; }

Money weight(const DailyNetwork& net, BankId l, BankId b) {
  const auto li = net.index_of(l), bi = net.index_of(b);
  if (!li || !bi) return Money{};
  for (const auto& nb : net.borrowers_of(*li))
    if (nb.node == *bi) return nb.weight;
  return Money{};
}

}  // namespace

TEST_CASE("netting keeps the dominant direction") {
  const std::vector<GrossLoan> g = {loan(A, B, 10), loan(B, A, 4)};
  const auto net = net_edges(kDay, g);
  REQUIRE(net.edge_count() == 1);
  CHECK(weight(net, A, B) == Money::from_millions(6));
}

TEST_CASE("exact ties vanish with their nodes") {
  const std::vector<GrossLoan> g = {loan(A, B, 5), loan(B, A, 5)};
  const auto net = net_edges(kDay, g);
  CHECK(net.edge_count() == 0);
  CHECK(net.node_count() == 0);
}

TEST_CASE("parallel loans aggregate") {
  const std::vector<GrossLoan> g = {loan(A, B, 3), loan(A, B, 2), loan(C, A, 1)};
  const auto net = net_edges(kDay, g);
  CHECK(net.edge_count() == 2);
  CHECK(weight(net, A, B) == Money::from_millions(5));
  CHECK(weight(net, C, A) == Money::from_millions(1));
  CHECK(net.total_weight() == Money::from_millions(6));
}

TEST_CASE("netting drops banks whose positions cancel") {
  const std::vector<GrossLoan> g = {loan(A, B, 5), loan(B, A, 5), loan(C, A, 2)};
  const auto net = net_edges(kDay, g);
  CHECK(net.node_count() == 2);
  CHECK_FALSE(net.index_of(B));
}

TEST_CASE("bad gross records are rejected with their row") {
  const std::vector<GrossLoan> zero = {loan(A, B, 1), {A, C, Money{}}};
  try {
    net_edges(kDay, zero);
    FAIL("expected rejection");
  } catch (const RejectedRecord& e) {
    CHECK(e.row() == 1);
  }
  const std::vector<GrossLoan> self = {loan(A, A, 1)};
  CHECK_THROWS_AS(net_edges(kDay, self), RejectedRecord);
}

TEST_CASE("constructor enforces the netted-network invariants") {
  const std::vector<BankId> nodes = {A, B, C};
  const auto w = Money::from_millions(1);
  CHECK_THROWS_AS(DailyNetwork(kDay, nodes, {{0, 1, w}, {1, 0, w}, {2, 0, w}}), std::invalid_argument);
  CHECK_THROWS_AS(DailyNetwork(kDay, nodes, {{0, 1, w}, {0, 1, w}, {2, 0, w}}), std::invalid_argument);
  CHECK_THROWS_AS(DailyNetwork(kDay, nodes, {{0, 0, w}, {2, 1, w}}), std::invalid_argument);
  CHECK_THROWS_AS(DailyNetwork(kDay, nodes, {{0, 1, Money{}}, {2, 1, w}}), std::invalid_argument);
  CHECK_THROWS_AS(DailyNetwork(kDay, nodes, {{0, 1, w}}), std::invalid_argument);  // C isolated
  CHECK_NOTHROW(DailyNetwork(kDay, nodes, {{0, 1, w}}, IsolatedNodes::Allow));
  CHECK_THROWS_AS(DailyNetwork(kDay, {B, A}, {{0, 1, w}}), std::invalid_argument);
  CHECK_THROWS_AS(DailyNetwork(kDay, nodes, {{0, 5, w}, {2, 1, w}}), std::invalid_argument);
}

TEST_CASE("degrees") {
  SUBCASE("single edge") {
    const std::vector<GrossLoan> g = {loan(A, B, 1)};
    const auto d = degrees(net_edges(kDay, g));
    CHECK(d[0] == Degree{0, 1});
    CHECK(d[1] == Degree{1, 0});
  }
  SUBCASE("star") {
    std::vector<GrossLoan> g;
    for (std::uint64_t leaf = 10; leaf < 15; ++leaf) g.push_back(loan(A, BankId{leaf}, 2));
    const auto net = net_edges(kDay, g);
    const auto d = degrees(net);
    CHECK(d[*net.index_of(A)].out == 5);
    for (std::uint64_t leaf = 10; leaf < 15; ++leaf) CHECK(d[*net.index_of(BankId{leaf})] == Degree{1, 0});
  }
  SUBCASE("degree sums equal the edge count") {
    std::mt19937_64 rng(5);
    auto arcs = oracle::random_netted(70, 161.0 / (70 * 69 / 2.0), rng, [](auto&) { return 1'000'000; });
    const auto net = oracle::to_network(70, arcs);
    std::size_t in = 0, out = 0;
    for (const auto& d : degrees(net)) {
      in += d.in;
      out += d.out;
    }
    CHECK(in == net.edge_count());
    CHECK(out == net.edge_count());
  }
}

TEST_CASE("weak components") {
  SUBCASE("chain is one component") {
    const std::vector<GrossLoan> g = {loan(A, B, 1), loan(B, C, 1)};
    CHECK(weak_components(net_edges(kDay, g)).size() == 1);
  }
  SUBCASE("two disjoint edges") {
    const std::vector<GrossLoan> g = {loan(A, B, 1), loan(C, D, 1)};
    const auto comps = weak_components(net_edges(kDay, g));
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == std::vector<BankId>{A, B});
    CHECK(comps[1] == std::vector<BankId>{C, D});
  }
  SUBCASE("random networks match union-find") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
      const auto arcs = oracle::random_netted(20, 0.08, rng, [](auto&) { return 1; });
      const auto net = oracle::to_network(20, arcs, IsolatedNodes::Allow);
      const auto label = oracle::components(20, arcs);
      const auto comps = weak_components(net);
      std::size_t covered = 0;
      for (std::size_t c = 0; c < comps.size(); ++c) {
        if (c > 0) CHECK(comps[c - 1].size() >= comps[c].size());
        covered += comps[c].size();
        const auto first = label[comps[c].front().value];
        for (BankId b : comps[c]) CHECK(label[b.value] == first);
      }
      CHECK(covered == 20);
      std::set<std::uint32_t> distinct(label.begin(), label.end());
      CHECK(distinct.size() == comps.size());
    }
  }
}

TEST_CASE("netting properties on random gross books") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bank(1, 12);
  std::uniform_int_distribution<std::int64_t> units(1, 5'000'000);
  for (int t = 0; t < 200; ++t) {
    std::vector<GrossLoan> g;
    for (int k = 0; k < 60; ++k) {
      const BankId l{bank(rng)}, b{bank(rng)};
      if (l == b) continue;
      g.push_back({l, b, Money::from_units(units(rng))});
    }
    const auto net = net_edges(kDay, g);

    std::map<std::pair<BankId, BankId>, std::int64_t> gross;
    std::int64_t gross_total = 0;
    for (const auto& x : g) {
      gross[{x.lender, x.borrower}] += x.amount.units();
      gross_total += x.amount.units();
    }
    std::int64_t expected = 0;
    for (const auto& [pair, v] : gross) {
      if (pair.first > pair.second) continue;
      const auto it = gross.find({pair.second, pair.first});
      expected += std::abs(v - (it == gross.end() ? 0 : it->second));
    }
    for (const auto& [pair, v] : gross)
      if (pair.first > pair.second && !gross.count({pair.second, pair.first})) expected += v;
    CHECK(net.total_weight().units() == expected);  // conservation of net exposure
    CHECK(net.total_weight().units() <= gross_total);

    // Idempotence: netting a netted list returns it unchanged.
    std::vector<GrossLoan> again;
    for (const auto& e : net.edges()) again.push_back({net.bank(e.lender), net.bank(e.borrower), e.weight});
    CHECK(net_edges(kDay, again) == net);
  }
}
