#include "ibc/nullmodel.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <stdexcept>
#include <string>

namespace ibc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::vector<Money> sorted_weights(const DailyNetwork& net) {
  std::vector<Money> w;
  w.reserve(net.edge_count());
  for (const Edge& e : net.edges()) w.push_back(e.weight);
  std::sort(w.begin(), w.end());
  return w;
}

void require(bool ok, NullModelKind kind, const char* what) {
  if (!ok) throw std::logic_error(std::string(to_string(kind)) + " null model broke: " + what);
}

bool weights_nearly_uniform(const DailyNetwork& net) {
  if (net.edge_count() == 0) return true;
  const auto w = sorted_weights(net);
  return (w.back() - w.front()) <= Money::from_units(1);
}

}  // namespace

std::string_view to_string(NullModelKind kind) {
  switch (kind) {
    case NullModelKind::Empirical: return "Empirical";
    case NullModelKind::Rewired: return "Rewired";
    case NullModelKind::Random: return "Random";
    case NullModelKind::FixedWeight: return "FixedWeight";
    case NullModelKind::RandomFixedWeight: return "RandomFixedWeight";
  }
  return "?";
}

std::optional<NullModelKind> parse_null_model(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "empirical") return NullModelKind::Empirical;
  if (s == "rewired") return NullModelKind::Rewired;
  if (s == "random") return NullModelKind::Random;
  if (s == "fixedweight" || s == "fixed") return NullModelKind::FixedWeight;
  if (s == "randomfixedweight" || s == "randomfixed") return NullModelKind::RandomFixedWeight;
  return std::nullopt;
}

RewireOutcome rewire(const DailyNetwork& net, const RewireConfig& cfg) {
  if (net.edge_count() < 2) throw std::invalid_argument("rewiring needs at least two edges");
  if (cfg.weight_tolerance < 0 || cfg.swaps_per_edge < 1)
    throw std::invalid_argument("invalid rewiring configuration");

  const std::size_t n = net.node_count();
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());
  std::vector<std::uint8_t> present(n * n, 0);
  for (const Edge& e : edges) present[e.lender * n + e.borrower] = 1;
  auto linked = [&](std::uint32_t u, std::uint32_t v) { return present[u * n + v] || present[v * n + u]; };

  RewireOutcome out;
  out.target_swaps = cfg.total_swaps != 0 ? cfg.total_swaps : std::uint64_t{cfg.swaps_per_edge} * edges.size();
  const std::uint64_t budget = out.target_swaps * cfg.max_attempts_factor;
  double tolerance = cfg.weight_tolerance;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
  constexpr std::uint64_t kWindow = 1000;
  std::uint64_t window_attempts = 0;
  std::uint64_t window_similar = 0;

  while (out.swaps < out.target_swaps && out.attempts < budget) {
    ++out.attempts;
    if (++window_attempts == kWindow) {
      if (window_similar * 100 < window_attempts) tolerance *= 2;
      window_attempts = 0;
      window_similar = 0;
    }
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    if (i == j) continue;
    Edge& e1 = edges[i];
    Edge& e2 = edges[j];
    const auto w1 = static_cast<double>(e1.weight.units());
    const auto w2 = static_cast<double>(e2.weight.units());
    if (std::abs(w1 - w2) > tolerance * std::max(w1, w2)) continue;
    ++window_similar;

    const std::uint32_t a = e1.lender, b = e1.borrower, c = e2.lender, d = e2.borrower;
    if (a == c || a == d || b == c || b == d) continue;
    if (linked(a, d) || linked(c, b)) continue;

    present[a * n + b] = 0;
    present[c * n + d] = 0;
    present[a * n + d] = 1;
    present[c * n + b] = 1;
    e1.borrower = d;
    e2.borrower = b;
    ++out.swaps;
  }
  out.final_tolerance = tolerance;
  out.network = DailyNetwork(net.date(), std::vector<BankId>(net.nodes().begin(), net.nodes().end()),
                             std::move(edges), IsolatedNodes::Allow);
  return out;
}

DailyNetwork randomize(const DailyNetwork& net, std::uint64_t seed) {
  const auto n = static_cast<std::uint32_t>(net.node_count());
  if (n < 2) throw std::invalid_argument("randomizing needs at least two nodes");
  const std::size_t m = net.edge_count();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) pairs.emplace_back(u, v);

  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first m pairs become a uniform m-subset.
  for (std::size_t k = 0; k < m; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pairs.size() - 1);
    std::swap(pairs[k], pairs[pick(rng)]);
  }
  std::vector<Money> weights;
  weights.reserve(m);
  for (const Edge& e : net.edges()) weights.push_back(e.weight);
  std::shuffle(weights.begin(), weights.end(), rng);

  std::bernoulli_distribution flip(0.5);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto [u, v] = pairs[k];
    if (flip(rng)) std::swap(u, v);
    edges.push_back({u, v, weights[k]});
  }
  return DailyNetwork(net.date(), std::vector<BankId>(net.nodes().begin(), net.nodes().end()), std::move(edges),
                      IsolatedNodes::Allow);
}

DailyNetwork fix_weights(const DailyNetwork& net) {
  const std::size_t m = net.edge_count();
  if (m == 0) throw std::invalid_argument("fixing weights needs at least one edge");
  const std::int64_t total = net.total_weight().units();
  const std::int64_t base = total / static_cast<std::int64_t>(m);
  const auto extra = static_cast<std::size_t>(total % static_cast<std::int64_t>(m));
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());
  for (std::size_t k = 0; k < m; ++k) edges[k].weight = Money::from_units(base + (k < extra ? 1 : 0));
  return DailyNetwork(net.date(), std::vector<BankId>(net.nodes().begin(), net.nodes().end()), std::move(edges),
                      IsolatedNodes::Allow);
}

DailyNetwork randomize_fixed(const DailyNetwork& net, std::uint64_t seed) {
  return randomize(fix_weights(net), seed);
}

DailyNetwork generate_null_model(NullModelKind kind, const DailyNetwork& net, std::uint64_t seed,
                                 const RewireConfig& rewire_cfg, RewireOutcome* rewire_info) {
  switch (kind) {
    case NullModelKind::Empirical: return net;
    case NullModelKind::Rewired: {
      if (net.edge_count() < 2) return net;
      RewireConfig cfg = rewire_cfg;
      cfg.seed = seed;
      RewireOutcome outcome = rewire(net, cfg);
      DailyNetwork result = outcome.network;
      if (rewire_info != nullptr) *rewire_info = std::move(outcome);
      return result;
    }
    case NullModelKind::Random: return net.node_count() < 2 ? net : randomize(net, seed);
    case NullModelKind::FixedWeight: return net.edge_count() == 0 ? net : fix_weights(net);
    case NullModelKind::RandomFixedWeight:
      return net.node_count() < 2 || net.edge_count() == 0 ? net : randomize_fixed(net, seed);
  }
  throw std::invalid_argument("unknown null model kind");
}

std::vector<BalanceSheet> rebuild_sheets(NullModelKind kind, const DailyNetwork& null_net,
                                         std::span<const double> rolling_tv, const Params& p, SheetPolicy policy) {
  const std::size_t n = null_net.node_count();
  if (rolling_tv.size() != n) throw std::invalid_argument("rolling volumes must align with network nodes");
  if (kind == NullModelKind::Empirical || kind == NullModelKind::Rewired)
    return make_balance_sheets(null_net, rolling_tv, p, policy);
  std::vector<double> tv(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const Money same_day = null_net.lending(i) + null_net.borrowing(i);
    tv[i] = same_day > Money{} ? same_day.millions() : rolling_tv[i];
  }
  return make_balance_sheets(null_net, tv, p, policy);
}

void check_preservation(NullModelKind kind, const DailyNetwork& original, const DailyNetwork& generated) {
  require(std::equal(original.nodes().begin(), original.nodes().end(), generated.nodes().begin(),
                     generated.nodes().end()),
          kind, "node set");
  require(original.edge_count() == generated.edge_count(), kind, "edge count");
  for (const Edge& e : generated.edges()) {
    require(e.lender != e.borrower, kind, "self-loop");
    for (const Neighbor& back : generated.borrowers_of(e.borrower))
      require(back.node != e.lender, kind, "reciprocal pair");
  }
  switch (kind) {
    case NullModelKind::Empirical: require(original == generated, kind, "identity"); break;
    case NullModelKind::Rewired:
      require(degrees(original) == degrees(generated), kind, "degree sequence");
      require(sorted_weights(original) == sorted_weights(generated), kind, "weight multiset");
      break;
    case NullModelKind::Random:
      require(sorted_weights(original) == sorted_weights(generated), kind, "weight multiset");
      break;
    case NullModelKind::FixedWeight: {
      auto a = original.edges(), b = generated.edges();
      require(std::equal(a.begin(), a.end(), b.begin(), b.end(),
                         [](const Edge& x, const Edge& y) { return x.lender == y.lender && x.borrower == y.borrower; }),
              kind, "topology");
      require(original.total_weight() == generated.total_weight(), kind, "total lending");
      require(weights_nearly_uniform(generated), kind, "uniform weights");
      break;
    }
    case NullModelKind::RandomFixedWeight:
      require(original.total_weight() == generated.total_weight(), kind, "total lending");
      require(weights_nearly_uniform(generated), kind, "uniform weights");
      break;
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t day, NullModelKind kind, std::uint64_t replicate) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ day);
  s = splitmix64(s ^ static_cast<std::uint64_t>(kind));
  return splitmix64(s ^ replicate);
}

}  // namespace ibc
