#include "ibc/centrality.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "ibc/kernels.hpp"

namespace ibc {

namespace {

std::vector<std::vector<std::uint32_t>> undirected_adjacency(const DailyNetwork& net) {
  std::vector<std::vector<std::uint32_t>> adj(net.node_count());
  for (const Edge& e : net.edges()) {
    adj[e.lender].push_back(e.borrower);
    adj[e.borrower].push_back(e.lender);
  }
  return adj;
}

std::uint32_t require_index(const DailyNetwork& net, BankId bank) {
  auto idx = net.index_of(bank);
  if (!idx) throw std::invalid_argument("bank " + format_bank_id(bank) + " is not active in this network");
  return *idx;
}

}  // namespace

std::vector<double> closeness_all(const DailyNetwork& net) {
  const std::size_t n = net.node_count();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;

  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> adj(n * words, 0);
  for (const Edge& e : net.edges()) {
    adj[e.lender * words + e.borrower / 64] |= std::uint64_t{1} << (e.borrower % 64);
    adj[e.borrower * words + e.lender / 64] |= std::uint64_t{1} << (e.lender % 64);
  }

  const auto& k = kernels::active();
  std::vector<std::uint64_t> visited(words), frontier(words), next(words);
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(visited.begin(), visited.end(), 0);
    std::fill(frontier.begin(), frontier.end(), 0);
    visited[src / 64] = frontier[src / 64] = std::uint64_t{1} << (src % 64);
    std::uint64_t reached = 1;
    std::uint64_t distance_sum = 0;
    for (std::uint64_t level = 1;; ++level) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t w = 0; w < words; ++w) {
        for (std::uint64_t bits = frontier[w]; bits != 0; bits &= bits - 1) {
          const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
          k.or_into(next, {adj.data() + v * words, words});
        }
      }
      const std::size_t fresh = k.advance_frontier(next, visited);
      if (fresh == 0) break;
      reached += fresh;
      distance_sum += level * fresh;
      frontier.swap(next);
    }
    if (reached < 2) continue;
    out[src] = static_cast<double>(reached - 1) / static_cast<double>(distance_sum) *
               (static_cast<double>(reached - 1) / static_cast<double>(n - 1));
  }
  return out;
}

double closeness(const DailyNetwork& net, BankId bank) {
  const std::uint32_t idx = require_index(net, bank);
  return closeness_all(net)[idx];
}

std::vector<std::uint32_t> core_numbers(const DailyNetwork& net) {
  // Bucket-based peeling (Batagelj-Zaversnik).
  const auto adj = undirected_adjacency(net);
  const std::size_t n = adj.size();
  std::vector<std::uint32_t> degree(n);
  std::size_t max_degree = 0;
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = static_cast<std::uint32_t>(adj[v].size());
    max_degree = std::max<std::size_t>(max_degree, degree[v]);
  }
  std::vector<std::uint32_t> bin_start(max_degree + 2, 0);
  for (std::size_t v = 0; v < n; ++v) ++bin_start[degree[v] + 1];
  for (std::size_t d = 1; d < bin_start.size(); ++d) bin_start[d] += bin_start[d - 1];
  std::vector<std::uint32_t> order(n), position(n);
  {
    std::vector<std::uint32_t> fill(bin_start.begin(), bin_start.end() - 1);
    for (std::uint32_t v = 0; v < n; ++v) {
      position[v] = fill[degree[v]]++;
      order[position[v]] = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t v = order[i];
    for (std::uint32_t u : adj[v]) {
      if (degree[u] <= degree[v]) continue;
      // Move u to the front of its bucket, then shrink its degree.
      const std::uint32_t du = degree[u];
      const std::uint32_t front = bin_start[du];
      const std::uint32_t w = order[front];
      if (w != u) {
        std::swap(order[front], order[position[u]]);
        position[w] = position[u];
        position[u] = front;
      }
      ++bin_start[du];
      --degree[u];
    }
  }
  return degree;
}

std::uint32_t core_number(const DailyNetwork& net, BankId bank) {
  const std::uint32_t idx = require_index(net, bank);
  return core_numbers(net)[idx];
}

std::vector<CentralityProfile> centrality_profiles(const DailyNetwork& net) {
  const auto close = closeness_all(net);
  const auto cores = core_numbers(net);
  std::vector<CentralityProfile> out(net.node_count());
  for (std::uint32_t v = 0; v < out.size(); ++v)
    out[v] = {net.bank(v), net.in_degree(v), net.out_degree(v), close[v], cores[v]};
  return out;
}

// ---------------------------------------------------------------------------
// Binning

Axis Axis::integers(std::string name, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("empty integer axis");
  Axis a{std::move(name), {}};
  for (std::int64_t v = lo; v <= hi + 1; ++v) a.edges.push_back(static_cast<double>(v) - 0.5);
  return a;
}

Axis Axis::uniform(std::string name, double lo, double hi, double width) {
  if (!(hi > lo) || !(width > 0)) throw std::invalid_argument("bad uniform axis");
  Axis a{std::move(name), {}};
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
  for (std::size_t k = 0; k <= count; ++k) a.edges.push_back(lo + static_cast<double>(k) * width);
  return a;
}

Axis Axis::logarithmic(std::string name, double lo, double hi, int per_decade) {
  if (!(lo > 0) || !(hi >= lo) || per_decade < 1) throw std::invalid_argument("bad logarithmic axis");
  Axis a{std::move(name), {}};
  const auto first = static_cast<long>(std::floor(std::log10(lo) * per_decade));
  long last = static_cast<long>(std::ceil(std::log10(hi) * per_decade));
  if (last == first) ++last;
  for (long k = first; k <= last; ++k) a.edges.push_back(std::pow(10.0, static_cast<double>(k) / per_decade));
  // Guard against pow rounding at the ends.
  a.edges.front() = std::min(a.edges.front(), lo);
  a.edges.back() = std::max(a.edges.back(), hi);
  return a;
}

Axis Axis::integer_quantiles(std::string name, std::vector<std::int64_t> values, int parts) {
  if (values.empty() || parts < 1) throw std::invalid_argument("quantile axis needs samples");
  std::sort(values.begin(), values.end());
  Axis a{std::move(name), {static_cast<double>(values.front()) - 0.5}};
  const std::size_t n = values.size();
  for (int k = 1; k <= parts; ++k) {
    const std::size_t upper = std::max<std::size_t>(1, (static_cast<std::size_t>(k) * n + parts - 1) / parts);
    const double edge = static_cast<double>(values[upper - 1]) + 0.5;
    if (edge > a.edges.back()) a.edges.push_back(edge);
  }
  return a;
}

std::optional<std::size_t> Axis::bin_of(double v) const {
  if (edges.size() < 2 || !(v >= edges.front()) || !(v <= edges.back())) return std::nullopt;
  if (v == edges.back()) return edges.size() - 2;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

std::size_t BinnedStatistic::sample_count() const {
  std::size_t total = 0;
  for (const auto& b : bins) total += b.count;
  return total;
}

BinnedStatistic bin_cascades(std::span<const BinSample> samples, std::vector<Axis> axes) {
  if (samples.empty()) throw std::invalid_argument("no samples to bin");
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("one or two axes supported");
  const std::size_t nx = axes[0].size();
  const std::size_t ny = axes.size() == 2 ? axes[1].size() : 1;
  std::vector<std::vector<double>> values(nx * ny);
  for (const auto& s : samples) {
    const auto bx = axes[0].bin_of(s.x);
    if (!bx) continue;
    std::size_t cell = *bx;
    if (axes.size() == 2) {
      const auto by = axes[1].bin_of(s.y);
      if (!by) continue;
      cell = *bx * ny + *by;
    }
    values[cell].push_back(s.value);
  }
  BinnedStatistic out{std::move(axes), std::vector<BinStats>(nx * ny)};
  for (std::size_t c = 0; c < values.size(); ++c) {
    auto& v = values[c];
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    double sum = 0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double se = 0;
    if (v.size() > 1) {
      double ss = 0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    out.bins[c] = {v.size(), mean, se};
  }
  return out;
}

RateTable::RateTable(Axis axis) : axis_(std::move(axis)), trials_(axis_.size(), 0), hits_(axis_.size(), 0) {}

void RateTable::add(double x, bool hit) {
  const auto b = axis_.bin_of(x);
  if (!b) return;
  ++trials_[*b];
  if (hit) ++hits_[*b];
}

void RateTable::merge(const RateTable& other) {
  if (other.axis_.edges != axis_.edges) throw std::invalid_argument("rate tables use different axes");
  for (std::size_t i = 0; i < trials_.size(); ++i) {
    trials_[i] += other.trials_[i];
    hits_[i] += other.hits_[i];
  }
}

BinnedStatistic RateTable::statistic() const {
  BinnedStatistic out{{axis_}, std::vector<BinStats>(trials_.size())};
  for (std::size_t i = 0; i < trials_.size(); ++i) {
    if (trials_[i] == 0) continue;
    const double n = static_cast<double>(trials_[i]);
    const double p = static_cast<double>(hits_[i]) / n;
    out.bins[i] = {trials_[i], p, trials_[i] > 1 ? std::sqrt(p * (1 - p) / (n - 1)) : 0.0};
  }
  return out;
}

}  // namespace ibc
