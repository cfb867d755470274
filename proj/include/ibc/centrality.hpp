#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibc/network.hpp"

namespace ibc {

struct CentralityProfile {
  BankId bank;
  std::uint32_t in_degree = 0;
  std::uint32_t out_degree = 0;
  double closeness = 0;
  std::uint32_t core_number = 0;
};

// Closeness on the undirected, unweighted projection:
//   (n_c - 1) / sum_j d(i, j)  scaled by  (n_c - 1) / (n - 1)
// where n_c is the size of i's component and n the node count. Isolated
// nodes score 0. Throws std::invalid_argument if the bank is not in `net`.
double closeness(const DailyNetwork& net, BankId bank);
std::vector<double> closeness_all(const DailyNetwork& net);

// k-core number on the undirected projection.
std::uint32_t core_number(const DailyNetwork& net, BankId bank);
std::vector<std::uint32_t> core_numbers(const DailyNetwork& net);

// Aligned with net.nodes().
std::vector<CentralityProfile> centrality_profiles(const DailyNetwork& net);

// Bin edges along one axis. A value v falls in bin k when
// edges[k] <= v < edges[k+1]; the last bin also includes its upper edge.
struct Axis {
  std::string name;
  std::vector<double> edges;

  // Width-1 bins centred on the integers lo..hi.
  static Axis integers(std::string name, std::int64_t lo, std::int64_t hi);
  static Axis uniform(std::string name, double lo, double hi, double width);
  // `per_decade` log-spaced bins covering [lo, hi], lo > 0.
  static Axis logarithmic(std::string name, double lo, double hi, int per_decade);
  // Bins bounded by distinct sample quantiles (deciles for parts = 10) of an
  // integer-valued variable; tied quantiles merge, so every bin holds whole
  // values. Edges sit at half-integers.
  static Axis integer_quantiles(std::string name, std::vector<std::int64_t> values, int parts);

  std::size_t size() const { return edges.empty() ? 0 : edges.size() - 1; }
  std::optional<std::size_t> bin_of(double v) const;
};

struct BinStats {
  std::size_t count = 0;
  double mean = 0;
  double std_error = 0;  // sample standard deviation / sqrt(count); 0 for count < 2
};

// One- or two-dimensional table of per-bin means; bins stored row-major
// (first axis slowest).
struct BinnedStatistic {
  std::vector<Axis> axes;
  std::vector<BinStats> bins;

  std::size_t sample_count() const;
  const BinStats& at(std::size_t i) const { return bins[i]; }
  const BinStats& at(std::size_t i, std::size_t j) const { return bins[i * axes[1].size() + j]; }
};

struct BinSample {
  double x = 0;
  double y = 0;  // ignored for one-dimensional binning
  double value = 0;
};

// Per-bin means of `value`. Samples outside every bin are dropped. Results do
// not depend on input order (each bin is summed in sorted order). Throws
// std::invalid_argument for empty input or unsupported axis counts.
BinnedStatistic bin_cascades(std::span<const BinSample> samples, std::vector<Axis> axes);

// Order-free accumulator of 0/1 outcomes (default indicators) per bin.
class RateTable {
 public:
  explicit RateTable(Axis axis);
  void add(double x, bool hit);
  void merge(const RateTable& other);
  BinnedStatistic statistic() const;

 private:
  Axis axis_;
  std::vector<std::uint64_t> trials_;
  std::vector<std::uint64_t> hits_;
};

}  // namespace ibc
