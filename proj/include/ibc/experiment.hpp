#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ibc/balance.hpp"
#include "ibc/cascade.hpp"
#include "ibc/centrality.hpp"
#include "ibc/ingest.hpp"
#include "ibc/nullmodel.hpp"
#include "ibc/types.hpp"

namespace ibc {

std::vector<double> default_gamma_grid();  // 0.01 .. 0.10
std::vector<double> default_theta_grid();  // 0.1 .. 0.5

struct ExperimentConfig {
  std::string input;               // transaction file; exclusive with preset
  std::string preset;              // "2006-like" / "2011-like"
  std::uint64_t preset_seed = 0;   // 0 keeps the preset's own seed
  std::uint32_t days = 0;          // first N trading days only; 0 = all
  std::vector<std::pair<std::string, std::string>> preset_overrides;  // preset.<field>=value keys
  // Baseline point for the single-point tables. Unset: the grid value
  // closest to 0.05 / 0.2. Set: added to the grid if missing.
  std::optional<double> baseline_gamma;
  std::optional<double> baseline_theta;
  Params params;                   // filled in by resolved()
  std::vector<double> gamma_grid = default_gamma_grid();
  std::vector<double> theta_grid = default_theta_grid();
  std::vector<NullModelKind> null_kinds = {NullModelKind::Empirical};
  std::uint32_t replicates = 20;   // per non-empirical kind
  std::vector<double> thresholds = {0.05};
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";
  std::uint32_t workers = 1;
  CascadeMeasure measure = CascadeMeasure::Nodes;
  bool write_raw = true;
  RewireConfig rewire;

  // Throws ConfigError on an invalid combination.
  void validate() const;
  // Sorted, de-duplicated grids with the baseline included; Empirical first.
  ExperimentConfig resolved() const;
};

// Applies one key=value setting. Throws ConfigError for unknown keys or bad
// values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
// Reads a key=value file ('#' comments, blank lines ignored).
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);
// The resolved configuration in the same key=value syntax.
std::string format_config(const ExperimentConfig& cfg);

std::vector<double> parse_double_list(std::string_view text);
std::vector<NullModelKind> parse_null_model_list(std::string_view text);
CascadeMeasure parse_measure(std::string_view text);
std::string_view to_string(CascadeMeasure m);

// One simulation.
struct RunRecord {
  Date date{};
  NullModelKind kind = NullModelKind::Empirical;
  std::uint32_t replicate = 0;
  double gamma = 0;
  double theta = 0;
  CascadeResult result;
  std::uint32_t in_degree = 0;
  std::uint32_t out_degree = 0;
  double closeness = 0;
  std::uint32_t core = 0;
};

void write_run_header(std::ostream& out);
void write_run(std::ostream& out, const RunRecord& r);

// Aggregate of one cascade measure per (kind, gamma, theta) over daily means.
struct SummaryRow {
  NullModelKind kind{};
  double gamma = 0;
  double theta = 0;
  std::size_t days = 0;
  double mean = 0;
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  double std_error = 0;
  double ratio = 1;        // mean / Empirical mean at the same grid point
  bool zero_flag = false;  // Empirical mean is zero; ratio reported as 1
};

struct DailyRow {
  Date date{};
  NullModelKind kind{};
  double gamma = 0;
  double theta = 0;
  std::uint64_t runs = 0;
  double mean_nodes = 0;
  double mean_lending = 0;
  std::uint64_t knock_on = 0;              // runs with at least one knock-on default
  std::vector<std::uint64_t> over_nodes;   // runs above each threshold
  std::vector<std::uint64_t> over_lending;
};

// Streaming aggregation of run records, shared by `run` and `summarize` so
// both produce identical numbers from identical rows.
class RunAggregator {
 public:
  explicit RunAggregator(std::vector<double> thresholds = {0.05});

  void add(Date date, NullModelKind kind, double gamma, double theta, double node_fraction,
           double loss_fraction, std::uint32_t defaulted_count);
  void add(const RunRecord& r);

  std::uint64_t record_count() const { return records_; }
  std::vector<DailyRow> daily() const;
  std::vector<SummaryRow> summary(CascadeMeasure measure) const;

 private:
  struct Cell {
    std::uint64_t runs = 0;
    double sum_nodes = 0;
    double sum_lending = 0;
    std::uint64_t knock_on = 0;
    std::vector<std::uint64_t> over_nodes, over_lending;
  };
  using Key = std::tuple<int, double, double, Date>;  // kind, gamma, theta, date
  std::vector<double> thresholds_;
  std::map<Key, Cell> cells_;
  std::uint64_t records_ = 0;
};

void write_summary(std::ostream& out, std::span<const SummaryRow> rows);

// Re-aggregates a raw run table. Throws DataError on malformed rows or an
// empty table.
std::vector<SummaryRow> summarize(std::istream& runs, CascadeMeasure measure);

struct ExperimentResult {
  ExperimentConfig config;  // resolved
  std::uint64_t records = 0;
  std::uint64_t ineligible_seeds = 0;   // nodes without borrowing, per simulated network and grid point
  std::uint64_t clamped_sheets = 0;
  std::uint64_t partial_rewires = 0;
  std::uint64_t networks = 0;           // generated networks, Empirical included
  std::uint32_t days = 0;
  double knock_on_share = 0;            // Empirical baseline
  std::vector<SummaryRow> nodes;
  std::vector<SummaryRow> lending;
  BinnedStatistic seed_in_degree;       // Empirical baseline, decile bins; value = measure
  BinnedStatistic seed_core;            // Empirical baseline, integer bins
  std::vector<std::string> files;       // written, relative to out_dir
};

// Loads or generates the transactions named by the config.
std::vector<LoanTransaction> load_transactions(const ExperimentConfig& cfg);

// Runs the full matrix and writes every table into cfg.out_dir. Errors carry
// the day, kind and replicate that failed; a failing day aborts the run.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace ibc
