#include "ibc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "ibc/errors.hpp"
#include "ibc/synth.hpp"

namespace ibc {

namespace {

struct SeedSample {
  std::uint32_t in_degree = 0;
  std::uint32_t out_degree = 0;
  double closeness = 0;
  std::uint32_t core = 0;
  double shock = 0;  // EUR millions
  double nodes = 0;
  double lending = 0;
};

// Conditional default probability of non-seed banks by their own centrality.
struct RateTables {
  std::vector<RateTable> tables;  // in_degree, out_degree, closeness, core

  explicit RateTables(std::size_t max_nodes) {
    const auto top = static_cast<std::int64_t>(std::max<std::size_t>(max_nodes, 2) - 1);
    tables.emplace_back(Axis::integers("in_degree", 0, top));
    tables.emplace_back(Axis::integers("out_degree", 0, top));
    tables.emplace_back(Axis::uniform("closeness", 0.0, 1.0, 0.02));
    tables.emplace_back(Axis::integers("core", 0, top));
  }
  void merge(const RateTables& o) {
    for (std::size_t i = 0; i < tables.size(); ++i) tables[i].merge(o.tables[i]);
  }
};

struct DayOutput {
  std::vector<RunRecord> records;
  std::vector<SeedSample> seeds;
  RateTables rates;
  std::uint64_t ineligible = 0;
  std::uint64_t clamped = 0;
  std::uint64_t partial_rewires = 0;
  std::uint64_t networks = 0;
  std::exception_ptr error;

  explicit DayOutput(std::size_t max_nodes) : rates(max_nodes) {}
};

struct Context {
  const ExperimentConfig& cfg;
  const std::vector<DailyNetwork>& networks;
  const ActivityHistory& history;
  std::size_t max_nodes;
};

[[noreturn]] void rethrow_with(const std::string& ctx) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(ctx + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(ctx + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(ctx + ": " + e.what());
  }
}

DayOutput simulate_day(const Context& ctx, std::size_t day) {
  const auto& cfg = ctx.cfg;
  const DailyNetwork& net = ctx.networks[day];
  DayOutput out(ctx.max_nodes);
  if (net.node_count() == 0) return out;

  std::string where = "day " + format_date(net.date());
  NullModelKind kind = NullModelKind::Empirical;
  std::uint32_t replicate = 0;
  std::optional<BankId> seed_bank;
  try {
    std::vector<double> tv(net.node_count());
    for (std::uint32_t i = 0; i < tv.size(); ++i) tv[i] = ctx.history.rolling_volume(net.bank(i), net.date());

    for (NullModelKind k : cfg.null_kinds) {
      kind = k;
      const std::uint32_t reps = k == NullModelKind::Empirical ? 1 : cfg.replicates;
      for (replicate = 0; replicate < reps; ++replicate) {
        seed_bank.reset();
        RewireOutcome info;
        info.target_swaps = 0;
        const DailyNetwork g =
            generate_null_model(k, net, derive_seed(cfg.master_seed, day, k, replicate), cfg.rewire, &info);
        check_preservation(k, net, g);
        ++out.networks;
        if (info.partial()) ++out.partial_rewires;

        const auto close = closeness_all(g);
        const auto cores = core_numbers(g);
        for (double theta : cfg.theta_grid) {
          for (double gamma : cfg.gamma_grid) {
            const Params p{theta, gamma};
            const auto sheets = rebuild_sheets(k, g, tv, p, SheetPolicy::Clamp);
            for (const auto& s : sheets) out.clamped += s.clamped ? 1 : 0;
            const CascadeModel model(g, sheets);
            CascadeState state(model);
            const bool baseline =
                k == NullModelKind::Empirical && gamma == cfg.params.gamma && theta == cfg.params.theta;
            for (std::uint32_t i = 0; i < g.node_count(); ++i) {
              if (g.lenders_of(i).empty()) {
                ++out.ineligible;
                continue;
              }
              seed_bank = g.bank(i);
              RunRecord r;
              r.date = g.date();
              r.kind = k;
              r.replicate = replicate;
              r.gamma = gamma;
              r.theta = theta;
              r.result = run_cascade(state, g.bank(i));
              r.in_degree = g.in_degree(i);
              r.out_degree = g.out_degree(i);
              r.closeness = close[i];
              r.core = cores[i];
              if (baseline) {
                out.seeds.push_back({r.in_degree, r.out_degree, r.closeness, r.core,
                                     r.result.initial_shock.millions(), r.result.node_fraction,
                                     r.result.loss_fraction});
                for (std::uint32_t j = 0; j < g.node_count(); ++j) {
                  if (j == i) continue;
                  const bool hit = state.defaulted(j);
                  out.rates.tables[0].add(g.in_degree(j), hit);
                  out.rates.tables[1].add(g.out_degree(j), hit);
                  out.rates.tables[2].add(close[j], hit);
                  out.rates.tables[3].add(cores[j], hit);
                }
              }
              out.records.push_back(r);
            }
            seed_bank.reset();
          }
        }
      }
    }
  } catch (...) {
    where += ", kind " + std::string(to_string(kind)) + ", replicate " + std::to_string(replicate);
    if (seed_bank) where += ", seed bank " + format_bank_id(*seed_bank);
    rethrow_with(where);
  }
  return out;
}

// Runs simulate_day over all days with `workers` threads and hands results to
// `consume` strictly in day order.
template <class Consume>
void for_each_day(const Context& ctx, Consume&& consume) {
  const std::size_t n_days = ctx.networks.size();
  const std::size_t workers = std::min<std::size_t>(ctx.cfg.workers, std::max<std::size_t>(n_days, 1));
  if (workers <= 1) {
    for (std::size_t d = 0; d < n_days; ++d) consume(simulate_day(ctx, d));
    return;
  }
  const std::size_t window = 2 * workers;
  std::vector<std::optional<DayOutput>> slots(n_days);
  std::mutex mu;
  std::condition_variable cv;
  std::size_t next = 0;
  std::size_t consumed = 0;
  bool abort = false;

  auto work = [&] {
    while (true) {
      std::size_t d;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return abort || next >= n_days || next < consumed + window; });
        if (abort || next >= n_days) return;
        d = next++;
      }
      std::optional<DayOutput> result;
      try {
        result.emplace(simulate_day(ctx, d));
      } catch (...) {
        result.emplace(ctx.max_nodes);
        result->error = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        slots[d] = std::move(result);
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);

  std::exception_ptr failure;
  for (std::size_t d = 0; d < n_days && !failure; ++d) {
    std::optional<DayOutput> out;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return slots[d].has_value(); });
      out = std::move(slots[d]);
      slots[d].reset();
      consumed = d + 1;
    }
    cv.notify_all();
    if (out->error) {
      failure = out->error;
      break;
    }
    try {
      consume(std::move(*out));
    } catch (...) {
      failure = std::current_exception();
    }
  }
  {
    std::lock_guard lock(mu);
    abort = true;
  }
  cv.notify_all();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name,
                          std::vector<std::string>& files) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  files.push_back(name);
  return out;
}

void close_output(std::ofstream& out, const std::string& name) {
  out.close();
  if (!out) throw std::runtime_error("write failed: " + name);
}

double measure_of(const SeedSample& s, CascadeMeasure m) { return m == CascadeMeasure::Nodes ? s.nodes : s.lending; }

void write_bins_1d(std::ostream& o, const BinnedStatistic& b) {
  o << "bin_lo,bin_hi,count,mean,std_error\n";
  const auto& edges = b.axes[0].edges;
  for (std::size_t i = 0; i < b.bins.size(); ++i) {
    if (b.bins[i].count == 0) continue;
    o << format_double(edges[i]) << ',' << format_double(edges[i + 1]) << ',' << b.bins[i].count << ','
      << format_double(b.bins[i].mean) << ',' << format_double(b.bins[i].std_error) << '\n';
  }
}

void write_bins_2d(std::ostream& o, const BinnedStatistic& b) {
  const auto& ex = b.axes[0].edges;
  const auto& ey = b.axes[1].edges;
  o << b.axes[0].name << "_lo," << b.axes[0].name << "_hi," << b.axes[1].name << "_lo," << b.axes[1].name
    << "_hi,count,mean,std_error\n";
  for (std::size_t i = 0; i < b.axes[0].size(); ++i)
    for (std::size_t j = 0; j < b.axes[1].size(); ++j) {
      const auto& s = b.at(i, j);
      if (s.count == 0) continue;
      o << format_double(ex[i]) << ',' << format_double(ex[i + 1]) << ',' << format_double(ey[j]) << ','
        << format_double(ey[j + 1]) << ',' << s.count << ',' << format_double(s.mean) << ','
        << format_double(s.std_error) << '\n';
    }
}

std::int64_t max_of(const std::vector<SeedSample>& seeds, std::uint32_t SeedSample::*field) {
  std::int64_t m = 0;
  for (const auto& s : seeds) m = std::max<std::int64_t>(m, s.*field);
  return m;
}

}  // namespace

std::vector<LoanTransaction> load_transactions(const ExperimentConfig& cfg) {
  std::vector<LoanTransaction> txs;
  if (!cfg.preset.empty()) {
    auto preset = find_preset(cfg.preset);
    if (!preset) throw ConfigError("unknown preset '" + cfg.preset + "'");
    for (const auto& [k, v] : cfg.preset_overrides) set_preset_field(*preset, k, v);
    if (cfg.preset_seed != 0) preset->seed = cfg.preset_seed;
    if (cfg.days != 0) preset->n_days = std::min(preset->n_days, cfg.days);
    txs = generate_market(*preset);
  } else {
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) throw DataError("cannot read input file " + cfg.input);
    txs = parse_transactions(in);
    if (cfg.days != 0) {
      std::vector<Date> dates;
      for (const auto& t : txs) dates.push_back(t.date);
      std::sort(dates.begin(), dates.end());
      dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
      if (dates.size() > cfg.days) {
        const Date last = dates[cfg.days - 1];
        std::erase_if(txs, [&](const LoanTransaction& t) { return t.date > last; });
      }
    }
  }
  if (txs.empty()) throw DataError("no transactions to simulate");
  return txs;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult res;
  res.config = config.resolved();
  const ExperimentConfig& cfg = res.config;

  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw ConfigError("cannot create output directory " + cfg.out_dir);

  const auto txs = load_transactions(cfg);
  const auto networks = build_daily_networks(txs);
  const ActivityHistory history(txs);
  std::size_t max_nodes = 2;
  for (const auto& n : networks) max_nodes = std::max(max_nodes, n.node_count());
  const Context ctx{cfg, networks, history, max_nodes};
  res.days = static_cast<std::uint32_t>(networks.size());

  std::ofstream raw;
  if (cfg.write_raw) {
    raw = open_output(dir, "runs.csv", res.files);
    write_run_header(raw);
  }
  RunAggregator agg(cfg.thresholds);
  RateTables rates(max_nodes);
  std::vector<SeedSample> seeds;
  std::map<NullModelKind, std::uint64_t> by_kind;

  for_each_day(ctx, [&](DayOutput&& day) {
    for (const auto& r : day.records) {
      if (cfg.write_raw) write_run(raw, r);
      agg.add(r);
      ++by_kind[r.kind];
    }
    seeds.insert(seeds.end(), day.seeds.begin(), day.seeds.end());
    rates.merge(day.rates);
    res.ineligible_seeds += day.ineligible;
    res.clamped_sheets += day.clamped;
    res.partial_rewires += day.partial_rewires;
    res.networks += day.networks;
  });
  if (cfg.write_raw) close_output(raw, "runs.csv");
  res.records = agg.record_count();
  if (res.records == 0) throw DataError("no eligible seed banks in the input");

  res.nodes = agg.summary(CascadeMeasure::Nodes);
  res.lending = agg.summary(CascadeMeasure::Lending);

  // daily.csv
  {
    auto o = open_output(dir, "daily.csv", res.files);
    o << "date,kind,gamma,theta,runs,mean_nodes,mean_lending,knock_on_share";
    for (double t : cfg.thresholds) o << ",share_nodes_gt_" << format_double(t);
    for (double t : cfg.thresholds) o << ",share_lending_gt_" << format_double(t);
    o << '\n';
    for (const auto& d : agg.daily()) {
      const auto n = static_cast<double>(d.runs);
      o << format_date(d.date) << ',' << to_string(d.kind) << ',' << format_double(d.gamma) << ','
        << format_double(d.theta) << ',' << d.runs << ',' << format_double(d.mean_nodes) << ','
        << format_double(d.mean_lending) << ',' << format_double(static_cast<double>(d.knock_on) / n);
      for (auto c : d.over_nodes) o << ',' << format_double(static_cast<double>(c) / n);
      for (auto c : d.over_lending) o << ',' << format_double(static_cast<double>(c) / n);
      o << '\n';
    }
    close_output(o, "daily.csv");
  }
  for (auto [m, rows] : {std::pair{CascadeMeasure::Nodes, &res.nodes}, std::pair{CascadeMeasure::Lending, &res.lending}}) {
    const std::string name = "summary_" + std::string(to_string(m)) + ".csv";
    auto o = open_output(dir, name, res.files);
    write_summary(o, *rows);
    close_output(o, name);
  }

  // Empirical sensitivity sweep.
  {
    auto o = open_output(dir, "sensitivity.csv", res.files);
    o << "gamma,theta,mean_nodes,se_nodes,mean_lending,se_lending\n";
    for (std::size_t i = 0; i < res.nodes.size(); ++i) {
      const auto& a = res.nodes[i];
      const auto& b = res.lending[i];
      if (a.kind != NullModelKind::Empirical) continue;
      o << format_double(a.gamma) << ',' << format_double(a.theta) << ',' << format_double(a.mean) << ','
        << format_double(a.std_error) << ',' << format_double(b.mean) << ',' << format_double(b.std_error) << '\n';
    }
    close_output(o, "sensitivity.csv");
  }

  // Null-model comparison per day at the baseline point.
  {
    auto o = open_output(dir, "null_model_daily.csv", res.files);
    o << "date,kind,mean_nodes,mean_lending\n";
    for (const auto& d : agg.daily())
      if (d.gamma == cfg.params.gamma && d.theta == cfg.params.theta)
        o << format_date(d.date) << ',' << to_string(d.kind) << ',' << format_double(d.mean_nodes) << ','
          << format_double(d.mean_lending) << '\n';
    close_output(o, "null_model_daily.csv");
  }

  // Deviation from Empirical along gamma at the baseline theta.
  {
    auto o = open_output(dir, "null_model_deviation.csv", res.files);
    o << "kind,gamma,theta,mean_nodes,deviation_nodes,se_deviation_nodes,mean_lending,deviation_lending,"
         "se_deviation_lending\n";
    auto empirical = [&](const std::vector<SummaryRow>& rows, const SummaryRow& r) {
      return *std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& e) {
        return e.kind == NullModelKind::Empirical && e.gamma == r.gamma && e.theta == r.theta;
      });
    };
    auto se_ratio = [](const SummaryRow& k, const SummaryRow& e) {
      if (k.mean == 0 || e.mean == 0) return 0.0;
      return k.ratio * std::sqrt(std::pow(k.std_error / k.mean, 2) + std::pow(e.std_error / e.mean, 2));
    };
    for (std::size_t i = 0; i < res.nodes.size(); ++i) {
      const auto& a = res.nodes[i];
      const auto& b = res.lending[i];
      if (a.theta != cfg.params.theta) continue;
      o << to_string(a.kind) << ',' << format_double(a.gamma) << ',' << format_double(a.theta) << ','
        << format_double(a.mean) << ',' << format_double(a.ratio) << ','
        << format_double(se_ratio(a, empirical(res.nodes, a))) << ',' << format_double(b.mean) << ','
        << format_double(b.ratio) << ',' << format_double(se_ratio(b, empirical(res.lending, b))) << '\n';
    }
    close_output(o, "null_model_deviation.csv");
  }

  // Seed-structure tables from the Empirical baseline.
  std::uint64_t knock_on = 0;
  for (const auto& s : seeds) knock_on += s.nodes > 0 ? 1 : 0;
  res.knock_on_share = seeds.empty() ? 0.0 : static_cast<double>(knock_on) / static_cast<double>(seeds.size());
  if (!seeds.empty()) {
    const CascadeMeasure m = cfg.measure;
    double lo = seeds.front().shock, hi = lo;
    for (const auto& s : seeds) {
      lo = std::min(lo, s.shock);
      hi = std::max(hi, s.shock);
    }
    const Axis shock_axis = Axis::logarithmic("shock", lo, hi, 4);
    const std::int64_t max_in = max_of(seeds, &SeedSample::in_degree);
    const std::int64_t max_out = max_of(seeds, &SeedSample::out_degree);
    const std::int64_t max_core = max_of(seeds, &SeedSample::core);

    std::vector<BinSample> by_shock_nodes, by_shock_lending, by_degree, by_in_shock, by_in, by_core;
    std::vector<std::int64_t> in_degrees;
    for (const auto& s : seeds) {
      by_shock_nodes.push_back({s.shock, 0, s.nodes});
      by_shock_lending.push_back({s.shock, 0, s.lending});
      by_degree.push_back({double(s.in_degree), double(s.out_degree), measure_of(s, m)});
      by_in_shock.push_back({double(s.in_degree), s.shock, measure_of(s, m)});
      by_in.push_back({double(s.in_degree), 0, measure_of(s, m)});
      by_core.push_back({double(s.core), 0, measure_of(s, m)});
      in_degrees.push_back(s.in_degree);
    }
    {
      const auto a = bin_cascades(by_shock_nodes, {shock_axis});
      const auto b = bin_cascades(by_shock_lending, {shock_axis});
      auto o = open_output(dir, "size_by_shock.csv", res.files);
      o << "shock_lo,shock_hi,count,mean_nodes,se_nodes,mean_lending,se_lending\n";
      for (std::size_t i = 0; i < a.bins.size(); ++i) {
        if (a.bins[i].count == 0) continue;
        o << format_double(shock_axis.edges[i]) << ',' << format_double(shock_axis.edges[i + 1]) << ','
          << a.bins[i].count << ',' << format_double(a.bins[i].mean) << ',' << format_double(a.bins[i].std_error)
          << ',' << format_double(b.bins[i].mean) << ',' << format_double(b.bins[i].std_error) << '\n';
      }
      close_output(o, "size_by_shock.csv");
    }
    {
      auto o = open_output(dir, "size_by_degree.csv", res.files);
      write_bins_2d(o, bin_cascades(by_degree, {Axis::integers("in_degree", 1, max_in),
                                                Axis::integers("out_degree", 0, max_out)}));
      close_output(o, "size_by_degree.csv");
    }
    {
      auto o = open_output(dir, "size_by_in_degree_and_shock.csv", res.files);
      write_bins_2d(o, bin_cascades(by_in_shock, {Axis::integers("in_degree", 1, max_in), shock_axis}));
      close_output(o, "size_by_in_degree_and_shock.csv");
    }
    res.seed_in_degree = bin_cascades(by_in, {Axis::integer_quantiles("in_degree", in_degrees, 10)});
    {
      auto o = open_output(dir, "size_by_in_degree_decile.csv", res.files);
      write_bins_1d(o, res.seed_in_degree);
      close_output(o, "size_by_in_degree_decile.csv");
    }
    res.seed_core = bin_cascades(by_core, {Axis::integers("core", 0, max_core)});
    {
      auto o = open_output(dir, "size_by_seed_core.csv", res.files);
      o << "core,count,mean,std_error\n";
      for (std::size_t i = 0; i < res.seed_core.bins.size(); ++i) {
        const auto& b = res.seed_core.bins[i];
        if (b.count == 0) continue;
        o << i << ',' << b.count << ',' << format_double(b.mean) << ',' << format_double(b.std_error) << '\n';
      }
      close_output(o, "size_by_seed_core.csv");
    }
    for (const auto& table : rates.tables) {
      const auto stat = table.statistic();
      const std::string name = "default_probability_" + stat.axes[0].name + ".csv";
      auto o = open_output(dir, name, res.files);
      o << "bin_lo,bin_hi,trials,default_probability,std_error\n";
      for (std::size_t i = 0; i < stat.bins.size(); ++i) {
        if (stat.bins[i].count == 0) continue;
        o << format_double(stat.axes[0].edges[i]) << ',' << format_double(stat.axes[0].edges[i + 1]) << ','
          << stat.bins[i].count << ',' << format_double(stat.bins[i].mean) << ','
          << format_double(stat.bins[i].std_error) << '\n';
      }
      close_output(o, name);
    }
  }

  {
    auto o = open_output(dir, "config.txt", res.files);
    o << format_config(cfg);
    close_output(o, "config.txt");
  }
  {
    nlohmann::ordered_json j;
    j["days"] = res.days;
    j["networks"] = res.networks;
    j["records"] = res.records;
    nlohmann::ordered_json kinds = nlohmann::ordered_json::object();
    for (auto [k, n] : by_kind) kinds[std::string(to_string(k))] = n;
    j["records_by_kind"] = kinds;
    j["ineligible_seeds"] = res.ineligible_seeds;
    j["seed_slots"] = res.records + res.ineligible_seeds;
    j["clamped_sheets"] = res.clamped_sheets;
    j["partial_rewires"] = res.partial_rewires;
    j["baseline"] = {{"gamma", cfg.params.gamma}, {"theta", cfg.params.theta}};
    j["knock_on_share"] = res.knock_on_share;
    auto files = res.files;
    files.push_back("manifest.json");
    j["files"] = files;
    auto o = open_output(dir, "manifest.json", res.files);
    o << j.dump(2) << '\n';
    close_output(o, "manifest.json");
  }
  return res;
}

}  // namespace ibc
