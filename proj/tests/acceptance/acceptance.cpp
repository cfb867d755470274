// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Usage: acceptance [work-dir] [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ibc/balance.hpp"
#include "ibc/cascade.hpp"
#include "ibc/centrality.hpp"
#include "ibc/experiment.hpp"
#include "ibc/ingest.hpp"
#include "ibc/nullmodel.hpp"
#include "ibc/synth.hpp"
#include "support/oracles.hpp"

using namespace ibc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

fs::path g_work;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> volume_proxy(const DailyNetwork& net) {
  std::vector<double> tv;
  for (std::uint32_t i = 0; i < net.node_count(); ++i)
    tv.push_back((net.lending(i) + net.borrowing(i)).millions());
  return tv;
}

// Compares engine and oracle over every eligible seed; returns mismatches.
std::uint64_t compare_instance(std::uint32_t n, const std::vector<oracle::Arc>& arcs, const std::vector<double>& tv,
                               SheetPolicy policy, std::uint64_t& runs) {
  const auto net = oracle::to_network(n, arcs, IsolatedNodes::Reject);
  std::uint64_t bad = 0;
  for (double gamma : {0.02, 0.05}) {
    const Params p{0.2, gamma};
    const auto sheets = make_balance_sheets(net, tv, p, policy);
    const CascadeModel model(net, sheets);
    CascadeState st(model);
    for (std::uint32_t s = 0; s < n; ++s) {
      if (net.in_degree(s) == 0) continue;
      const auto r = run_cascade(st, BankId{s});
      const auto o = oracle::cascade(n, arcs, tv, p, policy, s);
      bool same = r.rounds == o.productive_rounds && r.lending_loss.units() == o.lending_loss;
      std::uint32_t count = 0;
      for (std::uint32_t i = 0; i < n; ++i) {
        same = same && st.default_round(i) == o.default_round[i] && st.received_shock(i).units() == o.shock[i];
        count += i != s && o.default_round[i] >= 0;
      }
      same = same && r.defaulted_count == count;
      bad += same ? 0 : 1;
      ++runs;
    }
  }
  return bad;
}

Verdict crit1() {
  const auto t0 = Clock::now();
  std::uint64_t instances = 0, runs = 0, bad = 0;

  // Every netted digraph on 2 and 3 nodes; strided codes on 4 to 6 nodes.
  const std::uint64_t stride[] = {0, 0, 1, 1, 37, 88'289, 1'483'544'563};
  for (std::uint32_t n = 2; n <= 6; ++n) {
    const std::uint32_t pairs = n * (n - 1) / 2;
    std::uint64_t total = 1;
    for (std::uint32_t k = 0; k < pairs; ++k) total *= 7;
    for (std::uint64_t code = 0; code < total; code += stride[n]) {
      const auto arcs = oracle::decode_netted(n, code);
      if (oracle::has_isolated(n, arcs)) continue;
      const auto net = oracle::to_network(n, arcs, IsolatedNodes::Reject);
      bad += compare_instance(n, arcs, volume_proxy(net), SheetPolicy::Strict, runs);
      ++instances;
    }
  }
  const auto enumerated = instances;

  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::int64_t> units(1, 20'000'000);
  std::uniform_real_distribution<double> density(0.15, 0.6), perturb(0.5, 2.0);
  while (instances - enumerated < 10'000) {
    const auto arcs = oracle::random_netted(10, density(rng), rng, [&](auto& r) { return units(r); });
    if (oracle::has_isolated(10, arcs)) continue;
    auto tv = volume_proxy(oracle::to_network(10, arcs, IsolatedNodes::Reject));
    for (auto& v : tv) v *= perturb(rng);
    bad += compare_instance(10, arcs, tv, SheetPolicy::Clamp, runs);
    ++instances;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 60 && enumerated <= 10'000,
          std::to_string(enumerated) + " enumerated + " + std::to_string(instances - enumerated) + " random instances, " +
              std::to_string(runs) + " runs, " + std::to_string(bad) + " mismatches, " + fmt("%.1f s", secs)};
}

Verdict crit2() {
  const auto preset = preset_2011();
  const auto txs = generate_market(preset);
  const auto nets = build_daily_networks(txs);
  const ActivityHistory history(txs);

  std::uint64_t sheets_checked = 0, identity_bad = 0;
  double worst = 0;
  auto check = [&](const std::vector<BalanceSheet>& sheets) {
    for (const auto& s : sheets) {
      const double gap = std::abs((s.external_assets + s.lending) - (s.capital + s.deposits + s.borrowing));
      const double rel = gap / s.total_assets;
      worst = std::max(worst, rel);
      identity_bad += rel <= 1e-9 ? 0 : 1;
      ++sheets_checked;
    }
  };
  for (std::size_t d = 0; d < nets.size(); ++d) {
    const auto& net = nets[d];
    if (net.empty()) continue;
    std::vector<double> tv;
    for (std::uint32_t i = 0; i < net.node_count(); ++i) tv.push_back(history.rolling_volume(net.bank(i), net.date()));
    for (auto kind : kAllNullModelKinds) {
      const auto g = generate_null_model(kind, net, derive_seed(1, d, kind, 0));
      for (double theta : default_theta_grid())
        for (double gamma : default_gamma_grid()) check(rebuild_sheets(kind, g, tv, Params{theta, gamma}));
    }
  }

  // Long form of the survival condition against the capital form.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0, 1), logu(-2, 5), theta(0.05, 0.6), gamma(0.005, 0.2);
  std::uniform_int_distribution<int> digits(1, 12);
  std::uint64_t disagree = 0, pairs = 0;
  while (pairs < 100'000) {
    const Params p{theta(rng), gamma(rng)};
    const double tv = std::pow(10.0, logu(rng));
    const double l = tv * u(rng), b = tv - l;
    const auto bs = make_balance_sheet(BankId{1}, l, b, tv, p, SheetPolicy::Clamp);
    double loss = bs.lending * u(rng);
    if (pairs % 2 == 1) {
      const double eps = std::pow(10.0, -digits(rng));
      loss = bs.capital * (pairs % 4 == 1 ? 1 + eps : 1 - eps);
      if (loss > bs.lending) continue;
    }
    const long double longform = (static_cast<long double>(bs.lending) - loss) + bs.external_assets -
                                 bs.borrowing - bs.deposits;
    disagree += is_solvent(bs, loss) == (longform > 0) ? 0 : 1;
    ++pairs;
  }
  return {identity_bad == 0 && disagree == 0,
          std::to_string(sheets_checked) + " sheets, worst relative gap " + fmt("%.2e", worst) + "; " +
              std::to_string(pairs) + " loss pairs, " + std::to_string(disagree) + " disagreements"};
}

Verdict crit3() {
  auto preset = preset_2011();
  preset.n_days = 50;
  const auto nets = build_daily_networks(generate_market(preset));

  auto sorted_weights = [](const DailyNetwork& n) {
    std::vector<std::int64_t> w;
    for (const auto& e : n.edges()) w.push_back(e.weight.units());
    std::sort(w.begin(), w.end());
    return w;
  };
  auto degree_map = [](const DailyNetwork& n) {
    std::map<BankId, std::pair<std::uint32_t, std::uint32_t>> m;
    for (const auto& e : n.edges()) {
      ++m[n.bank(e.lender)].second;
      ++m[n.bank(e.borrower)].first;
    }
    return m;
  };
  auto topology = [](const DailyNetwork& n) {
    std::set<std::pair<BankId, BankId>> t;
    for (const auto& e : n.edges()) t.insert({n.bank(e.lender), n.bank(e.borrower)});
    return t;
  };
  auto netted = [](const DailyNetwork& n) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& e : n.edges()) {
      if (e.lender == e.borrower || e.weight <= Money{}) return false;
      if (seen.count({e.borrower, e.lender}) || !seen.insert({e.lender, e.borrower}).second) return false;
    }
    return true;
  };

  std::string detail;
  bool pass = true;
  for (auto kind : {NullModelKind::Rewired, NullModelKind::Random, NullModelKind::FixedWeight,
                    NullModelKind::RandomFixedWeight}) {
    std::uint64_t violations = 0, partial = 0;
    for (std::uint32_t r = 0; r < 1000; ++r) {
      const auto& net = nets[r % nets.size()];
      RewireOutcome info;
      const auto g = generate_null_model(kind, net, derive_seed(3, r % nets.size(), kind, r), {}, &info);
      partial += info.partial() ? 1 : 0;
      bool ok = netted(g) && std::equal(net.nodes().begin(), net.nodes().end(), g.nodes().begin(), g.nodes().end());
      switch (kind) {
        case NullModelKind::Rewired:
          ok = ok && degree_map(g) == degree_map(net) && sorted_weights(g) == sorted_weights(net);
          break;
        case NullModelKind::Random:
          ok = ok && g.edge_count() == net.edge_count() && sorted_weights(g) == sorted_weights(net);
          break;
        case NullModelKind::FixedWeight:
          ok = ok && topology(g) == topology(net) && g.total_weight() == net.total_weight();
          break;
        default: ok = ok && g.edge_count() == net.edge_count() && g.total_weight() == net.total_weight();
      }
      violations += ok ? 0 : 1;
    }
    pass = pass && violations == 0;
    detail += std::string(to_string(kind)) + " " + std::to_string(violations) + " violations";
    if (kind == NullModelKind::Rewired) detail += " (" + std::to_string(partial) + " partial)";
    detail += "; ";
  }
  detail += "1000 networks per kind";
  return {pass, detail};
}

// Shared 2011-like null-model run for criteria 4 and 6.
struct NullRun {
  ExperimentResult res;
  double seconds = 0;
};

const NullRun& null_run() {
  static const NullRun run = [] {
    ExperimentConfig cfg;
    cfg.preset = "2011-like";
    cfg.null_kinds = parse_null_model_list("all");
    cfg.replicates = 20;
    cfg.theta_grid = {0.2};
    cfg.baseline_gamma = 0.05;
    cfg.baseline_theta = 0.2;
    cfg.write_raw = false;
    cfg.out_dir = (g_work / "null_models").string();
    const auto t0 = Clock::now();
    NullRun r{run_experiment(cfg), 0};
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

const SummaryRow& row(const std::vector<SummaryRow>& rows, NullModelKind k, double gamma, double theta) {
  for (const auto& r : rows)
    if (r.kind == k && r.gamma == gamma && r.theta == theta) return r;
  throw std::runtime_error("missing summary row");
}

Verdict crit4() {
  const auto& run = null_run();
  const auto& rows = run.res.nodes;
  auto ratio = [&](NullModelKind k) { return row(rows, k, 0.05, 0.2).ratio; };
  const double emp = row(rows, NullModelKind::Empirical, 0.05, 0.2).mean;
  const double rw = ratio(NullModelKind::Rewired), rd = ratio(NullModelKind::Random);
  const double fw = ratio(NullModelKind::FixedWeight), rfw = ratio(NullModelKind::RandomFixedWeight);
  const bool order = rw <= 1.15 && 1.0 < rd && rd < fw && fw < rfw && emp > 0;
  const bool bands = rd >= 1.1 && rd <= 2.0 && fw >= 1.4 && fw <= 2.8 && rfw >= 1.8 && rfw <= 3.5;
  return {order && bands && run.seconds < 600,
          "empirical mean " + fmt("%.4f", emp) + ", ratios rewired " + fmt("%.3f", rw) + ", random " +
              fmt("%.3f", rd) + ", fixed-weight " + fmt("%.3f", fw) + ", random-fixed " + fmt("%.3f", rfw) +
              "; full run incl. gamma grid " + fmt("%.1f s", run.seconds)};
}

Verdict crit5() {
  ExperimentConfig cfg;
  cfg.preset = "2011-like";
  cfg.write_raw = false;
  cfg.out_dir = (g_work / "sweeps").string();
  const auto res = run_experiment(cfg);
  const auto& rows = res.nodes;

  std::vector<double> by_gamma, by_theta;
  for (double g : default_gamma_grid()) by_gamma.push_back(row(rows, NullModelKind::Empirical, g, 0.2).mean);
  for (double t : default_theta_grid()) by_theta.push_back(row(rows, NullModelKind::Empirical, 0.05, t).mean);

  bool gamma_mono = true, theta_mono = true;
  for (std::size_t i = 1; i < by_gamma.size(); ++i) gamma_mono = gamma_mono && by_gamma[i] <= by_gamma[i - 1];
  for (std::size_t i = 1; i < by_theta.size(); ++i) theta_mono = theta_mono && by_theta[i] >= by_theta[i - 1];
  const double mean001 = by_gamma.front(), mean005 = row(rows, NullModelKind::Empirical, 0.05, 0.2).mean;
  const double factor = mean001 / mean005;

  const auto thetas = default_theta_grid();
  const double n = static_cast<double>(thetas.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    sx += thetas[i];
    sy += by_theta[i];
    sxx += thetas[i] * thetas[i];
    sxy += thetas[i] * by_theta[i];
    syy += by_theta[i] * by_theta[i];
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  const double r2 = vy > 0 ? cov * cov / (vx * vy) : 0;

  std::string g_list, t_list;
  for (double v : by_gamma) g_list += fmt(" %.4f", v);
  for (double v : by_theta) t_list += fmt(" %.4f", v);
  return {gamma_mono && factor >= 3 && theta_mono && r2 >= 0.8,
          "gamma means" + g_list + " (0.01/0.05 = " + fmt("%.2f", factor) + "); theta means" + t_list +
              " (R^2 " + fmt("%.3f", r2) + ")"};
}

Verdict crit6() {
  const auto& rows = null_run().res.nodes;
  auto dev = [&](NullModelKind k, double g) { return row(rows, k, g, 0.2).ratio; };
  const double r1 = dev(NullModelKind::Random, 0.01), r5 = dev(NullModelKind::Random, 0.05);
  const double f1 = dev(NullModelKind::RandomFixedWeight, 0.01), f5 = dev(NullModelKind::RandomFixedWeight, 0.05);
  double lo = 1e9, hi = -1e9;
  for (double g : default_gamma_grid()) {
    lo = std::min(lo, dev(NullModelKind::Rewired, g));
    hi = std::max(hi, dev(NullModelKind::Rewired, g));
  }
  return {r1 > r5 && f1 > f5 && lo >= 0.85 && hi <= 1.15,
          "random " + fmt("%.3f", r1) + " at 0.01 vs " + fmt("%.3f", r5) + " at 0.05; random-fixed " +
              fmt("%.3f", f1) + " vs " + fmt("%.3f", f5) + "; rewired range [" + fmt("%.3f", lo) + ", " +
              fmt("%.3f", hi) + "]"};
}

Verdict crit7() {
  ExperimentConfig cfg;
  cfg.preset = "2006-like";
  cfg.gamma_grid = {0.05};
  cfg.theta_grid = {0.2};
  cfg.write_raw = false;
  cfg.out_dir = (g_work / "seed_structure").string();
  const auto res = run_experiment(cfg);

  bool deciles = true;
  std::string d_list;
  double prev = -1;
  for (const auto& b : res.seed_in_degree.bins) {
    if (b.count == 0) continue;
    deciles = deciles && b.mean >= prev;
    prev = b.mean;
    d_list += fmt(" %.4f", b.mean);
  }
  bool cores = true, se_reported = true;
  std::string c_list;
  prev = -1;
  std::size_t observed = 0;
  for (std::size_t k = 1; k <= 4 && k < res.seed_core.bins.size(); ++k) {
    const auto& b = res.seed_core.bins[k];
    if (b.count == 0) continue;
    ++observed;
    cores = cores && b.mean >= prev;
    se_reported = se_reported && std::isfinite(b.std_error) && (b.count < 2 || b.std_error > 0);
    prev = b.mean;
    c_list += " " + std::to_string(k) + ":" + fmt("%.4f", b.mean) + fmt("±%.4f", b.std_error);
  }
  return {deciles && cores && se_reported && observed >= 2,
          "in-degree deciles" + d_list + "; cores" + c_list};
}

Verdict crit8() {
  std::mt19937_64 rng(8080);
  std::uniform_int_distribution<std::uint32_t> size(1, 50);
  std::uniform_real_distribution<double> density(0.0, 0.3);
  std::uint64_t bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = size(rng);
    const auto arcs = oracle::random_netted(n, density(rng), rng, [](auto&) { return 1'000'000; });
    const auto net = oracle::to_network(n, arcs);
    bad += closeness_all(net) == oracle::closeness(n, arcs) ? 0 : 1;
    bad += core_numbers(net) == oracle::core_numbers(n, arcs) ? 0 : 1;
  }
  return {bad == 0, "1000 graphs of 1-50 nodes, " + std::to_string(bad) + " mismatches"};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[e.path().filename().string()] = s.str();
  }
  return out;
}

Verdict crit9() {
  ExperimentConfig cfg;
  cfg.preset = "2011-like";
  cfg.days = 30;
  cfg.null_kinds = parse_null_model_list("all");
  cfg.replicates = 3;
  cfg.workers = 3;
  cfg.master_seed = 2024;
  cfg.out_dir = (g_work / "determinism").string();
  fs::remove_all(cfg.out_dir);
  run_experiment(cfg);
  const auto first = snapshot(cfg.out_dir);
  fs::remove_all(cfg.out_dir);
  run_experiment(cfg);
  const auto second = snapshot(cfg.out_dir);
  std::size_t differ = 0;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    differ += it == second.end() || it->second != bytes ? 1 : 0;
  }
  return {differ == 0 && first.size() == second.size() && !first.empty(),
          std::to_string(first.size()) + " files compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "ibc_acceptance";
  fs::create_directories(g_work);
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"cascade engine equals rebuild-every-round oracle", crit1},
      {"balance identity and solvency forms agree", crit2},
      {"null-model preservation contracts", crit3},
      {"null-model cascade ratios (2011-like, baseline)", crit4},
      {"cascade size against gamma and theta", crit5},
      {"null-model deviation against gamma", crit6},
      {"seed in-degree and core effects (2006-like)", crit7},
      {"closeness and core oracles", crit8},
      {"end-to-end determinism", crit9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s criterion %d: %s | %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
