// ibcascade: synthetic data, cascade experiments and report tables.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ibc/errors.hpp"
#include "ibc/experiment.hpp"
#include "ibc/synth.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kData = 2, kRuntime = 3 };

// Flags that map one-to-one onto config keys; applied after the config file.
struct Overrides {
  std::map<std::string, std::string> values;

  void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
  void apply(ibc::ExperimentConfig& cfg) const {
    for (const auto& [k, v] : values) ibc::apply_setting(cfg, k, v);
  }
};

ibc::MarketPreset preset_or_throw(const std::string& name) {
  auto p = ibc::find_preset(name);
  if (!p) throw ibc::ConfigError("unknown preset '" + name + "' (expected 2006-like or 2011-like)");
  return *p;
}

int cmd_synth(const std::string& preset_name, const std::vector<std::string>& sets, std::uint64_t seed,
              std::uint32_t days, const std::string& out) {
  auto preset = preset_or_throw(preset_name);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ibc::ConfigError("--set expects FIELD=VALUE, got '" + kv + "'");
    ibc::set_preset_field(preset, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seed != 0) preset.seed = seed;
  if (days != 0) preset.n_days = std::min(preset.n_days, days);
  const auto txs = ibc::generate_market(preset);
  if (out.empty() || out == "-") {
    ibc::write_transactions(std::cout, txs);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ibc::ConfigError("cannot write " + out);
    ibc::write_transactions(f, txs);
    if (!f) throw std::runtime_error("write failed: " + out);
  }
  std::fprintf(stderr, "%zu transactions over %u days\n", txs.size(), preset.n_days);
  return kOk;
}

int cmd_run(const std::string& config_file, const Overrides& overrides) {
  ibc::ExperimentConfig cfg;
  if (!config_file.empty()) ibc::apply_config_file(cfg, config_file);
  overrides.apply(cfg);
  const auto res = ibc::run_experiment(cfg);
  std::fprintf(stderr, "%llu runs over %u days, %llu networks; knock-on share %.4f; output in %s\n",
               static_cast<unsigned long long>(res.records), res.days,
               static_cast<unsigned long long>(res.networks), res.knock_on_share, res.config.out_dir.c_str());
  for (const auto& row : res.config.measure == ibc::CascadeMeasure::Nodes ? res.nodes : res.lending) {
    if (row.gamma != res.config.params.gamma || row.theta != res.config.params.theta) continue;
    std::fprintf(stderr, "  %-18s mean %.6f  ratio %.3f\n", std::string(ibc::to_string(row.kind)).c_str(), row.mean,
                 row.ratio);
  }
  return kOk;
}

int cmd_summarize(const std::string& input, const std::string& measure_text, const std::string& out_dir) {
  const auto measure = ibc::parse_measure(measure_text);
  std::ifstream in(input, std::ios::binary);
  if (!in) throw ibc::DataError("cannot read " + input);
  const auto rows = ibc::summarize(in, measure);
  if (out_dir.empty()) {
    ibc::write_summary(std::cout, rows);
    return kOk;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto path = std::filesystem::path(out_dir) / ("summary_" + std::string(ibc::to_string(measure)) + ".csv");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ibc::ConfigError("cannot write " + path.string());
  ibc::write_summary(f, rows);
  return kOk;
}

int cmd_validate(const std::string& preset_name, const std::string& input, std::uint64_t seed) {
  auto preset = preset_or_throw(preset_name);
  if (seed != 0) preset.seed = seed;
  std::vector<ibc::LoanTransaction> txs;
  if (input.empty()) {
    txs = ibc::generate_market(preset);
  } else {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw ibc::DataError("cannot read " + input);
    txs = ibc::parse_transactions(in);
  }
  bool ok = true;
  std::printf("statistic,target,target_sd,observed,observed_sd,pass\n");
  for (const auto& c : ibc::validate_against_preset(txs, preset)) {
    std::printf("%s,%g,%g,%.4f,%.4f,%s\n", c.statistic.c_str(), c.target, c.target_sd, c.observed, c.observed_sd,
                c.pass ? "yes" : "no");
    ok = ok && c.pass;
  }
  return ok ? kOk : kData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interbank default-cascade simulator"};
  app.require_subcommand(1);

  std::string preset, input, out, measure = "nodes", config_file;
  std::uint64_t seed = 0;
  std::uint32_t days = 0;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic transaction file");
  synth->add_option("--preset", preset, "2006-like or 2011-like")->required();
  synth->add_option("--seed", seed, "Generator seed (default: the preset's)");
  synth->add_option("--days", days, "Number of trading days (default: the preset's)");
  synth->add_option("--out", out, "Output file (default: stdout)");
  std::vector<std::string> preset_sets;
  synth->add_option("--set", preset_sets, "Override a preset field, FIELD=VALUE (repeatable)");

  Overrides overrides;
  auto* run = app.add_subcommand("run", "Run the cascade experiment matrix");
  run->add_option("--config", config_file, "key=value config file; flags take precedence");
  overrides.add(*run, "--input", "input", "Transaction file");
  overrides.add(*run, "--preset", "preset", "Synthetic preset instead of an input file");
  overrides.add(*run, "--preset-seed", "preset_seed", "Seed for the synthetic preset");
  overrides.add(*run, "--days", "days", "Use only the first N trading days");
  overrides.add(*run, "--gamma", "gamma", "Capital ratio grid, comma-separated");
  overrides.add(*run, "--theta", "theta", "Interbank asset share grid, comma-separated");
  overrides.add(*run, "--baseline-gamma", "baseline_gamma", "Baseline gamma for single-point tables");
  overrides.add(*run, "--baseline-theta", "baseline_theta", "Baseline theta for single-point tables");
  overrides.add(*run, "--null-models", "null_models", "Null models, comma-separated, or 'all'");
  overrides.add(*run, "--replicates", "replicates", "Networks per non-empirical null model");
  overrides.add(*run, "--threshold", "threshold", "Large-cascade thresholds, comma-separated");
  overrides.add(*run, "--seed", "seed", "Master seed");
  overrides.add(*run, "--out", "out", "Output directory");
  overrides.add(*run, "--workers", "workers", "Worker threads");
  overrides.add(*run, "--measure", "measure", "nodes or lending (seed-structure tables)");
  run->add_option_function<std::vector<std::string>>(
      "--preset-set",
      [&](const std::vector<std::string>& kvs) {
        for (const auto& kv : kvs) {
          const auto eq = kv.find('=');
          overrides.values["preset." + kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
        }
      },
      "Override a preset field, FIELD=VALUE (repeatable)");
  run->add_flag_callback("--no-raw", [&] { overrides.values["raw"] = "false"; }, "Skip the raw run table");

  auto* summarize = app.add_subcommand("summarize", "Re-aggregate a raw run table");
  summarize->add_option("--input", input, "runs.csv from a previous run")->required();
  summarize->add_option("--measure", measure, "nodes or lending");
  summarize->add_option("--out", out, "Output directory (default: stdout)");

  auto* validate = app.add_subcommand("validate", "Check a dataset against preset moments");
  validate->add_option("--preset", preset, "Preset whose targets are checked")->required();
  validate->add_option("--input", input, "Transaction file (default: generate the preset)");
  validate->add_option("--seed", seed, "Generator seed when no input is given");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*synth) return cmd_synth(preset, preset_sets, seed, days, out);
    if (*run) return cmd_run(config_file, overrides);
    if (*summarize) return cmd_summarize(input, measure, out);
    if (*validate) return cmd_validate(preset, input, seed);
  } catch (const ibc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const ibc::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kRuntime;
  }
  return kRuntime;
}
