#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ibc/errors.hpp"
#include "ibc/experiment.hpp"
#include "ibc/synth.hpp"

namespace ibc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size())
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

double parse_number(std::string_view key, std::string_view text) {
  auto v = parse_double(trim(text));
  if (!v || !std::isfinite(*v))
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  return *v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false");
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

double closest(const std::vector<double>& grid, double target) {
  return *std::min_element(grid.begin(), grid.end(), [&](double a, double b) {
    return std::abs(a - target) < std::abs(b - target);
  });
}

}  // namespace

std::vector<double> default_gamma_grid() { return {0.01, 0.02, 0.03, 0.04, 0.05, 0.07, 0.10}; }
std::vector<double> default_theta_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5}; }

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split_list(text)) out.push_back(parse_number("list", item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<NullModelKind> parse_null_model_list(std::string_view text) {
  std::vector<NullModelKind> out;
  for (auto item : split_list(text)) {
    if (item == "all") return {std::begin(kAllNullModelKinds), std::end(kAllNullModelKinds)};
    auto kind = parse_null_model(item);
    if (!kind) throw ConfigError("unknown null model '" + std::string(item) + "'");
    out.push_back(*kind);
  }
  if (out.empty()) throw ConfigError("empty null-model list");
  return out;
}

CascadeMeasure parse_measure(std::string_view text) {
  text = trim(text);
  if (text == "nodes") return CascadeMeasure::Nodes;
  if (text == "lending") return CascadeMeasure::Lending;
  throw ConfigError("measure must be nodes or lending, got '" + std::string(text) + "'");
}

std::string_view to_string(CascadeMeasure m) { return m == CascadeMeasure::Nodes ? "nodes" : "lending"; }

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  try {
    if (key == "input") cfg.input = value;
    else if (key == "preset") cfg.preset = value;
    else if (key == "preset_seed") cfg.preset_seed = parse_unsigned<std::uint64_t>(key, value);
    else if (key.starts_with("preset.")) {
      MarketPreset probe = preset_2011();
      set_preset_field(probe, key.substr(7), value);
      std::erase_if(cfg.preset_overrides, [&](const auto& kv) { return kv.first == key.substr(7); });
      cfg.preset_overrides.emplace_back(std::string(key.substr(7)), std::string(value));
    }
    else if (key == "days") cfg.days = parse_unsigned<std::uint32_t>(key, value);
    else if (key == "baseline_gamma") cfg.baseline_gamma = parse_number(key, value);
    else if (key == "baseline_theta") cfg.baseline_theta = parse_number(key, value);
    else if (key == "gamma") cfg.gamma_grid = parse_double_list(value);
    else if (key == "theta") cfg.theta_grid = parse_double_list(value);
    else if (key == "null_models") cfg.null_kinds = parse_null_model_list(value);
    else if (key == "replicates") cfg.replicates = parse_unsigned<std::uint32_t>(key, value);
    else if (key == "threshold") cfg.thresholds = parse_double_list(value);
    else if (key == "seed") cfg.master_seed = parse_unsigned<std::uint64_t>(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "workers") cfg.workers = parse_unsigned<std::uint32_t>(key, value);
    else if (key == "measure") cfg.measure = parse_measure(value);
    else if (key == "raw") cfg.write_raw = parse_bool(key, value);
    else if (key == "rewire_tolerance") cfg.rewire.weight_tolerance = parse_number(key, value);
    else if (key == "swaps_per_edge") cfg.rewire.swaps_per_edge = parse_unsigned<std::uint32_t>(key, value);
    else if (key == "max_attempts_factor") cfg.rewire.max_attempts_factor = parse_unsigned<std::uint32_t>(key, value);
    else throw ConfigError("unknown key '" + std::string(key) + "'");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(std::string(key), 0) == 0 || msg.rfind("unknown key", 0) == 0) throw;
    throw ConfigError(std::string(key) + ": " + msg);
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path.string() + ":" + std::to_string(no) + ": expected key=value");
    try {
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

void ExperimentConfig::validate() const {
  if (input.empty() == preset.empty()) throw ConfigError("exactly one of input and preset is required");
  if (!preset.empty() && !find_preset(preset)) throw ConfigError("unknown preset '" + preset + "'");
  if (gamma_grid.empty() || theta_grid.empty()) throw ConfigError("parameter grids must be non-empty");
  auto check_params = [](double g, double t) { Params{t, g}.validate(); };
  for (double g : gamma_grid) check_params(g, 0.2);
  for (double t : theta_grid) check_params(0.05, t);
  if (baseline_gamma) check_params(*baseline_gamma, 0.2);
  if (baseline_theta) check_params(0.05, *baseline_theta);
  if (null_kinds.empty()) throw ConfigError("at least one null model is required");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (thresholds.empty()) throw ConfigError("at least one threshold is required");
  for (double t : thresholds)
    if (!(t > 0 && t < 1)) throw ConfigError("thresholds must lie in (0, 1)");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (out_dir.empty()) throw ConfigError("output directory is required");
  if (!(rewire.weight_tolerance >= 0) || rewire.swaps_per_edge < 1 || rewire.max_attempts_factor < 1)
    throw ConfigError("invalid rewiring settings");
}

ExperimentConfig ExperimentConfig::resolved() const {
  validate();
  ExperimentConfig r = *this;
  if (r.baseline_gamma) r.gamma_grid.push_back(*r.baseline_gamma);
  if (r.baseline_theta) r.theta_grid.push_back(*r.baseline_theta);
  sort_unique(r.gamma_grid);
  sort_unique(r.theta_grid);
  sort_unique(r.thresholds);
  r.baseline_gamma = r.baseline_gamma.value_or(closest(r.gamma_grid, 0.05));
  r.baseline_theta = r.baseline_theta.value_or(closest(r.theta_grid, 0.2));
  r.params = Params{*r.baseline_theta, *r.baseline_gamma};
  r.null_kinds.push_back(NullModelKind::Empirical);
  std::sort(r.null_kinds.begin(), r.null_kinds.end());
  r.null_kinds.erase(std::unique(r.null_kinds.begin(), r.null_kinds.end()), r.null_kinds.end());
  return r;
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream o;
  if (!c.input.empty()) o << "input=" << c.input << '\n';
  if (!c.preset.empty()) o << "preset=" << c.preset << '\n';
  o << "preset_seed=" << c.preset_seed << '\n';
  o << "days=" << c.days << '\n';
  for (const auto& [k, v] : c.preset_overrides) o << "preset." << k << '=' << v << '\n';
  if (c.baseline_gamma) o << "baseline_gamma=" << format_double(*c.baseline_gamma) << '\n';
  if (c.baseline_theta) o << "baseline_theta=" << format_double(*c.baseline_theta) << '\n';
  o << "gamma=" << join(c.gamma_grid) << '\n';
  o << "theta=" << join(c.theta_grid) << '\n';
  o << "null_models=";
  for (std::size_t i = 0; i < c.null_kinds.size(); ++i) o << (i ? "," : "") << to_string(c.null_kinds[i]);
  o << '\n';
  o << "replicates=" << c.replicates << '\n';
  o << "threshold=" << join(c.thresholds) << '\n';
  o << "seed=" << c.master_seed << '\n';
  o << "out=" << c.out_dir << '\n';
  o << "workers=" << c.workers << '\n';
  o << "measure=" << to_string(c.measure) << '\n';
  o << "raw=" << (c.write_raw ? "true" : "false") << '\n';
  o << "rewire_tolerance=" << format_double(c.rewire.weight_tolerance) << '\n';
  o << "swaps_per_edge=" << c.rewire.swaps_per_edge << '\n';
  o << "max_attempts_factor=" << c.rewire.max_attempts_factor << '\n';
  return o.str();
}

}  // namespace ibc
