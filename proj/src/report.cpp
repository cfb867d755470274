#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

#include "ibc/errors.hpp"
#include "ibc/experiment.hpp"

namespace ibc {

namespace {

// Linear interpolation between order statistics (R type 7).
double quantile(const std::vector<double>& sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(delim);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace

void write_run_header(std::ostream& out) {
  out << "date,kind,replicate,seed,gamma,theta,initial_shock,defaulted,node_fraction,lending_loss,"
         "loss_fraction,rounds,in_degree,out_degree,closeness,core\n";
}

void write_run(std::ostream& out, const RunRecord& r) {
  const auto& c = r.result;
  out << format_date(r.date) << ',' << to_string(r.kind) << ',' << r.replicate << ',' << format_bank_id(c.seed)
      << ',' << format_double(r.gamma) << ',' << format_double(r.theta) << ',' << format_money(c.initial_shock)
      << ',' << c.defaulted_count << ',' << format_double(c.node_fraction) << ',' << format_money(c.lending_loss)
      << ',' << format_double(c.loss_fraction) << ',' << c.rounds << ',' << r.in_degree << ',' << r.out_degree
      << ',' << format_double(r.closeness) << ',' << r.core << '\n';
}

RunAggregator::RunAggregator(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {}

void RunAggregator::add(Date date, NullModelKind kind, double gamma, double theta, double node_fraction,
                        double loss_fraction, std::uint32_t defaulted_count) {
  Cell& c = cells_[Key{static_cast<int>(kind), gamma, theta, date}];
  if (c.runs == 0) {
    c.over_nodes.assign(thresholds_.size(), 0);
    c.over_lending.assign(thresholds_.size(), 0);
  }
  ++c.runs;
  c.sum_nodes += node_fraction;
  c.sum_lending += loss_fraction;
  if (defaulted_count > 0) ++c.knock_on;
  for (std::size_t t = 0; t < thresholds_.size(); ++t) {
    if (node_fraction > thresholds_[t]) ++c.over_nodes[t];
    if (loss_fraction > thresholds_[t]) ++c.over_lending[t];
  }
  ++records_;
}

void RunAggregator::add(const RunRecord& r) {
  add(r.date, r.kind, r.gamma, r.theta, r.result.node_fraction, r.result.loss_fraction, r.result.defaulted_count);
}

std::vector<DailyRow> RunAggregator::daily() const {
  std::vector<DailyRow> out;
  out.reserve(cells_.size());
  for (const auto& [key, c] : cells_) {
    const auto& [kind, gamma, theta, date] = key;
    const auto n = static_cast<double>(c.runs);
    out.push_back({date, static_cast<NullModelKind>(kind), gamma, theta, c.runs, c.sum_nodes / n, c.sum_lending / n,
                   c.knock_on, c.over_nodes, c.over_lending});
  }
  std::stable_sort(out.begin(), out.end(), [](const DailyRow& a, const DailyRow& b) {
    return std::tie(a.date, a.kind, a.gamma, a.theta) < std::tie(b.date, b.kind, b.gamma, b.theta);
  });
  return out;
}

std::vector<SummaryRow> RunAggregator::summary(CascadeMeasure measure) const {
  std::vector<SummaryRow> out;
  auto it = cells_.begin();
  while (it != cells_.end()) {
    const auto& [kind, gamma, theta, first_date] = it->first;
    std::vector<double> daily;
    double sum = 0;
    for (; it != cells_.end() && std::get<0>(it->first) == kind && std::get<1>(it->first) == gamma &&
           std::get<2>(it->first) == theta;
         ++it) {
      const Cell& c = it->second;
      const double m = (measure == CascadeMeasure::Nodes ? c.sum_nodes : c.sum_lending) / static_cast<double>(c.runs);
      daily.push_back(m);
      sum += m;
    }
    SummaryRow row;
    row.kind = static_cast<NullModelKind>(kind);
    row.gamma = gamma;
    row.theta = theta;
    row.days = daily.size();
    const auto n = static_cast<double>(daily.size());
    row.mean = sum / n;
    if (daily.size() > 1) {
      double ss = 0;
      for (double x : daily) ss += (x - row.mean) * (x - row.mean);
      row.std_error = std::sqrt(ss / (n - 1)) / std::sqrt(n);
    }
    std::sort(daily.begin(), daily.end());
    row.median = quantile(daily, 0.5);
    row.q1 = quantile(daily, 0.25);
    row.q3 = quantile(daily, 0.75);
    out.push_back(row);
  }
  // Ratios against Empirical at the same grid point; Empirical sorts first.
  for (auto& row : out) {
    auto emp = std::find_if(out.begin(), out.end(), [&](const SummaryRow& e) {
      return e.kind == NullModelKind::Empirical && e.gamma == row.gamma && e.theta == row.theta;
    });
    if (emp == out.end() || emp->mean == 0) {
      row.ratio = 1;
      row.zero_flag = emp != out.end();
    } else {
      row.ratio = row.mean / emp->mean;
    }
  }
  return out;
}

void write_summary(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "kind,gamma,theta,days,mean,median,q1,q3,std_error,ratio,zero_flag\n";
  for (const auto& r : rows)
    out << to_string(r.kind) << ',' << format_double(r.gamma) << ',' << format_double(r.theta) << ',' << r.days
        << ',' << format_double(r.mean) << ',' << format_double(r.median) << ',' << format_double(r.q1) << ','
        << format_double(r.q3) << ',' << format_double(r.std_error) << ',' << format_double(r.ratio) << ','
        << (r.zero_flag ? 1 : 0) << '\n';
}

std::vector<SummaryRow> summarize(std::istream& runs, CascadeMeasure measure) {
  std::string line;
  if (!std::getline(runs, line)) throw DataError("run table is empty");
  std::unordered_map<std::string, std::size_t> col;
  {
    const auto names = split(line, ',');
    for (std::size_t i = 0; i < names.size(); ++i) col[std::string(names[i])] = i;
  }
  const char* required[] = {"date", "kind", "gamma", "theta", "node_fraction", "loss_fraction", "defaulted"};
  for (const char* name : required)
    if (!col.count(name)) throw DataError(std::string("run table lacks column '") + name + "'");

  RunAggregator agg;
  for (std::size_t no = 2; std::getline(runs, line); ++no) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    auto field = [&](const char* name) -> std::string_view {
      const std::size_t i = col.at(name);
      if (i >= f.size()) throw DataError("run table line " + std::to_string(no) + ": missing " + name);
      return f[i];
    };
    auto number = [&](const char* name) {
      auto v = parse_double(field(name));
      if (!v) throw DataError("run table line " + std::to_string(no) + ": bad " + name);
      return *v;
    };
    const auto date = parse_date(field("date"));
    const auto kind = parse_null_model(field("kind"));
    if (!date || !kind) throw DataError("run table line " + std::to_string(no) + ": bad date or kind");
    agg.add(*date, *kind, number("gamma"), number("theta"), number("node_fraction"), number("loss_fraction"),
            static_cast<std::uint32_t>(number("defaulted")));
  }
  if (agg.record_count() == 0) throw DataError("run table has no records");
  return agg.summary(measure);
}

}  // namespace ibc
