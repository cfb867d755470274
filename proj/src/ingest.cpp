#include "ibc/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "ibc/errors.hpp"

namespace ibc {

namespace {

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::int32_t> parse_time(std::string_view s) {
  // HH:MM or HH:MM:SS
  if (s.size() != 5 && s.size() != 8) return std::nullopt;
  auto two = [&](std::size_t at) -> int {
    if (s[at] < '0' || s[at] > '9' || s[at + 1] < '0' || s[at + 1] > '9') return -1;
    return (s[at] - '0') * 10 + (s[at + 1] - '0');
  };
  if (s[2] != ':') return std::nullopt;
  const int h = two(0), m = two(3);
  int sec = 0;
  if (s.size() == 8) {
    if (s[5] != ':') return std::nullopt;
    sec = two(6);
  }
  if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 59) return std::nullopt;
  return h * 3600 + m * 60 + sec;
}

std::optional<double> parse_rate(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

enum Column { kDate, kTime, kLender, kBorrower, kAmount, kRate, kAggressor, kColumnCount };
constexpr std::string_view kColumnNames[kColumnCount] = {"date",   "time", "lender",   "borrower",
                                                         "amount", "rate", "aggressor"};

}  // namespace

std::vector<LoanTransaction> parse_transactions(std::istream& in, const RecordFormat& format) {
  std::vector<LoanTransaction> out;
  std::string line;
  std::size_t line_no = 0;

  // Header.
  int position[kColumnCount];
  std::fill(std::begin(position), std::end(position), -1);
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string_view header = line;
    if (line_no == 1 && header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    const auto names = split(header, format.delimiter);
    width = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto name = trim(names[i]);
      for (int c = 0; c < kColumnCount; ++c)
        if (name == kColumnNames[c]) {
          if (position[c] != -1) throw ParseError(line_no, std::string(name), "duplicate column");
          position[c] = static_cast<int>(i);
        }
    }
    for (int c = kDate; c <= kAmount; ++c)
      if (position[c] == -1) throw ParseError(line_no, std::string(kColumnNames[c]), "missing column");
    break;
  }
  if (width == 0) return out;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, format.delimiter);
    if (fields.size() != width)
      throw ParseError(line_no, "*", "expected " + std::to_string(width) + " fields, got " +
                                         std::to_string(fields.size()));
    auto field = [&](Column c) { return trim(fields[static_cast<std::size_t>(position[c])]); };
    auto fail = [&](Column c, const std::string& what) {
      return ParseError(line_no, std::string(kColumnNames[c]), what);
    };

    LoanTransaction tx;
    auto date = parse_date(field(kDate));
    if (!date) throw fail(kDate, "not an ISO-8601 date");
    tx.date = *date;
    auto time = parse_time(field(kTime));
    if (!time) throw fail(kTime, "not HH:MM[:SS]");
    tx.time_of_day = *time;
    auto lender = parse_bank_id(field(kLender));
    if (!lender) throw fail(kLender, "unknown bank id format");
    tx.lender = *lender;
    auto borrower = parse_bank_id(field(kBorrower));
    if (!borrower) throw fail(kBorrower, "unknown bank id format");
    tx.borrower = *borrower;
    if (tx.lender == tx.borrower) throw fail(kBorrower, "lender equals borrower");
    auto amount = parse_money(field(kAmount));
    if (!amount) throw fail(kAmount, "not a decimal amount with at most 6 fractional digits");
    if (*amount <= Money{}) throw fail(kAmount, "amount must be positive");
    tx.amount = *amount;
    if (position[kRate] != -1 && !field(kRate).empty()) {
      auto rate = parse_rate(field(kRate));
      if (!rate) throw fail(kRate, "not a number");
      tx.rate = *rate;
    }
    if (position[kAggressor] != -1) {
      const auto a = field(kAggressor);
      if (a == "L")
        tx.aggressor = Aggressor::Lender;
      else if (a == "B")
        tx.aggressor = Aggressor::Borrower;
      else if (a == "U" || a.empty())
        tx.aggressor = Aggressor::Unknown;
      else
        throw fail(kAggressor, "expected L, B or U");
    }
    out.push_back(tx);
  }
  return out;
}

void write_transactions(std::ostream& out, std::span<const LoanTransaction> txs, const RecordFormat& format) {
  const char d = format.delimiter;
  out << "date" << d << "time" << d << "lender" << d << "borrower" << d << "amount" << d << "rate" << d
      << "aggressor\n";
  char time_buf[16];
  char rate_buf[32];
  for (const auto& tx : txs) {
    std::snprintf(time_buf, sizeof time_buf, "%02d:%02d:%02d", tx.time_of_day / 3600,
                  (tx.time_of_day / 60) % 60, tx.time_of_day % 60);
    auto [p, ec] = std::to_chars(rate_buf, rate_buf + sizeof rate_buf, tx.rate);
    *p = '\0';
    out << format_date(tx.date) << d << time_buf << d << format_bank_id(tx.lender) << d
        << format_bank_id(tx.borrower) << d << format_money(tx.amount) << d << rate_buf << d
        << static_cast<char>(tx.aggressor) << '\n';
  }
}

std::vector<DailyNetwork> build_daily_networks(std::span<const LoanTransaction> txs) {
  std::map<Date, std::vector<GrossLoan>> by_day;
  for (const auto& tx : txs) by_day[tx.date].push_back({tx.lender, tx.borrower, tx.amount});
  std::vector<DailyNetwork> out;
  out.reserve(by_day.size());
  for (const auto& [date, loans] : by_day) out.push_back(net_edges(date, loans));
  return out;
}

ActivityHistory::ActivityHistory(std::span<const LoanTransaction> txs) {
  std::map<std::pair<BankId, Date>, Money> daily;
  for (const auto& tx : txs) {
    daily[{tx.lender, tx.date}] += tx.amount;
    daily[{tx.borrower, tx.date}] += tx.amount;
  }
  // Map iteration is ordered by (bank, date), so entries come out sorted.
  for (const auto& [key, volume] : daily) by_bank_[key.first].push_back({key.second, volume});
}

std::span<const ActivityHistory::Entry> ActivityHistory::entries(BankId bank) const {
  auto it = by_bank_.find(bank);
  if (it == by_bank_.end()) return {};
  return it->second;
}

double ActivityHistory::rolling_volume(BankId bank, Date as_of) const {
  const auto hist = entries(bank);
  auto end = std::upper_bound(hist.begin(), hist.end(), as_of,
                              [](const Date& d, const Entry& e) { return d < e.date; });
  const auto available = static_cast<std::size_t>(end - hist.begin());
  if (available == 0)
    throw DataError("bank " + format_bank_id(bank) + " has no trading history up to " + format_date(as_of));
  const std::size_t window = std::min(kWindow, available);
  std::int64_t sum = 0;
  for (auto it = end - static_cast<std::ptrdiff_t>(window); it != end; ++it) sum += it->volume.units();
  return static_cast<double>(sum) / static_cast<double>(window) / static_cast<double>(Money::kUnitsPerMillion);
}

}  // namespace ibc
