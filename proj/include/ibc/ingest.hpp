#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "ibc/money.hpp"
#include "ibc/network.hpp"
#include "ibc/types.hpp"

namespace ibc {

enum class Aggressor : char { Lender = 'L', Borrower = 'B', Unknown = 'U' };

struct LoanTransaction {
  Date date{};
  std::int32_t time_of_day = 0;  // seconds since midnight
  BankId lender;
  BankId borrower;
  Money amount;
  double rate = 0.0;  // percent; carried, unused
  Aggressor aggressor = Aggressor::Unknown;
};

// Transaction file layout. The header row names the columns; `date`, `time`,
// `lender`, `borrower` and `amount` are required, `rate` and `aggressor`
// optional. Column order is free.
struct RecordFormat {
  char delimiter = ',';
};

// Parses a delimited transaction file. Row order is preserved. Throws
// ParseError with the 1-based line number and offending field for malformed
// rows (including amount <= 0, lender == borrower and bad bank ids). An empty
// stream yields an empty list.
std::vector<LoanTransaction> parse_transactions(std::istream& in, const RecordFormat& format = {});

// Writes the canonical layout: date,time,lender,borrower,amount,rate,aggressor.
void write_transactions(std::ostream& out, std::span<const LoanTransaction> txs,
                        const RecordFormat& format = {});

// One netted network per distinct date, in date order. Days whose trades net
// out entirely are kept as empty networks.
std::vector<DailyNetwork> build_daily_networks(std::span<const LoanTransaction> txs);

// Per-bank gross trading volume (lent + borrowed, before netting) on each day
// the bank was active.
class ActivityHistory {
 public:
  static constexpr std::size_t kWindow = 10;

  struct Entry {
    Date date{};
    Money volume;
  };

  ActivityHistory() = default;
  explicit ActivityHistory(std::span<const LoanTransaction> txs);

  // Mean volume, in EUR millions, over the last min(kWindow, available)
  // active days up to and including `as_of`. Throws DataError if the bank has
  // no activity on or before `as_of`.
  double rolling_volume(BankId bank, Date as_of) const;

  std::span<const Entry> entries(BankId bank) const;
  std::size_t bank_count() const { return by_bank_.size(); }

 private:
  std::map<BankId, std::vector<Entry>> by_bank_;
};

}  // namespace ibc
