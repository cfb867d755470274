#include <doctest.h>

#include <random>

#include "ibc/money.hpp"
#include "ibc/types.hpp"

using namespace ibc;

TEST_CASE("money parses exact decimals") {
  CHECK(parse_money("12")->units() == 12'000'000);
  CHECK(parse_money("0.5")->units() == 500'000);
  CHECK(parse_money("3.141593")->units() == 3'141'593);
  CHECK(parse_money("0.000001")->units() == 1);
  CHECK(parse_money("0")->units() == 0);
  CHECK_FALSE(parse_money(""));
  CHECK_FALSE(parse_money("-1"));
  CHECK_FALSE(parse_money("1e3"));
  CHECK_FALSE(parse_money("1.0000001"));
  CHECK_FALSE(parse_money("1,000"));
  CHECK_FALSE(parse_money("."));
  CHECK_FALSE(parse_money("abc"));
}

TEST_CASE("money formatting round-trips") {
  CHECK(format_money(Money::from_units(12'000'000)) == "12");
  CHECK(format_money(Money::from_units(500'000)) == "0.5");
  CHECK(format_money(Money::from_units(1)) == "0.000001");
  CHECK(format_money(Money{}) == "0");
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::int64_t> units(0, 1'000'000'000'000);
  for (int i = 0; i < 2000; ++i) {
    const auto m = Money::from_units(units(rng));
    CHECK(parse_money(format_money(m)) == m);
  }
}

TEST_CASE("money arithmetic is exact") {
  const auto a = Money::from_millions(0.1), b = Money::from_millions(0.2);
  CHECK(a + b == Money::from_millions(0.3));
  CHECK((b - a).units() == 100'000);
  CHECK(Money::from_units(1'500'000).millions() == 1.5);
}

TEST_CASE("dates are ISO-8601 calendar days") {
  const auto d = parse_date("2011-03-15");
  REQUIRE(d);
  CHECK(format_date(*d) == "2011-03-15");
  CHECK_FALSE(parse_date("2011-02-30"));
  CHECK_FALSE(parse_date("2011-3-15"));
  CHECK_FALSE(parse_date("15/03/2011"));
  CHECK_FALSE(parse_date("2011-03-15T00"));
  CHECK(parse_date("2012-02-29"));
}

TEST_CASE("bank ids are decimal digits") {
  CHECK(parse_bank_id("0042")->value == 42);
  CHECK(format_bank_id(BankId{42}) == "42");
  CHECK_FALSE(parse_bank_id(""));
  CHECK_FALSE(parse_bank_id("A12"));
  CHECK_FALSE(parse_bank_id("-3"));
  CHECK_FALSE(parse_bank_id("12345678901234567890"));
}

TEST_CASE("doubles format to shortest round-trip text") {
  CHECK(format_double(0.05) == "0.05");
  CHECK(format_double(1.0) == "1");
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) / 7.0;
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK_FALSE(parse_double("1.5x"));
  CHECK_FALSE(parse_double(""));
}
