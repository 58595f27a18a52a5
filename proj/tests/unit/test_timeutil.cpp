#include <doctest.h>

#include "infodemic/timeutil.hpp"

using namespace infodemic;
using namespace std::chrono;

TEST_CASE("ISO timestamps") {
  CHECK(format_timestamp(*parse_timestamp("2020-03-15")) == "2020-03-15T00:00:00Z");
  CHECK(format_timestamp(*parse_timestamp("2020-03-15T10:20:30Z")) == "2020-03-15T10:20:30Z");
  CHECK(format_timestamp(*parse_timestamp("2020-03-15 10:20:30.123")) == "2020-03-15T10:20:30Z");
  CHECK(format_timestamp(*parse_timestamp("2020-03-15T01:00:00+05:30")) == "2020-03-14T19:30:00Z");
  CHECK(format_timestamp(*parse_timestamp("2020-03-15T23:00:00-0200")) == "2020-03-16T01:00:00Z");
}

TEST_CASE("Twitter timestamps") {
  CHECK(format_timestamp(*parse_timestamp("Wed Oct 10 20:19:24 +0000 2018")) == "2018-10-10T20:19:24Z");
  CHECK(format_timestamp(*parse_timestamp("Wed Oct 10 20:19:24 +0100 2018")) == "2018-10-10T19:19:24Z");
}

TEST_CASE("bad timestamps are rejected") {
  CHECK_FALSE(parse_timestamp(""));
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK_FALSE(parse_timestamp("2020-02-30"));
  CHECK_FALSE(parse_timestamp("2020-03-15T25:00:00Z"));
  CHECK_FALSE(parse_timestamp("2020-03-15T10:00:00+9"));
  CHECK_FALSE(parse_timestamp("Wed Foo 10 20:19:24 +0000 2018"));
}

TEST_CASE("dates and months") {
  CHECK(*parse_date("2021-11-30") == year{2021} / 11 / 30);
  CHECK(*parse_date("2021-11") == year{2021} / 11 / 1);
  CHECK_FALSE(parse_date("2021-13"));
  CHECK_FALSE(parse_date("2021/11/30"));
  CHECK(format_month(year{2021} / 3 / 9) == "2021-03");
  CHECK(format_date(first_of_month(year{2021} / 3 / 9)) == "2021-03-01");
  CHECK(to_date(*parse_timestamp("2020-01-31T23:59:59Z")) == year{2020} / 1 / 31);
}
