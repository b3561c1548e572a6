// Copyright 2026 The Sentinel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "sentinel/error.hpp"
#include "sentinel/time.hpp"

namespace sentinel {
namespace {

TEST(Iso8601, FormatOmitsZeroFraction) {
  EXPECT_EQ(FormatIso8601(FromEpochMillis(0)), "1970-01-01T00:00:00Z");
  EXPECT_EQ(FormatIso8601(FromEpochMillis(1754035200123)), "2025-08-01T08:00:00.123Z");
}

TEST(Iso8601, ParsesOffsetsAndDates) {
  EXPECT_EQ(ToEpochMillis(ParseIso8601("2025-08-01T08:00:00Z")), 1754035200000);
  EXPECT_EQ(ParseIso8601("2025-08-01T10:00:00+02:00"), ParseIso8601("2025-08-01T08:00:00Z"));
  EXPECT_EQ(ParseIso8601("2025-08-01T03:30:00-04:30"), ParseIso8601("2025-08-01T08:00:00Z"));
  EXPECT_EQ(ParseIso8601("2025-08-01"), ParseIso8601("2025-08-01T00:00:00Z"));
  EXPECT_EQ(ToEpochMillis(ParseIso8601("2025-08-01T08:00:00.5Z")) % 1000, 500);
}

TEST(Iso8601, RoundTrips) {
  for (std::int64_t ms : {0LL, 1LL, 999LL, 1700000000000LL, 4102444799999LL}) {
    EXPECT_EQ(ToEpochMillis(ParseIso8601(FormatIso8601(FromEpochMillis(ms)))), ms);
  }
}

TEST(Iso8601, RejectsMalformed) {
  for (const char* bad : {"", "2025-13-01", "2025-02-30T00:00:00Z", "2025-08-01T25:00:00Z",
                          "2025-08-01T08:00", "yesterday", "2025-08-01T08:00:00Zjunk"}) {
    try {
      ParseIso8601(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument) << bad;
    }
  }
}

TEST(Timestamp, EpochMillisText) {
  EXPECT_EQ(ToEpochMillis(ParseTimestamp("1754035200000")), 1754035200000);
  EXPECT_EQ(ParseTimestamp("2025-08-01T08:00:00Z"), FromEpochMillis(1754035200000));
}

TEST(Clock, FixedClockIsFrozen) {
  const FixedClock clock(FromEpochMillis(42));
  EXPECT_EQ(ToEpochMillis(clock.Now()), 42);
  EXPECT_EQ(clock.SteadyMillis(), 0.0);
  const double a = DefaultClock().SteadyMillis();
  EXPECT_GE(DefaultClock().SteadyMillis(), a);
}

}  // namespace
}  // namespace sentinel
