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

#include "sentinel/time.hpp"

#include <charconv>
#include <cstdio>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

using namespace std::chrono;

[[noreturn]] void Malformed(std::string_view text) {
  throw Error(ErrorCode::kInvalidArgument,
              "malformed timestamp '" + std::string(text) + "'");
}

int ReadDigits(std::string_view text, std::size_t& pos, std::size_t count) {
  if (pos + count > text.size()) Malformed(text);
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data() + pos, text.data() + pos + count, value);
  if (ec != std::errc{} || ptr != text.data() + pos + count) Malformed(text);
  pos += count;
  return value;
}

void Expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) Malformed(text);
  ++pos;
}

}  // namespace

std::string FormatIso8601(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss<milliseconds> tod{t - day};
  char buf[40];
  const int ms = static_cast<int>(tod.subseconds().count());
  if (ms != 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), ms);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
  }
  return buf;
}

Timestamp ParseIso8601(std::string_view text) {
  std::size_t pos = 0;
  const int y = ReadDigits(text, pos, 4);
  Expect(text, pos, '-');
  const int mo = ReadDigits(text, pos, 2);
  Expect(text, pos, '-');
  const int d = ReadDigits(text, pos, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) Malformed(text);
  Timestamp result{sys_days{ymd}};
  if (pos == text.size()) return result;

  if (text[pos] != 'T' && text[pos] != ' ') Malformed(text);
  ++pos;
  const int hh = ReadDigits(text, pos, 2);
  Expect(text, pos, ':');
  const int mm = ReadDigits(text, pos, 2);
  Expect(text, pos, ':');
  const int ss = ReadDigits(text, pos, 2);
  if (hh > 23 || mm > 59 || ss > 60) Malformed(text);
  result += hours{hh} + minutes{mm} + seconds{ss};

  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int ms = 0;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) ms = ms * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) Malformed(text);
    for (int i = digits; i < 3; ++i) ms *= 10;
    result += milliseconds{ms};
  }

  if (pos == text.size()) return result;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return result;
  if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    ++pos;
    const int oh = ReadDigits(text, pos, 2);
    Expect(text, pos, ':');
    const int om = ReadDigits(text, pos, 2);
    if (pos != text.size()) Malformed(text);
    return result - sign * (hours{oh} + minutes{om});
  }
  Malformed(text);
}

Timestamp ParseTimestamp(std::string_view text) {
  bool all_digits = !text.empty();
  for (char c : text) all_digits = all_digits && c >= '0' && c <= '9';
  if (all_digits) {
    std::int64_t ms = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), ms);
    if (ec != std::errc{}) Malformed(text);
    return FromEpochMillis(ms);
  }
  return ParseIso8601(text);
}

Timestamp SystemClock::Now() const {
  return floor<milliseconds>(system_clock::now());
}

double SystemClock::SteadyMillis() const {
  return duration<double, std::milli>(steady_clock::now().time_since_epoch())
      .count();
}

const Clock& DefaultClock() {
  static const SystemClock clock;
  return clock;
}

}  // namespace sentinel
