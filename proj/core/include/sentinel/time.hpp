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

#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace sentinel {

// All persisted timestamps are UTC with millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

inline std::int64_t ToEpochMillis(Timestamp t) {
  return t.time_since_epoch().count();
}
inline Timestamp FromEpochMillis(std::int64_t ms) {
  return Timestamp{std::chrono::milliseconds{ms}};
}

// Formats as "YYYY-MM-DDTHH:MM:SS.mmmZ"; the fraction is omitted when zero.
std::string FormatIso8601(Timestamp t);

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM|-HH:MM]" or "YYYY-MM-DD".
// Throws Error(kInvalidArgument) on malformed input.
Timestamp ParseIso8601(std::string_view text);

// Either ISO-8601 text or a bare integer of epoch milliseconds.
Timestamp ParseTimestamp(std::string_view text);

// Injectable time source so pipelines can be replayed deterministically.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp Now() const = 0;
  // Monotonic milliseconds for measuring durations.
  virtual double SteadyMillis() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp Now() const override;
  double SteadyMillis() const override;
};

// Fixed wall time; steady time never advances.
class FixedClock final : public Clock {
 public:
  explicit FixedClock(Timestamp now) : now_(now) {}
  Timestamp Now() const override { return now_; }
  double SteadyMillis() const override { return 0.0; }

 private:
  Timestamp now_;
};

const Clock& DefaultClock();

}  // namespace sentinel
