// Copyright 2026 The SPDT Authors
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

#ifndef SPDT_TRACE_H_
#define SPDT_TRACE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

namespace spdt {

using UserId = std::uint64_t;
using Minutes = std::int64_t;

constexpr Minutes kMinutesPerDay = 1440;

// One position report. Times are whole minutes since the trace epoch and
// positions are planar metres.
struct LocationUpdate {
  UserId user;
  Minutes t;
  double x;
  double y;

  friend bool operator==(const LocationUpdate&, const LocationUpdate&) =
      default;
};

// Orders by user, then time, then position.
bool UpdateLess(const LocationUpdate& a, const LocationUpdate& b);

struct Visit {
  UserId user;
  double anchor_x;
  double anchor_y;
  Minutes t_start;
  Minutes t_end;
  std::size_t update_count;

  friend bool operator==(const Visit&, const Visit&) = default;
};

struct ParseOptions {
  // Columns are `user_id,t_min,lat,lon`; positions are projected onto a
  // local equirectangular plane about the trace centroid.
  bool project_latlon = false;
};

struct ParsedTrace {
  std::vector<LocationUpdate> updates;  // sorted with UpdateLess
  std::size_t skipped_rows = 0;
};

// Numeric user ids are kept as is. Any other id is mapped to a 64-bit
// FNV-1a hash with the top bit set so it cannot collide with small numeric
// ids.
UserId ParseUserId(std::string_view text);

// Reads the trace CSV. An empty stream is an empty trace. Throws
// std::runtime_error on a header mismatch; rows with the wrong field count
// or non-numeric fields are skipped and counted. Fractional times are
// rounded to the nearest minute.
ParsedTrace ParseTrace(std::istream& in, const ParseOptions& options = {});
ParsedTrace ReadTraceFile(const std::filesystem::path& path,
                          const ParseOptions& options = {});

void WriteTraceCsv(std::ostream& out, std::span<const LocationUpdate> updates);
void WriteTraceFile(const std::filesystem::path& path,
                    std::span<const LocationUpdate> updates);

struct SegmentationRule {
  double radius = 20.0;  // metres from the visit anchor
  Minutes max_gap = 30;  // minutes since the previous update of the visit
};

// Greedy left-to-right segmentation of updates sorted with UpdateLess. A
// visit ends when the next update belongs to another user, lies more than
// `radius` from the visit's first update, or arrives more than `max_gap`
// after the visit's last update.
std::vector<Visit> SegmentVisits(std::span<const LocationUpdate> updates,
                                 const SegmentationRule& rule = {});

}  // namespace spdt

#endif  // SPDT_TRACE_H_
