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

#include "spdt/trace.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace spdt {
namespace {

constexpr std::string_view kPlanarHeader = "user_id,t_min,x_m,y_m";
constexpr std::string_view kLatLonHeader = "user_id,t_min,lat,lon";
constexpr double kEarthRadiusMetres = 6371008.8;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> ParseFinite(std::string_view s) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

// Splits on commas; returns false unless exactly `n` fields are present.
bool SplitFields(std::string_view line, std::span<std::string_view> fields) {
  std::size_t count = 0;
  while (true) {
    const std::size_t comma = line.find(',');
    if (count == fields.size()) return false;
    fields[count++] = line.substr(0, comma);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return count == fields.size();
}

}  // namespace

bool UpdateLess(const LocationUpdate& a, const LocationUpdate& b) {
  if (a.user != b.user) return a.user < b.user;
  if (a.t != b.t) return a.t < b.t;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

UserId ParseUserId(std::string_view text) {
  text = Trim(text);
  UserId id = 0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec == std::errc() && end == text.data() + text.size() && !text.empty()) {
    return id;
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h | (1ULL << 63);
}

ParsedTrace ParseTrace(std::istream& in, const ParseOptions& options) {
  ParsedTrace result;
  std::string line;
  if (!std::getline(in, line)) {
    if (in.bad()) throw std::runtime_error("I/O error reading trace");
    return result;
  }
  std::string_view header = line;
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  header = Trim(header);
  const std::string_view expected =
      options.project_latlon ? kLatLonHeader : kPlanarHeader;
  if (header != expected) {
    throw std::runtime_error(fmt::format(
        "unparseable trace header '{}', expected '{}'", header, expected));
  }

  std::string_view fields[4];
  while (std::getline(in, line)) {
    const std::string_view row = Trim(line);
    if (row.empty()) continue;
    if (!SplitFields(row, fields)) {
      ++result.skipped_rows;
      continue;
    }
    const std::string_view id = Trim(fields[0]);
    const auto t = ParseFinite(fields[1]);
    const auto a = ParseFinite(fields[2]);
    const auto b = ParseFinite(fields[3]);
    if (id.empty() || !t || !a || !b) {
      ++result.skipped_rows;
      continue;
    }
    result.updates.push_back({ParseUserId(id), std::llround(*t), *a, *b});
  }
  if (in.bad()) throw std::runtime_error("I/O error reading trace");

  if (options.project_latlon && !result.updates.empty()) {
    // (x, y) currently hold (lat, lon) in degrees.
    double lat0 = 0, lon0 = 0;
    for (const auto& u : result.updates) {
      lat0 += u.x;
      lon0 += u.y;
    }
    lat0 /= static_cast<double>(result.updates.size());
    lon0 /= static_cast<double>(result.updates.size());
    constexpr double kRad = std::numbers::pi / 180.0;
    const double cos_lat0 = std::cos(lat0 * kRad);
    for (auto& u : result.updates) {
      const double lat = u.x;
      const double lon = u.y;
      u.x = kEarthRadiusMetres * (lon - lon0) * kRad * cos_lat0;
      u.y = kEarthRadiusMetres * (lat - lat0) * kRad;
    }
  }

  std::sort(result.updates.begin(), result.updates.end(), UpdateLess);
  return result;
}

ParsedTrace ReadTraceFile(const std::filesystem::path& path,
                          const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(
        fmt::format("cannot open trace '{}'", path.string()));
  }
  return ParseTrace(in, options);
}

void WriteTraceCsv(std::ostream& out, std::span<const LocationUpdate> updates) {
  out << kPlanarHeader << '\n';
  for (const auto& u : updates) {
    out << fmt::format("{},{},{:.3f},{:.3f}\n", u.user, u.t, u.x, u.y);
  }
}

void WriteTraceFile(const std::filesystem::path& path,
                    std::span<const LocationUpdate> updates) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(
        fmt::format("cannot write trace '{}'", path.string()));
  }
  WriteTraceCsv(out, updates);
  if (!out) throw std::runtime_error("I/O error writing trace");
}

std::vector<Visit> SegmentVisits(std::span<const LocationUpdate> updates,
                                 const SegmentationRule& rule) {
  std::vector<Visit> visits;
  const double radius_sq = rule.radius * rule.radius;
  Minutes last_t = 0;
  for (const auto& u : updates) {
    bool extend = false;
    if (!visits.empty()) {
      const Visit& v = visits.back();
      const double dx = u.x - v.anchor_x;
      const double dy = u.y - v.anchor_y;
      extend = v.user == u.user && dx * dx + dy * dy <= radius_sq &&
               u.t - last_t <= rule.max_gap;
    }
    if (extend) {
      visits.back().t_end = u.t;
      ++visits.back().update_count;
    } else {
      visits.push_back({u.user, u.x, u.y, u.t, u.t, 1});
    }
    last_t = u.t;
  }
  return visits;
}

}  // namespace spdt
