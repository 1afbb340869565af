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

#ifndef SPDT_NETWORK_H_
#define SPDT_NETWORK_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "spdt/exposure.h"
#include "spdt/trace.h"

namespace spdt {

// A directed host -> neighbour transmission opportunity. [t_s, t_l] is the
// host visit; [t_s_n, t_l_n] is the neighbour's presence near the host's
// anchor, which may extend up to `indirect_window` minutes past t_l.
struct SpdtLink {
  int day;
  UserId host;
  UserId neighbour;
  Minutes t_s;
  Minutes t_l;
  Minutes t_s_n;
  Minutes t_l_n;

  LinkInterval Interval() const {
    return {static_cast<double>(t_s), static_cast<double>(t_l),
            static_cast<double>(t_s_n), static_cast<double>(t_l_n)};
  }
  // The neighbour arrives only after the host has left.
  bool IsIndirectOnly() const { return t_s_n >= t_l; }

  friend auto operator<=>(const SpdtLink&, const SpdtLink&) = default;
};

struct BuilderConfig {
  double radius = 20.0;          // metres
  Minutes indirect_window = 200;  // delta, minutes past host departure
  Minutes visit_gap = 30;         // minutes
  int horizon_days = 32;

  void Validate() const;
  SegmentationRule Segmentation() const { return {radius, visit_gap}; }
};

// Immutable set of links ordered by (day, neighbour, host, times). Users are
// exactly the ids that appear in at least one link.
class ContactNetwork {
 public:
  ContactNetwork() = default;

  // Sorts the links and derives the user set. Throws std::invalid_argument
  // for a negative horizon, a day outside [0, horizon) or a self-link.
  static ContactNetwork FromLinks(int horizon_days,
                                  std::vector<SpdtLink> links);

  int horizon_days() const { return horizon_days_; }
  const std::vector<UserId>& users() const { return users_; }
  std::span<const SpdtLink> links() const { return links_; }
  std::span<const SpdtLink> LinksOnDay(int day) const;
  std::vector<std::size_t> LinkCountsPerDay() const;

  friend bool operator==(const ContactNetwork&, const ContactNetwork&) =
      default;

 private:
  int horizon_days_ = 0;
  std::vector<UserId> users_;
  std::vector<SpdtLink> links_;
  std::vector<std::size_t> day_offsets_ = {0};
};

// Grid-backed co-location join. For each host visit H and each other user v
// with updates within `radius` of H's anchor during
// [H.t_start, H.t_end + indirect_window], emits one link spanning v's first
// and last such update. Links whose host visit starts outside the horizon,
// or whose neighbour window ends at the host's arrival instant, are dropped.
ContactNetwork ExtractSpdtLinks(std::span<const LocationUpdate> updates,
                                std::span<const Visit> visits,
                                const BuilderConfig& config, int workers = 1);

// Segments `updates` (sorted with UpdateLess) and extracts links.
ContactNetwork BuildNetwork(std::span<const LocationUpdate> updates,
                            const BuilderConfig& config, int workers = 1);

// Drops indirect-only links and truncates the rest at host departure.
ContactNetwork ProjectSpst(const ContactNetwork& net);

// Fills every day a host has no links with a time-shifted copy of one of
// the host's active days, chosen uniformly from a stream keyed by
// (seed, host, day).
ContactNetwork Densify(const ContactNetwork& net, std::uint64_t seed);

enum class LdtShift {
  kPreserveDuration,  // t_l_n moves with t_s_n
  kKeepDeparture,     // t_l_n is left where it was
};

struct LdtLstPair {
  ContactNetwork ldt;
  ContactNetwork lst;
};

// Moves the neighbour arrival of every indirect-only link to the host
// arrival, turning it into a direct-bearing link, and projects the result.
// Links from zero-length host visits cannot carry a direct component and
// are dropped from both outputs.
LdtLstPair MakeLdtLst(const ContactNetwork& ddt, Minutes indirect_window = 200,
                      LdtShift shift = LdtShift::kPreserveDuration);

// Text format: `spdt-net v1 horizon=<days>` followed by one
// `day host neighbour t_s t_l t_s_n t_l_n` line per link.
void SaveNetwork(const ContactNetwork& net, std::ostream& out);
void SaveNetwork(const ContactNetwork& net, const std::filesystem::path& path);
// Throws std::runtime_error on a bad header, version mismatch, malformed or
// truncated line; no partial network is returned.
ContactNetwork LoadNetwork(std::istream& in);
ContactNetwork LoadNetwork(const std::filesystem::path& path);

}  // namespace spdt

#endif  // SPDT_NETWORK_H_
