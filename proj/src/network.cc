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

#include "spdt/network.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "spdt/parallel.h"
#include "spdt/rng.h"

namespace spdt {
namespace {

bool StorageLess(const SpdtLink& a, const SpdtLink& b) {
  return std::tie(a.day, a.neighbour, a.host, a.t_s, a.t_l, a.t_s_n, a.t_l_n) <
         std::tie(b.day, b.neighbour, b.host, b.t_s, b.t_l, b.t_s_n, b.t_l_n);
}

int DayOf(Minutes t) {
  return static_cast<int>(t >= 0 ? t / kMinutesPerDay
                                 : (t - kMinutesPerDay + 1) / kMinutesPerDay);
}

// Uniform grid over the plane with square cells of side `cell`.
class UpdateGrid {
 public:
  UpdateGrid(std::span<const LocationUpdate> updates, double cell)
      : updates_(updates), cell_(cell) {
    for (std::uint32_t i = 0; i < updates.size(); ++i) {
      cells_[Key(CellOf(updates[i].x), CellOf(updates[i].y))].push_back(i);
    }
    for (auto& [key, members] : cells_) {
      std::sort(members.begin(), members.end(),
                [&](std::uint32_t a, std::uint32_t b) {
                  return std::tie(updates_[a].t, a) < std::tie(updates_[b].t, b);
                });
    }
  }

  // Calls fn(update) for every update in the 3x3 cell block around (x, y)
  // with time in [t_from, t_to].
  template <typename Fn>
  void ForEachNear(double x, double y, Minutes t_from, Minutes t_to,
                   Fn&& fn) const {
    const std::int64_t cx = CellOf(x);
    const std::int64_t cy = CellOf(y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(Key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        const auto& members = it->second;
        auto first = std::lower_bound(
            members.begin(), members.end(), t_from,
            [&](std::uint32_t i, Minutes t) { return updates_[i].t < t; });
        for (; first != members.end() && updates_[*first].t <= t_to; ++first) {
          fn(updates_[*first]);
        }
      }
    }
  }

 private:
  std::int64_t CellOf(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_));
  }
  static std::uint64_t Key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^
           (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  }

  std::span<const LocationUpdate> updates_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

ContactNetwork WithLinks(const ContactNetwork& like,
                         std::vector<SpdtLink> links) {
  return ContactNetwork::FromLinks(like.horizon_days(), std::move(links));
}

}  // namespace

void BuilderConfig::Validate() const {
  if (!(radius > 0) || indirect_window <= 0 || visit_gap <= 0 ||
      horizon_days <= 0) {
    throw std::invalid_argument("builder parameters must all be positive");
  }
}

ContactNetwork ContactNetwork::FromLinks(int horizon_days,
                                         std::vector<SpdtLink> links) {
  if (horizon_days < 0) throw std::invalid_argument("negative horizon");
  ContactNetwork net;
  net.horizon_days_ = horizon_days;
  std::sort(links.begin(), links.end(), StorageLess);
  net.day_offsets_.assign(static_cast<std::size_t>(horizon_days) + 1, 0);
  for (const auto& l : links) {
    if (l.day < 0 || l.day >= horizon_days) {
      throw std::invalid_argument(
          fmt::format("link day {} outside horizon {}", l.day, horizon_days));
    }
    if (l.host == l.neighbour) {
      throw std::invalid_argument("self-link");
    }
    ++net.day_offsets_[static_cast<std::size_t>(l.day) + 1];
    net.users_.push_back(l.host);
    net.users_.push_back(l.neighbour);
  }
  for (std::size_t d = 1; d < net.day_offsets_.size(); ++d) {
    net.day_offsets_[d] += net.day_offsets_[d - 1];
  }
  std::sort(net.users_.begin(), net.users_.end());
  net.users_.erase(std::unique(net.users_.begin(), net.users_.end()),
                   net.users_.end());
  net.links_ = std::move(links);
  return net;
}

std::span<const SpdtLink> ContactNetwork::LinksOnDay(int day) const {
  if (day < 0 || day >= horizon_days_) return {};
  const auto d = static_cast<std::size_t>(day);
  return std::span<const SpdtLink>(links_).subspan(
      day_offsets_[d], day_offsets_[d + 1] - day_offsets_[d]);
}

std::vector<std::size_t> ContactNetwork::LinkCountsPerDay() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(horizon_days_));
  for (std::size_t d = 0; d < counts.size(); ++d) {
    counts[d] = day_offsets_[d + 1] - day_offsets_[d];
  }
  return counts;
}

ContactNetwork ExtractSpdtLinks(std::span<const LocationUpdate> updates,
                                std::span<const Visit> visits,
                                const BuilderConfig& config, int workers) {
  config.Validate();
  const UpdateGrid grid(updates, config.radius);
  const double radius_sq = config.radius * config.radius;

  // Per-visit link lists, merged in a fixed order afterwards so the result
  // does not depend on the worker count.
  std::vector<std::vector<SpdtLink>> per_visit(visits.size());
  ParallelFor(visits.size(), workers, [&](std::size_t i) {
    const Visit& host = visits[i];
    const int day = DayOf(host.t_start);
    if (day < 0 || day >= config.horizon_days) return;
    const Minutes window_end = host.t_end + config.indirect_window;
    std::map<UserId, std::pair<Minutes, Minutes>> seen;
    grid.ForEachNear(host.anchor_x, host.anchor_y, host.t_start, window_end,
                     [&](const LocationUpdate& u) {
                       if (u.user == host.user) return;
                       const double dx = u.x - host.anchor_x;
                       const double dy = u.y - host.anchor_y;
                       if (dx * dx + dy * dy > radius_sq) return;
                       auto [it, inserted] =
                           seen.try_emplace(u.user, u.t, u.t);
                       if (!inserted) {
                         it->second.first = std::min(it->second.first, u.t);
                         it->second.second = std::max(it->second.second, u.t);
                       }
                     });
    for (const auto& [neighbour, span] : seen) {
      const Minutes t_l_n = std::min(span.second, window_end);
      if (t_l_n <= host.t_start) continue;
      per_visit[i].push_back({day, host.user, neighbour, host.t_start,
                              host.t_end, span.first, t_l_n});
    }
  });

  std::vector<SpdtLink> links;
  for (auto& v : per_visit) {
    links.insert(links.end(), v.begin(), v.end());
  }
  return ContactNetwork::FromLinks(config.horizon_days, std::move(links));
}

ContactNetwork BuildNetwork(std::span<const LocationUpdate> updates,
                            const BuilderConfig& config, int workers) {
  const std::vector<Visit> visits =
      SegmentVisits(updates, config.Segmentation());
  return ExtractSpdtLinks(updates, visits, config, workers);
}

ContactNetwork ProjectSpst(const ContactNetwork& net) {
  std::vector<SpdtLink> links;
  links.reserve(net.links().size());
  for (SpdtLink l : net.links()) {
    if (l.IsIndirectOnly()) continue;
    l.t_l_n = std::min(l.t_l_n, l.t_l);
    links.push_back(l);
  }
  return WithLinks(net, std::move(links));
}

ContactNetwork Densify(const ContactNetwork& net, std::uint64_t seed) {
  const int horizon = net.horizon_days();
  // host -> day -> links hosted that day.
  std::map<UserId, std::map<int, std::vector<SpdtLink>>> by_host;
  for (const auto& l : net.links()) by_host[l.host][l.day].push_back(l);

  std::vector<SpdtLink> links(net.links().begin(), net.links().end());
  for (const auto& [host, days] : by_host) {
    std::vector<int> active;
    active.reserve(days.size());
    for (const auto& [day, unused] : days) active.push_back(day);
    for (int d = 0; d < horizon; ++d) {
      if (days.contains(d)) continue;
      StreamRng rng(seed, Substream::kDensify,
                    {host, static_cast<std::uint64_t>(d)});
      const int source = active[rng.Below(active.size())];
      const Minutes shift =
          static_cast<Minutes>(d - source) * kMinutesPerDay;
      for (SpdtLink l : days.at(source)) {
        l.day = d;
        l.t_s += shift;
        l.t_l += shift;
        l.t_s_n += shift;
        l.t_l_n += shift;
        links.push_back(l);
      }
    }
  }
  return WithLinks(net, std::move(links));
}

LdtLstPair MakeLdtLst(const ContactNetwork& ddt, Minutes indirect_window,
                      LdtShift shift) {
  std::vector<SpdtLink> links;
  links.reserve(ddt.links().size());
  for (SpdtLink l : ddt.links()) {
    if (l.t_l == l.t_s) continue;
    if (l.IsIndirectOnly()) {
      const Minutes duration = l.t_l_n - l.t_s_n;
      l.t_s_n = l.t_s;
      if (shift == LdtShift::kPreserveDuration) l.t_l_n = l.t_s + duration;
      l.t_l_n = std::min(l.t_l_n, l.t_l + indirect_window);
    }
    links.push_back(l);
  }
  LdtLstPair out;
  out.ldt = WithLinks(ddt, std::move(links));
  out.lst = ProjectSpst(out.ldt);
  return out;
}

void SaveNetwork(const ContactNetwork& net, std::ostream& out) {
  out << "spdt-net v1 horizon=" << net.horizon_days() << '\n';
  std::string buf;
  for (const auto& l : net.links()) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{} {} {} {} {} {} {}\n", l.day,
                   l.host, l.neighbour, l.t_s, l.t_l, l.t_s_n, l.t_l_n);
    out << buf;
  }
}

void SaveNetwork(const ContactNetwork& net,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(
        fmt::format("cannot write network '{}'", path.string()));
  }
  SaveNetwork(net, out);
  out.flush();
  if (!out) throw std::runtime_error("I/O error writing network");
}

ContactNetwork LoadNetwork(std::istream& in) {
  const std::string text(std::istreambuf_iterator<char>(in), {});
  if (in.bad()) throw std::runtime_error("I/O error reading network");
  if (text.empty()) throw std::runtime_error("empty network file");
  if (text.back() != '\n') {
    throw std::runtime_error("truncated network file (no final newline)");
  }

  std::string_view rest = text;
  auto next_line = [&rest] {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest.remove_prefix(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  const std::string_view header = next_line();
  constexpr std::string_view kMagic = "spdt-net ";
  if (!header.starts_with(kMagic)) {
    throw std::runtime_error("not an spdt network file");
  }
  std::string_view tail = header.substr(kMagic.size());
  if (!tail.starts_with("v1 ")) {
    throw std::runtime_error(
        fmt::format("unsupported network format version in '{}'", header));
  }
  tail.remove_prefix(3);
  if (!tail.starts_with("horizon=")) {
    throw std::runtime_error("network header lacks horizon");
  }
  tail.remove_prefix(8);
  int horizon = 0;
  {
    const auto [end, ec] =
        std::from_chars(tail.data(), tail.data() + tail.size(), horizon);
    if (ec != std::errc() || end != tail.data() + tail.size() || horizon < 0) {
      throw std::runtime_error("bad horizon in network header");
    }
  }

  std::vector<SpdtLink> links;
  std::size_t line_no = 1;
  while (!rest.empty()) {
    ++line_no;
    std::string_view line = next_line();
    std::int64_t v[7];
    UserId ids[2];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    bool ok = true;
    for (int f = 0; f < 7 && ok; ++f) {
      while (p < end && *p == ' ') ++p;
      std::from_chars_result r;
      if (f == 1 || f == 2) {
        r = std::from_chars(p, end, ids[f - 1]);
      } else {
        r = std::from_chars(p, end, v[f]);
      }
      ok = r.ec == std::errc() && (r.ptr == end || *r.ptr == ' ');
      p = r.ptr;
    }
    while (ok && p < end && *p == ' ') ++p;
    if (!ok || p != end) {
      throw std::runtime_error(
          fmt::format("malformed network line {}: '{}'", line_no, line));
    }
    links.push_back({static_cast<int>(v[0]), ids[0], ids[1], v[3], v[4], v[5],
                     v[6]});
  }
  try {
    return ContactNetwork::FromLinks(horizon, std::move(links));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(fmt::format("invalid network: {}", e.what()));
  }
}

ContactNetwork LoadNetwork(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(
        fmt::format("cannot open network '{}'", path.string()));
  }
  return LoadNetwork(in);
}

}  // namespace spdt
