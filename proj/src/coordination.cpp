#include "dmpc/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dmpc {

bool RegionBoundaries::valid() const {
  const double v[] = {s_icr_in, s_bs_in, s_stop, s_cr_in, s_cr_out, s_icr_out};
  for (double x : v)
    if (!std::isfinite(x))
      return false;
  return s_icr_in <= s_bs_in && s_bs_in <= s_stop && s_stop < s_cr_in &&
         s_cr_in <= s_cr_out && s_cr_out <= s_icr_out;
}

std::string_view to_string(RegionTag tag) {
  switch (tag) {
  case RegionTag::OutsideBefore:
    return "outside_before";
  case RegionTag::Approach:
    return "approach";
  case RegionTag::BSR:
    return "bsr";
  case RegionTag::CR:
    return "cr";
  case RegionTag::InsideAfterCR:
    return "after_cr";
  case RegionTag::OutsideAfter:
    return "outside_after";
  }
  return "unknown";
}

RegionTag region_of(double s, const RegionBoundaries &b) {
  if (s < b.s_icr_in)
    return RegionTag::OutsideBefore;
  if (s < b.s_bs_in)
    return RegionTag::Approach;
  if (s < b.s_cr_in)
    return RegionTag::BSR;
  if (s < b.s_cr_out)
    return RegionTag::CR;
  if (s < b.s_icr_out)
    return RegionTag::InsideAfterCR;
  return RegionTag::OutsideAfter;
}

bool PriorityMap::valid() const {
  std::vector<int> ranks;
  ranks.reserve(rank.size());
  for (const auto &[id, r] : rank)
    ranks.push_back(r);
  std::sort(ranks.begin(), ranks.end());
  for (std::size_t k = 0; k < ranks.size(); ++k)
    if (ranks[k] != static_cast<int>(k) + 1)
      return false;
  return true;
}

AgentSet prioritized_conflict_set(int i, const PriorityMap &gamma) {
  AgentSet out;
  const int gi = gamma(i);
  for (const auto &[id, r] : gamma.rank)
    if (r < gi)
      out.insert(id);
  return out;
}

bool same_lane_ahead(const AgentSnapshot &follower, const AgentSnapshot &leader,
                     const LaneConfig &lane) {
  const Eigen::Vector2d q = follower.path->position(follower.s);
  const double s_proj =
      project_onto_path(*leader.path, q, leader.s - lane.search_back, leader.s);
  if (!(s_proj < leader.s))
    return false;
  const PathPoint on_leader = leader.path->point(s_proj);
  if ((on_leader.position - q).norm() >= lane.half_lane_width)
    return false;
  const double follower_heading = follower.path->heading(follower.s);
  return std::cos(follower_heading - on_leader.heading) > std::cos(lane.max_heading_offset);
}

std::map<int, AgentSet> static_ahead_sets(std::span<const AgentSnapshot> agents,
                                          const LaneConfig &lane) {
  std::map<int, AgentSet> out;
  for (const auto &i : agents) {
    auto &set = out[i.id];
    for (const auto &l : agents)
      if (l.id != i.id && same_lane_ahead(i, l, lane))
        set.insert(l.id);
  }
  return out;
}

ConflictSets active_conflict_set(int i, std::span<const AgentSnapshot> agents,
                                 const PriorityMap &gamma, const AgentSet &ahead_static,
                                 const LaneConfig &lane) {
  const AgentSnapshot *self = nullptr;
  for (const auto &a : agents)
    if (a.id == i)
      self = &a;

  ConflictSets cs;
  cs.prioritized = prioritized_conflict_set(i, gamma);
  cs.ahead_static = ahead_static;
  for (const auto &l : agents) {
    if (l.id == i)
      continue;
    // "Left the CR" is judged on l's own path and boundaries.
    if (cs.prioritized.contains(l.id) && l.s < l.regions.s_cr_out)
      cs.prioritized_active.insert(l.id);
    // Under a total priority order every pair counts as crossing, so any
    // agent that is currently ahead in the same lane qualifies.
    if (!ahead_static.contains(l.id) && same_lane_ahead(*self, l, lane))
      cs.ahead_dynamic.insert(l.id);
  }

  const RegionBoundaries &b = self->regions;
  const bool inside_icr = self->s >= b.s_icr_in && self->s < b.s_icr_out;
  if (inside_icr && self->s < b.s_cr_out) {
    cs.which = ConflictCase::InsideBeforeCrExit;
    cs.active = cs.prioritized;
    cs.active.insert(cs.ahead_static.begin(), cs.ahead_static.end());
  } else if (inside_icr) {
    cs.which = ConflictCase::InsideAfterCr;
    cs.active = cs.ahead_static;
    cs.active.insert(cs.ahead_dynamic.begin(), cs.ahead_dynamic.end());
    cs.active.insert(cs.prioritized_active.begin(), cs.prioritized_active.end());
  } else {
    cs.which = ConflictCase::OutsideIcr;
    cs.active = cs.ahead_static;
    cs.active.insert(cs.ahead_dynamic.begin(), cs.ahead_dynamic.end());
  }
  return cs;
}

double liveness_update(const AgentSet &prioritized_active, double s_cr_out) {
  return prioritized_active.empty() ? 0.0 : s_cr_out;
}

double preview_constraint_value(double s_n, double effective_s_cr_out, double s_stop) {
  return std::max(0.0, effective_s_cr_out - s_n) * std::max(0.0, s_n - s_stop);
}

}  // namespace dmpc
