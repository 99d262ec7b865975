#pragma once

#include <map>
#include <set>
#include <span>
#include <string_view>

#include "dmpc/path_geometry.hpp"

namespace dmpc {

/// Intersection regions along one agent's path, all in [m] of path coordinate.
struct RegionBoundaries {
  double s_icr_in = 0.0;
  double s_bs_in = 0.0;
  double s_stop = 0.0;
  double s_cr_in = 0.0;
  double s_cr_out = 0.0;
  double s_icr_out = 0.0;

  /// s_icr_in <= s_bs_in <= s_stop < s_cr_in <= s_cr_out <= s_icr_out
  bool valid() const;
};

/// Classification of a path coordinate; intervals are left-closed, right-open.
enum class RegionTag {
  OutsideBefore,  // s < s_icr_in
  Approach,       // inside the ICR, before the brake-safe region
  BSR,            // [s_bs_in, s_cr_in)
  CR,             // [s_cr_in, s_cr_out)
  InsideAfterCR,  // [s_cr_out, s_icr_out)
  OutsideAfter,   // s >= s_icr_out
};

std::string_view to_string(RegionTag tag);

RegionTag region_of(double s, const RegionBoundaries &b);

/// Fixed ranking, 1 = highest priority.
struct PriorityMap {
  std::map<int, int> rank;  // agent id -> rank

  int operator()(int id) const { return rank.at(id); }
  /// Ranks are exactly {1, ..., n}.
  bool valid() const;
};

using AgentSet = std::set<int>;

/// Higher-priority agents, {l : gamma(l) < gamma(i)}.
AgentSet prioritized_conflict_set(int i, const PriorityMap &gamma);

/// Which of the three conflict cases applies to an agent.
enum class ConflictCase {
  InsideBeforeCrExit,  // a) inside ICR, CR not yet passed
  InsideAfterCr,       // b) inside ICR, CR passed
  OutsideIcr,          // c)
};

struct ConflictSets {
  AgentSet prioritized;         // A_c,gamma
  AgentSet prioritized_active;  // higher-priority agents that have not left their CR
  AgentSet ahead_static;        // A_c,ahead
  AgentSet ahead_dynamic;       // same lane and ahead at time k
  AgentSet active;              // constraints actually imposed
  ConflictCase which = ConflictCase::OutsideIcr;
};

/// Measured situation of one agent at time k.
struct AgentSnapshot {
  int id = 0;
  double s = 0.0;
  const PathSpline *path = nullptr;
  RegionBoundaries regions;
};

struct LaneConfig {
  double half_lane_width = 1.75;       // [m]
  double max_heading_offset = 0.7854;  // [rad] follower heading vs. leader lane direction
  double search_back = 200.0;          // [m] behind the leader considered for projection
};

/// True when `follower` drives in `leader`'s lane behind it: the follower's
/// position projected onto the leader's path lies behind the leader, within
/// half a lane width of the centreline and with a compatible heading.
bool same_lane_ahead(const AgentSnapshot &follower, const AgentSnapshot &leader,
                     const LaneConfig &lane);

/// A_c,ahead for every agent, evaluated on the initial snapshot.
std::map<int, AgentSet> static_ahead_sets(std::span<const AgentSnapshot> agents,
                                          const LaneConfig &lane);

ConflictSets active_conflict_set(int i, std::span<const AgentSnapshot> agents,
                                 const PriorityMap &gamma, const AgentSet &ahead_static,
                                 const LaneConfig &lane);

/// s_cr_out used by the preview constraint: zero once every higher-priority
/// agent has left its critical region.
double liveness_update(const AgentSet &prioritized_active, double s_cr_out);

/// [s_cr_out - s_N]_+ * [s_N - s_stop]_+ ; zero iff the horizon end is past the
/// CR exit or short of the stop line.
double preview_constraint_value(double s_n, double effective_s_cr_out, double s_stop);

}  // namespace dmpc
