#include "dmpc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "dmpc/errors.hpp"

namespace dmpc {

const AgentConfig &ScenarioConfig::agent(int id) const {
  for (const auto &a : agents)
    if (a.id == id)
      return a;
  throw std::out_of_range("unknown agent " + std::to_string(id));
}

PriorityMap ScenarioConfig::priorities() const {
  PriorityMap p;
  for (const auto &a : agents)
    p.rank[a.id] = a.priority;
  return p;
}

void validate(const ScenarioConfig &cfg) {
  auto fail = [](const std::string &msg) { throw ValidationError(msg); };
  if (!(cfg.sampling_time > 0.0) || !std::isfinite(cfg.sampling_time))
    fail("sampling_time must be positive");
  if (cfg.horizon < 1)
    fail("horizon must be at least 1");
  if (!(cfg.collision_margin >= 0.0) || !std::isfinite(cfg.collision_margin))
    fail("collision_margin must be non-negative");
  if (!cfg.penalty.valid())
    fail("penalty settings invalid (tolerance > 0, escalation > 1, max_outer_iterations >= 1)");
  if (!cfg.solver.valid())
    fail("solver settings invalid");
  if (cfg.agents.empty())
    fail("scenario has no agents");
  std::set<int> ids;
  for (const auto &a : cfg.agents) {
    const std::string who = "agent " + std::to_string(a.id) + ": ";
    if (!ids.insert(a.id).second)
      fail(who + "duplicate agent id");
    if (a.waypoints.size() < 4)
      fail(who + "needs at least 4 waypoints");
    if (!(a.drivetrain_time_constant > 0.0))
      fail(who + "drivetrain_time_constant must be positive");
    if (!(a.geometry.length > 0.0 && a.geometry.width > 0.0))
      fail(who + "geometry must be positive");
    if (!a.limits.valid())
      fail(who + "limits invalid (a_x_min < 0 < a_x_max, positive speed/acceleration bounds)");
    if (!a.limits.v_max_profile.empty() &&
        a.limits.v_max_profile.size() != static_cast<std::size_t>(cfg.horizon))
      fail(who + "v_max_profile length must equal the horizon");
    if (!a.weights.valid())
      fail(who + "cost weights must be positive");
    const SafetyParams &s = a.safety;
    if (s.d_xf < 0 || s.d_xr < 0 || s.d_yl < 0 || s.d_yr < 0 || s.t_gap_x < 0 || s.t_gap_y < 0)
      fail(who + "safety margins must be nonnegative");
    if (!a.regions.valid())
      fail(who + "region boundaries must satisfy icr_in <= bs_in <= stop < cr_in <= cr_out <= icr_out");
    if (!(a.v_ref >= 0.0))
      fail(who + "v_ref must be nonnegative");
    if (!(a.initial.v >= 0.0) || !std::isfinite(a.initial.s) || !std::isfinite(a.initial.a_x))
      fail(who + "initial state invalid");
  }
  if (!cfg.priorities().valid())
    fail("priorities must be a bijection onto 1..n");
}

namespace {

int line_of(const YAML::Node &n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void parse_fail(const YAML::Node &n, const std::string &field,
                             const std::string &msg) {
  throw ParseError("line " + std::to_string(line_of(n)) + ": " + field + ": " + msg,
                   line_of(n), field);
}

/// Reads the keys of a mapping, rejecting unknown ones.
class Fields {
public:
  Fields(const YAML::Node &node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node.IsMap())
      parse_fail(node, path_, "expected a mapping");
  }

  template <class T> void get(const char *key, T &out, bool required = false) {
    seen_.insert(key);
    const YAML::Node v = node_[key];
    if (!v) {
      if (required)
        parse_fail(node_, name(key), "missing required field");
      return;
    }
    try {
      out = v.as<T>();
    } catch (const YAML::Exception &) {
      parse_fail(v, name(key), "wrong value type");
    }
  }

  YAML::Node child(const char *key, bool required = false) {
    seen_.insert(key);
    const YAML::Node v = node_[key];
    if (!v && required)
      parse_fail(node_, name(key), "missing required field");
    return v;
  }

  void finish() const {
    for (const auto &kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.contains(key))
        parse_fail(kv.first, name(key), "unknown field");
    }
  }

  std::string name(const std::string &key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_block(Fields &parent, const char *key, const std::function<void(Fields &)> &body,
                bool required = false) {
  const YAML::Node n = parent.child(key, required);
  if (!n)
    return;
  Fields f(n, parent.name(key));
  body(f);
  f.finish();
}

AgentConfig parse_agent(const YAML::Node &node, const std::string &path) {
  AgentConfig a;
  Fields f(node, path);
  f.get("id", a.id, true);
  f.get("priority", a.priority, true);
  f.get("v_ref", a.v_ref, true);
  f.get("drivetrain_time_constant", a.drivetrain_time_constant);
  a.initial.v = a.v_ref;
  read_block(f, "initial", [&](Fields &g) {
    g.get("s", a.initial.s);
    g.get("v", a.initial.v);
    g.get("a_x", a.initial.a_x);
  });
  read_block(f, "geometry", [&](Fields &g) {
    g.get("length", a.geometry.length);
    g.get("width", a.geometry.width);
  });
  read_block(f, "limits", [&](Fields &g) {
    g.get("a_x_min", a.limits.a_x_min);
    g.get("a_x_max", a.limits.a_x_max);
    g.get("v_max", a.limits.v_max);
    g.get("v_max_profile", a.limits.v_max_profile);
    g.get("a_y_max", a.limits.a_y_max);
    g.get("a_tot_max", a.limits.a_tot_max);
  });
  read_block(f, "weights", [&](Fields &g) {
    g.get("q", a.weights.q);
    g.get("q_n", a.weights.q_n);
    g.get("r", a.weights.r);
  });
  read_block(f, "safety", [&](Fields &g) {
    g.get("d_xf", a.safety.d_xf);
    g.get("d_xr", a.safety.d_xr);
    g.get("d_yl", a.safety.d_yl);
    g.get("d_yr", a.safety.d_yr);
    g.get("t_gap_x", a.safety.t_gap_x);
    g.get("t_gap_y", a.safety.t_gap_y);
  });
  read_block(
      f, "regions",
      [&](Fields &g) {
        g.get("s_icr_in", a.regions.s_icr_in, true);
        g.get("s_bs_in", a.regions.s_bs_in, true);
        g.get("s_stop", a.regions.s_stop, true);
        g.get("s_cr_in", a.regions.s_cr_in, true);
        g.get("s_cr_out", a.regions.s_cr_out, true);
        g.get("s_icr_out", a.regions.s_icr_out, true);
      },
      true);
  const YAML::Node wps = f.child("waypoints", true);
  if (!wps.IsSequence())
    parse_fail(wps, f.name("waypoints"), "expected a list of [x, y] pairs");
  for (const auto &w : wps) {
    if (!w.IsSequence() || w.size() != 2)
      parse_fail(w, f.name("waypoints"), "expected [x, y]");
    try {
      a.waypoints.push_back({w[0].as<double>(), w[1].as<double>()});
    } catch (const YAML::Exception &) {
      parse_fail(w, f.name("waypoints"), "wrong value type");
    }
  }
  f.finish();
  return a;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string &text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException &e) {
    throw ParseError(e.what(), e.mark.line + 1, "");
  }
  ScenarioConfig cfg;
  Fields f(root, "");
  f.get("name", cfg.name);
  f.get("sampling_time", cfg.sampling_time, true);
  f.get("horizon", cfg.horizon, true);
  f.get("collision_margin", cfg.collision_margin);
  read_block(f, "penalty", [&](Fields &g) {
    g.get("tolerance", cfg.penalty.tolerance);
    g.get("initial_weight", cfg.penalty.initial_weight);
    g.get("escalation", cfg.penalty.escalation);
    g.get("max_outer_iterations", cfg.penalty.max_outer_iterations);
  });
  read_block(f, "solver", [&](Fields &g) {
    g.get("tolerance", cfg.solver.tolerance);
    g.get("intermediate_tolerance", cfg.solver.intermediate_tolerance);
    g.get("max_iterations", cfg.solver.max_iterations);
    g.get("lbfgs_memory", cfg.solver.lbfgs_memory);
  });
  read_block(f, "lane", [&](Fields &g) {
    g.get("half_lane_width", cfg.lane.half_lane_width);
    g.get("max_heading_offset", cfg.lane.max_heading_offset);
    g.get("search_back", cfg.lane.search_back);
  });
  const YAML::Node agents = f.child("agents", true);
  if (!agents.IsSequence())
    parse_fail(agents, "agents", "expected a list");
  for (std::size_t i = 0; i < agents.size(); ++i)
    cfg.agents.push_back(parse_agent(agents[i], "agents[" + std::to_string(i) + "]"));
  f.finish();
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const ScenarioConfig &cfg) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  auto kv = [&](const char *k, const auto &v) { e << YAML::Key << k << YAML::Value << v; };
  e << YAML::BeginMap;
  kv("name", cfg.name);
  kv("sampling_time", cfg.sampling_time);
  kv("horizon", cfg.horizon);
  kv("collision_margin", cfg.collision_margin);
  e << YAML::Key << "penalty" << YAML::Value << YAML::Flow << YAML::BeginMap;
  kv("tolerance", cfg.penalty.tolerance);
  kv("initial_weight", cfg.penalty.initial_weight);
  kv("escalation", cfg.penalty.escalation);
  kv("max_outer_iterations", cfg.penalty.max_outer_iterations);
  e << YAML::EndMap;
  e << YAML::Key << "solver" << YAML::Value << YAML::Flow << YAML::BeginMap;
  kv("tolerance", cfg.solver.tolerance);
  kv("intermediate_tolerance", cfg.solver.intermediate_tolerance);
  kv("max_iterations", cfg.solver.max_iterations);
  kv("lbfgs_memory", cfg.solver.lbfgs_memory);
  e << YAML::EndMap;
  e << YAML::Key << "lane" << YAML::Value << YAML::Flow << YAML::BeginMap;
  kv("half_lane_width", cfg.lane.half_lane_width);
  kv("max_heading_offset", cfg.lane.max_heading_offset);
  kv("search_back", cfg.lane.search_back);
  e << YAML::EndMap;
  e << YAML::Key << "agents" << YAML::Value << YAML::BeginSeq;
  for (const auto &a : cfg.agents) {
    e << YAML::BeginMap;
    kv("id", a.id);
    kv("priority", a.priority);
    kv("v_ref", a.v_ref);
    kv("drivetrain_time_constant", a.drivetrain_time_constant);
    e << YAML::Key << "initial" << YAML::Value << YAML::Flow << YAML::BeginMap;
    kv("s", a.initial.s);
    kv("v", a.initial.v);
    kv("a_x", a.initial.a_x);
    e << YAML::EndMap;
    e << YAML::Key << "geometry" << YAML::Value << YAML::Flow << YAML::BeginMap;
    kv("length", a.geometry.length);
    kv("width", a.geometry.width);
    e << YAML::EndMap;
    e << YAML::Key << "limits" << YAML::Value << YAML::Flow << YAML::BeginMap;
    kv("a_x_min", a.limits.a_x_min);
    kv("a_x_max", a.limits.a_x_max);
    kv("v_max", a.limits.v_max);
    if (!a.limits.v_max_profile.empty())
      kv("v_max_profile", a.limits.v_max_profile);
    kv("a_y_max", a.limits.a_y_max);
    kv("a_tot_max", a.limits.a_tot_max);
    e << YAML::EndMap;
    e << YAML::Key << "weights" << YAML::Value << YAML::Flow << YAML::BeginMap;
    kv("q", a.weights.q);
    kv("q_n", a.weights.q_n);
    kv("r", a.weights.r);
    e << YAML::EndMap;
    e << YAML::Key << "safety" << YAML::Value << YAML::Flow << YAML::BeginMap;
    kv("d_xf", a.safety.d_xf);
    kv("d_xr", a.safety.d_xr);
    kv("d_yl", a.safety.d_yl);
    kv("d_yr", a.safety.d_yr);
    kv("t_gap_x", a.safety.t_gap_x);
    kv("t_gap_y", a.safety.t_gap_y);
    e << YAML::EndMap;
    e << YAML::Key << "regions" << YAML::Value << YAML::Flow << YAML::BeginMap;
    kv("s_icr_in", a.regions.s_icr_in);
    kv("s_bs_in", a.regions.s_bs_in);
    kv("s_stop", a.regions.s_stop);
    kv("s_cr_in", a.regions.s_cr_in);
    kv("s_cr_out", a.regions.s_cr_out);
    kv("s_icr_out", a.regions.s_icr_out);
    e << YAML::EndMap;
    e << YAML::Key << "waypoints" << YAML::Value << YAML::BeginSeq;
    for (const auto &w : a.waypoints)
      e << YAML::Flow << YAML::BeginSeq << w.x << w.y << YAML::EndSeq;
    e << YAML::EndSeq;
    e << YAML::EndMap;
  }
  e << YAML::EndSeq << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace dmpc
