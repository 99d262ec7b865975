#include "dmpc/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dmpc/errors.hpp"

namespace dmpc {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::size_t write_trace(const Trace &trace, double sampling_time, std::ostream &out) {
  std::ostringstream ss;
  ss << "k,t,agent,x_g,y_g,psi,v,a_x,u,s,region,active,solve_time_ms,inner_iterations,"
        "outer_iterations,max_residual\n";
  for (const auto &records : trace)
    for (const auto &r : records) {
      std::string active;
      for (std::size_t i = 0; i < r.active.size(); ++i)
        active += (i ? ";" : "") + std::to_string(r.active[i]);
      ss << r.k << ',' << num(r.k * sampling_time) << ',' << r.agent_id << ',' << num(r.pose.x)
         << ',' << num(r.pose.y) << ',' << num(r.pose.psi) << ',' << num(r.state.v) << ','
         << num(r.state.a_x) << ',' << num(r.u) << ',' << num(r.state.s) << ','
         << to_string(r.region) << ',' << active << ',' << num(r.solve_time_ms) << ','
         << r.inner_iterations << ',' << r.outer_iterations << ',' << num(r.max_violation)
         << '\n';
    }
  const std::string text = ss.str();
  out << text;
  if (!out)
    throw IoError("trace write failed");
  return text.size();
}

std::size_t write_trace(const Trace &trace, double sampling_time, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path + " for writing");
  return write_trace(trace, sampling_time, out);
}

}  // namespace dmpc
