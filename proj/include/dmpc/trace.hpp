#pragma once

#include <ostream>
#include <string>

#include "dmpc/sim.hpp"

namespace dmpc {

/// Header and one comma-separated row per (step, agent); reals carry nine
/// significant digits. Returns the number of bytes written.
std::size_t write_trace(const Trace &trace, double sampling_time, std::ostream &out);
/// Throws IoError when the file cannot be written.
std::size_t write_trace(const Trace &trace, double sampling_time, const std::string &path);

}  // namespace dmpc
