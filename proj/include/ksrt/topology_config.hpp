#ifndef KSRT_TOPOLOGY_CONFIG_HPP
#define KSRT_TOPOLOGY_CONFIG_HPP

#include <string>

#include "ksrt/sim.hpp"

namespace ksrt::sim {

// Plain-text chain description, one key = value per line, # comments.
//
//   hop.0.kind = normal          normal | laplace | student_t |
//   hop.0.location_ns = 10000000   shifted_lognormal | constant
//   hop.0.scale_ns = 1500000
//   hop.0.shape = 3              (student_t dof / lognormal sigma)
//   eve.position = 1
//   eve.jitter.kind = normal
//   eve.jitter.scale_ns = 500000
//
// Hops must be numbered contiguously from 0.
ChainTopology parse_topology(const std::string& text);
ChainTopology load_topology(const std::string& path);
std::string topology_to_text(const ChainTopology& topology);

} // namespace ksrt::sim

#endif
