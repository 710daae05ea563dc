#ifndef KSRT_RTT_SOURCE_HPP
#define KSRT_RTT_SOURCE_HPP

#include <cstdint>
#include <vector>

#include "ksrt/extraction.hpp"

namespace ksrt {

// Produces one batch of round-trip samples for a session. Two
// implementations: the live UDP rally and the simulated chain.
class RttSource {
public:
    virtual ~RttSource() = default;
    virtual std::vector<RttSample> rally(uint32_t rounds) = 0;
};

} // namespace ksrt

#endif
