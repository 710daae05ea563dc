#ifndef KSRT_CHANNEL_HPP
#define KSRT_CHANNEL_HPP

#include <memory>
#include <utility>

#include "ksrt/wire.hpp"

namespace ksrt {

// Reliable ordered frame channel between the two endpoints. recv()
// blocks; a closed peer raises SessionAbort{channel_loss}.
class MessageChannel {
public:
    virtual ~MessageChannel() = default;
    virtual void send(const wire::Frame& frame) = 0;
    virtual wire::Frame recv() = 0;
    virtual void close() = 0;
};

// Connected pair of in-process channels backed by two bounded queues.
// Used by the chain simulator and by tests; real sessions use the TCP
// framed stream from transport.
std::pair<std::unique_ptr<MessageChannel>, std::unique_ptr<MessageChannel>>
make_channel_pair();

} // namespace ksrt

#endif
