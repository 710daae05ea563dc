#include "ksrt/reconcile.hpp"

#include "ksrt/errors.hpp"

namespace ksrt {

BitString pair_parities(const BitString& bits) {
    BitString out;
    const size_t pairs = bits.size() / 2;
    for (size_t i = 0; i < pairs; ++i)
        out.append(bits.bit(2 * i) != bits.bit(2 * i + 1));
    return out;
}

IterationResult keep_agreeing(const BitString& bits,
                              const BitString& local_parities,
                              const BitString& remote_parities,
                              uint32_t iteration_index) {
    const size_t pairs = bits.size() / 2;
    if (local_parities.size() != pairs || remote_parities.size() != pairs)
        throw SessionAbort(AbortCause::desync,
                           "parity vector length disagrees with pair count");

    IterationResult res;
    res.iteration_index = iteration_index;
    res.parity.pairs = pairs;
    for (size_t i = 0; i < pairs; ++i) {
        if (local_parities.bit(i) == remote_parities.bit(i))
            res.kept.append(bits.bit(2 * i));
        else
            ++res.parity.mismatches;
    }
    return res;
}

IterationResult run_iteration(const BitString& bits, MessageChannel& channel,
                              uint32_t iteration_index,
                              std::pair<BitString, BitString>* exchanged) {
    const BitString local = pair_parities(bits);

    wire::ParityVector pv;
    pv.iteration = static_cast<uint8_t>(iteration_index);
    pv.bits = local;
    channel.send(wire::make_parity_vector(pv));

    const wire::Frame frame = channel.recv();
    if (frame.type != wire::FrameType::parity_vector)
        throw SessionAbort(AbortCause::desync, "expected PARITY_VECTOR frame");
    const wire::ParityVector remote = wire::parse_parity_vector(frame);
    if (remote.iteration != pv.iteration)
        throw SessionAbort(AbortCause::desync, "peer is on a different iteration");

    if (exchanged) *exchanged = {local, remote.bits};
    return keep_agreeing(bits, local, remote.bits, iteration_index);
}

} // namespace ksrt
