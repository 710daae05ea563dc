#include "ksrt/errors.hpp"

namespace ksrt {

const char* to_string(AbortCause cause) {
    switch (cause) {
        case AbortCause::channel_loss: return "channel loss";
        case AbortCause::desync: return "protocol desynchronization";
        case AbortCause::plan_mismatch: return "plan mismatch";
        case AbortCause::digest_mismatch: return "key digest mismatch";
        case AbortCause::secrecy_impossible: return "secrecy impossible";
        case AbortCause::insufficient_material: return "insufficient key material";
        case AbortCause::iteration_cap: return "iteration cap reached";
    }
    return "unknown abort cause";
}

} // namespace ksrt
