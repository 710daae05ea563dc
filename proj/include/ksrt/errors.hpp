#ifndef KSRT_ERRORS_HPP
#define KSRT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ksrt {

// Why a key-agreement session stopped without producing a key. Every
// abort path names exactly one of these.
enum class AbortCause {
    channel_loss,
    desync,
    plan_mismatch,
    digest_mismatch,
    secrecy_impossible,
    insufficient_material,
    iteration_cap,
};

const char* to_string(AbortCause cause);

class SessionAbort : public std::runtime_error {
public:
    SessionAbort(AbortCause cause, const std::string& detail)
        : std::runtime_error(std::string(to_string(cause)) + ": " + detail),
          cause_(cause) {}

    AbortCause cause() const { return cause_; }

private:
    AbortCause cause_;
};

} // namespace ksrt

#endif
