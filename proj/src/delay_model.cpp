#include "ksrt/delay_model.hpp"

#include <cmath>
#include <stdexcept>

namespace ksrt::sim {

namespace {

double raw_sample(const DelayModel& m, rng::Stream& s) {
    switch (m.kind) {
        case DelayKind::normal: return m.location_ns + m.scale_ns * s.normal();
        case DelayKind::laplace: return m.location_ns + m.scale_ns * s.laplace();
        case DelayKind::student_t: return m.location_ns + m.scale_ns * s.student_t(m.shape);
        case DelayKind::shifted_lognormal:
            return m.location_ns + m.scale_ns * std::exp(m.shape * s.normal());
        case DelayKind::constant: return m.location_ns;
    }
    throw std::logic_error("unhandled delay kind");
}

} // namespace

double model_median_ns(const DelayModel& m) {
    switch (m.kind) {
        case DelayKind::normal:
        case DelayKind::laplace:
        case DelayKind::student_t:
        case DelayKind::constant:
            return m.location_ns;
        case DelayKind::shifted_lognormal:
            return m.location_ns + m.scale_ns;
    }
    throw std::logic_error("unhandled delay kind");
}

double sample_delay_ns(const DelayModel& m, rng::Stream& s) {
    return std::max(1.0, raw_sample(m, s));
}

double sample_noise_ns(const DelayModel& m, rng::Stream& s) {
    return raw_sample(m, s) - model_median_ns(m);
}

DelayKind delay_kind_from_string(const std::string& name) {
    if (name == "normal") return DelayKind::normal;
    if (name == "laplace") return DelayKind::laplace;
    if (name == "student_t") return DelayKind::student_t;
    if (name == "shifted_lognormal") return DelayKind::shifted_lognormal;
    if (name == "constant") return DelayKind::constant;
    throw std::invalid_argument("unknown delay model kind: " + name);
}

const char* to_string(DelayKind kind) {
    switch (kind) {
        case DelayKind::normal: return "normal";
        case DelayKind::laplace: return "laplace";
        case DelayKind::student_t: return "student_t";
        case DelayKind::shifted_lognormal: return "shifted_lognormal";
        case DelayKind::constant: return "constant";
    }
    return "?";
}

} // namespace ksrt::sim
