#ifndef KSRT_DELAY_MODEL_HPP
#define KSRT_DELAY_MODEL_HPP

#include <string>

#include "ksrt/rng.hpp"

namespace ksrt::sim {

enum class DelayKind { normal, laplace, student_t, shifted_lognormal, constant };

// One hop's delay distribution, in nanoseconds. The location offset
// keeps sampled transit times physically positive; since bit extraction
// only looks at order statistics, shifting changes no bit.
//
//   normal             location + scale * Z
//   laplace            location + scale * Lap(1)
//   student_t          location + scale * T(shape dof)
//   shifted_lognormal  location + scale * exp(shape * Z)
//   constant           location
struct DelayModel {
    DelayKind kind = DelayKind::normal;
    double location_ns = 0.0;
    double scale_ns = 0.0;
    double shape = 3.0;
};

// Transit-time draw, clamped to >= 1 ns. The clamp only matters in the
// extreme tails of heavy-tailed models (measure ~1e-6 per draw for
// student_t(3) at the default offsets).
double sample_delay_ns(const DelayModel& model, rng::Stream& stream);

// Additive timestamping-noise draw: same transforms, no positivity
// clamp, and centered so that the model's median maps to zero.
double sample_noise_ns(const DelayModel& model, rng::Stream& stream);

// Median of the model's distribution.
double model_median_ns(const DelayModel& model);

DelayKind delay_kind_from_string(const std::string& name);
const char* to_string(DelayKind kind);

} // namespace ksrt::sim

#endif
