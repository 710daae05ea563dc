#ifndef KSRT_TRANSCRIPT_HPP
#define KSRT_TRANSCRIPT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ksrt/stats.hpp"

namespace ksrt {

// Persisted record of a key-agreement run, sufficient to plot the BER
// trajectory. Simulated runs carry ground-truth error rates for both
// the channel and the eavesdropper; live runs carry only the public
// parity statistics, from which the channel BER can be estimated.
struct Transcript {
    enum class Mode { live, simulate };

    Mode mode = Mode::live;
    uint32_t rounds = 0;
    std::vector<stats::ParityStats> iterations;
    // Ground truth, simulate mode only. Index 0 is the raw extracted
    // string; index i > 0 is the state after iteration i.
    std::vector<double> ab_ber_by_state;
    std::vector<double> eve_ber_by_state;
};

std::string to_json(const Transcript& t);
Transcript transcript_from_json(const std::string& json_text);

void save_transcript(const Transcript& t, const std::string& path);
Transcript load_transcript(const std::string& path);

// CSV for the BER-versus-iteration curves: header plus one row per
// state. Simulated transcripts emit ground truth with an eavesdropper
// column; live transcripts emit per-state channel estimates derived
// from the parity statistics (the final state is forward-predicted).
// Throws on a transcript with no states.
std::string analyze_to_csv(const Transcript& t);

} // namespace ksrt

#endif
