#include "ksrt/transcript.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ksrt {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "ksrt-transcript";
constexpr int kVersion = 1;

} // namespace

std::string to_json(const Transcript& t) {
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["mode"] = t.mode == Transcript::Mode::simulate ? "simulate" : "live";
    j["rounds"] = t.rounds;
    j["iterations"] = json::array();
    for (const auto& it : t.iterations)
        j["iterations"].push_back({{"pairs", it.pairs}, {"mismatches", it.mismatches}});
    if (t.mode == Transcript::Mode::simulate) {
        j["ber_ab"] = t.ab_ber_by_state;
        j["ber_eve"] = t.eve_ber_by_state;
    }
    return j.dump(2);
}

Transcript transcript_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed transcript: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormat)
            throw std::runtime_error("malformed transcript: not a ksrt transcript");
        Transcript t;
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "simulate")
            t.mode = Transcript::Mode::simulate;
        else if (mode == "live")
            t.mode = Transcript::Mode::live;
        else
            throw std::runtime_error("malformed transcript: unknown mode " + mode);
        t.rounds = j.at("rounds").get<uint32_t>();
        for (const auto& it : j.at("iterations")) {
            stats::ParityStats s;
            s.pairs = it.at("pairs").get<uint64_t>();
            s.mismatches = it.at("mismatches").get<uint64_t>();
            if (s.mismatches > s.pairs)
                throw std::runtime_error("malformed transcript: mismatches exceed pairs");
            t.iterations.push_back(s);
        }
        if (t.mode == Transcript::Mode::simulate) {
            t.ab_ber_by_state = j.at("ber_ab").get<std::vector<double>>();
            t.eve_ber_by_state = j.at("ber_eve").get<std::vector<double>>();
            if (t.ab_ber_by_state.size() != t.eve_ber_by_state.size())
                throw std::runtime_error(
                    "malformed transcript: ground-truth columns disagree in length");
        }
        return t;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed transcript: ") + e.what());
    }
}

void save_transcript(const Transcript& t, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write transcript to " + path);
    out << to_json(t) << "\n";
}

Transcript load_transcript(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read transcript from " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return transcript_from_json(buffer.str());
}

std::string analyze_to_csv(const Transcript& t) {
    std::ostringstream out;
    out.precision(10);
    if (t.mode == Transcript::Mode::simulate) {
        if (t.ab_ber_by_state.empty())
            throw std::runtime_error("transcript holds no states to analyze");
        out << "iteration,ber_ab,ber_eve\n";
        for (size_t i = 0; i < t.ab_ber_by_state.size(); ++i)
            out << i << "," << t.ab_ber_by_state[i] << "," << t.eve_ber_by_state[i] << "\n";
        return out.str();
    }

    if (t.iterations.empty())
        throw std::runtime_error("transcript holds no states to analyze");
    out << "iteration,ber_ab\n";
    double last_estimate = 0.0;
    for (size_t i = 0; i < t.iterations.size(); ++i) {
        const auto& s = t.iterations[i];
        if (s.pairs == 0)
            throw std::runtime_error("malformed transcript: iteration with zero pairs");
        last_estimate = stats::invert_parity_mismatch(
            static_cast<double>(s.mismatches) / static_cast<double>(s.pairs));
        out << i << "," << last_estimate << "\n";
    }
    // The state after the final iteration has no parity evidence of its
    // own; predict it through the recursion.
    out << t.iterations.size() << "," << stats::pair_iteration_ber(last_estimate) << "\n";
    return out.str();
}

} // namespace ksrt
