// ksrt — shared-key generation from round-trip-time randomness.
//
// Modes:
//   keygen-initiator / keygen-responder   live two-process key agreement
//   simulate                              both endpoints in-process over
//                                         the chain simulator
//   analyze                               transcript -> BER-per-iteration CSV

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "ksrt/errors.hpp"
#include "ksrt/session.hpp"
#include "ksrt/sha256.hpp"
#include "ksrt/topology_config.hpp"
#include "ksrt/transcript.hpp"
#include "ksrt/udp_transport.hpp"

namespace {

using namespace ksrt;

struct Options {
    std::string mode;
    std::string peer;
    std::string listen = "0.0.0.0:0";
    std::string session_id_hex;
    uint32_t rounds = 30000;
    uint32_t timeout_ms = 2000;
    double eve_ber_floor = 0.01;
    double final_ber = 1e-6;
    double leakage_budget = 1e-3;
    double z = 2.0;
    std::string out;
    std::string format = "raw";
    std::string transcript;
    uint64_t seed = 0;
    std::string topology;
    double drop_prob = 0.0;
};

std::pair<std::string, uint16_t> split_host_port(const std::string& value) {
    const auto colon = value.rfind(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("expected host:port, got " + value);
    const std::string host = value.substr(0, colon);
    const unsigned long port = std::stoul(value.substr(colon + 1));
    if (host.empty() || port == 0 || port > 65534)
        throw CLI::ValidationError("expected host:port with port in [1, 65534]");
    return {host, static_cast<uint16_t>(port)};
}

wire::SessionId parse_session_id(const std::string& hex) {
    if (hex.size() != 32)
        throw CLI::ValidationError("--session-id must be exactly 32 hex characters");
    wire::SessionId id{};
    for (size_t i = 0; i < 16; ++i) {
        const auto nibble = [&](char c) -> uint8_t {
            if (c >= '0' && c <= '9') return static_cast<uint8_t>(c - '0');
            if (c >= 'a' && c <= 'f') return static_cast<uint8_t>(c - 'a' + 10);
            if (c >= 'A' && c <= 'F') return static_cast<uint8_t>(c - 'A' + 10);
            throw CLI::ValidationError("--session-id must be hex");
        };
        id[i] = static_cast<uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    }
    return id;
}

sim::ChainTopology resolve_topology(const std::string& spec_path) {
    if (spec_path == "default") return sim::default_topology();
    return sim::load_topology(spec_path);
}

SessionConfig make_session_config(const Options& opt) {
    SessionConfig config;
    config.rounds = opt.rounds;
    config.planner.eve_ber_floor = opt.eve_ber_floor;
    config.planner.final_key_ber_target = opt.final_ber;
    config.planner.per_bit_leakage_budget = opt.leakage_budget;
    config.planner.z = opt.z;
    if (!opt.session_id_hex.empty()) {
        config.session_id = parse_session_id(opt.session_id_hex);
    } else {
        // Simulation convenience: derive a stable id from the seed.
        const auto digest = Sha256::digest(
            {reinterpret_cast<const uint8_t*>(&opt.seed), sizeof(opt.seed)});
        std::copy_n(digest.begin(), 16, config.session_id.begin());
    }
    return config;
}

void write_key_file(const FinalKey& key, const std::string& path,
                    const std::string& format) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write key file " + path);
    if (format == "hex") {
        out << to_hex(key.key.bytes()) << "\n";
        return;
    }
    // Raw: 4-byte big-endian bit count, then the packed key bytes.
    const uint32_t bits = static_cast<uint32_t>(key.key.size());
    const uint8_t header[4] = {static_cast<uint8_t>(bits >> 24),
                               static_cast<uint8_t>(bits >> 16),
                               static_cast<uint8_t>(bits >> 8),
                               static_cast<uint8_t>(bits)};
    out.write(reinterpret_cast<const char*>(header), 4);
    out.write(reinterpret_cast<const char*>(key.key.bytes().data()),
              static_cast<std::streamsize>(key.key.bytes().size()));
}

void write_report_csv(const SessionReport& report, const std::string& mode,
                      const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report " + path);
    out.precision(12);
    out << "key,value\n";
    out << "mode," << mode << "\n";
    out << "rounds," << report.rounds << "\n";
    out << "local_timeouts," << report.local_timeouts << "\n";
    out << "union_discards," << report.union_discards << "\n";
    out << "ties," << report.ties << "\n";
    out << "raw_bits," << report.raw_bits << "\n";
    out << "ber_lo," << report.estimated_ber.lo << "\n";
    out << "ber_hi," << report.estimated_ber.hi << "\n";
    out << "secrecy_upper_bound," << report.secrecy_upper_bound << "\n";
    out << "plan_total_iterations," << report.plan.total_iterations << "\n";
    out << "plan_pa_block_size," << report.plan.pa_block_size << "\n";
    out << "plan_ir_target_ber," << report.plan.ir_target_ber << "\n";
    out << "plan_predicted_final_ber," << report.plan.predicted_final_ber << "\n";
    out << "plan_predicted_eve_info_per_bit," << report.plan.predicted_eve_info_per_bit
        << "\n";
    out << "iterations," << report.iterations.size() << "\n";
    for (size_t i = 0; i < report.iterations.size(); ++i) {
        out << "iteration_" << i << "_pairs," << report.iterations[i].parity.pairs << "\n";
        out << "iteration_" << i << "_mismatches,"
            << report.iterations[i].parity.mismatches << "\n";
        out << "iteration_" << i << "_length_after," << report.iterations[i].length_after
            << "\n";
    }
    out << "final_key_bits," << report.final_key_bits << "\n";
    out << "elapsed_seconds," << report.elapsed_seconds << "\n";
    out << "key_rate_bits_per_minute," << report.key_rate_bits_per_minute << "\n";
}

Transcript live_transcript(const SessionReport& report) {
    Transcript t;
    t.mode = Transcript::Mode::live;
    t.rounds = report.rounds;
    for (const auto& it : report.iterations) t.iterations.push_back(it.parity);
    return t;
}

int run_keygen(const Options& opt, bool initiator) {
    if (opt.out.empty()) throw CLI::ValidationError("--out is required for keygen modes");
    if (opt.session_id_hex.empty())
        throw CLI::ValidationError("--session-id is required for keygen modes");
    if (initiator && opt.peer.empty())
        throw CLI::ValidationError("keygen-initiator requires --peer");
    if (!initiator && opt.listen.empty())
        throw CLI::ValidationError("keygen-responder requires --listen");

    const SessionConfig config = make_session_config(opt);

    // Rally source: real UDP by default, the simulated chain when a
    // topology is injected (both processes must then share --seed).
    std::unique_ptr<RttSource> source;
    std::optional<sim::ChainTopology> topology;
    if (!opt.topology.empty()) {
        topology = resolve_topology(opt.topology);
        const sim::RallyWorld world =
            sim::simulate_rallies(*topology, opt.rounds, opt.drop_prob, opt.seed);
        require_eve_floor_plausible(sim::compute_eve_ground_truth(world),
                                    config.planner.eve_ber_floor);
        source = std::make_unique<sim::SimulatedRallySource>(
            *topology, opt.seed,
            initiator ? sim::SimulatedRallySource::Side::initiator
                      : sim::SimulatedRallySource::Side::responder,
            opt.drop_prob);
    } else {
        transport::RallyConfig rally;
        rally.session_id = config.session_id;
        rally.timeout = std::chrono::milliseconds(opt.timeout_ms);
        if (initiator) {
            const auto [peer_host, peer_port] = split_host_port(opt.peer);
            auto socket = transport::UdpSocket::bound("0.0.0.0", 0);
            socket->set_peer(peer_host, peer_port);
            source = std::make_unique<transport::UdpRallySource>(
                std::move(socket), transport::UdpRallySource::Side::initiator, rally);
        } else {
            const auto [host, port] = split_host_port(opt.listen);
            auto socket = transport::UdpSocket::bound(host, port);
            source = std::make_unique<transport::UdpRallySource>(
                std::move(socket), transport::UdpRallySource::Side::responder, rally);
        }
    }

    // Reconciliation stream on the rally port + 1.
    std::unique_ptr<MessageChannel> channel;
    const auto establish_timeout = std::chrono::milliseconds(
        std::max<int64_t>(10 * static_cast<int64_t>(opt.timeout_ms), 2000));
    if (initiator) {
        const auto [peer_host, peer_port] = split_host_port(opt.peer);
        channel = transport::TcpFramedChannel::connect(
            peer_host, static_cast<uint16_t>(peer_port + 1), establish_timeout);
    } else {
        const auto [host, port] = split_host_port(opt.listen);
        channel = transport::TcpFramedChannel::accept(
            host, static_cast<uint16_t>(port + 1), establish_timeout);
    }

    const SessionResult result = run_keygen_session(*source, *channel, config);

    write_key_file(result.key, opt.out, opt.format);
    const std::string mode = initiator ? "keygen-initiator" : "keygen-responder";
    write_report_csv(result.report, mode, opt.out + ".report.csv");
    if (!opt.transcript.empty())
        save_transcript(live_transcript(result.report), opt.transcript);

    std::cout << "key: " << result.report.final_key_bits << " bits -> " << opt.out << "\n"
              << "rate: " << result.report.key_rate_bits_per_minute << " bits/minute\n"
              << "secrecy bound: " << result.report.secrecy_upper_bound
              << " bits/measurement\n"
              << "report: " << opt.out << ".report.csv\n";
    return 0;
}

int run_simulate(const Options& opt) {
    if (opt.out.empty()) throw CLI::ValidationError("--out is required for simulate");
    const sim::ChainTopology topology =
        resolve_topology(opt.topology.empty() ? "default" : opt.topology);
    const SessionConfig config = make_session_config(opt);

    const SimulatedSession outcome =
        run_simulated_session(topology, config, opt.seed, opt.drop_prob);

    write_key_file(outcome.initiator.key, opt.out, opt.format);
    write_report_csv(outcome.initiator.report, "simulate", opt.out + ".report.csv");

    if (!opt.transcript.empty()) {
        Transcript t;
        t.mode = Transcript::Mode::simulate;
        t.rounds = opt.rounds;
        for (const auto& it : outcome.initiator.report.iterations)
            t.iterations.push_back(it.parity);
        t.ab_ber_by_state = outcome.ab_ber_by_state;
        t.eve_ber_by_state = outcome.eve_ber_by_state;
        save_transcript(t, opt.transcript);
    }

    std::cout << "key: " << outcome.initiator.report.final_key_bits << " bits -> "
              << opt.out << "\n"
              << "digests match: "
              << (outcome.initiator.key.digest == outcome.responder.key.digest ? "yes"
                                                                               : "no")
              << "\n"
              << "channel BER (ground truth): " << outcome.ab_ber_by_state.front() << " -> "
              << outcome.ab_ber_by_state.back() << "\n"
              << "eavesdropper BER (ground truth): " << outcome.eve_ber_by_state.front()
              << " -> " << outcome.eve_ber_by_state.back() << "\n"
              << "report: " << opt.out << ".report.csv\n";
    return 0;
}

int run_analyze(const Options& opt) {
    if (opt.transcript.empty())
        throw CLI::ValidationError("analyze requires --transcript");
    if (opt.out.empty()) throw CLI::ValidationError("analyze requires --out");
    const Transcript t = load_transcript(opt.transcript);
    const std::string csv = analyze_to_csv(t); // throws before the file is touched
    std::ofstream out(opt.out, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + opt.out);
    out << csv;
    std::cout << "wrote " << opt.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"key agreement from packet round-trip-time randomness"};
    Options opt;

    app.add_option("--mode", opt.mode, "keygen-initiator | keygen-responder | simulate | analyze")
        ->required()
        ->check(CLI::IsMember(
            {"keygen-initiator", "keygen-responder", "simulate", "analyze"}));
    app.add_option("--peer", opt.peer, "peer address host:port (rally port; stream uses port+1)");
    app.add_option("--listen", opt.listen, "listen address host:port");
    app.add_option("--session-id", opt.session_id_hex, "shared session id, 32 hex chars");
    app.add_option("--rounds", opt.rounds, "round trips to measure")
        ->check(CLI::Range(100u, 100000000u));
    app.add_option("--timeout-ms", opt.timeout_ms, "per-round echo timeout");
    app.add_option("--eve-ber-floor", opt.eve_ber_floor,
                   "assumed lower bound on the eavesdropper's BER");
    app.add_option("--final-ber", opt.final_ber, "target BER of the final key");
    app.add_option("--leakage-budget", opt.leakage_budget,
                   "admissible eavesdropper information per key bit");
    app.add_option("--z", opt.z, "confidence width for parity statistics");
    app.add_option("--out", opt.out, "key file (keygen/simulate) or CSV (analyze)");
    app.add_option("--format", opt.format, "key file format")
        ->check(CLI::IsMember({"raw", "hex"}));
    app.add_option("--transcript", opt.transcript,
                   "transcript path: output for keygen/simulate, input for analyze");
    app.add_option("--seed", opt.seed, "simulation seed")->capture_default_str();
    app.add_option("--topology", opt.topology,
                   "chain topology file, or 'default' (enables the simulated chain)");
    app.add_option("--drop-prob", opt.drop_prob, "simulated per-packet drop probability")
        ->check(CLI::Range(0.0, 0.99));

    CLI11_PARSE(app, argc, argv);

    try {
        if (opt.mode == "keygen-initiator") return run_keygen(opt, true);
        if (opt.mode == "keygen-responder") return run_keygen(opt, false);
        if (opt.mode == "simulate") return run_simulate(opt);
        return run_analyze(opt);
    } catch (const SessionAbort& abort) {
        std::cerr << "aborted: " << abort.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
