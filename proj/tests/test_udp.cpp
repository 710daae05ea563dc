#include <doctest.h>

#include <cstring>
#include <thread>

#include "ksrt/errors.hpp"
#include "ksrt/udp_transport.hpp"

using namespace ksrt;
using namespace ksrt::transport;

namespace {

wire::SessionId test_session_id() {
    wire::SessionId id{};
    for (int i = 0; i < 16; ++i) id[i] = static_cast<uint8_t>(0x30 + i);
    return id;
}

// Captures every datagram that crosses the socket boundary.
class RecordingSocket final : public DatagramSocket {
public:
    explicit RecordingSocket(DatagramSocket& inner) : inner_(inner) {}

    void send(std::span<const uint8_t> datagram) override {
        sent.emplace_back(datagram.begin(), datagram.end());
        inner_.send(datagram);
    }
    std::optional<std::vector<uint8_t>> recv(std::chrono::milliseconds timeout) override {
        auto got = inner_.recv(timeout);
        if (got) received.push_back(*got);
        return got;
    }
    void latch_peer() override { inner_.latch_peer(); }

    std::vector<std::vector<uint8_t>> sent;
    std::vector<std::vector<uint8_t>> received;

private:
    DatagramSocket& inner_;
};

bool contains_bytes(const std::vector<std::vector<uint8_t>>& packets,
                    std::span<const uint8_t> needle) {
    for (const auto& p : packets) {
        if (p.size() < needle.size()) continue;
        for (size_t i = 0; i + needle.size() <= p.size(); ++i)
            if (std::memcmp(p.data() + i, needle.data(), needle.size()) == 0) return true;
    }
    return false;
}

} // namespace

TEST_CASE("loopback rally mechanics and wire hygiene") {
    auto initiator_sock = UdpSocket::bound("127.0.0.1", 0);
    auto responder_sock = UdpSocket::bound("127.0.0.1", 0);
    initiator_sock->set_peer("127.0.0.1", responder_sock->local_port());
    responder_sock->set_peer("127.0.0.1", initiator_sock->local_port());

    RecordingSocket initiator_tap(*initiator_sock);
    RecordingSocket responder_tap(*responder_sock);

    RallyConfig config;
    config.session_id = test_session_id();
    config.timeout = std::chrono::milliseconds(2000);

    const uint32_t rounds = 400;
    std::vector<RttSample> responder_samples;
    std::thread responder([&] {
        responder_samples = run_responder_rally(responder_tap, rounds, config);
    });
    const std::vector<RttSample> initiator_samples =
        run_initiator_rally(initiator_tap, rounds, config);
    responder.join();

    REQUIRE(initiator_samples.size() == rounds);
    REQUIRE(responder_samples.size() == rounds);

    uint32_t initiator_ok = 0, responder_ok = 0;
    for (const auto& s : initiator_samples) {
        if (s.status == SampleStatus::ok) {
            ++initiator_ok;
            CHECK(s.rtt_ns > 0);
        }
    }
    for (const auto& s : responder_samples)
        responder_ok += s.status == SampleStatus::ok;

    // Loopback loses nothing: a full set on the initiator and one less
    // on the responder, whose final sample can never complete.
    CHECK(initiator_ok == rounds);
    CHECK(responder_ok == rounds - 1);
    CHECK(responder_samples.back().status == SampleStatus::timed_out);

    // The union discard rule leaves aligned sequences.
    const DiscardSet u = local_discards(initiator_samples)
                             .united_with(local_discards(responder_samples));
    const auto si = apply_discards(initiator_samples, u);
    const auto sr = apply_discards(responder_samples, u);
    CHECK(si.size() == sr.size());

    // Every captured datagram is exactly one well-formed 26-byte rally
    // packet; there is no room for any timestamp on the wire.
    for (const auto* tap : {&initiator_tap, &responder_tap}) {
        for (const auto& packet : tap->sent) {
            CHECK(packet.size() == wire::kRallyPacketSize);
            CHECK(wire::decode_rally(packet).has_value());
        }
    }
    // And no measured interval ever appears among the wire bytes, in
    // either byte order.
    for (const auto& s : initiator_samples) {
        if (s.status != SampleStatus::ok) continue;
        uint64_t le = static_cast<uint64_t>(s.rtt_ns);
        uint8_t le_bytes[8], be_bytes[8];
        for (int i = 0; i < 8; ++i) {
            le_bytes[i] = static_cast<uint8_t>(le >> (8 * i));
            be_bytes[7 - i] = le_bytes[i];
        }
        CHECK_FALSE(contains_bytes(initiator_tap.sent, {le_bytes, 8}));
        CHECK_FALSE(contains_bytes(initiator_tap.sent, {be_bytes, 8}));
    }
}

TEST_CASE("minimum turnaround paces the rally") {
    auto initiator_sock = UdpSocket::bound("127.0.0.1", 0);
    auto responder_sock = UdpSocket::bound("127.0.0.1", 0);
    initiator_sock->set_peer("127.0.0.1", responder_sock->local_port());
    responder_sock->set_peer("127.0.0.1", initiator_sock->local_port());

    RallyConfig config;
    config.session_id = test_session_id();
    config.min_turnaround = std::chrono::microseconds(2000);

    const uint32_t rounds = 50;
    std::thread responder([&] {
        RallyConfig responder_config = config;
        responder_config.min_turnaround = std::chrono::microseconds(0);
        (void)run_responder_rally(*responder_sock, rounds, responder_config);
    });
    const auto t0 = std::chrono::steady_clock::now();
    (void)run_initiator_rally(*initiator_sock, rounds, config);
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    responder.join();
    CHECK(elapsed >= std::chrono::milliseconds(100)); // 50 * 2ms pacing
}

TEST_CASE("absent responder aborts after the timeout cap") {
    auto sock = UdpSocket::bound("127.0.0.1", 0);
    auto peer = UdpSocket::bound("127.0.0.1", 0); // bound but silent
    sock->set_peer("127.0.0.1", peer->local_port());

    RallyConfig config;
    config.session_id = test_session_id();
    config.timeout = std::chrono::milliseconds(20);
    config.max_consecutive_timeouts = 5;

    try {
        (void)run_initiator_rally(*sock, 100, config);
        FAIL("rally should have aborted");
    } catch (const SessionAbort& abort) {
        CHECK(abort.cause() == AbortCause::channel_loss);
    }
}

TEST_CASE("foreign packets are ignored silently") {
    auto initiator_sock = UdpSocket::bound("127.0.0.1", 0);
    auto responder_sock = UdpSocket::bound("127.0.0.1", 0);
    auto noise_sock = UdpSocket::bound("127.0.0.1", 0);
    initiator_sock->set_peer("127.0.0.1", responder_sock->local_port());
    responder_sock->set_peer("127.0.0.1", initiator_sock->local_port());
    noise_sock->set_peer("127.0.0.1", responder_sock->local_port());

    RallyConfig config;
    config.session_id = test_session_id();

    std::thread noise([&] {
        // Garbage, wrong magic, wrong session, wrong version.
        for (int i = 0; i < 200; ++i) {
            std::vector<uint8_t> junk(26, static_cast<uint8_t>(i));
            noise_sock->send(junk);
            auto wrong_session = wire::encode(wire::RallyPacket{
                wire::PacketKind::probe, wire::SessionId{}, static_cast<uint32_t>(i)});
            noise_sock->send(wrong_session);
            auto bad_version = wire::encode(wire::RallyPacket{
                wire::PacketKind::probe, config.session_id, static_cast<uint32_t>(i)});
            bad_version[4] = 0x7f;
            noise_sock->send(bad_version);
        }
    });

    const uint32_t rounds = 100;
    std::vector<RttSample> responder_samples;
    std::thread responder([&] {
        responder_samples = run_responder_rally(*responder_sock, rounds, config);
    });
    const auto initiator_samples = run_initiator_rally(*initiator_sock, rounds, config);
    noise.join();
    responder.join();

    uint32_t ok = 0;
    for (const auto& s : initiator_samples) ok += s.status == SampleStatus::ok;
    CHECK(ok == rounds);
}

TEST_CASE("TCP framed channel carries frames intact") {
    constexpr uint16_t port = 39471;
    std::unique_ptr<TcpFramedChannel> server;
    std::thread accepter([&] {
        server = TcpFramedChannel::accept("127.0.0.1", port, std::chrono::seconds(5));
    });
    auto client = TcpFramedChannel::connect("127.0.0.1", port, std::chrono::seconds(5));
    accepter.join();
    REQUIRE(server);

    DiscardSet set;
    set.insert(3);
    set.insert(9);
    client->send(wire::make_discard_set(set));
    const wire::Frame got = server->recv();
    CHECK(wire::parse_discard_set(got) == set);

    wire::Frame big;
    big.type = wire::FrameType::parity_vector;
    big.payload.resize(100000);
    for (size_t i = 0; i < big.payload.size(); ++i)
        big.payload[i] = static_cast<uint8_t>(i * 31);
    server->send(big);
    CHECK(client->recv() == big);

    server->close();
    CHECK_THROWS_AS((void)client->recv(), SessionAbort);
}
