#ifndef KSRT_UDP_TRANSPORT_HPP
#define KSRT_UDP_TRANSPORT_HPP

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ksrt/channel.hpp"
#include "ksrt/rtt_source.hpp"
#include "ksrt/wire.hpp"

namespace ksrt::transport {

// Thin datagram abstraction so tests can interpose and capture the
// exact bytes that touch the wire.
class DatagramSocket {
public:
    virtual ~DatagramSocket() = default;
    // Sends to the connected or latched peer.
    virtual void send(std::span<const uint8_t> datagram) = 0;
    // Blocks up to `timeout`; nullopt on timeout. A valid responder
    // latches the sender via latch_peer() before replying.
    virtual std::optional<std::vector<uint8_t>> recv(std::chrono::milliseconds timeout) = 0;
    // Makes the sender of the most recent datagram the send target.
    virtual void latch_peer() = 0;
};

// UDP/IPv4 socket bound to local_host:local_port (port 0 picks one).
class UdpSocket final : public DatagramSocket {
public:
    static std::unique_ptr<UdpSocket> bound(const std::string& local_host,
                                            uint16_t local_port);

    ~UdpSocket() override;
    void send(std::span<const uint8_t> datagram) override;
    std::optional<std::vector<uint8_t>> recv(std::chrono::milliseconds timeout) override;
    void latch_peer() override;

    void set_peer(const std::string& host, uint16_t port);
    uint16_t local_port() const;

private:
    UdpSocket() = default;
    int fd_ = -1;
    // Latched reply target.
    std::vector<uint8_t> peer_addr_;
    std::vector<uint8_t> last_sender_;
};

struct RallyConfig {
    wire::SessionId session_id{};
    std::chrono::milliseconds timeout{2000};
    uint32_t max_consecutive_timeouts = 10;
    // Optional pacing between rounds; zero means immediate turnaround.
    std::chrono::microseconds min_turnaround{0};
};

// Initiator side of the rally: sends PROBE(i), timestamps ECHO(i), and
// immediately moves to PROBE(i+1). A timeout marks the round and the
// loop restarts at the next sequence number.
std::vector<RttSample> run_initiator_rally(DatagramSocket& socket, uint32_t rounds,
                                           const RallyConfig& config);

// Responder side: timestamps each PROBE arrival, echoes it at once, and
// measures from its own ECHO(i) to the arrival of PROBE(i+1). Sequence
// gaps become timeouts for the skipped indices, and the sample spanning
// a gap is timed out as well. The final sample is never completed.
std::vector<RttSample> run_responder_rally(DatagramSocket& socket, uint32_t rounds,
                                           const RallyConfig& config);

class UdpRallySource final : public RttSource {
public:
    enum class Side { initiator, responder };

    UdpRallySource(std::unique_ptr<DatagramSocket> socket, Side side,
                   const RallyConfig& config)
        : socket_(std::move(socket)), side_(side), config_(config) {}

    std::vector<RttSample> rally(uint32_t rounds) override;

private:
    std::unique_ptr<DatagramSocket> socket_;
    Side side_;
    RallyConfig config_;
};

// Reliable ordered frame stream over TCP; reconciliation traffic needs
// lossless in-order delivery, which UDP does not give us.
class TcpFramedChannel final : public MessageChannel {
public:
    static std::unique_ptr<TcpFramedChannel> connect(const std::string& host,
                                                     uint16_t port,
                                                     std::chrono::milliseconds timeout);
    static std::unique_ptr<TcpFramedChannel> accept(const std::string& local_host,
                                                    uint16_t port,
                                                    std::chrono::milliseconds timeout);

    ~TcpFramedChannel() override;
    void send(const wire::Frame& frame) override;
    wire::Frame recv() override;
    void close() override;

private:
    explicit TcpFramedChannel(int fd) : fd_(fd) {}
    int fd_ = -1;
};

} // namespace ksrt::transport

#endif
