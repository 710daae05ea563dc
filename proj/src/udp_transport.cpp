#include "ksrt/udp_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "ksrt/errors.hpp"

namespace ksrt::transport {

namespace {

using Clock = std::chrono::steady_clock;

sockaddr_in make_addr(const std::string& host, uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw std::invalid_argument("not an IPv4 address: " + host);
    return addr;
}

[[noreturn]] void sys_fail(const char* what) {
    throw std::runtime_error(std::string(what) + ": " + std::strerror(errno));
}

// Waits for readability; false on timeout.
bool wait_readable(int fd, std::chrono::milliseconds timeout) {
    pollfd pfd{fd, POLLIN, 0};
    const int ms = static_cast<int>(std::max<int64_t>(0, timeout.count()));
    for (;;) {
        const int rc = ::poll(&pfd, 1, ms);
        if (rc > 0) return true;
        if (rc == 0) return false;
        if (errno != EINTR) sys_fail("poll");
    }
}

} // namespace

// ------------------------------------------------------------------
// UdpSocket
// ------------------------------------------------------------------

std::unique_ptr<UdpSocket> UdpSocket::bound(const std::string& local_host,
                                            uint16_t local_port) {
    auto sock = std::unique_ptr<UdpSocket>(new UdpSocket());
    sock->fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (sock->fd_ < 0) sys_fail("socket");
    const sockaddr_in addr = make_addr(local_host, local_port);
    if (::bind(sock->fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0)
        sys_fail("bind");
    return sock;
}

UdpSocket::~UdpSocket() {
    if (fd_ >= 0) ::close(fd_);
}

void UdpSocket::set_peer(const std::string& host, uint16_t port) {
    const sockaddr_in addr = make_addr(host, port);
    peer_addr_.assign(reinterpret_cast<const uint8_t*>(&addr),
                      reinterpret_cast<const uint8_t*>(&addr) + sizeof(addr));
}

uint16_t UdpSocket::local_port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0)
        sys_fail("getsockname");
    return ntohs(addr.sin_port);
}

void UdpSocket::send(std::span<const uint8_t> datagram) {
    if (peer_addr_.empty())
        throw std::logic_error("UdpSocket::send without a peer");
    const ssize_t n = ::sendto(fd_, datagram.data(), datagram.size(), 0,
                               reinterpret_cast<const sockaddr*>(peer_addr_.data()),
                               static_cast<socklen_t>(peer_addr_.size()));
    if (n < 0) sys_fail("sendto");
}

std::optional<std::vector<uint8_t>> UdpSocket::recv(std::chrono::milliseconds timeout) {
    if (!wait_readable(fd_, timeout)) return std::nullopt;
    std::vector<uint8_t> buf(2048);
    sockaddr_storage from{};
    socklen_t from_len = sizeof(from);
    const ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0,
                                 reinterpret_cast<sockaddr*>(&from), &from_len);
    if (n < 0) sys_fail("recvfrom");
    buf.resize(static_cast<size_t>(n));
    last_sender_.assign(reinterpret_cast<const uint8_t*>(&from),
                        reinterpret_cast<const uint8_t*>(&from) + from_len);
    return buf;
}

void UdpSocket::latch_peer() {
    if (!last_sender_.empty()) peer_addr_ = last_sender_;
}

// ------------------------------------------------------------------
// Rally loops
// ------------------------------------------------------------------

std::vector<RttSample> run_initiator_rally(DatagramSocket& socket, uint32_t rounds,
                                           const RallyConfig& config) {
    std::vector<RttSample> samples(rounds);
    for (uint32_t i = 0; i < rounds; ++i) samples[i].index = i;

    uint32_t consecutive_timeouts = 0;
    for (uint32_t seq = 0; seq < rounds; ++seq) {
        if (config.min_turnaround.count() > 0)
            std::this_thread::sleep_for(config.min_turnaround);

        const auto probe = wire::encode(
            wire::RallyPacket{wire::PacketKind::probe, config.session_id, seq});
        const auto t_send = Clock::now();
        socket.send(probe);

        const auto deadline = t_send + config.timeout;
        bool completed = false;
        for (;;) {
            const auto remaining =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
            if (remaining.count() <= 0) break;
            const auto datagram = socket.recv(remaining);
            if (!datagram) break;
            const auto t_recv = Clock::now();
            const auto packet = wire::decode_rally(*datagram);
            if (!packet || packet->session_id != config.session_id) continue;
            if (packet->kind != wire::PacketKind::echo || packet->seq != seq)
                continue; // stale echo from an already timed-out round
            samples[seq].status = SampleStatus::ok;
            samples[seq].rtt_ns =
                std::chrono::duration_cast<std::chrono::nanoseconds>(t_recv - t_send).count();
            completed = true;
            break;
        }

        if (completed) {
            consecutive_timeouts = 0;
        } else if (++consecutive_timeouts >= config.max_consecutive_timeouts) {
            throw SessionAbort(AbortCause::channel_loss,
                               "no echo for " + std::to_string(consecutive_timeouts) +
                                   " consecutive rounds");
        }
    }
    return samples;
}

std::vector<RttSample> run_responder_rally(DatagramSocket& socket, uint32_t rounds,
                                           const RallyConfig& config) {
    std::vector<RttSample> samples(rounds);
    for (uint32_t i = 0; i < rounds; ++i) samples[i].index = i;

    uint32_t consecutive_timeouts = 0;
    int64_t last_echo_seq = -1;
    Clock::time_point last_echo_time{};
    uint32_t expect = 0;

    while (expect < rounds) {
        const auto datagram = socket.recv(config.timeout);
        if (!datagram) {
            if (++consecutive_timeouts >= config.max_consecutive_timeouts)
                throw SessionAbort(AbortCause::channel_loss,
                                   "no probe for " + std::to_string(consecutive_timeouts) +
                                       " consecutive timeouts");
            continue;
        }
        const auto t_arrival = Clock::now();
        const auto packet = wire::decode_rally(*datagram);
        if (!packet || packet->session_id != config.session_id ||
            packet->kind != wire::PacketKind::probe)
            continue;
        if (packet->seq < expect || packet->seq >= rounds) continue;

        // Sample last_echo_seq completes only if this probe follows it
        // directly; a gap means the initiator restarted after a timeout
        // and the interval would span the wait.
        if (last_echo_seq >= 0 && packet->seq == last_echo_seq + 1) {
            auto& s = samples[static_cast<size_t>(last_echo_seq)];
            s.status = SampleStatus::ok;
            s.rtt_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           t_arrival - last_echo_time)
                           .count();
        }

        socket.latch_peer();
        const auto echo = wire::encode(
            wire::RallyPacket{wire::PacketKind::echo, config.session_id, packet->seq});
        const auto t_echo = Clock::now();
        socket.send(echo);

        last_echo_seq = packet->seq;
        last_echo_time = t_echo;
        expect = packet->seq + 1;
        consecutive_timeouts = 0;
    }
    // The last sample has no following probe and stays timed out.
    return samples;
}

std::vector<RttSample> UdpRallySource::rally(uint32_t rounds) {
    return side_ == Side::initiator ? run_initiator_rally(*socket_, rounds, config_)
                                    : run_responder_rally(*socket_, rounds, config_);
}

// ------------------------------------------------------------------
// TcpFramedChannel
// ------------------------------------------------------------------

std::unique_ptr<TcpFramedChannel> TcpFramedChannel::connect(
    const std::string& host, uint16_t port, std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    for (;;) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) sys_fail("socket");
        const sockaddr_in addr = make_addr(host, port);
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0)
            return std::unique_ptr<TcpFramedChannel>(new TcpFramedChannel(fd));
        ::close(fd);
        if (Clock::now() >= deadline)
            throw SessionAbort(AbortCause::channel_loss,
                               "could not connect reconciliation stream to " + host);
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

std::unique_ptr<TcpFramedChannel> TcpFramedChannel::accept(
    const std::string& local_host, uint16_t port, std::chrono::milliseconds timeout) {
    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) sys_fail("socket");
    const int one = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    const sockaddr_in addr = make_addr(local_host, port);
    if (::bind(listener, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(listener);
        sys_fail("bind");
    }
    if (::listen(listener, 1) < 0) {
        ::close(listener);
        sys_fail("listen");
    }
    if (!wait_readable(listener, timeout)) {
        ::close(listener);
        throw SessionAbort(AbortCause::channel_loss,
                           "peer never connected the reconciliation stream");
    }
    const int fd = ::accept(listener, nullptr, nullptr);
    ::close(listener);
    if (fd < 0) sys_fail("accept");
    return std::unique_ptr<TcpFramedChannel>(new TcpFramedChannel(fd));
}

TcpFramedChannel::~TcpFramedChannel() { close(); }

void TcpFramedChannel::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

void TcpFramedChannel::send(const wire::Frame& frame) {
    if (fd_ < 0) throw SessionAbort(AbortCause::channel_loss, "stream already closed");
    const std::vector<uint8_t> bytes = wire::encode(frame);
    size_t sent = 0;
    while (sent < bytes.size()) {
        const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw SessionAbort(AbortCause::channel_loss,
                               std::string("stream send failed: ") + std::strerror(errno));
        }
        sent += static_cast<size_t>(n);
    }
}

wire::Frame TcpFramedChannel::recv() {
    if (fd_ < 0) throw SessionAbort(AbortCause::channel_loss, "stream already closed");
    auto read_exact = [&](uint8_t* out, size_t count) {
        size_t got = 0;
        while (got < count) {
            const ssize_t n = ::recv(fd_, out + got, count - got, 0);
            if (n == 0)
                throw SessionAbort(AbortCause::channel_loss, "peer closed the stream");
            if (n < 0) {
                if (errno == EINTR) continue;
                throw SessionAbort(AbortCause::channel_loss,
                                   std::string("stream recv failed: ") + std::strerror(errno));
            }
            got += static_cast<size_t>(n);
        }
    };

    std::vector<uint8_t> buffer(wire::kFrameHeaderSize);
    read_exact(buffer.data(), buffer.size());
    const uint32_t length = (static_cast<uint32_t>(buffer[1]) << 24) |
                            (static_cast<uint32_t>(buffer[2]) << 16) |
                            (static_cast<uint32_t>(buffer[3]) << 8) |
                            static_cast<uint32_t>(buffer[4]);
    constexpr uint32_t kMaxFrame = 16u << 20;
    if (length > kMaxFrame)
        throw SessionAbort(AbortCause::desync, "oversized frame on reconciliation stream");
    buffer.resize(wire::kFrameHeaderSize + length);
    read_exact(buffer.data() + wire::kFrameHeaderSize, length);

    size_t consumed = 0;
    std::optional<wire::Frame> frame;
    try {
        frame = wire::decode_frame(buffer, consumed);
    } catch (const std::invalid_argument& e) {
        throw SessionAbort(AbortCause::desync, e.what());
    }
    if (!frame || consumed != buffer.size())
        throw SessionAbort(AbortCause::desync, "invalid frame on reconciliation stream");
    return *frame;
}

} // namespace ksrt::transport
