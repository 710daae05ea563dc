#include "ksrt/channel.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>

#include "ksrt/errors.hpp"

namespace ksrt {

namespace {

struct FrameQueue {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<wire::Frame> frames;
    bool closed = false;

    void push(const wire::Frame& f) {
        {
            std::lock_guard lock(mutex);
            if (closed)
                throw SessionAbort(AbortCause::channel_loss, "send on closed channel");
            frames.push_back(f);
        }
        ready.notify_one();
    }

    wire::Frame pop() {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return !frames.empty() || closed; });
        if (frames.empty())
            throw SessionAbort(AbortCause::channel_loss, "peer closed the channel");
        wire::Frame f = std::move(frames.front());
        frames.pop_front();
        return f;
    }

    void close() {
        {
            std::lock_guard lock(mutex);
            closed = true;
        }
        ready.notify_all();
    }
};

class PairedChannel final : public MessageChannel {
public:
    PairedChannel(std::shared_ptr<FrameQueue> tx, std::shared_ptr<FrameQueue> rx)
        : tx_(std::move(tx)), rx_(std::move(rx)) {}

    ~PairedChannel() override { close(); }

    void send(const wire::Frame& frame) override { tx_->push(frame); }
    wire::Frame recv() override { return rx_->pop(); }

    void close() override {
        tx_->close();
        rx_->close();
    }

private:
    std::shared_ptr<FrameQueue> tx_;
    std::shared_ptr<FrameQueue> rx_;
};

} // namespace

std::pair<std::unique_ptr<MessageChannel>, std::unique_ptr<MessageChannel>>
make_channel_pair() {
    auto a_to_b = std::make_shared<FrameQueue>();
    auto b_to_a = std::make_shared<FrameQueue>();
    return {std::make_unique<PairedChannel>(a_to_b, b_to_a),
            std::make_unique<PairedChannel>(b_to_a, a_to_b)};
}

} // namespace ksrt
