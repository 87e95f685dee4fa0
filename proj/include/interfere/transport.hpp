#pragma once

#include <atomic>
#include <barrier>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace interfere::stressor {

/// Hooks for observing collective ordering; used by tests.
struct TransportObserver {
    /// Called by an endpoint as it enters an all-to-all call.
    std::function<void(std::size_t rank, std::size_t call)> on_enter;
    /// Called exactly once per call after every endpoint has finished its exchange
    /// and before any endpoint is released.
    std::function<void(std::size_t call)> on_complete;
};

/**
 * All-to-all exchange among a fixed set of endpoints, each driven by its own thread.
 *
 * Every endpoint passes a send buffer of endpoints·block bytes; segment j goes
 * to endpoint j. After the call, segment j of the receive buffer holds what
 * endpoint j sent. The call returns only after all endpoints have completed it.
 */
class Transport {
public:
    explicit Transport(std::size_t endpoints);
    virtual ~Transport() = default;

    Transport(const Transport&) = delete;
    Transport& operator=(const Transport&) = delete;

    [[nodiscard]] std::size_t endpoints() const noexcept { return endpoints_; }

    /// Bytes moved by one endpoint in one call, excluding its own segment.
    struct Traffic {
        std::size_t sent = 0;
        std::size_t received = 0;
    };

    Traffic all_to_all(std::size_t rank, std::span<const std::byte> send, std::span<std::byte> recv,
                       std::size_t block);

    /// Releases the barrier seat of a failed endpoint so the others are not left waiting.
    /// Subsequent calls by any endpoint fail.
    void abandon(std::size_t rank) noexcept;

    [[nodiscard]] bool aborted() const noexcept { return aborted_.load(); }

    void set_observer(TransportObserver observer) { observer_ = std::move(observer); }

protected:
    /// Moves the bytes; the base class handles synchronization afterwards.
    virtual Traffic exchange(std::size_t rank, std::span<const std::byte> send,
                             std::span<std::byte> recv, std::size_t block) = 0;

    /// Lets implementations unblock peers waiting on a failed endpoint.
    virtual void on_abandon(std::size_t /*rank*/) noexcept {}

private:
    struct PhaseDone {
        Transport* self;
        void operator()() noexcept;
    };

    std::size_t endpoints_;
    std::atomic<bool> aborted_{false};
    std::atomic<std::size_t> completed_calls_{0};
    TransportObserver observer_;
    std::vector<std::size_t> calls_;  // per rank; each entry touched only by its rank
    std::barrier<PhaseDone> barrier_;
};

/// Deterministic exchange through a shared in-memory mailbox matrix.
class InProcessTransport final : public Transport {
public:
    explicit InProcessTransport(std::size_t endpoints);

protected:
    Traffic exchange(std::size_t rank, std::span<const std::byte> send, std::span<std::byte> recv,
                     std::size_t block) override;
    void on_abandon(std::size_t rank) noexcept override;

private:
    std::vector<const std::byte*> posted_send_;  // per rank, valid between the two barriers
    std::barrier<> posted_;
};

/// Exchange over a full mesh of TCP connections on 127.0.0.1.
class LoopbackTransport final : public Transport {
public:
    explicit LoopbackTransport(std::size_t endpoints);
    ~LoopbackTransport() override;

protected:
    Traffic exchange(std::size_t rank, std::span<const std::byte> send, std::span<std::byte> recv,
                     std::size_t block) override;
    void on_abandon(std::size_t rank) noexcept override;

private:
    std::vector<int> sockets_;  // [rank * n + peer], -1 on the diagonal
};

enum class TransportKind { InProcess, Loopback };

[[nodiscard]] TransportKind parse_transport(std::string_view text);
[[nodiscard]] std::unique_ptr<Transport> make_transport(TransportKind kind, std::size_t endpoints);

}  // namespace interfere::stressor
