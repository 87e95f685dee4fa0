#include "interfere/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "interfere/error.hpp"

namespace interfere::stressor {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw Error(ErrorKind::Communication, what + ": " + std::strerror(errno));
}

}  // namespace

Transport::Transport(std::size_t endpoints)
    : endpoints_(endpoints),
      calls_(endpoints, 0),
      barrier_(static_cast<std::ptrdiff_t>(endpoints), PhaseDone{this}) {
    if (endpoints == 0) {
        throw Error(ErrorKind::Config, "a transport needs at least one endpoint");
    }
}

void Transport::PhaseDone::operator()() noexcept {
    const std::size_t call = self->completed_calls_.fetch_add(1);
    if (self->observer_.on_complete) self->observer_.on_complete(call);
}

Transport::Traffic Transport::all_to_all(std::size_t rank, std::span<const std::byte> send,
                                         std::span<std::byte> recv, std::size_t block) {
    if (rank >= endpoints_) {
        throw Error(ErrorKind::Config, "endpoint rank out of range");
    }
    if (send.size() != block * endpoints_ || recv.size() != block * endpoints_) {
        throw Error(ErrorKind::Config, "all-to-all buffers must hold one block per endpoint");
    }
    if (aborted_.load()) {
        throw Error(ErrorKind::Communication, "transport aborted by a failed peer");
    }
    if (observer_.on_enter) observer_.on_enter(rank, calls_[rank]);
    ++calls_[rank];

    std::memcpy(recv.data() + rank * block, send.data() + rank * block, block);
    const Traffic traffic = exchange(rank, send, recv, block);
    barrier_.arrive_and_wait();
    if (aborted_.load()) {
        throw Error(ErrorKind::Communication, "transport aborted by a failed peer");
    }
    return traffic;
}

void Transport::abandon(std::size_t rank) noexcept {
    aborted_.store(true);
    on_abandon(rank);
    barrier_.arrive_and_drop();
}

InProcessTransport::InProcessTransport(std::size_t endpoints)
    : Transport(endpoints),
      posted_send_(endpoints, nullptr),
      posted_(static_cast<std::ptrdiff_t>(endpoints)) {}

Transport::Traffic InProcessTransport::exchange(std::size_t rank, std::span<const std::byte> send,
                                                std::span<std::byte> recv, std::size_t block) {
    posted_send_[rank] = send.data();
    posted_.arrive_and_wait();
    Traffic traffic;
    for (std::size_t src = 0; src < endpoints(); ++src) {
        if (src == rank) continue;
        const std::byte* from = posted_send_[src];
        if (from == nullptr) continue;  // peer abandoned
        std::memcpy(recv.data() + src * block, from + rank * block, block);
        traffic.received += block;
        traffic.sent += block;
    }
    // Sends are pulled by the receivers; each peer pulls exactly one block from us.
    return traffic;
}

void InProcessTransport::on_abandon(std::size_t rank) noexcept {
    posted_send_[rank] = nullptr;
    posted_.arrive_and_drop();
}

LoopbackTransport::LoopbackTransport(std::size_t endpoints)
    : Transport(endpoints), sockets_(endpoints * endpoints, -1) {
    if (endpoints == 1) return;

    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) throw_errno("socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    socklen_t len = sizeof(addr);
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
        ::listen(listener, 4) < 0 ||
        ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
        const int saved = errno;
        ::close(listener);
        errno = saved;
        throw_errno("loopback listener");
    }

    auto configure = [](int fd) {
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
    };

    try {
        for (std::size_t i = 0; i < endpoints; ++i) {
            for (std::size_t j = i + 1; j < endpoints; ++j) {
                const int client = ::socket(AF_INET, SOCK_STREAM, 0);
                if (client < 0) throw_errno("socket");
                sockets_[i * endpoints + j] = client;
                // The kernel completes the handshake from the backlog, so a
                // blocking connect followed by accept works on one thread.
                if (::connect(client, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
                    throw_errno("connect");
                }
                const int server = ::accept(listener, nullptr, nullptr);
                if (server < 0) throw_errno("accept");
                sockets_[j * endpoints + i] = server;
                configure(client);
                configure(server);
            }
        }
    } catch (...) {
        ::close(listener);
        for (int fd : sockets_) {
            if (fd >= 0) ::close(fd);
        }
        throw;
    }
    ::close(listener);
}

LoopbackTransport::~LoopbackTransport() {
    for (int fd : sockets_) {
        if (fd >= 0) ::close(fd);
    }
}

Transport::Traffic LoopbackTransport::exchange(std::size_t rank, std::span<const std::byte> send,
                                               std::span<std::byte> recv, std::size_t block) {
    const std::size_t n = endpoints();
    Traffic traffic;
    if (n == 1 || block == 0) return traffic;

    struct Progress {
        std::size_t peer;
        int fd;
        std::size_t sent = 0;
        std::size_t received = 0;
    };
    std::vector<Progress> peers;
    for (std::size_t p = 0; p < n; ++p) {
        if (p != rank) peers.push_back({p, sockets_[rank * n + p]});
    }

    std::vector<pollfd> fds(peers.size());
    for (;;) {
        std::size_t active = 0;
        for (std::size_t i = 0; i < peers.size(); ++i) {
            short events = 0;
            if (peers[i].sent < block) events |= POLLOUT;
            if (peers[i].received < block) events |= POLLIN;
            fds[i] = {peers[i].fd, events, 0};
            if (events != 0) ++active;
        }
        if (active == 0) break;
        if (::poll(fds.data(), fds.size(), 10000) <= 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorKind::Communication, "loopback exchange timed out or failed");
        }
        for (std::size_t i = 0; i < peers.size(); ++i) {
            Progress& peer = peers[i];
            if ((fds[i].revents & POLLOUT) != 0 && peer.sent < block) {
                const std::byte* from = send.data() + peer.peer * block + peer.sent;
                const ssize_t k = ::send(peer.fd, from, block - peer.sent, MSG_NOSIGNAL);
                if (k < 0 && errno != EAGAIN && errno != EWOULDBLOCK) throw_errno("send");
                if (k > 0) peer.sent += static_cast<std::size_t>(k);
            }
            if ((fds[i].revents & (POLLIN | POLLHUP | POLLERR)) != 0 && peer.received < block) {
                std::byte* to = recv.data() + peer.peer * block + peer.received;
                const ssize_t k = ::recv(peer.fd, to, block - peer.received, 0);
                if (k == 0) {
                    throw Error(ErrorKind::Communication,
                                "peer " + std::to_string(peer.peer) + " closed the connection");
                }
                if (k < 0 && errno != EAGAIN && errno != EWOULDBLOCK) throw_errno("recv");
                if (k > 0) peer.received += static_cast<std::size_t>(k);
            }
        }
    }
    for (const Progress& peer : peers) {
        traffic.sent += peer.sent;
        traffic.received += peer.received;
    }
    return traffic;
}

void LoopbackTransport::on_abandon(std::size_t rank) noexcept {
    const std::size_t n = endpoints();
    for (std::size_t p = 0; p < n; ++p) {
        const int fd = sockets_[rank * n + p];
        if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    }
}

TransportKind parse_transport(std::string_view text) {
    if (text == "inproc") return TransportKind::InProcess;
    if (text == "loopback") return TransportKind::Loopback;
    throw Error(ErrorKind::Config, "unknown transport '" + std::string(text) + "'");
}

std::unique_ptr<Transport> make_transport(TransportKind kind, std::size_t endpoints) {
    if (kind == TransportKind::Loopback) return std::make_unique<LoopbackTransport>(endpoints);
    return std::make_unique<InProcessTransport>(endpoints);
}

}  // namespace interfere::stressor
