#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latentwire/errors.hpp"
#include "latentwire/net/wire.hpp"

namespace latentwire::net {

// Connection refused, reset or closed by the peer.
class NetworkError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "network"; }
};

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

// "host:port"; the port may be 0 for listeners.
Endpoint parse_endpoint(const std::string& text);

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(other.release()) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close(); }

    bool valid() const noexcept { return fd_ >= 0; }
    int fd() const noexcept { return fd_; }
    int release() noexcept;
    void close() noexcept;
    void shutdown() noexcept;

    void send_all(std::span<const std::uint8_t> bytes);
    // false on timeout before any byte arrived; throws NetworkError on EOF.
    bool recv_exact(std::span<std::uint8_t> out, std::chrono::milliseconds timeout);

private:
    int fd_ = -1;
};

Socket connect_tcp(const Endpoint& ep, std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));

class Listener {
public:
    explicit Listener(const Endpoint& ep);
    std::uint16_t port() const noexcept { return port_; }
    // Empty socket on timeout.
    Socket accept(std::chrono::milliseconds timeout);
    void close() noexcept { sock_.close(); }

private:
    Socket sock_;
    std::uint16_t port_ = 0;
};

void send_frame(Socket& s, MsgType type, std::span<const std::uint8_t> payload);
// nullopt when no frame starts within `idle`. A frame that has started must
// complete within `stall` per read or counts as truncated.
std::optional<Frame> read_frame(Socket& s, std::chrono::milliseconds idle, std::chrono::milliseconds stall);
inline std::optional<Frame> read_frame(Socket& s, std::chrono::milliseconds timeout) { return read_frame(s, timeout, timeout); }

}  // namespace latentwire::net
