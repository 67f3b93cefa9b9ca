#include "latentwire/net/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace latentwire::net {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

bool wait_fd(int fd, short events, std::chrono::milliseconds timeout) {
    pollfd p{fd, events, 0};
    for (;;) {
        int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
        if (rc >= 0) return rc > 0;
        if (errno != EINTR) throw NetworkError(errno_text("poll"));
    }
}

addrinfo* resolve(const Endpoint& ep, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(ep.port);
    const char* host = ep.host.empty() ? nullptr : ep.host.c_str();
    if (int rc = ::getaddrinfo(host, port.c_str(), &hints, &res); rc != 0) {
        throw NetworkError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
    }
    return res;
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) throw ConfigError("address", "expected host:port, got '" + text + "'");
    Endpoint ep;
    ep.host = text.substr(0, colon);
    try {
        std::size_t used = 0;
        const auto port = std::stoul(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1 || port > 65535) throw std::out_of_range("port");
        ep.port = static_cast<std::uint16_t>(port);
    } catch (const std::exception&) {
        throw ConfigError("address", "invalid port in '" + text + "'");
    }
    return ep;
}

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.release();
    }
    return *this;
}

int Socket::release() noexcept {
    int fd = fd_;
    fd_ = -1;
    return fd;
}

void Socket::close() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void Socket::shutdown() noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::send_all(std::span<const std::uint8_t> bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw NetworkError(errno_text("send"));
        }
        sent += static_cast<std::size_t>(n);
    }
}

bool Socket::recv_exact(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) {
    std::size_t got = 0;
    while (got < out.size()) {
        if (!wait_fd(fd_, POLLIN, timeout)) {
            if (got == 0) return false;
            throw ProtocolError(static_cast<std::uint8_t>(RejectCode::malformed), "frame truncated: peer stalled mid-frame");
        }
        ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
        if (n == 0) {
            if (got == 0) throw NetworkError("connection closed by peer");
            throw ProtocolError(static_cast<std::uint8_t>(RejectCode::malformed), "frame truncated: connection closed");
        }
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            throw NetworkError(errno_text("recv"));
        }
        got += static_cast<std::size_t>(n);
    }
    return true;
}

Socket connect_tcp(const Endpoint& ep, std::chrono::milliseconds timeout) {
    addrinfo* res = resolve(ep, false);
    Socket s(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    if (!s.valid()) {
        ::freeaddrinfo(res);
        throw NetworkError(errno_text("socket"));
    }
    const int flags = ::fcntl(s.fd(), F_GETFL, 0);
    ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(s.fd(), res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc < 0 && errno != EINPROGRESS) throw NetworkError(errno_text("connect"));
    if (rc < 0) {
        if (!wait_fd(s.fd(), POLLOUT, timeout)) throw NetworkError("connect: timed out");
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0) {
            errno = err;
            throw NetworkError(errno_text("connect"));
        }
    }
    ::fcntl(s.fd(), F_SETFL, flags);
    int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return s;
}

Listener::Listener(const Endpoint& ep) {
    addrinfo* res = resolve(ep, true);
    sock_ = Socket(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    if (!sock_.valid()) {
        ::freeaddrinfo(res);
        throw NetworkError(errno_text("socket"));
    }
    int one = 1;
    ::setsockopt(sock_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    int rc = ::bind(sock_.fd(), res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc < 0) throw NetworkError(errno_text("bind"));
    if (::listen(sock_.fd(), 64) < 0) throw NetworkError(errno_text("listen"));
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    ::getsockname(sock_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Socket Listener::accept(std::chrono::milliseconds timeout) {
    if (!sock_.valid() || !wait_fd(sock_.fd(), POLLIN, timeout)) return {};
    int fd = ::accept(sock_.fd(), nullptr, nullptr);
    if (fd < 0) return {};
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return Socket(fd);
}

namespace {

// The rest of a frame whose first byte has arrived.
void finish_read(Socket& s, std::span<std::uint8_t> out, std::chrono::milliseconds stall) {
    bool complete = false;
    try {
        complete = s.recv_exact(out, stall);
    } catch (const NetworkError&) {
    }
    if (!complete) throw ProtocolError(static_cast<std::uint8_t>(RejectCode::malformed), "frame truncated");
}

}  // namespace

void send_frame(Socket& s, MsgType type, std::span<const std::uint8_t> payload) {
    s.send_all(encode_frame(type, payload));
}

std::optional<Frame> read_frame(Socket& s, std::chrono::milliseconds idle, std::chrono::milliseconds stall) {
    std::array<std::uint8_t, kFrameHeaderBytes> header{};
    if (!s.recv_exact(std::span<std::uint8_t>(header).first(1), idle)) return std::nullopt;
    finish_read(s, std::span<std::uint8_t>(header).subspan(1), stall);
    Frame f;
    f.header = decode_frame_header(header);
    f.payload.resize(f.header.payload_len);
    if (!f.payload.empty()) finish_read(s, f.payload, stall);
    return f;
}

}  // namespace latentwire::net
