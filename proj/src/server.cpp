#include "copguide/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "text_util.hpp"

namespace copguide {

using detail::split;
using detail::trim;

namespace {

constexpr int kMaxConsecutiveBadLines = 3;

bool send_all(int fd, const void* data, std::size_t len) {
  const char* p = static_cast<const char*>(data);
  while (len > 0) {
    const ssize_t n = ::send(fd, p, len, MSG_NOSIGNAL);
    if (n <= 0) return false;
    p += n;
    len -= static_cast<std::size_t>(n);
  }
  return true;
}

// "host:port" or ":port"; empty host binds all interfaces.
std::pair<std::string, int> parse_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw InputError("listen address must be host:port");
  const std::string host = listen.substr(0, colon);
  const std::string port_str = listen.substr(colon + 1);
  int port = 0;
  try {
    port = std::stoi(port_str);
  } catch (const std::exception&) {
    throw InputError("bad port '" + port_str + "'");
  }
  if (port < 0 || port > 65535) throw InputError("bad port '" + port_str + "'");
  return {host.empty() ? "0.0.0.0" : host, port};
}

}  // namespace

LiveServer::LiveServer(const std::string& listen, std::shared_ptr<const ReferencePath> path,
                       FeedbackConfig config)
    : path_(std::move(path)), config_(config) {
  config_.validate();
  if (!path_) throw InputError("server needs a reference path");
  const auto [host, port] = parse_listen(listen);

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw InputError("socket: " + std::string(std::strerror(errno)));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw InputError("bad listen host '" + host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string msg = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw InputError("cannot bind " + listen + ": " + msg);
  }
  if (::listen(listen_fd_, 4) != 0) {
    const std::string msg = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw InputError("listen failed: " + msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

LiveServer::~LiveServer() {
  stop();
}

void LiveServer::stop() {
  stopping_ = true;
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

void LiveServer::run() {
  while (!stopping_) {
    const int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0) {
      if (stopping_ || errno == EBADF || errno == EINVAL) return;
      if (errno == EINTR) continue;
      throw ProtocolError("accept: " + std::string(std::strerror(errno)));
    }
    handle_client(client);
    ::close(client);
  }
}

void LiveServer::handle_client(int fd) {
  FeedbackEngine engine(config_, path_);
  std::string buffer;
  char chunk[4096];
  int lineno = 0;
  int consecutive_bad = 0;

  while (!stopping_) {
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) return;  // client closed or error
    buffer.append(chunk, static_cast<std::size_t>(n));

    std::size_t start = 0;
    for (std::size_t nl = buffer.find('\n', start); nl != std::string::npos;
         nl = buffer.find('\n', start)) {
      const auto line = trim(std::string_view(buffer).substr(start, nl - start));
      start = nl + 1;
      ++lineno;

      const char* err_kind = nullptr;
      CoPSample sample;
      sample.valid = true;
      auto fields = split(line, ',');
      if (line.empty() || fields.size() != 3) {
        err_kind = "parse";
      } else {
        try {
          sample.t = detail::parse_number<double>(fields[0], "stream", lineno);
          sample.x = detail::parse_number<double>(fields[1], "stream", lineno);
          sample.y = detail::parse_number<double>(fields[2], "stream", lineno);
        } catch (const InputError&) {
          err_kind = "parse";
        }
      }
      if (!err_kind) {
        try {
          for (const auto& cmd : engine.tick(sample)) {
            const auto frame = encode_command(cmd);
            if (!send_all(fd, frame.data(), frame.size())) return;
          }
          consecutive_bad = 0;
        } catch (const InputError&) {
          err_kind = "order";  // non-monotonic timestamp
        }
      }
      if (err_kind) {
        const std::string reply =
            "ERR " + std::string(err_kind) + " " + std::to_string(lineno) + "\n";
        if (!send_all(fd, reply.data(), reply.size())) return;
        if (++consecutive_bad >= kMaxConsecutiveBadLines) return;
      }
    }
    buffer.erase(0, start);
  }
}

}  // namespace copguide
