#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include "gridmon/common/bytes.hpp"
#include "gridmon/common/unique_fd.hpp"

namespace gridmon::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

// "host:port"; throws std::invalid_argument.
Endpoint parse_endpoint(std::string_view text);

// Throws std::system_error.
UniqueFd tcp_listen(const Endpoint& ep, int backlog = 128);
std::uint16_t local_port(int fd);
UniqueFd tcp_connect(const Endpoint& ep, std::chrono::milliseconds timeout);

// False if the peer went away.
bool send_all(int fd, ByteView data);

enum class RecvStatus { kData, kTimeout, kClosed };

// Waits up to `timeout` and appends whatever is available to `buf`.
RecvStatus recv_some(int fd, Bytes& buf, std::chrono::milliseconds timeout);

}  // namespace gridmon::net
