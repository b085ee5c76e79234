#include "gridfed/socket_transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <map>
#include <thread>

#include "gridfed/errors.hpp"
#include "gridfed/rti.hpp"

namespace gridfed {

namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

sockaddr_in resolve(const SocketAddress& addr) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(addr.port);
  if (addr.host.empty() || addr.host == "0.0.0.0" || addr.host == "*") {
    sa.sin_addr.s_addr = htonl(INADDR_ANY);
    return sa;
  }
  if (inet_pton(AF_INET, addr.host.c_str(), &sa.sin_addr) == 1) return sa;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(addr.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw TransportError("cannot resolve host '" + addr.host + "'");
  }
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return sa;
}

/// Waits until `fd` is readable; false on timeout.
bool wait_readable(int fd, std::chrono::milliseconds timeout) {
  pollfd p{fd, POLLIN, 0};
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    const int ms = static_cast<int>(std::max<std::int64_t>(0, left.count()));
    const int rc = ::poll(&p, 1, ms);
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) throw TransportError(errno_text("poll"));
  }
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

} // namespace

SocketAddress SocketAddress::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos)
    throw UsageError("address must be host:port, got '" + std::string(text) + "'");
  SocketAddress out;
  out.host = std::string(text.substr(0, colon));
  const auto port = text.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
    throw UsageError("bad port in '" + std::string(text) + "'");
  }
  out.port = static_cast<std::uint16_t>(value);
  return out;
}

// FrameChannel

FrameChannel::FrameChannel(int fd) : fd_(fd) {}

FrameChannel::~FrameChannel() {
  close();
}

FrameChannel::FrameChannel(FrameChannel&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), splitter_(std::move(other.splitter_)) {}

FrameChannel& FrameChannel::operator=(FrameChannel&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    splitter_ = std::move(other.splitter_);
  }
  return *this;
}

FrameChannel FrameChannel::connect(const SocketAddress& addr, std::chrono::milliseconds timeout) {
  const auto sa = resolve(addr);
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError(errno_text("socket"));
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa)) == 0) {
      set_nodelay(fd);
      return FrameChannel(fd);
    }
    const int err = errno;
    ::close(fd);
    // The RTI may not be listening yet; retry until the deadline.
    if ((err != ECONNREFUSED && err != EINTR) || Clock::now() >= deadline) {
      errno = err;
      throw TransportError(errno_text(("connect " + addr.to_string()).c_str()));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void FrameChannel::send_bytes(std::string_view frames) {
  if (fd_ < 0) throw TransportError("send on closed channel");
  while (!frames.empty()) {
    const auto n = ::send(fd_, frames.data(), frames.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("send"));
    }
    frames.remove_prefix(static_cast<std::size_t>(n));
  }
}

FederateEnvelope FrameChannel::receive(std::chrono::milliseconds timeout) {
  if (fd_ < 0) throw TransportError("receive on closed channel");
  std::array<char, 64 * 1024> buf{};
  for (;;) {
    if (auto frame = splitter_.next_frame()) return decode_envelope(*frame);
    if (!wait_readable(fd_, timeout)) {
      throw FederateTimeout("no frame within " + std::to_string(timeout.count()) + " ms");
    }
    const auto n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("recv"));
    }
    if (n == 0) throw TransportError("peer closed the connection");
    splitter_.feed(std::string_view(buf.data(), static_cast<std::size_t>(n)));
  }
}

void FrameChannel::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

// TcpListener

TcpListener::TcpListener(const SocketAddress& addr) {
  const auto sa = resolve(addr);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError(errno_text("socket"));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa)) != 0) {
    const auto msg = errno_text(("bind " + addr.to_string()).c_str());
    ::close(fd_);
    throw TransportError(msg);
  }
  if (::listen(fd_, 16) != 0) {
    const auto msg = errno_text("listen");
    ::close(fd_);
    throw TransportError(msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

FrameChannel TcpListener::accept(std::chrono::milliseconds timeout) {
  if (!wait_readable(fd_, timeout)) throw FederateTimeout("no federate connected in time");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw TransportError(errno_text("accept"));
  set_nodelay(fd);
  return FrameChannel(fd);
}

// SocketEndpoint

SocketEndpoint::SocketEndpoint(FrameChannel channel, std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), timeout_(timeout) {}

void SocketEndpoint::begin_slot(const Grant& grant, std::vector<Delivery> inbox) {
  slot_ = grant.slot;
  batch_.clear();
  for (const auto& d : inbox) batch_ += encode_envelope(FederateEnvelope::deliver(grant.slot, d));
  batch_ += encode_envelope(FederateEnvelope::grant(grant));
  channel_.send_bytes(batch_);
}

StepResult SocketEndpoint::end_slot() {
  StepResult result;
  for (;;) {
    auto env = channel_.receive(timeout_);
    if (env.slot != slot_ && env.type != EnvelopeType::Error) {
      throw ProtocolViolation("federate answered slot " + std::to_string(env.slot) +
                              " during slot " + std::to_string(slot_));
    }
    switch (env.type) {
      case EnvelopeType::Publish: {
        auto& body = std::get<MessageBody>(env.body);
        result.outbox.push_back(Publication{std::move(body.msg), body.at});
        break;
      }
      case EnvelopeType::AckSlot:
        return result;
      case EnvelopeType::Done:
        result.done = true;
        return result;
      case EnvelopeType::Error: {
        const auto& body = std::get<ErrorBody>(env.body);
        throw FederateFailure(body.code + ": " + body.detail);
      }
      default:
        throw ProtocolViolation("unexpected " + std::string(to_string(env.type)) +
                                " from federate");
    }
  }
}

void SocketEndpoint::finish() {
  if (!channel_.is_open()) return;
  try {
    channel_.send(FederateEnvelope::done(slot_));
  } catch (const TransportError&) {
    // Federate already gone.
  }
  channel_.close();
}

// Registration

std::vector<FederateId> accept_federates(Rti& rti, TcpListener& listener,
                                         std::span<const std::string> expected,
                                         std::chrono::milliseconds timeout) {
  std::map<std::string, FrameChannel> joined;
  while (joined.size() < expected.size()) {
    FrameChannel ch = listener.accept(timeout);
    auto env = ch.receive(timeout);
    if (env.type != EnvelopeType::Join) {
      ch.send(FederateEnvelope::error(0, "protocol", "expected JOIN"));
      continue;
    }
    const auto name = std::get<JoinBody>(env.body).name;
    if (std::find(expected.begin(), expected.end(), name) == expected.end()) {
      ch.send(FederateEnvelope::error(0, "unknown_federate", name));
      continue;
    }
    if (joined.contains(name)) {
      ch.send(FederateEnvelope::error(0, "duplicate_name", name));
      continue;
    }
    joined.emplace(name, std::move(ch));
  }

  std::vector<FederateId> ids;
  for (const auto& name : expected) {
    FrameChannel ch = std::move(joined.at(name));
    // Ids are handed out sequentially, so the next one is known up front.
    const auto fid = static_cast<FederateId>(rti.federate_count());
    ch.send(FederateEnvelope::join_ack(fid));
    const auto registered =
        rti.register_federate(name, std::make_unique<SocketEndpoint>(std::move(ch), timeout));
    if (registered != fid) throw ProtocolViolation("federate id mismatch during registration");
    ids.push_back(fid);
  }
  return ids;
}

FederateId run_federate_client(const SocketAddress& rti, const std::string& name,
                               Federate& federate, std::chrono::milliseconds timeout) {
  FrameChannel ch = FrameChannel::connect(rti, timeout);
  ch.send(FederateEnvelope::join(name));
  auto ack = ch.receive(timeout);
  if (ack.type == EnvelopeType::Error) {
    const auto& b = std::get<ErrorBody>(ack.body);
    throw FederateFailure("join rejected: " + b.code + " " + b.detail);
  }
  if (ack.type != EnvelopeType::JoinAck) throw ProtocolViolation("expected JOIN_ACK");
  const FederateId fid = std::get<JoinAckBody>(ack.body).fid;

  std::vector<Delivery> inbox;
  std::string batch;
  bool done = false;
  for (;;) {
    auto env = ch.receive(timeout);
    switch (env.type) {
      case EnvelopeType::Deliver: {
        auto& body = std::get<MessageBody>(env.body);
        inbox.push_back(Delivery{std::move(body.msg), body.at});
        break;
      }
      case EnvelopeType::Grant: {
        if (done) throw ProtocolViolation("GRANT after DONE");
        const Grant grant{env.slot, SimTime(std::get<GrantBody>(env.body).end_ticks)};
        StepResult result;
        try {
          result = federate.step(grant, inbox);
        } catch (const std::exception& e) {
          ch.send(FederateEnvelope::error(grant.slot, "federate_failure", e.what()));
          throw;
        }
        inbox.clear();
        batch.clear();
        for (const auto& p : result.outbox)
          batch += encode_envelope(FederateEnvelope::publish(grant.slot, p));
        batch += encode_envelope(result.done ? FederateEnvelope::done(grant.slot)
                                             : FederateEnvelope::ack_slot(grant.slot));
        ch.send_bytes(batch);
        done = result.done;
        break;
      }
      case EnvelopeType::Done:
        return fid;
      case EnvelopeType::Error: {
        const auto& b = std::get<ErrorBody>(env.body);
        throw FederateFailure("RTI error: " + b.code + " " + b.detail);
      }
      default:
        throw ProtocolViolation("unexpected " + std::string(to_string(env.type)) + " from RTI");
    }
  }
}

} // namespace gridfed
