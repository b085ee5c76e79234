#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridfed/envelope.hpp"
#include "gridfed/federate.hpp"

namespace gridfed {

class Rti;

struct SocketAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// Parses "host:port"; throws UsageError.
  static SocketAddress parse(std::string_view text);
  std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// One duplex TCP stream carrying newline-delimited envelopes.
class FrameChannel {
 public:
  explicit FrameChannel(int fd);
  ~FrameChannel();
  FrameChannel(FrameChannel&& other) noexcept;
  FrameChannel& operator=(FrameChannel&& other) noexcept;
  FrameChannel(const FrameChannel&) = delete;
  FrameChannel& operator=(const FrameChannel&) = delete;

  static FrameChannel connect(const SocketAddress& addr, std::chrono::milliseconds timeout);

  /// Writes every byte of `frames` (one or more encoded envelopes).
  void send_bytes(std::string_view frames);
  void send(const FederateEnvelope& env) { send_bytes(encode_envelope(env)); }

  /// Blocks for the next frame. Throws FederateTimeout or TransportError.
  FederateEnvelope receive(std::chrono::milliseconds timeout);

  void close();
  bool is_open() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
  FrameSplitter splitter_;
};

class TcpListener {
 public:
  explicit TcpListener(const SocketAddress& addr);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  /// The bound port; useful when listening on port 0.
  std::uint16_t port() const { return port_; }
  FrameChannel accept(std::chrono::milliseconds timeout);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// RTI-side endpoint speaking the wire protocol to a remote federate.
class SocketEndpoint final : public FederateEndpoint {
 public:
  SocketEndpoint(FrameChannel channel, std::chrono::milliseconds timeout);

  void begin_slot(const Grant& grant, std::vector<Delivery> inbox) override;
  StepResult end_slot() override;
  void finish() override;

 private:
  FrameChannel channel_;
  std::chrono::milliseconds timeout_;
  TimeslotIndex slot_ = 0;
  std::string batch_;
};

/// Accepts one connection per expected federate name, answers each JOIN and
/// registers the federates with `rti` in the order of `expected`, so ids do
/// not depend on connection order.
std::vector<FederateId> accept_federates(Rti& rti, TcpListener& listener,
                                         std::span<const std::string> expected,
                                         std::chrono::milliseconds timeout);

/// Federate-side loop: joins the RTI under `name` and serves grants with
/// `federate` until the RTI ends the federation. Returns the assigned id.
FederateId run_federate_client(const SocketAddress& rti, const std::string& name,
                               Federate& federate, std::chrono::milliseconds timeout);

} // namespace gridfed
