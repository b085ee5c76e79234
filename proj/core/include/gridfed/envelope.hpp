#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "gridfed/federate.hpp"
#include "gridfed/message.hpp"
#include "gridfed/time.hpp"

namespace gridfed {

enum class EnvelopeType { Join, JoinAck, Grant, Publish, Deliver, AckSlot, Done, Error };

std::string_view to_string(EnvelopeType t);
std::optional<EnvelopeType> envelope_type_from_string(std::string_view s);

struct EmptyBody {
  bool operator==(const EmptyBody&) const = default;
};
struct JoinBody {
  std::string name;
  bool operator==(const JoinBody&) const = default;
};
struct JoinAckBody {
  FederateId fid = 0;
  bool operator==(const JoinAckBody&) const = default;
};
struct GrantBody {
  Tick end_ticks = 0;
  bool operator==(const GrantBody&) const = default;
};
/// PUBLISH and DELIVER payload.
struct MessageBody {
  SimTime at;
  SimMessage msg;
  bool operator==(const MessageBody&) const = default;
};
struct ErrorBody {
  std::string code;
  std::string detail;
  bool operator==(const ErrorBody&) const = default;
};

using EnvelopeBody =
    std::variant<EmptyBody, JoinBody, JoinAckBody, GrantBody, MessageBody, ErrorBody>;

/// One wire frame between the RTI and a federate.
struct FederateEnvelope {
  EnvelopeType type = EnvelopeType::AckSlot;
  TimeslotIndex slot = 0;
  EnvelopeBody body;

  bool operator==(const FederateEnvelope&) const = default;

  static FederateEnvelope join(std::string name);
  static FederateEnvelope join_ack(FederateId fid);
  static FederateEnvelope grant(const Grant& g);
  static FederateEnvelope publish(TimeslotIndex slot, const Publication& p);
  static FederateEnvelope deliver(TimeslotIndex slot, const Delivery& d);
  static FederateEnvelope ack_slot(TimeslotIndex slot);
  static FederateEnvelope done(TimeslotIndex slot);
  static FederateEnvelope error(TimeslotIndex slot, std::string code, std::string detail);
};

/// Encodes one frame: a single-line JSON object {"t":...,"slot":...,"body":{...}}
/// followed by '\n'. All numbers are integers; times are ticks.
std::string encode_envelope(const FederateEnvelope& env);

/// Decodes exactly one frame including its trailing '\n'. Throws DecodeError
/// carrying the byte offset of the first problem.
FederateEnvelope decode_envelope(std::string_view frame);

/// Splits an arbitrary byte stream into newline-terminated frames.
class FrameSplitter {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  /// Next complete frame (with its '\n'), if one is buffered.
  std::optional<std::string> next_frame();
  std::size_t buffered() const { return buffer_.size() - consumed_; }

 private:
  std::string buffer_;
  std::size_t consumed_ = 0;
};

} // namespace gridfed
