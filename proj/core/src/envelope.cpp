#include "gridfed/envelope.hpp"

#include <array>
#include <nlohmann/json.hpp>

#include "gridfed/errors.hpp"

namespace gridfed {

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr std::array<std::pair<EnvelopeType, std::string_view>, 8> kTypeNames{{
    {EnvelopeType::Join, "JOIN"},
    {EnvelopeType::JoinAck, "JOIN_ACK"},
    {EnvelopeType::Grant, "GRANT"},
    {EnvelopeType::Publish, "PUBLISH"},
    {EnvelopeType::Deliver, "DELIVER"},
    {EnvelopeType::AckSlot, "ACK_SLOT"},
    {EnvelopeType::Done, "DONE"},
    {EnvelopeType::Error, "ERROR"},
}};

ojson message_to_json(const SimMessage& m) {
  ojson j;
  j["id"] = m.id;
  j["class"] = to_string(m.cls);
  j["src"] = m.src;
  j["dst"] = m.dst;
  j["payload_bytes"] = m.payload_bytes;
  j["kind"] = to_string(m.kind);
  j["created_at_it"] = m.created_at_it.ticks();
  if (m.delivered_at_it) j["delivered_at_it"] = m.delivered_at_it->ticks();
  if (m.sent_at_comm) j["sent_at_comm"] = m.sent_at_comm->ticks();
  if (m.delivered_at_comm) j["delivered_at_comm"] = m.delivered_at_comm->ticks();
  if (m.correlation_id) j["correlation_id"] = *m.correlation_id;
  if (m.poll_period) j["poll_period"] = m.poll_period->ticks();
  return j;
}

// Offsets for semantic errors point at the body; JSON syntax errors carry
// the parser's own offset.
struct Reader {
  std::size_t offset;

  [[noreturn]] void fail(const std::string& what) const { throw DecodeError(what, offset); }

  const json& field(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing field '") + key + "'");
    return *it;
  }

  std::int64_t int_field(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX))
        fail(std::string("'") + key + "' out of range");
      return static_cast<std::int64_t>(u);
    }
    if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t uint_field(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    fail(std::string("'") + key + "' must be a non-negative integer");
  }

  std::uint32_t u32_field(const json& obj, const char* key) const {
    const auto v = uint_field(obj, key);
    if (v > UINT32_MAX) fail(std::string("'") + key + "' out of range");
    return static_cast<std::uint32_t>(v);
  }

  std::string string_field(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }

  std::optional<SimTime> opt_time(const json& obj, const char* key) const {
    if (!obj.contains(key)) return std::nullopt;
    return SimTime(int_field(obj, key));
  }

  SimMessage message(const json& j) const {
    if (!j.is_object()) fail("'msg' must be an object");
    SimMessage m;
    m.id = uint_field(j, "id");
    const auto cls = message_class_from_string(string_field(j, "class"));
    if (!cls) fail("unknown message class");
    m.cls = *cls;
    m.src = u32_field(j, "src");
    m.dst = u32_field(j, "dst");
    m.payload_bytes = u32_field(j, "payload_bytes");
    if (m.payload_bytes == 0) fail("'payload_bytes' must be positive");
    const auto kind = message_kind_from_string(string_field(j, "kind"));
    if (!kind) fail("unknown message kind");
    m.kind = *kind;
    m.created_at_it = SimTime(int_field(j, "created_at_it"));
    m.delivered_at_it = opt_time(j, "delivered_at_it");
    m.sent_at_comm = opt_time(j, "sent_at_comm");
    m.delivered_at_comm = opt_time(j, "delivered_at_comm");
    if (j.contains("correlation_id")) m.correlation_id = uint_field(j, "correlation_id");
    m.poll_period = opt_time(j, "poll_period");
    return m;
  }
};

} // namespace

std::string_view to_string(EnvelopeType t) {
  for (const auto& [type, name] : kTypeNames) {
    if (type == t) return name;
  }
  return "?";
}

std::optional<EnvelopeType> envelope_type_from_string(std::string_view s) {
  for (const auto& [type, name] : kTypeNames) {
    if (name == s) return type;
  }
  return std::nullopt;
}

FederateEnvelope FederateEnvelope::join(std::string name) {
  return {EnvelopeType::Join, 0, JoinBody{std::move(name)}};
}
FederateEnvelope FederateEnvelope::join_ack(FederateId fid) {
  return {EnvelopeType::JoinAck, 0, JoinAckBody{fid}};
}
FederateEnvelope FederateEnvelope::grant(const Grant& g) {
  return {EnvelopeType::Grant, g.slot, GrantBody{g.end.ticks()}};
}
FederateEnvelope FederateEnvelope::publish(TimeslotIndex slot, const Publication& p) {
  return {EnvelopeType::Publish, slot, MessageBody{p.at, p.msg}};
}
FederateEnvelope FederateEnvelope::deliver(TimeslotIndex slot, const Delivery& d) {
  return {EnvelopeType::Deliver, slot, MessageBody{d.at, d.msg}};
}
FederateEnvelope FederateEnvelope::ack_slot(TimeslotIndex slot) {
  return {EnvelopeType::AckSlot, slot, EmptyBody{}};
}
FederateEnvelope FederateEnvelope::done(TimeslotIndex slot) {
  return {EnvelopeType::Done, slot, EmptyBody{}};
}
FederateEnvelope FederateEnvelope::error(TimeslotIndex slot, std::string code, std::string detail) {
  return {EnvelopeType::Error, slot, ErrorBody{std::move(code), std::move(detail)}};
}

std::string encode_envelope(const FederateEnvelope& env) {
  ojson body = ojson::object();
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, JoinBody>) {
          body["name"] = b.name;
        } else if constexpr (std::is_same_v<B, JoinAckBody>) {
          body["fid"] = b.fid;
        } else if constexpr (std::is_same_v<B, GrantBody>) {
          body["end_ticks"] = b.end_ticks;
        } else if constexpr (std::is_same_v<B, MessageBody>) {
          body["at"] = b.at.ticks();
          body["msg"] = message_to_json(b.msg);
        } else if constexpr (std::is_same_v<B, ErrorBody>) {
          body["code"] = b.code;
          body["detail"] = b.detail;
        }
      },
      env.body);

  ojson j;
  j["t"] = to_string(env.type);
  j["slot"] = env.slot;
  j["body"] = std::move(body);
  std::string out = j.dump();
  out.push_back('\n');
  return out;
}

FederateEnvelope decode_envelope(std::string_view frame) {
  if (frame.empty() || frame.back() != '\n') throw DecodeError("truncated frame", frame.size());
  const auto payload = frame.substr(0, frame.size() - 1);
  if (const auto nl = payload.find('\n'); nl != std::string_view::npos) {
    throw DecodeError("embedded newline", nl);
  }

  json j;
  try {
    j = json::parse(payload);
  } catch (const json::parse_error& e) {
    throw DecodeError(e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }

  Reader r{0};
  if (!j.is_object()) r.fail("frame must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "t" && it.key() != "slot" && it.key() != "body")
      r.fail("unexpected field '" + it.key() + "'");
  }
  const auto type = envelope_type_from_string(r.string_field(j, "t"));
  if (!type) r.fail("unknown envelope type");
  FederateEnvelope env;
  env.type = *type;
  env.slot = r.int_field(j, "slot");
  const auto& body = r.field(j, "body");
  if (!body.is_object()) r.fail("'body' must be an object");
  r.offset = payload.find("\"body\"");

  switch (env.type) {
    case EnvelopeType::Join:
      env.body = JoinBody{r.string_field(body, "name")};
      break;
    case EnvelopeType::JoinAck:
      env.body = JoinAckBody{r.u32_field(body, "fid")};
      break;
    case EnvelopeType::Grant:
      env.body = GrantBody{r.int_field(body, "end_ticks")};
      break;
    case EnvelopeType::Publish:
    case EnvelopeType::Deliver:
      env.body = MessageBody{SimTime(r.int_field(body, "at")), r.message(r.field(body, "msg"))};
      break;
    case EnvelopeType::AckSlot:
    case EnvelopeType::Done:
      env.body = EmptyBody{};
      break;
    case EnvelopeType::Error:
      env.body = ErrorBody{r.string_field(body, "code"), r.string_field(body, "detail")};
      break;
  }
  return env;
}

std::optional<std::string> FrameSplitter::next_frame() {
  const auto nl = buffer_.find('\n', consumed_);
  if (nl == std::string::npos) {
    if (consumed_ > 0 && consumed_ == buffer_.size()) {
      buffer_.clear();
      consumed_ = 0;
    }
    return std::nullopt;
  }
  std::string frame = buffer_.substr(consumed_, nl + 1 - consumed_);
  consumed_ = nl + 1;
  // Compact once the consumed prefix dominates the buffer.
  if (consumed_ > 4096 && consumed_ * 2 > buffer_.size()) {
    buffer_.erase(0, consumed_);
    consumed_ = 0;
  }
  return frame;
}

} // namespace gridfed
