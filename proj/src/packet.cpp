#include "gmcf/packet.hpp"

#include <string>

#include "gmcf/errors.hpp"

namespace gmcf {

std::string_view to_string(PacketType t) noexcept {
  switch (t) {
    case PacketType::ReqTime: return "REQTIME";
    case PacketType::RespTime: return "RESPTIME";
    case PacketType::ReqData: return "REQDATA";
    case PacketType::RespData: return "RESPDATA";
    case PacketType::Fin: return "FIN";
  }
  return "?";
}

void validate(const Packet& p) {
  if (p.source == p.destination) {
    throw ProtocolError("packet " + std::string(to_string(p.type)) +
                        ": source equals destination (" +
                        std::to_string(p.source) + ")");
  }
  if (p.timestamp < 0) {
    throw ProtocolError("packet " + std::string(to_string(p.type)) +
                        ": negative timestamp");
  }
  const bool want_payload = p.type == PacketType::RespData;
  if (p.payload.has_value() != want_payload) {
    throw ProtocolError(want_payload ? "RESPDATA packet without payload"
                                     : "payload on a non-RESPDATA packet");
  }
  if (p.payload) p.payload->validate();
}

}  // namespace gmcf
