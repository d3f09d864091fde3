#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "gmcf/wind_profile.hpp"

namespace gmcf {

using ModelId = std::int32_t;

enum class PacketType : std::uint8_t {
  ReqTime = 0,
  RespTime = 1,
  ReqData = 2,
  RespData = 3,
  Fin = 4,
};

inline constexpr std::size_t kPacketTypeCount = 5;
inline constexpr std::array<PacketType, kPacketTypeCount> kAllPacketTypes = {
    PacketType::ReqTime, PacketType::RespTime, PacketType::ReqData,
    PacketType::RespData, PacketType::Fin};

constexpr std::size_t type_index(PacketType t) noexcept {
  return static_cast<std::size_t>(t);
}

constexpr bool is_request(PacketType t) noexcept {
  return t == PacketType::ReqTime || t == PacketType::ReqData;
}
constexpr bool is_response(PacketType t) noexcept {
  return t == PacketType::RespTime || t == PacketType::RespData;
}
constexpr bool is_control(PacketType t) noexcept { return t == PacketType::Fin; }

std::string_view to_string(PacketType t) noexcept;

struct Packet {
  PacketType type = PacketType::ReqTime;
  ModelId source = 0;
  ModelId destination = 0;
  Microsteps timestamp = 0;
  // Variable tag for REQDATA / RESPDATA, 0 otherwise.
  std::int32_t data_id = 0;
  // Present exactly for RESPDATA.
  std::optional<WindProfile> payload;

  bool operator==(const Packet&) const = default;
};

// Checks the structural packet invariants; throws ProtocolError.
void validate(const Packet& p);

}  // namespace gmcf
