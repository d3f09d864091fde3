#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "gmcf/packet.hpp"

namespace gmcf {

class Runtime;

/// A model's communication endpoint: the main RX queue plus one pending
/// queue per packet type.
///
/// Any worker may deliver() into the RX queue. Every other mutating call is
/// reserved for the worker running the owning model. Packets handed back to
/// the model are appended to consumed(), which is the model-visible packet
/// sequence used by the determinism checks.
class Tile {
 public:
  Tile(ModelId id, Runtime& runtime);

  Tile(const Tile&) = delete;
  Tile& operator=(const Tile&) = delete;

  ModelId model_id() const noexcept { return id_; }
  Runtime& runtime() noexcept { return *runtime_; }

  // Routes through the runtime. The packet's source must be this tile.
  void send(Packet p);

  /// Blocks until one packet of `type` has been received from every model in
  /// `from`. A FIN from a listed model fills that model's slot instead.
  /// Pending queues are searched before the RX queue; anything else read
  /// while waiting is parked in its pending queue.
  std::vector<Packet> wait_for(PacketType type, std::span<const ModelId> from);

  /// Returns the next packet whose type is in `types` and whose source is in
  /// `from`, pending queues first (in the order of `types`).
  Packet wait_any(std::span<const PacketType> types,
                  std::span<const ModelId> from);

  // Non-blocking; never touches the RX queue.
  std::optional<Packet> shift_pending(PacketType type);
  std::optional<Packet> shift_pending_from(PacketType type, ModelId source);
  bool has_pending(PacketType type, ModelId source) const;

  /// Moves RX packets into the pending queues until a pending packet with a
  /// type in `types` from a model in `from` exists. Nothing is consumed.
  void await_pending(std::span<const PacketType> types,
                     std::span<const ModelId> from);

  // Moves whatever is currently in the RX queue to the pending queues.
  void drain_rx_to_pending();

  // Thread-safe enqueue on the RX queue.
  void deliver(Packet p);

  std::size_t rx_size() const;
  std::vector<Packet> rx_snapshot() const;
  std::size_t pending_size(PacketType type) const noexcept {
    return pending_[type_index(type)].size();
  }
  std::size_t pending_total() const noexcept;
  std::uint64_t delivered_count() const;
  const std::vector<Packet>& consumed() const noexcept { return consumed_; }

  void set_receive_timeout(std::optional<std::chrono::milliseconds> t) {
    timeout_ = t;
  }
  // Sequential mode: called instead of waiting on the RX condition variable.
  void set_yield(std::function<void()> yield) { yield_ = std::move(yield); }

 private:
  Packet pop_rx_blocking();
  std::optional<Packet> take_pending(PacketType type, ModelId source);
  Packet hand_to_model(Packet p);
  void park(Packet p);

  ModelId id_;
  Runtime* runtime_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Packet> rx_;
  std::uint64_t delivered_ = 0;

  std::array<std::deque<Packet>, kPacketTypeCount> pending_;
  std::vector<Packet> consumed_;

  std::optional<std::chrono::milliseconds> timeout_;
  std::function<void()> yield_;
};

}  // namespace gmcf
