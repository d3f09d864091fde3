#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "gmcf/packet.hpp"
#include "gmcf/tile.hpp"
#include "gmcf/wind_profile.hpp"

namespace gmcf {

enum class SyncStatus { Proceed, PeerFinished };

/// The last two profiles received from a producer.
class WindProfileSeries {
 public:
  // Shifts prev <- next, next <- profile. Timestamps must increase.
  void push(WindProfile profile);

  const std::optional<WindProfile>& prev() const noexcept { return prev_; }
  const std::optional<WindProfile>& next() const noexcept { return next_; }
  int count_received() const noexcept { return count_; }
  bool can_interpolate() const noexcept { return count_ >= 2; }

 private:
  std::optional<WindProfile> prev_;
  std::optional<WindProfile> next_;
  int count_ = 0;
};

/// Linear-in-time interpolation between series.prev() and series.next().
/// Throws GuardError with fewer than two profiles and RangeError when t lies
/// outside [prev.t, next.t]. The endpoints are returned bit-for-bit.
WindProfile interpolate_profile(const WindProfileSeries& series, Microsteps t);

/// Per-model coupling state and the Init / Sync / Pre / Post / Finished
/// calls built on top of the tile's packet API.
///
/// Model time is current_step() * dt. Sync, Pre and Post only generate
/// traffic at coupled boundaries, i.e. when model time is a multiple of the
/// coupled interval.
class ModelCoupling {
 public:
  using ProfileProvider = std::function<WindProfile()>;

  static ModelCoupling init(Tile& tile, ModelId model_id,
                            std::vector<ModelId> peers,
                            Microsteps dt_microsteps,
                            Microsteps coupled_interval_microsteps);

  /// Time synchronization with every unfinished peer. Off-boundary steps
  /// return Proceed without traffic. While waiting for RESPTIME the model
  /// answers peers' REQTIME with its own time. Returns PeerFinished when any
  /// peer has finished (a FIN seen now or earlier); the remaining peers are
  /// still synchronized. A RESPTIME carrying a different time is a
  /// ProtocolError.
  SyncStatus sync();

  /// Consumer side: requests `data_id` from the producer and blocks for the
  /// reply, which is pushed into series(). std::nullopt means the producer
  /// finished instead of answering. With a single peer the producer may be
  /// omitted.
  std::optional<WindProfile> pre_exchange(std::int32_t data_id,
                                          std::optional<ModelId> producer = {});

  /// Producer side: answers every REQDATA a peer issues for the current
  /// interval, calling `provider` once per request. A peer's request window
  /// closes with its next REQTIME (left pending for the following sync) or
  /// its FIN. Returns the number of RESPDATA packets sent.
  int post_exchange(const ProfileProvider& provider);

  /// Broadcasts FIN once, then waits until every peer's FIN has been seen.
  /// Requests arriving meanwhile are not answered.
  void finished();

  void advance() noexcept { ++current_step_; }

  bool at_coupled_boundary() const noexcept {
    return model_time() % coupled_interval_ == 0;
  }

  ModelId model_id() const noexcept { return model_id_; }
  const std::vector<ModelId>& peers() const noexcept { return peers_; }
  const std::set<ModelId>& peers_finished() const noexcept {
    return peers_finished_;
  }
  Microsteps dt_microsteps() const noexcept { return dt_; }
  Microsteps coupled_interval_microsteps() const noexcept {
    return coupled_interval_;
  }
  std::int64_t current_step() const noexcept { return current_step_; }
  Microsteps model_time() const noexcept { return current_step_ * dt_; }
  const WindProfileSeries& series() const noexcept { return series_; }
  bool has_finished() const noexcept { return fin_sent_; }

  std::uint64_t packets_sent() const noexcept { return packets_sent_; }
  std::uint64_t packets_received() const noexcept {
    return tile_->consumed().size();
  }
  std::uint64_t profiles_served() const noexcept { return profiles_served_; }

 private:
  ModelCoupling(Tile& tile, ModelId model_id, std::vector<ModelId> peers,
                Microsteps dt, Microsteps interval)
      : tile_(&tile),
        model_id_(model_id),
        peers_(std::move(peers)),
        dt_(dt),
        coupled_interval_(interval) {}

  std::vector<ModelId> unfinished_peers() const;
  void send(PacketType type, ModelId to, std::int32_t data_id = 0,
            std::optional<WindProfile> payload = std::nullopt);
  void answer_time_request(const Packet& req);

  Tile* tile_;
  ModelId model_id_;
  std::vector<ModelId> peers_;
  Microsteps dt_;
  Microsteps coupled_interval_;
  std::int64_t current_step_ = 0;
  std::set<ModelId> peers_finished_;
  WindProfileSeries series_;
  bool fin_sent_ = false;
  std::uint64_t packets_sent_ = 0;
  std::uint64_t profiles_served_ = 0;
};

}  // namespace gmcf
