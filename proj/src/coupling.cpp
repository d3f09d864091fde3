#include "gmcf/coupling.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "gmcf/errors.hpp"

namespace gmcf {

void WindProfileSeries::push(WindProfile profile) {
  profile.validate();
  if (next_) {
    if (profile.t <= next_->t) {
      throw ProtocolError("wind profile series: timestamp " +
                          std::to_string(profile.t) +
                          " does not follow " + std::to_string(next_->t));
    }
    if (profile.levels() != next_->levels()) {
      throw ShapeError("wind profile series: level count changed");
    }
  }
  prev_ = std::move(next_);
  next_ = std::move(profile);
  ++count_;
}

WindProfile interpolate_profile(const WindProfileSeries& series, Microsteps t) {
  if (!series.can_interpolate()) {
    throw GuardError("interpolate_profile: needs two received profiles, have " +
                     std::to_string(series.count_received()));
  }
  const WindProfile& a = *series.prev();
  const WindProfile& b = *series.next();
  if (t < a.t || t > b.t) {
    throw RangeError("interpolate_profile: t=" + std::to_string(t) +
                     " outside [" + std::to_string(a.t) + ", " +
                     std::to_string(b.t) + "]");
  }
  if (t == a.t) return a;
  if (t == b.t) return b;

  const double alpha =
      static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
  auto lerp = [alpha](const std::vector<float>& x0,
                      const std::vector<float>& x1) {
    std::vector<float> out(x0.size());
    for (std::size_t k = 0; k < x0.size(); ++k) {
      const double lo = x0[k];
      out[k] = static_cast<float>(lo + alpha * (static_cast<double>(x1[k]) - lo));
    }
    return out;
  };
  return WindProfile{lerp(a.u, b.u), lerp(a.v, b.v), lerp(a.w, b.w), t};
}

ModelCoupling ModelCoupling::init(Tile& tile, ModelId model_id,
                                  std::vector<ModelId> peers,
                                  Microsteps dt_microsteps,
                                  Microsteps coupled_interval_microsteps) {
  if (dt_microsteps < 1 || coupled_interval_microsteps < 1 ||
      coupled_interval_microsteps % dt_microsteps != 0) {
    throw ConfigError("coupling init: interval " +
                      std::to_string(coupled_interval_microsteps) +
                      " is not a multiple of dt " +
                      std::to_string(dt_microsteps));
  }
  if (tile.model_id() != model_id) {
    throw ConfigError("coupling init: tile belongs to model " +
                      std::to_string(tile.model_id()));
  }
  if (std::find(peers.begin(), peers.end(), model_id) != peers.end()) {
    throw ConfigError("coupling init: a model cannot be its own peer");
  }
  return ModelCoupling(tile, model_id, std::move(peers), dt_microsteps,
                       coupled_interval_microsteps);
}

std::vector<ModelId> ModelCoupling::unfinished_peers() const {
  std::vector<ModelId> out;
  for (ModelId p : peers_) {
    if (!peers_finished_.count(p)) out.push_back(p);
  }
  return out;
}

void ModelCoupling::send(PacketType type, ModelId to, std::int32_t data_id,
                         std::optional<WindProfile> payload) {
  tile_->send(Packet{type, model_id_, to, model_time(), data_id,
                     std::move(payload)});
  ++packets_sent_;
}

void ModelCoupling::answer_time_request(const Packet& req) {
  if (!fin_sent_) send(PacketType::RespTime, req.source);
}

SyncStatus ModelCoupling::sync() {
  if (!at_coupled_boundary()) return SyncStatus::Proceed;

  bool peer_finished = !peers_finished_.empty();
  std::vector<ModelId> awaiting = unfinished_peers();
  for (ModelId p : awaiting) send(PacketType::ReqTime, p);

  static constexpr std::array kSyncTypes = {
      PacketType::ReqTime, PacketType::RespTime, PacketType::Fin};
  while (!awaiting.empty()) {
    Packet pkt = tile_->wait_any(kSyncTypes, peers_);
    switch (pkt.type) {
      case PacketType::ReqTime:
        answer_time_request(pkt);
        break;
      case PacketType::RespTime: {
        auto it = std::find(awaiting.begin(), awaiting.end(), pkt.source);
        if (it == awaiting.end()) {
          throw ProtocolError("sync: unexpected RESPTIME from model " +
                              std::to_string(pkt.source));
        }
        if (pkt.timestamp != model_time()) {
          throw ProtocolError(
              "sync: model " + std::to_string(model_id_) + " at t=" +
              std::to_string(model_time()) + " got RESPTIME t=" +
              std::to_string(pkt.timestamp) + " from model " +
              std::to_string(pkt.source));
        }
        awaiting.erase(it);
        break;
      }
      case PacketType::Fin:
        peers_finished_.insert(pkt.source);
        std::erase(awaiting, pkt.source);
        peer_finished = true;
        break;
      default:
        break;
    }
  }
  return peer_finished ? SyncStatus::PeerFinished : SyncStatus::Proceed;
}

std::optional<WindProfile> ModelCoupling::pre_exchange(
    std::int32_t data_id, std::optional<ModelId> producer) {
  if (!producer) {
    if (peers_.size() != 1) {
      throw ConfigError("pre_exchange: producer must be named with " +
                        std::to_string(peers_.size()) + " peers");
    }
    producer = peers_.front();
  }
  if (std::find(peers_.begin(), peers_.end(), *producer) == peers_.end()) {
    throw AddressingError("pre_exchange: model " + std::to_string(*producer) +
                          " is not a peer");
  }
  if (peers_finished_.count(*producer)) return std::nullopt;

  send(PacketType::ReqData, *producer, data_id);
  const std::array from = {*producer};
  auto replies = tile_->wait_for(PacketType::RespData, from);
  Packet& reply = replies.front();
  if (reply.type == PacketType::Fin) {
    peers_finished_.insert(reply.source);
    return std::nullopt;
  }
  if (reply.data_id != data_id) {
    throw ProtocolError("pre_exchange: requested data_id " +
                        std::to_string(data_id) + ", got " +
                        std::to_string(reply.data_id));
  }
  WindProfile profile = std::move(*reply.payload);
  profile.t = reply.timestamp;
  series_.push(profile);
  return profile;
}

int ModelCoupling::post_exchange(const ProfileProvider& provider) {
  int served = 0;
  auto serve = [&](const Packet& req) {
    if (fin_sent_) return;
    WindProfile profile = provider();
    profile.t = model_time();
    send(PacketType::RespData, req.source, req.data_id, std::move(profile));
    ++served;
    ++profiles_served_;
  };

  static constexpr std::array kWindowTypes = {
      PacketType::ReqData, PacketType::ReqTime, PacketType::Fin};
  for (;;) {
    while (auto req = tile_->shift_pending(PacketType::ReqData)) serve(*req);

    std::vector<ModelId> open;
    for (ModelId p : unfinished_peers()) {
      if (auto fin = tile_->shift_pending_from(PacketType::Fin, p)) {
        peers_finished_.insert(p);
      } else if (!tile_->has_pending(PacketType::ReqTime, p)) {
        open.push_back(p);
      }
    }
    if (open.empty()) return served;
    tile_->await_pending(kWindowTypes, open);
  }
}

void ModelCoupling::finished() {
  if (fin_sent_) return;
  for (ModelId p : peers_) send(PacketType::Fin, p);
  fin_sent_ = true;

  std::vector<ModelId> waiting = unfinished_peers();
  if (waiting.empty()) return;
  for (const Packet& p : tile_->wait_for(PacketType::Fin, waiting)) {
    peers_finished_.insert(p.source);
  }
}

}  // namespace gmcf
