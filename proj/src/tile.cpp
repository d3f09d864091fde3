#include "gmcf/tile.hpp"

#include <algorithm>
#include <string>

#include "gmcf/errors.hpp"
#include "gmcf/runtime.hpp"

namespace gmcf {

namespace {

bool contains(std::span<const ModelId> ids, ModelId id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

bool contains(std::span<const PacketType> types, PacketType t) {
  return std::find(types.begin(), types.end(), t) != types.end();
}

}  // namespace

Tile::Tile(ModelId id, Runtime& runtime) : id_(id), runtime_(&runtime) {}

void Tile::send(Packet p) {
  if (p.source != id_) {
    throw ProtocolError("tile " + std::to_string(id_) +
                        ": cannot send a packet with source " +
                        std::to_string(p.source));
  }
  runtime_->send(std::move(p));
}

void Tile::deliver(Packet p) {
  {
    std::lock_guard lk(mu_);
    rx_.push_back(std::move(p));
    ++delivered_;
  }
  cv_.notify_one();
}

Packet Tile::pop_rx_blocking() {
  std::unique_lock lk(mu_);
  while (rx_.empty()) {
    if (yield_) {
      lk.unlock();
      yield_();
      lk.lock();
      continue;
    }
    auto ready = [this] { return !rx_.empty(); };
    if (timeout_) {
      if (!cv_.wait_for(lk, *timeout_, ready)) {
        throw TimeoutError("model " + std::to_string(id_) +
                           ": receive timed out after " +
                           std::to_string(timeout_->count()) + " ms");
      }
    } else {
      cv_.wait(lk, ready);
    }
  }
  Packet p = std::move(rx_.front());
  rx_.pop_front();
  return p;
}

Packet Tile::hand_to_model(Packet p) {
  consumed_.push_back(p);
  return p;
}

void Tile::park(Packet p) {
  pending_[type_index(p.type)].push_back(std::move(p));
}

std::optional<Packet> Tile::take_pending(PacketType type, ModelId source) {
  auto& q = pending_[type_index(type)];
  auto it = std::find_if(q.begin(), q.end(),
                         [source](const Packet& p) { return p.source == source; });
  if (it == q.end()) return std::nullopt;
  Packet p = std::move(*it);
  q.erase(it);
  return p;
}

std::vector<Packet> Tile::wait_for(PacketType type,
                                   std::span<const ModelId> from) {
  std::vector<ModelId> remaining;
  for (ModelId m : from) {
    if (!contains(remaining, m)) remaining.push_back(m);
  }

  std::vector<Packet> out;
  out.reserve(remaining.size());

  for (auto it = remaining.begin(); it != remaining.end();) {
    auto p = take_pending(type, *it);
    if (!p && type != PacketType::Fin) p = take_pending(PacketType::Fin, *it);
    if (p) {
      out.push_back(hand_to_model(std::move(*p)));
      it = remaining.erase(it);
    } else {
      ++it;
    }
  }

  while (!remaining.empty()) {
    Packet p = pop_rx_blocking();
    auto slot = std::find(remaining.begin(), remaining.end(), p.source);
    if (slot != remaining.end() &&
        (p.type == type || p.type == PacketType::Fin)) {
      remaining.erase(slot);
      out.push_back(hand_to_model(std::move(p)));
    } else {
      park(std::move(p));
    }
  }
  return out;
}

Packet Tile::wait_any(std::span<const PacketType> types,
                      std::span<const ModelId> from) {
  for (PacketType t : types) {
    auto& q = pending_[type_index(t)];
    auto it = std::find_if(q.begin(), q.end(), [&](const Packet& p) {
      return contains(from, p.source);
    });
    if (it != q.end()) {
      Packet p = std::move(*it);
      q.erase(it);
      return hand_to_model(std::move(p));
    }
  }
  for (;;) {
    Packet p = pop_rx_blocking();
    if (contains(types, p.type) && contains(from, p.source)) {
      return hand_to_model(std::move(p));
    }
    park(std::move(p));
  }
}

std::optional<Packet> Tile::shift_pending(PacketType type) {
  auto& q = pending_[type_index(type)];
  if (q.empty()) return std::nullopt;
  Packet p = std::move(q.front());
  q.pop_front();
  return hand_to_model(std::move(p));
}

std::optional<Packet> Tile::shift_pending_from(PacketType type,
                                               ModelId source) {
  auto p = take_pending(type, source);
  if (!p) return std::nullopt;
  return hand_to_model(std::move(*p));
}

bool Tile::has_pending(PacketType type, ModelId source) const {
  const auto& q = pending_[type_index(type)];
  return std::any_of(q.begin(), q.end(),
                     [source](const Packet& p) { return p.source == source; });
}

void Tile::await_pending(std::span<const PacketType> types,
                         std::span<const ModelId> from) {
  auto satisfied = [&] {
    for (PacketType t : types) {
      for (ModelId m : from) {
        if (has_pending(t, m)) return true;
      }
    }
    return false;
  };
  while (!satisfied()) park(pop_rx_blocking());
}

void Tile::drain_rx_to_pending() {
  std::deque<Packet> taken;
  {
    std::lock_guard lk(mu_);
    taken.swap(rx_);
  }
  for (auto& p : taken) park(std::move(p));
}

std::size_t Tile::rx_size() const {
  std::lock_guard lk(mu_);
  return rx_.size();
}

std::vector<Packet> Tile::rx_snapshot() const {
  std::lock_guard lk(mu_);
  return {rx_.begin(), rx_.end()};
}

std::size_t Tile::pending_total() const noexcept {
  std::size_t n = 0;
  for (const auto& q : pending_) n += q.size();
  return n;
}

std::uint64_t Tile::delivered_count() const {
  std::lock_guard lk(mu_);
  return delivered_;
}

}  // namespace gmcf
