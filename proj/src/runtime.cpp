#include "gmcf/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "gmcf/errors.hpp"

namespace gmcf {

TimeBase derive_time_base(const RuntimeConfig& config) {
  if (config.models.empty()) throw ConfigError("runtime: no models configured");

  std::set<ModelId> ids;
  for (const auto& m : config.models) {
    if (!ids.insert(m.id).second) {
      throw ConfigError("runtime: duplicate model id " + std::to_string(m.id));
    }
    if (!(m.dt_seconds > 0.0) || !std::isfinite(m.dt_seconds)) {
      throw ConfigError("runtime: model " + std::to_string(m.id) +
                        " has a non-positive time step");
    }
  }
  if (*ids.begin() != 1 ||
      *ids.rbegin() != static_cast<ModelId>(config.models.size())) {
    throw ConfigError("runtime: model ids must be contiguous from 1");
  }

  const auto by_dt = [](const ModelSpec& a, const ModelSpec& b) {
    return a.dt_seconds < b.dt_seconds;
  };
  const double smallest =
      std::min_element(config.models.begin(), config.models.end(), by_dt)
          ->dt_seconds;
  const double largest =
      std::max_element(config.models.begin(), config.models.end(), by_dt)
          ->dt_seconds;

  auto whole_ratio = [](double num, double den) -> std::optional<Microsteps> {
    const double r = num / den;
    const double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * n) return std::nullopt;
    return static_cast<Microsteps>(n);
  };

  TimeBase tb;
  tb.microstep_seconds = smallest;
  tb.dt.resize(config.models.size());
  for (const auto& m : config.models) {
    auto steps = whole_ratio(m.dt_seconds, smallest);
    auto per_ref = whole_ratio(largest, m.dt_seconds);
    if (!steps || !per_ref) {
      throw ConfigError("runtime: time step " + std::to_string(m.dt_seconds) +
                        " of model " + std::to_string(m.id) +
                        " does not divide the reference step " +
                        std::to_string(largest));
    }
    tb.dt[static_cast<std::size_t>(m.id - 1)] = *steps;
  }
  tb.reference = *whole_ratio(largest, smallest);
  return tb;
}

// Hands a single execution turn between the model workers. A model gives up
// the turn only when it would block on an empty RX queue or when it exits.
class Runtime::TurnScheduler {
 public:
  explicit TurnScheduler(std::vector<Tile*> tiles)
      : tiles_(std::move(tiles)),
        state_(tiles_.size() + 1, State::Ready),
        deadlocked_(tiles_.size() + 1, false) {}

  void acquire(ModelId id) {
    std::unique_lock lk(mu_);
    cv_.wait(lk, [&] { return turn_ == id; });
    state_[static_cast<std::size_t>(id)] = State::Running;
  }

  void block(ModelId id) {
    std::unique_lock lk(mu_);
    const auto slot = static_cast<std::size_t>(id);
    state_[slot] = State::Blocked;
    pass_turn(id);
    cv_.wait(lk, [&] { return turn_ == id; });
    state_[slot] = State::Running;
    if (deadlocked_[slot]) {
      deadlocked_[slot] = false;
      throw DeadlockError("model " + std::to_string(id) +
                          ": every model is blocked (sequential mode)");
    }
  }

  void done(ModelId id) {
    std::lock_guard lk(mu_);
    state_[static_cast<std::size_t>(id)] = State::Done;
    pass_turn(id);
  }

 private:
  enum class State { Ready, Running, Blocked, Done };

  // Caller holds mu_.
  void pass_turn(ModelId from) {
    const auto n = static_cast<ModelId>(tiles_.size());
    ModelId first_blocked = 0;
    for (ModelId off = 1; off <= n; ++off) {
      const ModelId c = (from - 1 + off) % n + 1;
      const auto s = state_[static_cast<std::size_t>(c)];
      if (s == State::Ready ||
          (s == State::Blocked && tiles_[static_cast<std::size_t>(c - 1)]->rx_size() > 0)) {
        turn_ = c;
        cv_.notify_all();
        return;
      }
      if (s == State::Blocked && first_blocked == 0) first_blocked = c;
    }
    if (first_blocked != 0) {
      deadlocked_[static_cast<std::size_t>(first_blocked)] = true;
      turn_ = first_blocked;
    } else {
      turn_ = 0;
    }
    cv_.notify_all();
  }

  std::vector<Tile*> tiles_;
  std::mutex mu_;
  std::condition_variable cv_;
  ModelId turn_ = 1;
  std::vector<State> state_;
  std::vector<bool> deadlocked_;
};

Runtime::Runtime(RuntimeConfig config, RuntimeOptions options)
    : config_(std::move(config)),
      options_(options),
      time_base_(derive_time_base(config_)) {
  std::sort(config_.models.begin(), config_.models.end(),
            [](const ModelSpec& a, const ModelSpec& b) { return a.id < b.id; });
  tiles_.reserve(config_.models.size());
  for (const auto& m : config_.models) {
    tiles_.push_back(std::make_unique<Tile>(m.id, *this));
    tiles_.back()->set_receive_timeout(options_.receive_timeout);
  }
  sent_ = std::make_unique<std::atomic<std::uint64_t>[]>(tiles_.size() *
                                                         kPacketTypeCount);
}

Runtime::~Runtime() = default;

void Runtime::register_entry(const std::string& name, EntryPoint entry) {
  entries_[name] = std::move(entry);
}

void Runtime::check_id(ModelId id, const char* what) const {
  if (id < 1 || id > static_cast<ModelId>(tiles_.size())) {
    throw AddressingError(std::string(what) + ": unknown model id " +
                          std::to_string(id));
  }
}

Tile& Runtime::tile(ModelId id) {
  check_id(id, "tile");
  return *tiles_[static_cast<std::size_t>(id - 1)];
}

const Tile& Runtime::tile(ModelId id) const {
  check_id(id, "tile");
  return *tiles_[static_cast<std::size_t>(id - 1)];
}

Microsteps Runtime::dt_microsteps(ModelId id) const {
  check_id(id, "dt_microsteps");
  return time_base_.dt[static_cast<std::size_t>(id - 1)];
}

std::uint64_t Runtime::sent_count(ModelId source, PacketType type) const {
  check_id(source, "sent_count");
  return sent_[static_cast<std::size_t>(source - 1) * kPacketTypeCount +
               type_index(type)]
      .load();
}

void Runtime::send(Packet p) {
  validate(p);
  check_id(p.destination, "send");
  check_id(p.source, "send (source)");
  sent_[static_cast<std::size_t>(p.source - 1) * kPacketTypeCount +
        type_index(p.type)]
      .fetch_add(1);
  tiles_[static_cast<std::size_t>(p.destination - 1)]->deliver(std::move(p));
}

void Runtime::run_worker(ModelId id, ModelExit& exit) {
  const auto& spec = config_.models[static_cast<std::size_t>(id - 1)];
  if (scheduler_) scheduler_->acquire(id);
  const auto start = std::chrono::steady_clock::now();
  exit.model_id = id;
  try {
    entries_.at(spec.entry)(tile(id), id);
    exit.ok = true;
  } catch (const std::exception& e) {
    exit.ok = false;
    exit.error = e.what();
    exit.exception = std::current_exception();
  } catch (...) {
    exit.ok = false;
    exit.error = "unknown exception";
    exit.exception = std::current_exception();
  }
  exit.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (!exit.ok) {
    for (const auto& other : tiles_) {
      if (other->model_id() == id) continue;
      send(Packet{PacketType::Fin, id, other->model_id(), 0, 0, std::nullopt});
    }
  }
  if (scheduler_) scheduler_->done(id);
}

std::vector<ModelExit> Runtime::run() {
  if (ran_) throw ConfigError("runtime: run() may only be called once");
  for (const auto& m : config_.models) {
    if (!entries_.count(m.entry)) {
      throw ConfigError("runtime: no entry point registered for '" + m.entry +
                        "' (model " + std::to_string(m.id) + ")");
    }
  }
  ran_ = true;

  if (options_.mode == ExecutionMode::Sequential) {
    std::vector<Tile*> raw;
    for (auto& t : tiles_) raw.push_back(t.get());
    scheduler_ = std::make_unique<TurnScheduler>(raw);
    for (auto& t : tiles_) {
      const ModelId id = t->model_id();
      t->set_yield([this, id] { scheduler_->block(id); });
    }
  }

  std::vector<ModelExit> exits(tiles_.size());
  {
    std::vector<std::jthread> workers;
    workers.reserve(tiles_.size());
    for (std::size_t i = 0; i < tiles_.size(); ++i) {
      workers.emplace_back([this, i, &exits] {
        run_worker(static_cast<ModelId>(i + 1), exits[i]);
      });
    }
  }

  // Late arrivals are kept for the packet accounting.
  for (auto& t : tiles_) t->drain_rx_to_pending();
  return exits;
}

std::unique_ptr<Runtime> create_runtime(RuntimeConfig config,
                                        RuntimeOptions options) {
  return std::make_unique<Runtime>(std::move(config), options);
}

}  // namespace gmcf
