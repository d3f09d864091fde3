#pragma once

#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gmcf/packet.hpp"
#include "gmcf/tile.hpp"

namespace gmcf {

struct ModelSpec {
  ModelId id = 0;
  std::string entry;
  double dt_seconds = 0.0;
};

struct RuntimeConfig {
  std::vector<ModelSpec> models;
};

// Integer time base derived from a RuntimeConfig.
struct TimeBase {
  double microstep_seconds = 0.0;
  Microsteps reference = 0;  // largest dt, in microsteps
  std::vector<Microsteps> dt;  // per model, indexed by id - 1
};

// Validates the model set and converts every dt to microsteps.
// Throws ConfigError on duplicate / non-contiguous ids or non-divisible dts.
TimeBase derive_time_base(const RuntimeConfig& config);

enum class ExecutionMode {
  Threaded,
  // One model executes at a time; control passes round-robin whenever the
  // running model blocks on an empty RX queue.
  Sequential,
};

struct RuntimeOptions {
  ExecutionMode mode = ExecutionMode::Threaded;
  std::optional<std::chrono::milliseconds> receive_timeout;
};

struct ModelExit {
  ModelId model_id = 0;
  bool ok = false;
  std::string error;
  std::exception_ptr exception;  // set when !ok
  double wall_seconds = 0.0;
};

class Runtime {
 public:
  // Mirrors the program_<model>_gmcf(gmcf_ptr, model_id) entry convention.
  using EntryPoint = std::function<void(Tile&, ModelId)>;

  explicit Runtime(RuntimeConfig config, RuntimeOptions options = {});
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  void register_entry(const std::string& name, EntryPoint entry);

  /// Invokes every model's entry point exactly once on its own worker and
  /// returns after all of them complete. A model that throws is reported as
  /// failed and a FIN is synthesized on its behalf to every other model.
  std::vector<ModelExit> run();

  // Enqueues on the destination tile's RX queue. Thread-safe.
  void send(Packet p);

  Tile& tile(ModelId id);
  const Tile& tile(ModelId id) const;

  std::size_t model_count() const noexcept { return tiles_.size(); }
  const RuntimeConfig& config() const noexcept { return config_; }
  const TimeBase& time_base() const noexcept { return time_base_; }
  Microsteps dt_microsteps(ModelId id) const;
  Microsteps reference_microsteps() const noexcept {
    return time_base_.reference;
  }

  std::uint64_t sent_count(ModelId source, PacketType type) const;

 private:
  class TurnScheduler;

  void check_id(ModelId id, const char* what) const;
  void run_worker(ModelId id, ModelExit& exit);

  RuntimeConfig config_;
  RuntimeOptions options_;
  TimeBase time_base_;
  std::vector<std::unique_ptr<Tile>> tiles_;
  std::map<std::string, EntryPoint> entries_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> sent_;
  std::unique_ptr<TurnScheduler> scheduler_;
  bool ran_ = false;
};

std::unique_ptr<Runtime> create_runtime(RuntimeConfig config,
                                        RuntimeOptions options = {});

}  // namespace gmcf
