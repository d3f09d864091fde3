#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "gmcf/packet.hpp"
#include "gmcf/tile.hpp"
#include "gmcf/wind_profile.hpp"

namespace gmcf {

inline constexpr double kVonKarman = 0.41;

/// Synthetic coarse driver: log-law wind with a sinusoidal gust factor.
struct DriverConfig {
  int kp = 0;
  float u_star = 0.0f;          // m/s
  float z0 = 0.0f;              // m
  std::vector<float> level_heights;  // m, strictly increasing, all > z0
  float gust_amplitude = 0.0f;
  float gust_period = 600.0f;   // s

  void validate() const;
};

// u(k) = (u_star / 0.41) ln(z_k / z0) (1 + A sin(2 pi t / T)), v = w = 0.
WindProfile generate_profile(const DriverConfig& cfg, double t_seconds);

struct DriverRunSettings {
  DriverConfig config;
  int n_steps = 0;
  std::int32_t data_id = 1;
};

struct DriverReport {
  int steps_run = 0;
  int profiles_served = 0;
  bool exited_early = false;
  // Model time of every step that served at least one profile.
  std::vector<Microsteps> serve_times;
  std::set<ModelId> peers_finished;
};

/// Driver entry point: per step Sync, build the profile for the current
/// model time, Post (serve pending requests); Finished after the loop. Every
/// other model of the runtime is a peer. Exits early when a peer finishes.
DriverReport driver_main(Tile& tile, ModelId model_id,
                         const DriverRunSettings& settings);

}  // namespace gmcf
