#include "gmcf/driver.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gmcf/coupling.hpp"
#include "gmcf/errors.hpp"
#include "gmcf/runtime.hpp"

namespace gmcf {

void DriverConfig::validate() const {
  if (kp < 1) throw ConfigError("driver: kp must be >= 1");
  if (level_heights.size() != static_cast<std::size_t>(kp)) {
    throw ConfigError("driver: expected " + std::to_string(kp) +
                      " level heights, got " +
                      std::to_string(level_heights.size()));
  }
  if (!(z0 > 0.0f)) throw ConfigError("driver: z0 must be > 0");
  if (!(gust_period > 0.0f)) throw ConfigError("driver: gust_period must be > 0");
  for (std::size_t k = 0; k < level_heights.size(); ++k) {
    if (!(level_heights[k] > z0)) {
      throw ConfigError("driver: level heights must exceed z0");
    }
    if (k > 0 && !(level_heights[k] > level_heights[k - 1])) {
      throw ConfigError("driver: level heights must be strictly increasing");
    }
  }
}

WindProfile generate_profile(const DriverConfig& cfg, double t_seconds) {
  cfg.validate();
  if (t_seconds < 0.0) throw std::invalid_argument("generate_profile: t < 0");
  // Phase reduced modulo the period so t and t + period agree exactly.
  const double phase = std::fmod(t_seconds, static_cast<double>(cfg.gust_period));
  const double gust =
      1.0 + cfg.gust_amplitude *
                std::sin(2.0 * std::numbers::pi * phase / cfg.gust_period);
  WindProfile p = WindProfile::zeros(cfg.kp);
  for (std::size_t k = 0; k < p.u.size(); ++k) {
    p.u[k] = static_cast<float>(static_cast<double>(cfg.u_star) / kVonKarman *
                                std::log(static_cast<double>(cfg.level_heights[k]) /
                                         cfg.z0) *
                                gust);
  }
  return p;
}

DriverReport driver_main(Tile& tile, ModelId model_id,
                         const DriverRunSettings& settings) {
  settings.config.validate();
  Runtime& rt = tile.runtime();
  std::vector<ModelId> peers;
  for (ModelId m = 1; m <= static_cast<ModelId>(rt.model_count()); ++m) {
    if (m != model_id) peers.push_back(m);
  }
  auto coupling = ModelCoupling::init(tile, model_id, peers,
                                      rt.dt_microsteps(model_id),
                                      rt.reference_microsteps());
  const double seconds_per_microstep = rt.time_base().microstep_seconds;

  DriverReport report;
  for (int n = 0; n < settings.n_steps; ++n) {
    if (coupling.sync() == SyncStatus::PeerFinished) {
      report.exited_early = true;
      break;
    }
    const WindProfile profile = generate_profile(
        settings.config,
        static_cast<double>(coupling.model_time()) * seconds_per_microstep);
    const int served = coupling.post_exchange([&] { return profile; });
    if (served > 0) report.serve_times.push_back(coupling.model_time());
    report.profiles_served += served;
    ++report.steps_run;
    coupling.advance();
    // A peer that finished during Post ends the run as well.
    if (!coupling.peers_finished().empty()) {
      report.exited_early = n + 1 < settings.n_steps;
      break;
    }
  }
  coupling.finished();
  report.peers_finished = coupling.peers_finished();
  return report;
}

}  // namespace gmcf
