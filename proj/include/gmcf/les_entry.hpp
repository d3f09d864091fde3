#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "gmcf/les.hpp"
#include "gmcf/packet.hpp"
#include "gmcf/tile.hpp"

namespace gmcf {

// Inclusive cell-index box.
struct CellBox {
  int i0 = 1, i1 = 1;
  int j0 = 1, j1 = 1;
  int k0 = 1, k1 = 1;
};

// Sets mask = 1 inside the box (clipped to the interior).
void set_building(FlowState& s, const CellBox& box);

struct LesRunSettings {
  Grid grid;
  float vn = 1.5e-5f;
  float cs = 0.1f;
  int n_steps = 0;
  PressOptions press;
  std::int32_t data_id = 1;
  std::optional<CellBox> building;
  // Uniform seeded perturbation of the initial velocity, m/s.
  float noise = 0.0f;
  std::uint64_t seed = 1;
};

// Adds uniform noise in [-amplitude, amplitude] to the interior velocities.
void perturb_velocity(FlowState& s, float amplitude, std::uint64_t seed);

// One record per coupled interval, as seen by the LES.
struct IntervalRecord {
  int interval = 0;  // 1-based
  Microsteps driver_time = 0;
  int les_steps_run = 0;
  std::uint64_t packets_in = 0;
  std::uint64_t packets_out = 0;
  bool interpolated = false;
};

struct LesReport {
  int steps_run = 0;
  bool exited_early = false;
  std::vector<IntervalRecord> intervals;
  int first_interpolation_interval = 0;  // 0 = interpolation never used
  int interpolation_calls = 0;
  std::vector<WindProfile> received;
  std::set<ModelId> peers_finished;
  std::optional<FlowState> final_state;
};

/// LES entry point. Per step: Sync; at coupled boundaries Pre (request and
/// receive the profile); pick the inflow; advance the flow one step.
///
/// Until two profiles have arrived the latest profile is used directly.
/// Afterwards the inflow is interpolated one coupled interval behind the
/// model time, which keeps the evaluation point inside the two received
/// profiles.
///
/// `report` is filled in as the run progresses, so it holds the partial
/// record if a stage throws.
void les_main(Tile& tile, ModelId model_id, const LesRunSettings& settings,
              LesReport& report);

}  // namespace gmcf
