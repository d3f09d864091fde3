#include "gmcf/les_entry.hpp"

#include <algorithm>
#include <random>

#include "gmcf/coupling.hpp"
#include "gmcf/runtime.hpp"

namespace gmcf {

void set_building(FlowState& s, const CellBox& box) {
  const Grid& g = s.grid;
  for (int k = std::max(box.k0, 1); k <= std::min(box.k1, g.km); ++k)
    for (int j = std::max(box.j0, 1); j <= std::min(box.j1, g.jm); ++j)
      for (int i = std::max(box.i0, 1); i <= std::min(box.i1, g.im); ++i)
        s.mask(i, j, k) = 1.0f;
}

void perturb_velocity(FlowState& s, float amplitude, std::uint64_t seed) {
  if (amplitude == 0.0f) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-amplitude, amplitude);
  const auto vel = s.velocity();
  for (int c = 0; c < 3; ++c) {
    // Wall faces stay at zero.
    const int je = s.grid.jm - (c == 1 ? 1 : 0);
    const int ke = s.grid.km - (c == 2 ? 1 : 0);
    for (int k = 1; k <= ke; ++k)
      for (int j = 1; j <= je; ++j)
        for (int i = 1; i <= s.grid.im; ++i)
          (*vel[static_cast<std::size_t>(c)])(i, j, k) += dist(rng);
  }
}

void les_main(Tile& tile, ModelId model_id, const LesRunSettings& settings,
              LesReport& report) {
  Runtime& rt = tile.runtime();
  std::vector<ModelId> peers;
  for (ModelId m = 1; m <= static_cast<ModelId>(rt.model_count()); ++m) {
    if (m != model_id) peers.push_back(m);
  }
  auto coupling = ModelCoupling::init(tile, model_id, peers,
                                      rt.dt_microsteps(model_id),
                                      rt.reference_microsteps());
  const auto dt_seconds = static_cast<float>(
      static_cast<double>(rt.dt_microsteps(model_id)) *
      rt.time_base().microstep_seconds);

  FlowState state =
      FlowState::create(settings.grid, dt_seconds, settings.vn, settings.cs);
  if (settings.building) set_building(state, *settings.building);
  perturb_velocity(state, settings.noise, settings.seed);

  report = LesReport{};
  std::optional<WindProfile> latest;
  auto close_interval = [&] {
    if (report.intervals.empty()) return;
    auto& rec = report.intervals.back();
    rec.packets_in = coupling.packets_received() - rec.packets_in;
    rec.packets_out = coupling.packets_sent() - rec.packets_out;
  };

  for (int n = 0; n < settings.n_steps; ++n) {
    const bool boundary = coupling.at_coupled_boundary();
    if (boundary) {
      close_interval();
      IntervalRecord rec;
      rec.interval = static_cast<int>(report.intervals.size()) + 1;
      rec.driver_time = coupling.model_time();
      // Hold the counter snapshots until the interval closes.
      rec.packets_in = coupling.packets_received();
      rec.packets_out = coupling.packets_sent();
      report.intervals.push_back(rec);
    }

    if (coupling.sync() == SyncStatus::PeerFinished) {
      report.exited_early = true;
      break;
    }
    if (boundary) {
      latest = coupling.pre_exchange(settings.data_id);
      if (!latest) {
        report.exited_early = true;
        break;
      }
      report.received.push_back(*latest);
    }

    WindProfile inflow;
    if (coupling.series().can_interpolate()) {
      inflow = interpolate_profile(
          coupling.series(),
          coupling.model_time() - coupling.coupled_interval_microsteps());
      ++report.interpolation_calls;
      auto& rec = report.intervals.back();
      rec.interpolated = true;
      if (report.first_interpolation_interval == 0) {
        report.first_interpolation_interval = rec.interval;
      }
    } else {
      inflow = *latest;
    }

    step(state, inflow, settings.press);
    ++report.intervals.back().les_steps_run;
    ++report.steps_run;
    coupling.advance();
  }
  close_interval();

  coupling.finished();
  report.peers_finished = coupling.peers_finished();
  report.final_state = std::move(state);
}

}  // namespace gmcf
