#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmcf/config.hpp"
#include "gmcf/driver.hpp"
#include "gmcf/les_entry.hpp"
#include "gmcf/runtime.hpp"
#include "gmcf/work_distribution.hpp"

namespace gmcf {

// Knobs used by tests to force one side to stop early.
struct CoupledOverrides {
  std::optional<int> driver_steps;
  std::optional<int> les_steps;
  std::optional<std::chrono::milliseconds> receive_timeout;
};

struct CoupledSummary {
  ModelId driver_id = 0;
  ModelId les_id = 0;
  Microsteps steps_per_interval = 0;  // LES steps per coupled interval
  int driver_steps_requested = 0;
  int les_steps_requested = 0;

  DriverReport driver;
  LesReport les;
  std::vector<ModelExit> exits;

  // Packets sent, per model and type.
  std::map<ModelId, std::array<std::uint64_t, kPacketTypeCount>> sent;
  // Consumed packets, per model, in the order the model consumed them.
  std::map<ModelId, std::vector<Packet>> consumed;

  bool fin_seen_by_les = false;     // driver's FIN reached the LES
  bool fin_seen_by_driver = false;  // LES FIN reached the driver

  bool ok() const;
  std::uint64_t reqdata_count() const;
  std::uint64_t respdata_count() const;

  // One line per coupled interval:
  // interval=N driver_time=T les_steps_run=S packets_in=I packets_out=O interpolated=0|1
  std::vector<std::string> interval_log() const;
  // Deterministic text: no wall-clock values.
  std::string to_text() const;
  std::string wall_time_text() const;
};

std::string format_packet(const Packet& p);

CoupledSummary run_coupled(const RunConfig& cfg, const CoupledOverrides& ov = {});

struct LesStandaloneReport {
  int steps_run = 0;
  FlowState state;
  std::vector<double> last_residuals;
  double max_divergence = 0.0;
  double max_speed = 0.0;
};

// Throws NumericalError if a stage produces a non-finite value.
LesStandaloneReport run_les_standalone(const RunConfig& cfg);

struct SorBenchColumn {
  int workers = 1;
  std::vector<double> residuals;
  double seconds = 0.0;
};

struct SorBenchReport {
  std::map<SorScheme, std::vector<SorBenchColumn>> runs;
  std::string residual_csv(SorScheme scheme) const;
  std::string timing_csv() const;
  // All twinned residual columns equal.
  bool twinned_columns_identical() const;
};

SorBenchReport run_sor_bench(const RunConfig& cfg);

// Worker counts 1, 2, 4, ... up to `max_workers`, plus max_workers itself.
std::vector<int> worker_ladder(int max_workers);

BoundaryAudit run_boundary_audit(const RunConfig& cfg);
std::string format_audit(const BoundaryAudit& a, const AuditSettings& s);

// Writes u, v, w, p dumps of `s` into `dir`.
void dump_state(const std::filesystem::path& dir, const FlowState& s);

// Builds the initial LES state used by both LES modes.
FlowState initial_les_state(const RunConfig& cfg, float dt);
LesRunSettings les_settings(const RunConfig& cfg, int n_steps);

}  // namespace gmcf
