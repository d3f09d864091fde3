#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gmcf/driver.hpp"
#include "gmcf/les_entry.hpp"
#include "gmcf/runtime.hpp"
#include "gmcf/sor.hpp"

namespace gmcf {

enum class RunMode { Coupled, LesStandalone, SorBench, BoundaryAudit };

const char* to_string(RunMode m) noexcept;
std::optional<RunMode> parse_run_mode(std::string_view s) noexcept;

struct ModelEntryConfig {
  std::string name;
  double dt_seconds = 0.0;
};

struct LesSettings {
  int im = 16, jm = 16, km = 8;
  float h = 8.0f;  // m
  // Effective viscosity: molecular values leave central advection unstable
  // at metre-scale cells.
  float vn = 2.0f;
  float cs = 0.1f;
  int steps = 10;  // les-standalone
  std::optional<float> inflow_u;  // les-standalone; driver profile when empty
  std::optional<CellBox> building;
  float noise = 0.05f;
  int press_iter = kDefaultSorIterations;
  SorScheme press_scheme = SorScheme::RedBlack;
};

struct SorSettings {
  // Empty = both schemes (sor-bench).
  std::optional<SorScheme> scheme;
  std::optional<float> omega;
  int n_iter = kDefaultSorIterations;
  int workers = 4;
  int im = 16, jm = 16, km = 16;
};

struct DriverSettings {
  float u_star = 0.3f;
  float z0 = 0.1f;
  float gust_amplitude = 0.2f;
  float gust_period = 600.0f;
};

struct AuditSettings {
  std::int64_t ip = 2, jp = 3, kp = 4;
  std::int64_t nthreads = 2, nunits = 3;
};

/// Validated run configuration. Parsed from INI-style text: sections
/// [runtime], [les], [sor], [driver], [audit], [output]; key = value lines;
/// '#' starts a comment.
struct RunConfig {
  RunMode mode = RunMode::Coupled;
  std::vector<ModelEntryConfig> models;
  int intervals = 5;
  std::uint64_t seed = 1;
  ExecutionMode execution = ExecutionMode::Threaded;
  int timeout_ms = 30000;
  LesSettings les;
  SorSettings sor;
  DriverSettings driver;
  AuditSettings audit;
  std::string out_dir = "out";

  // "section.key" -> line it was set on; used for diagnostics.
  std::map<std::string, int> key_lines;

  // Driver configuration whose levels are the LES cell centres.
  DriverConfig driver_config() const;
  // Reproduce models as a runtime configuration (ids in listed order).
  RuntimeConfig runtime_config() const;
  std::optional<ModelId> model_id(std::string_view name) const;
};

/// Parses and validates. Throws ConfigError naming the key and line.
RunConfig parse_config(std::string_view text,
                       std::optional<RunMode> mode = std::nullopt);

// Re-checks cross-key invariants, e.g. after command-line overrides.
void validate_run_config(const RunConfig& cfg);

}  // namespace gmcf
