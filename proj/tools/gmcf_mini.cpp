// gmcf-mini: command-line front end for the coupling runtime, the LES and
// the SOR benchmark.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <sstream>

#include "gmcf/app.hpp"
#include "gmcf/errors.hpp"
#include "gmcf/field_io.hpp"

namespace fs = std::filesystem;
using namespace gmcf;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kProtocol = 3, kNumerical = 4 };

int classify(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError&) {
    return kConfig;
  } catch (const ProtocolError&) {
    return kProtocol;
  } catch (const NumericalError&) {
    return kNumerical;
  } catch (...) {
    return kFailure;
  }
}

std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file '" + p.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_coupled_mode(const RunConfig& cfg, const fs::path& out) {
  const CoupledSummary sum = run_coupled(cfg);
  for (const auto& line : sum.interval_log()) std::cout << line << "\n";

  std::string log;
  for (const auto& line : sum.interval_log()) log += line + "\n";
  write_file_atomic(out / "intervals.log", log);
  write_file_atomic(out / "summary.txt", sum.to_text());
  write_file_atomic(out / "wall_time.txt", sum.wall_time_text());
  if (sum.les.final_state) dump_state(out / "fields", *sum.les.final_state);

  std::cout << "REQDATA=" << sum.reqdata_count()
            << " RESPDATA=" << sum.respdata_count()
            << " les_steps=" << sum.les.steps_run
            << " driver_steps=" << sum.driver.steps_run << "\n";
  std::cout << sum.wall_time_text();

  int code = kOk;
  for (const auto& e : sum.exits) {
    if (e.ok) continue;
    std::cerr << "model " << e.model_id << " failed: " << e.error << "\n";
    const int c = classify(e.exception);
    if (code == kOk || c > code) code = c;
  }
  return code;
}

int run_les_mode(const RunConfig& cfg, const fs::path& out) {
  const auto rep = run_les_standalone(cfg);
  std::ostringstream os;
  os << std::setprecision(17);
  os << "steps_run = " << rep.steps_run << "\n"
     << "max_speed = " << rep.max_speed << "\n"
     << "max_divergence = " << rep.max_divergence << "\n";
  if (!rep.last_residuals.empty()) {
    os << "last_press_residual = " << rep.last_residuals.back() << "\n";
  }
  write_file_atomic(out / "summary.txt", os.str());
  dump_state(out / "fields", rep.state);
  std::cout << os.str();
  return kOk;
}

int run_sor_mode(const RunConfig& cfg, const fs::path& out) {
  const auto rep = run_sor_bench(cfg);
  for (const auto& [scheme, cols] : rep.runs) {
    const std::string name = scheme == SorScheme::RedBlack ? "redblack" : "twinned";
    write_file_atomic(out / ("residuals_" + name + ".csv"), rep.residual_csv(scheme));
  }
  write_file_atomic(out / "timing.csv", rep.timing_csv());
  std::cout << rep.timing_csv();
  if (!rep.twinned_columns_identical()) {
    std::cerr << "twinned residuals differ across worker counts\n";
    return kNumerical;
  }
  return kOk;
}

int run_audit_mode(const RunConfig& cfg, const fs::path& out) {
  const auto audit = run_boundary_audit(cfg);
  const auto text = format_audit(audit, cfg.audit);
  write_file_atomic(out / "audit.txt", text);
  std::cout << text;
  return audit.ok() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gmcf-mini: coupled LES / driver runs and SOR benchmarks"};
  std::string mode_name;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> steps;

  app.add_option("mode", mode_name, "coupled | les-standalone | sor-bench | boundary-audit")
      ->required();
  app.add_option("--config", config_path, "INI config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--workers", workers, "SOR worker threads");
  app.add_option("--steps", steps,
                 "coupled intervals, LES steps or SOR iterations, by mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  RunConfig cfg;
  try {
    const auto mode = parse_run_mode(mode_name);
    if (!mode) throw ConfigError("unknown mode '" + mode_name + "'");
    cfg = parse_config(read_text(config_path), mode);
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) cfg.seed = *seed;
    if (workers) cfg.sor.workers = *workers;
    if (steps) {
      switch (cfg.mode) {
        case RunMode::Coupled: cfg.intervals = *steps; break;
        case RunMode::LesStandalone: cfg.les.steps = *steps; break;
        case RunMode::SorBench: cfg.sor.n_iter = *steps; break;
        case RunMode::BoundaryAudit: break;
      }
    }
    validate_run_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }

  try {
    const fs::path out = cfg.out_dir;
    fs::create_directories(out);
    switch (cfg.mode) {
      case RunMode::Coupled: return run_coupled_mode(cfg, out);
      case RunMode::LesStandalone: return run_les_mode(cfg, out);
      case RunMode::SorBench: return run_sor_mode(cfg, out);
      case RunMode::BoundaryAudit: return run_audit_mode(cfg, out);
    }
  } catch (...) {
    const auto e = std::current_exception();
    try {
      std::rethrow_exception(e);
    } catch (const std::exception& ex) {
      std::cerr << "error: " << ex.what() << "\n";
    } catch (...) {
      std::cerr << "error: unknown\n";
    }
    return classify(e);
  }
  return kOk;
}
