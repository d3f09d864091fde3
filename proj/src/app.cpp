#include "gmcf/app.hpp"

#include <chrono>
#include <iomanip>
#include <random>
#include <sstream>

#include "gmcf/errors.hpp"
#include "gmcf/field_io.hpp"
#include "gmcf/sor.hpp"

namespace gmcf {

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::fixed << v;
  return os.str();
}

std::string exact(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool consumed_fin_from(const std::vector<Packet>& log, ModelId source) {
  for (const auto& p : log) {
    if (p.type == PacketType::Fin && p.source == source) return true;
  }
  return false;
}

Grid les_grid(const RunConfig& cfg) {
  return Grid::uniform(cfg.les.im, cfg.les.jm, cfg.les.km, cfg.les.h);
}

PressOptions press_options(const RunConfig& cfg) {
  PressOptions o;
  o.n_iter = cfg.les.press_iter;
  o.scheme = cfg.les.press_scheme;
  return o;
}

}  // namespace

std::string format_packet(const Packet& p) {
  std::ostringstream os;
  os << to_string(p.type) << " " << p.source << "->" << p.destination
     << " t=" << p.timestamp << " id=" << p.data_id;
  if (p.payload) {
    os << " levels=" << p.payload->levels() << " t_profile=" << p.payload->t;
  }
  return os.str();
}

LesRunSettings les_settings(const RunConfig& cfg, int n_steps) {
  LesRunSettings s;
  s.grid = les_grid(cfg);
  s.vn = cfg.les.vn;
  s.cs = cfg.les.cs;
  s.n_steps = n_steps;
  s.press = press_options(cfg);
  s.building = cfg.les.building;
  s.noise = cfg.les.noise;
  s.seed = cfg.seed;
  return s;
}

FlowState initial_les_state(const RunConfig& cfg, float dt) {
  FlowState s = FlowState::create(les_grid(cfg), dt, cfg.les.vn, cfg.les.cs);
  if (cfg.les.building) set_building(s, *cfg.les.building);
  perturb_velocity(s, cfg.les.noise, cfg.seed);
  return s;
}

void dump_state(const std::filesystem::path& dir, const FlowState& s) {
  dump_field(dir, "u", s.u, "m/s");
  dump_field(dir, "v", s.v, "m/s");
  dump_field(dir, "w", s.w, "m/s");
  dump_field(dir, "p", s.p, "m^2/s^2");
}

// ---------------------------------------------------------------------------
// coupled

bool CoupledSummary::ok() const {
  for (const auto& e : exits) {
    if (!e.ok) return false;
  }
  return !exits.empty();
}

std::uint64_t CoupledSummary::reqdata_count() const {
  auto it = sent.find(les_id);
  return it == sent.end() ? 0 : it->second[type_index(PacketType::ReqData)];
}

std::uint64_t CoupledSummary::respdata_count() const {
  auto it = sent.find(driver_id);
  return it == sent.end() ? 0 : it->second[type_index(PacketType::RespData)];
}

std::vector<std::string> CoupledSummary::interval_log() const {
  std::vector<std::string> lines;
  for (const auto& r : les.intervals) {
    std::ostringstream os;
    os << "interval=" << r.interval << " driver_time=" << r.driver_time
       << " les_steps_run=" << r.les_steps_run << " packets_in=" << r.packets_in
       << " packets_out=" << r.packets_out
       << " interpolated=" << (r.interpolated ? 1 : 0);
    lines.push_back(os.str());
  }
  return lines;
}

std::string CoupledSummary::to_text() const {
  std::ostringstream os;
  os << "status = " << (ok() ? "ok" : "failed") << "\n";
  for (const auto& e : exits) {
    os << "model " << e.model_id << " exit = " << (e.ok ? "ok" : "error");
    if (!e.ok) os << " (" << e.error << ")";
    os << "\n";
  }
  os << "driver_steps = " << driver.steps_run << "/" << driver_steps_requested
     << "\n";
  os << "les_steps = " << les.steps_run << "/" << les_steps_requested << "\n";
  os << "steps_per_interval = " << steps_per_interval << "\n";
  os << "intervals = " << les.intervals.size() << "\n";
  os << "profiles_served = " << driver.profiles_served << "\n";
  os << "first_interpolation_interval = " << les.first_interpolation_interval
     << "\n";
  os << "interpolation_calls = " << les.interpolation_calls << "\n";
  for (const auto& [id, counts] : sent) {
    os << "sent model " << id << ":";
    for (PacketType t : kAllPacketTypes) {
      os << " " << to_string(t) << "=" << counts[type_index(t)];
    }
    os << "\n";
  }
  os << "reqdata_respdata_pairs = " << std::min(reqdata_count(), respdata_count())
     << "\n";
  os << "fin_seen_by_les = " << (fin_seen_by_les ? 1 : 0) << "\n";
  os << "fin_seen_by_driver = " << (fin_seen_by_driver ? 1 : 0) << "\n";
  if (les.final_state) {
    const auto& s = *les.final_state;
    os << "final_max_u = " << exact(max_abs_interior(s.u)) << "\n";
    os << "final_max_divergence = "
       << exact(max_abs_interior(divergence(s.grid, s.u, s.v, s.w))) << "\n";
  }
  for (const auto& line : interval_log()) os << line << "\n";
  for (const auto& [id, log] : consumed) {
    os << "consumed model " << id << " (" << log.size() << ")\n";
    for (const auto& p : log) os << "  " << format_packet(p) << "\n";
  }
  return os.str();
}

std::string CoupledSummary::wall_time_text() const {
  std::ostringstream os;
  for (const auto& e : exits) {
    os << "model " << e.model_id << " wall_seconds = " << fixed(e.wall_seconds, 6)
       << "\n";
  }
  return os.str();
}

CoupledSummary run_coupled(const RunConfig& cfg, const CoupledOverrides& ov) {
  if (cfg.mode != RunMode::Coupled) {
    throw ConfigError("run_coupled: mode must be coupled");
  }
  validate_run_config(cfg);

  RuntimeConfig rc = cfg.runtime_config();
  RuntimeOptions opts;
  opts.mode = cfg.execution;
  opts.receive_timeout =
      ov.receive_timeout.value_or(std::chrono::milliseconds(cfg.timeout_ms));
  auto rt = create_runtime(rc, opts);

  CoupledSummary sum;
  sum.driver_id = *cfg.model_id("driver");
  sum.les_id = *cfg.model_id("les");
  sum.steps_per_interval =
      rt->reference_microsteps() / rt->dt_microsteps(sum.les_id);
  const int intervals = cfg.intervals;
  sum.driver_steps_requested = ov.driver_steps.value_or(
      intervals * static_cast<int>(rt->reference_microsteps() /
                                   rt->dt_microsteps(sum.driver_id)));
  sum.les_steps_requested = ov.les_steps.value_or(
      intervals * static_cast<int>(sum.steps_per_interval));

  DriverRunSettings ds;
  ds.config = cfg.driver_config();
  ds.n_steps = sum.driver_steps_requested;
  const LesRunSettings ls = les_settings(cfg, sum.les_steps_requested);

  rt->register_entry("driver", [&](Tile& t, ModelId id) {
    sum.driver = driver_main(t, id, ds);
  });
  rt->register_entry("les", [&](Tile& t, ModelId id) {
    les_main(t, id, ls, sum.les);
  });
  // Extra models simply finish; they take part in the FIN handshake only.
  for (const auto& m : rc.models) {
    if (m.entry == "driver" || m.entry == "les") continue;
    rt->register_entry(m.entry, [](Tile& t, ModelId id) {
      Runtime& r = t.runtime();
      for (ModelId o = 1; o <= static_cast<ModelId>(r.model_count()); ++o) {
        if (o != id) t.send(Packet{PacketType::Fin, id, o, 0, 0, std::nullopt});
      }
    });
  }

  sum.exits = rt->run();

  for (ModelId id = 1; id <= static_cast<ModelId>(rt->model_count()); ++id) {
    auto& counts = sum.sent[id];
    for (PacketType t : kAllPacketTypes) counts[type_index(t)] = rt->sent_count(id, t);
    sum.consumed[id] = rt->tile(id).consumed();
  }
  sum.fin_seen_by_les =
      consumed_fin_from(sum.consumed[sum.les_id], sum.driver_id);
  sum.fin_seen_by_driver =
      consumed_fin_from(sum.consumed[sum.driver_id], sum.les_id);
  return sum;
}

// ---------------------------------------------------------------------------
// les-standalone

LesStandaloneReport run_les_standalone(const RunConfig& cfg) {
  validate_run_config(cfg);
  double dt = 0.5;
  if (auto id = cfg.model_id("les")) {
    dt = cfg.models[static_cast<std::size_t>(*id - 1)].dt_seconds;
  }
  LesStandaloneReport rep{0, initial_les_state(cfg, static_cast<float>(dt)), {}, 0, 0};
  const DriverConfig dc = cfg.driver_config();
  const PressOptions po = press_options(cfg);
  for (int n = 0; n < cfg.les.steps; ++n) {
    WindProfile inflow;
    if (cfg.les.inflow_u) {
      inflow = WindProfile::zeros(cfg.les.km, 0);
      std::fill(inflow.u.begin(), inflow.u.end(), *cfg.les.inflow_u);
    } else {
      inflow = generate_profile(dc, n * dt);
    }
    rep.last_residuals = step(rep.state, inflow, po);
    ++rep.steps_run;
  }
  const auto& s = rep.state;
  rep.max_divergence = max_abs_interior(divergence(s.grid, s.u, s.v, s.w));
  rep.max_speed = std::max({max_abs_interior(s.u), max_abs_interior(s.v),
                            max_abs_interior(s.w)});
  return rep;
}

// ---------------------------------------------------------------------------
// sor-bench

std::vector<int> worker_ladder(int max_workers) {
  std::vector<int> out;
  for (int w = 1; w <= max_workers; w *= 2) out.push_back(w);
  if (out.back() != max_workers) out.push_back(max_workers);
  return out;
}

std::string SorBenchReport::residual_csv(SorScheme scheme) const {
  auto it = runs.find(scheme);
  if (it == runs.end() || it->second.empty()) return {};
  const auto& cols = it->second;
  std::ostringstream os;
  os << "iteration";
  for (const auto& c : cols) os << ",workers_" << c.workers;
  os << "\n";
  os << std::setprecision(17);
  for (std::size_t n = 0; n < cols.front().residuals.size(); ++n) {
    os << n + 1;
    for (const auto& c : cols) os << "," << c.residuals[n];
    os << "\n";
  }
  return os.str();
}

std::string SorBenchReport::timing_csv() const {
  std::ostringstream os;
  os << "scheme,workers,seconds\n";
  for (const auto& [scheme, cols] : runs) {
    for (const auto& c : cols) {
      os << (scheme == SorScheme::RedBlack ? "redblack" : "twinned") << ","
         << c.workers << "," << fixed(c.seconds, 6) << "\n";
    }
  }
  return os.str();
}

bool SorBenchReport::twinned_columns_identical() const {
  auto it = runs.find(SorScheme::Twinned);
  if (it == runs.end()) return true;
  for (const auto& c : it->second) {
    if (c.residuals != it->second.front().residuals) return false;
  }
  return true;
}

SorBenchReport run_sor_bench(const RunConfig& cfg) {
  validate_run_config(cfg);
  const auto& s = cfg.sor;
  const Grid g = Grid::uniform(s.im, s.jm, s.km, 1.0f);
  const SorCoeffs c = build_uniform_coeffs(g);

  ScalarField rhs = g.make_field<float>();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  for (int k = 1; k <= g.km; ++k)
    for (int j = 1; j <= g.jm; ++j)
      for (int i = 1; i <= g.im; ++i) rhs(i, j, k) = dist(rng);
  const ScalarField p0 = g.make_field<float>();

  std::vector<SorScheme> schemes;
  if (s.scheme) schemes = {*s.scheme};
  else schemes = {SorScheme::RedBlack, SorScheme::Twinned};

  SorBenchReport rep;
  for (SorScheme scheme : schemes) {
    const float omega = s.omega.value_or(default_omega(scheme));
    const auto ladder = scheme == SorScheme::RedBlack ? std::vector<int>{1}
                                                      : worker_ladder(s.workers);
    for (int w : ladder) {
      const auto t0 = std::chrono::steady_clock::now();
      auto sol = solve_pressure(p0, rhs, c, omega, s.n_iter, scheme, w);
      const auto t1 = std::chrono::steady_clock::now();
      rep.runs[scheme].push_back(
          {w, std::move(sol.residuals), std::chrono::duration<double>(t1 - t0).count()});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// boundary-audit

BoundaryAudit run_boundary_audit(const RunConfig& cfg) {
  validate_run_config(cfg);
  const auto& a = cfg.audit;
  return audit_boundary_coverage(a.ip, a.jp, a.kp, a.nthreads, a.nunits);
}

std::string format_audit(const BoundaryAudit& a, const AuditSettings& s) {
  std::ostringstream os;
  os << "ip=" << s.ip << " jp=" << s.jp << " kp=" << s.kp
     << " nthreads=" << s.nthreads << " nunits=" << s.nunits << "\n";
  os << "boundary_range = " << a.boundary_range << "\n";
  os << "padded_range = " << a.padded_range << "\n";
  os << "covered = " << a.covered << "\n";
  os << "padding = " << a.padding << "\n";
  os << "status = " << (a.ok() ? "ok" : "violation") << "\n";
  if (!a.ok()) {
    os << "first_offending_gid = " << *a.first_offending_gid << "\n";
    os << "violation = " << a.violation << "\n";
  }
  return os.str();
}

}  // namespace gmcf
