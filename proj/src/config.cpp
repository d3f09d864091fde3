#include "gmcf/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "gmcf/errors.hpp"

namespace gmcf {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail(int line, std::string_view key, const std::string& msg) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << "key '" << key << "': " << msg;
  throw ConfigError(os.str());
}

template <typename T>
T parse_number(std::string_view v, int line, std::string_view key) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end || v.empty()) {
    fail(line, key, "expected a number, got '" + std::string(v) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) fail(line, key, "value must be finite");
  }
  return out;
}

std::optional<SorScheme> parse_scheme(std::string_view v, int line,
                                      std::string_view key, bool allow_both) {
  if (v == "redblack") return SorScheme::RedBlack;
  if (v == "twinned") return SorScheme::Twinned;
  if (allow_both && v == "both") return std::nullopt;
  fail(line, key,
       std::string("expected redblack") + (allow_both ? ", twinned or both" : " or twinned") +
           ", got '" + std::string(v) + "'");
}

using Setter = std::function<void(RunConfig&, std::string_view, int, std::string_view)>;

template <typename T, typename Member>
Setter number(Member member) {
  return [member](RunConfig& c, std::string_view v, int line, std::string_view key) {
    std::invoke(member, c) = parse_number<T>(v, line, key);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"runtime.mode",
       [](RunConfig& c, std::string_view v, int line, std::string_view key) {
         auto m = parse_run_mode(v);
         if (!m) fail(line, key, "unknown mode '" + std::string(v) + "'");
         c.mode = *m;
       }},
      {"runtime.models",
       [](RunConfig& c, std::string_view v, int line, std::string_view key) {
         c.models.clear();
         for (auto item : split(v, ',')) {
           const auto parts = split(item, ':');
           if (parts.size() != 2 || parts[0].empty()) {
             fail(line, key, "expected name:dt_seconds entries, got '" +
                                 std::string(item) + "'");
           }
           c.models.push_back(
               {std::string(parts[0]), parse_number<double>(parts[1], line, key)});
         }
       }},
      {"runtime.intervals", number<int>([](RunConfig& c) -> int& { return c.intervals; })},
      {"runtime.seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.seed; })},
      {"runtime.timeout_ms", number<int>([](RunConfig& c) -> int& { return c.timeout_ms; })},
      {"runtime.execution",
       [](RunConfig& c, std::string_view v, int line, std::string_view key) {
         if (v == "threaded") c.execution = ExecutionMode::Threaded;
         else if (v == "sequential") c.execution = ExecutionMode::Sequential;
         else fail(line, key, "expected threaded or sequential");
       }},
      {"les.im", number<int>([](RunConfig& c) -> int& { return c.les.im; })},
      {"les.jm", number<int>([](RunConfig& c) -> int& { return c.les.jm; })},
      {"les.km", number<int>([](RunConfig& c) -> int& { return c.les.km; })},
      {"les.h", number<float>([](RunConfig& c) -> float& { return c.les.h; })},
      {"les.vn", number<float>([](RunConfig& c) -> float& { return c.les.vn; })},
      {"les.cs", number<float>([](RunConfig& c) -> float& { return c.les.cs; })},
      {"les.steps", number<int>([](RunConfig& c) -> int& { return c.les.steps; })},
      {"les.noise", number<float>([](RunConfig& c) -> float& { return c.les.noise; })},
      {"les.press_iter", number<int>([](RunConfig& c) -> int& { return c.les.press_iter; })},
      {"les.inflow_u",
       [](RunConfig& c, std::string_view v, int line, std::string_view key) {
         c.les.inflow_u = parse_number<float>(v, line, key);
       }},
      {"les.press_scheme",
       [](RunConfig& c, std::string_view v, int line, std::string_view key) {
         c.les.press_scheme = *parse_scheme(v, line, key, false);
       }},
      {"les.building",
       [](RunConfig& c, std::string_view v, int line, std::string_view key) {
         const auto parts = split(v, ',');
         if (parts.size() != 6) fail(line, key, "expected i0,i1,j0,j1,k0,k1");
         std::array<int, 6> n{};
         for (std::size_t x = 0; x < 6; ++x) n[x] = parse_number<int>(parts[x], line, key);
         c.les.building = CellBox{n[0], n[1], n[2], n[3], n[4], n[5]};
       }},
      {"sor.scheme",
       [](RunConfig& c, std::string_view v, int line, std::string_view key) {
         c.sor.scheme = parse_scheme(v, line, key, true);
       }},
      {"sor.omega",
       [](RunConfig& c, std::string_view v, int line, std::string_view key) {
         c.sor.omega = parse_number<float>(v, line, key);
       }},
      {"sor.n_iter", number<int>([](RunConfig& c) -> int& { return c.sor.n_iter; })},
      {"sor.workers", number<int>([](RunConfig& c) -> int& { return c.sor.workers; })},
      {"sor.im", number<int>([](RunConfig& c) -> int& { return c.sor.im; })},
      {"sor.jm", number<int>([](RunConfig& c) -> int& { return c.sor.jm; })},
      {"sor.km", number<int>([](RunConfig& c) -> int& { return c.sor.km; })},
      {"driver.u_star", number<float>([](RunConfig& c) -> float& { return c.driver.u_star; })},
      {"driver.z0", number<float>([](RunConfig& c) -> float& { return c.driver.z0; })},
      {"driver.gust_amplitude",
       number<float>([](RunConfig& c) -> float& { return c.driver.gust_amplitude; })},
      {"driver.gust_period",
       number<float>([](RunConfig& c) -> float& { return c.driver.gust_period; })},
      {"audit.ip", number<std::int64_t>([](RunConfig& c) -> std::int64_t& { return c.audit.ip; })},
      {"audit.jp", number<std::int64_t>([](RunConfig& c) -> std::int64_t& { return c.audit.jp; })},
      {"audit.kp", number<std::int64_t>([](RunConfig& c) -> std::int64_t& { return c.audit.kp; })},
      {"audit.nthreads",
       number<std::int64_t>([](RunConfig& c) -> std::int64_t& { return c.audit.nthreads; })},
      {"audit.nunits",
       number<std::int64_t>([](RunConfig& c) -> std::int64_t& { return c.audit.nunits; })},
      {"output.dir",
       [](RunConfig& c, std::string_view v, int, std::string_view) {
         c.out_dir = std::string(v);
       }},
  };
  return table;
}

}  // namespace

const char* to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::Coupled: return "coupled";
    case RunMode::LesStandalone: return "les-standalone";
    case RunMode::SorBench: return "sor-bench";
    case RunMode::BoundaryAudit: return "boundary-audit";
  }
  return "?";
}

std::optional<RunMode> parse_run_mode(std::string_view s) noexcept {
  for (RunMode m : {RunMode::Coupled, RunMode::LesStandalone, RunMode::SorBench,
                    RunMode::BoundaryAudit}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

DriverConfig RunConfig::driver_config() const {
  DriverConfig d;
  d.kp = les.km;
  d.u_star = driver.u_star;
  d.z0 = driver.z0;
  d.gust_amplitude = driver.gust_amplitude;
  d.gust_period = driver.gust_period;
  for (int k = 1; k <= les.km; ++k) {
    d.level_heights.push_back((static_cast<float>(k) - 0.5f) * les.h);
  }
  return d;
}

RuntimeConfig RunConfig::runtime_config() const {
  RuntimeConfig rc;
  for (std::size_t n = 0; n < models.size(); ++n) {
    rc.models.push_back({static_cast<ModelId>(n + 1), models[n].name,
                         models[n].dt_seconds});
  }
  return rc;
}

std::optional<ModelId> RunConfig::model_id(std::string_view name) const {
  for (std::size_t n = 0; n < models.size(); ++n) {
    if (models[n].name == name) return static_cast<ModelId>(n + 1);
  }
  return std::nullopt;
}

void validate_run_config(const RunConfig& c) {
  auto line_of = [&c](const std::string& key) {
    auto it = c.key_lines.find(key);
    return it == c.key_lines.end() ? 0 : it->second;
  };
  auto check = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) fail(line_of(key), key, msg);
  };

  check(c.timeout_ms > 0, "runtime.timeout_ms", "must be > 0");

  const auto& s = c.sor;
  check(s.n_iter >= 1, "sor.n_iter", "must be >= 1");
  check(s.workers >= 1, "sor.workers", "must be >= 1");
  check(s.im >= 1 && s.jm >= 1 && s.km >= 1, "sor.im", "sor domain extents must be >= 1");
  if (s.omega) check(*s.omega > 0.0f && *s.omega < 2.0f, "sor.omega", "must lie in (0, 2)");
  check(!(s.scheme == SorScheme::RedBlack && s.workers > 1), "sor.workers",
        "unsupported combination: scheme=redblack requires workers=1 "
        "(use scheme=twinned for parallel sweeps)");

  const auto& a = c.audit;
  check(a.ip >= 1 && a.jp >= 1 && a.kp >= 1, "audit.ip", "extents must be >= 1");
  check(a.nthreads >= 1, "audit.nthreads", "must be >= 1");
  check(a.nunits >= 1, "audit.nunits", "must be >= 1");

  const auto& l = c.les;
  check(l.im >= 1 && l.jm >= 1 && l.km >= 1, "les.im", "les extents must be >= 1");
  check(l.h > 0.0f, "les.h", "must be > 0");
  check(l.vn >= 0.0f, "les.vn", "must be >= 0");
  check(l.cs >= 0.0f, "les.cs", "must be >= 0");
  check(l.steps >= 1, "les.steps", "must be >= 1");
  check(l.press_iter >= 1, "les.press_iter", "must be >= 1");
  check(l.noise >= 0.0f, "les.noise", "must be >= 0");

  if (c.mode == RunMode::Coupled || c.mode == RunMode::LesStandalone) {
    check(c.driver.z0 > 0.0f, "driver.z0", "must be > 0");
    check(c.driver.gust_period > 0.0f, "driver.gust_period", "must be > 0");
    check(0.5f * l.h > c.driver.z0, "driver.z0",
          "lowest LES level (h/2) must lie above z0");
  }

  if (c.mode == RunMode::Coupled) {
    check(c.models.size() >= 2, "runtime.models",
          "coupled mode requires at least two models");
    check(c.model_id("driver").has_value() && c.model_id("les").has_value(),
          "runtime.models", "coupled mode requires models named driver and les");
    check(c.intervals >= 1, "runtime.intervals", "must be >= 1");
    std::set<std::string> names;
    for (const auto& m : c.models) {
      check(names.insert(m.name).second, "runtime.models",
            "duplicate model '" + m.name + "'");
    }
    try {
      derive_time_base(c.runtime_config());
    } catch (const ConfigError& e) {
      fail(line_of("runtime.models"), "runtime.models", e.what());
    }
  }
}

RunConfig parse_config(std::string_view text, std::optional<RunMode> mode) {
  RunConfig cfg;
  cfg.models = {{"driver", 60.0}, {"les", 0.5}};
  static const std::set<std::string, std::less<>> sections = {
      "runtime", "les", "sor", "driver", "audit", "output"};

  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, line, "malformed section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!sections.count(name)) {
        fail(line_no, name, "unknown section [" + std::string(name) + "]");
      }
      section = std::string(name);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, line, "expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (section.empty()) fail(line_no, key, "key outside of any section");
    const std::string full = section + "." + std::string(key);
    const auto it = setters().find(full);
    if (it == setters().end()) fail(line_no, full, "unknown key");
    if (value.empty()) fail(line_no, full, "missing value");
    it->second(cfg, value, line_no, full);
    cfg.key_lines[full] = line_no;
  }

  if (mode) cfg.mode = *mode;
  validate_run_config(cfg);
  return cfg;
}

}  // namespace gmcf
