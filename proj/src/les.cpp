#include "gmcf/les.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <string>

#include "gmcf/errors.hpp"

namespace gmcf {

namespace {

struct Index3 {
  int i, j, k;

  int operator[](int d) const noexcept { return d == 0 ? i : (d == 1 ? j : k); }

  Index3 shifted(int d, int by) const noexcept {
    Index3 q = *this;
    (d == 0 ? q.i : (d == 1 ? q.j : q.k)) += by;
    return q;
  }
};

template <typename T>
T& at(Field3D<T>& f, Index3 q) { return f(q.i, q.j, q.k); }
template <typename T>
const T& at(const Field3D<T>& f, Index3 q) { return f(q.i, q.j, q.k); }

float spacing(const Grid& g, int d, int idx) {
  return d == 0 ? g.dx(idx) : (d == 1 ? g.dy(idx) : g.dz(idx));
}

using ConstVelocity = std::array<const ScalarField*, 3>;

struct Term {
  float cov;
  float diu;
};

// cov and diu of momentum component c along direction d at point q. Along
// the component's own axis the terms live at the cell centre behind q; across
// it they live on the edge half a cell back along d.
inline Term stencil_term(const ConstVelocity& vel, const Grid& g, int c, int d,
                         Index3 q) {
  const ScalarField& vc = *vel[static_cast<std::size_t>(c)];
  const Index3 qm = q.shifted(d, -1);
  if (d == c) {
    const float diu = (at(vc, q) - at(vc, qm)) / spacing(g, c, q[c]);
    const float nou = (at(vc, qm) + at(vc, q)) * 0.5f;
    return {nou * diu, diu};
  }
  const float diu = (at(vc, q) - at(vc, qm)) /
                    (0.5f * (spacing(g, d, q[d] - 1) + spacing(g, d, q[d])));
  const ScalarField& vd = *vel[static_cast<std::size_t>(d)];
  const float nov = 0.5f * (at(vd, qm) + at(vd, qm.shifted(c, 1)));
  return {nov * diu, diu};
}

struct Combined {
  float covc;
  float dfu;
};

// The velfg combination: terms at p ("at") and at p + e_d ("p1").
inline Combined combine(const Grid& g, int c, Index3 p, const StencilPair& here,
                        const StencilPair& p1) {
  float covc = 0.0f;
  float dfu = 0.0f;
  for (int d = 0; d < 3; ++d) {
    const auto sd = static_cast<std::size_t>(d);
    float cov_d;
    float dfu_d;
    if (d == c) {
      const float h0 = spacing(g, c, p[c]);
      const float h1 = spacing(g, c, p[c] + 1);
      cov_d = (h1 * here.cov[sd] + h0 * p1.cov[sd]) / (h0 + h1);
      dfu_d = 2.0f * (-here.diu[sd] + p1.diu[sd]) / (h0 + h1);
    } else {
      cov_d = (here.cov[sd] + p1.cov[sd]) / 2.0f;
      dfu_d = (-here.diu[sd] + p1.diu[sd]) / spacing(g, d, p[d]);
    }
    covc = d == 0 ? cov_d : covc + cov_d;
    dfu = d == 0 ? dfu_d : dfu + dfu_d;
  }
  return {covc, dfu};
}

inline void stencils_at(const ConstVelocity& vel, const Grid& g, int c,
                        Index3 p, StencilPair& here, StencilPair& p1) {
  for (int d = 0; d < 3; ++d) {
    const auto sd = static_cast<std::size_t>(d);
    const Term t0 = stencil_term(vel, g, c, d, p);
    const Term t1 = stencil_term(vel, g, c, d, p.shifted(d, 1));
    here.cov[sd] = t0.cov;
    here.diu[sd] = t0.diu;
    p1.cov[sd] = t1.cov;
    p1.diu[sd] = t1.diu;
  }
}

template <typename Fn>
void for_interior(const Grid& g, Fn&& fn) {
  for (int k = 1; k <= g.km; ++k)
    for (int j = 1; j <= g.jm; ++j)
      for (int i = 1; i <= g.im; ++i) fn(Index3{i, j, k});
}

// Velocity points the momentum update owns: every interior face except the
// wall faces v(·,jm,·) and w(·,·,km), which stay at zero. The outflow face
// u(im,·,·) is included; the inflow face u(0,·,·) belongs to bondv1.
template <typename Fn>
void for_free_faces(const Grid& g, int c, Fn&& fn) {
  const int ie = g.im;
  const int je = g.jm - (c == 1 ? 1 : 0);
  const int ke = g.km - (c == 2 ? 1 : 0);
  for (int k = 1; k <= ke; ++k)
    for (int j = 1; j <= je; ++j)
      for (int i = 1; i <= ie; ++i) fn(Index3{i, j, k});
}

template <typename T>
bool all_finite(const Field3D<T>& f) {
  for (const auto& x : f.data()) {
    if constexpr (std::is_same_v<T, float>) {
      if (!std::isfinite(x)) return false;
    } else {
      for (float y : x) {
        if (!std::isfinite(y)) return false;
      }
    }
  }
  return true;
}

}  // namespace

FlowState FlowState::create(Grid grid, float dt, float vn, float cs) {
  grid.validate();
  FlowState s;
  s.u = grid.make_field<float>();
  s.v = grid.make_field<float>();
  s.w = grid.make_field<float>();
  s.fgh = grid.make_field<Vec3f>();
  s.fgh_old = grid.make_field<Vec3f>();
  s.p = grid.make_field<float>();
  s.mask = grid.make_field<float>();
  s.grid = std::move(grid);
  s.dt = dt;
  s.vn = vn;
  s.cs = cs;
  s.validate();
  return s;
}

void FlowState::validate() const {
  grid.validate();
  if (!(dt > 0.0f)) throw ConfigError("flow state: dt must be > 0");
  const ScalarField shape(grid.im, grid.jm, grid.km);
  require_same_shape(u, shape, "flow state u");
  require_same_shape(v, shape, "flow state v");
  require_same_shape(w, shape, "flow state w");
  require_same_shape(fgh, shape, "flow state fgh");
  require_same_shape(fgh_old, shape, "flow state fgh_old");
  require_same_shape(p, shape, "flow state p");
  require_same_shape(mask, shape, "flow state mask");
  for (float m : mask.data()) {
    if (!(m >= 0.0f && m <= 1.0f)) {
      throw ConfigError("flow state: mask values must lie in [0, 1]");
    }
  }
}

void velnw(FlowState& s) {
  const Grid& g = s.grid;
  auto vel = s.velocity();
  for (int c = 0; c < 3; ++c) {
    ScalarField& f = *vel[static_cast<std::size_t>(c)];
    for_free_faces(g, c, [&](Index3 q) {
      const float h = 0.5f * (spacing(g, c, q[c]) + spacing(g, c, q[c] + 1));
      const float dpdx = (at(s.p, q.shifted(c, 1)) - at(s.p, q)) / h;
      at(f, q) += s.dt * (at(s.fgh, q)[static_cast<std::size_t>(c)] - dpdx);
    });
  }
}

void bondv1(FlowState& s, const WindProfile& inflow) {
  inflow.validate();
  const Grid& g = s.grid;
  if (inflow.levels() != g.km) {
    throw ShapeError("bondv1: inflow has " + std::to_string(inflow.levels()) +
                     " levels, grid has km=" + std::to_string(g.km));
  }
  const std::array<const std::vector<float>*, 3> in = {&inflow.u, &inflow.v,
                                                       &inflow.w};
  auto vel = s.velocity();
  for (int c = 0; c < 3; ++c) {
    ScalarField& f = *vel[static_cast<std::size_t>(c)];
    const auto& prof = *in[static_cast<std::size_t>(c)];
    for (int k = 1; k <= g.km; ++k) {
      for (int j = 1; j <= g.jm; ++j) {
        f(0, j, k) = prof[static_cast<std::size_t>(k - 1)];  // inflow
        f(g.im + 1, j, k) = f(g.im, j, k);                   // outflow
      }
    }
    // Side walls: no flow through, free slip along.
    for (int k = 1; k <= g.km; ++k) {
      for (int i = 0; i <= g.im + 1; ++i) {
        if (c == 1) {
          f(i, 0, k) = 0.0f;
          f(i, g.jm + 1, k) = 0.0f;
        } else {
          f(i, 0, k) = f(i, 1, k);
          f(i, g.jm + 1, k) = f(i, g.jm, k);
        }
      }
    }
    // Ground and lid, same policy.
    for (int j = 0; j <= g.jm + 1; ++j) {
      for (int i = 0; i <= g.im + 1; ++i) {
        if (c == 2) {
          f(i, j, 0) = 0.0f;
          f(i, j, g.km + 1) = 0.0f;
        } else {
          f(i, j, 0) = f(i, j, 1);
          f(i, j, g.km + 1) = f(i, j, g.km);
        }
      }
    }
  }
}

void velfg_merged(FlowState& s) {
  const Grid& g = s.grid;
  const ConstVelocity vel = {&s.u, &s.v, &s.w};
  for_interior(g, [&](Index3 p) {
    Vec3f fgh_ijk;
    for (int c = 0; c < 3; ++c) {
      StencilPair here;
      StencilPair p1;
      stencils_at(vel, g, c, p, here, p1);
      const Combined t = combine(g, c, p, here, p1);
      fgh_ijk[static_cast<std::size_t>(c)] = -t.covc + s.vn * t.dfu;
    }
    at(s.fgh, p) = fgh_ijk;
  });
}

void velfg_twopass(FlowState& s) {
  const Grid& g = s.grid;
  const ConstVelocity vel = {&s.u, &s.v, &s.w};

  // cov[c][d] / diu[c][d] materialised over every point the combination
  // reads: the interior plus one layer past it along d.
  std::array<std::array<ScalarField, 3>, 3> cov;
  std::array<std::array<ScalarField, 3>, 3> diu;
  for (int c = 0; c < 3; ++c) {
    for (int d = 0; d < 3; ++d) {
      auto& cf = cov[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
      auto& df = diu[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
      cf = g.make_field<float>();
      df = g.make_field<float>();
      const int ie = g.im + (d == 0 ? 1 : 0);
      const int je = g.jm + (d == 1 ? 1 : 0);
      const int ke = g.km + (d == 2 ? 1 : 0);
      for (int k = 1; k <= ke; ++k)
        for (int j = 1; j <= je; ++j)
          for (int i = 1; i <= ie; ++i) {
            const Term t = stencil_term(vel, g, c, d, Index3{i, j, k});
            cf(i, j, k) = t.cov;
            df(i, j, k) = t.diu;
          }
    }
  }

  for_interior(g, [&](Index3 p) {
    for (int c = 0; c < 3; ++c) {
      StencilPair here;
      StencilPair p1;
      for (int d = 0; d < 3; ++d) {
        const auto sc = static_cast<std::size_t>(c);
        const auto sd = static_cast<std::size_t>(d);
        here.cov[sd] = at(cov[sc][sd], p);
        here.diu[sd] = at(diu[sc][sd], p);
        p1.cov[sd] = at(cov[sc][sd], p.shifted(d, 1));
        p1.diu[sd] = at(diu[sc][sd], p.shifted(d, 1));
      }
      const Combined t = combine(g, c, p, here, p1);
      at(s.fgh, p)[static_cast<std::size_t>(c)] = -t.covc + s.vn * t.dfu;
    }
  });
}

void feedbf(FlowState& s) {
  const auto vel = s.velocity();
  for_interior(s.grid, [&](Index3 p) {
    const float m = at(s.mask, p);
    if (m == 0.0f) return;
    auto& f = at(s.fgh, p);
    for (std::size_t c = 0; c < 3; ++c) f[c] -= (m / s.dt) * at(*vel[c], p);
  });
}

ScalarField eddy_viscosity(const FlowState& s) {
  const Grid& g = s.grid;
  ScalarField nu = g.make_field<float>();

  auto centre_span = [&](int d, int idx) {
    return 0.5 * spacing(g, d, idx - 1) + spacing(g, d, idx) +
           0.5 * spacing(g, d, idx + 1);
  };
  // Component c averaged onto the centre of the cell at q.
  auto centred = [&](int c, Index3 q) {
    const ScalarField& f = *s.velocity()[static_cast<std::size_t>(c)];
    return 0.5 * (static_cast<double>(at(f, q)) + at(f, q.shifted(c, -1)));
  };

  for_interior(g, [&](Index3 p) {
    double grad[3][3];  // grad[c][d] = d(vel_c)/d(x_d)
    for (int c = 0; c < 3; ++c) {
      const ScalarField& f = *s.velocity()[static_cast<std::size_t>(c)];
      for (int d = 0; d < 3; ++d) {
        if (c == d) {
          grad[c][d] = (static_cast<double>(at(f, p)) - at(f, p.shifted(c, -1))) /
                       spacing(g, d, p[d]);
        } else {
          grad[c][d] = (centred(c, p.shifted(d, 1)) - centred(c, p.shifted(d, -1))) /
                       centre_span(d, p[d]);
        }
      }
    }
    double ss = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double sab = 0.5 * (grad[a][b] + grad[b][a]);
        ss += sab * sab;
      }
    const double delta = std::cbrt(static_cast<double>(g.dx(p.i)) * g.dy(p.j) *
                                   g.dz(p.k));
    const double l = static_cast<double>(s.cs) * delta;
    at(nu, p) = static_cast<float>(l * l * std::sqrt(ss));
  });

  // Zero-gradient halo.
  for (int k = 0; k <= g.km + 1; ++k)
    for (int j = 0; j <= g.jm + 1; ++j)
      for (int i = 0; i <= g.im + 1; ++i) {
        if (!nu.is_halo(i, j, k)) continue;
        nu(i, j, k) = nu(std::clamp(i, 1, g.im), std::clamp(j, 1, g.jm),
                         std::clamp(k, 1, g.km));
      }
  return nu;
}

void les_viscosity(FlowState& s) {
  if (s.cs == 0.0f) return;
  const Grid& g = s.grid;
  const ScalarField nu = eddy_viscosity(s);
  const ConstVelocity vel = {&s.u, &s.v, &s.w};
  for_interior(g, [&](Index3 p) {
    Vec3f f = at(s.fgh, p);
    for (int c = 0; c < 3; ++c) {
      StencilPair here;
      StencilPair p1;
      stencils_at(vel, g, c, p, here, p1);
      const float dfu = combine(g, c, p, here, p1).dfu;
      const float nu_face = 0.5f * (at(nu, p) + at(nu, p.shifted(c, 1)));
      f[static_cast<std::size_t>(c)] += nu_face * dfu;
    }
    at(s.fgh, p) = f;
  });
}

void adam(FlowState& s) {
  auto cur = s.fgh.data();
  auto old = s.fgh_old.data();
  auto mask = s.mask.data();
  for (std::size_t n = 0; n < cur.size(); ++n) {
    const Vec3f before = cur[n];
    // Solid cells take the current force only: extrapolating the feedback
    // term leaves an undamped (-1)^n mode.
    const double fluid = 1.0 - static_cast<double>(mask[n]);
    for (std::size_t c = 0; c < 3; ++c) {
      // Exact in double for float inputs, so constant histories are kept.
      const double f = before[c];
      cur[n][c] = static_cast<float>(f + fluid * 0.5 * (f - static_cast<double>(old[n][c])));
    }
    old[n] = before;
  }
}

ScalarField divergence(const Grid& g, const ScalarField& u,
                       const ScalarField& v, const ScalarField& w) {
  ScalarField div = g.make_field<float>();
  for_interior(g, [&](Index3 p) {
    const auto [i, j, k] = p;
    at(div, p) = (u(i, j, k) - u(i - 1, j, k)) / g.dx(i) +
                 (v(i, j, k) - v(i, j - 1, k)) / g.dy(j) +
                 (w(i, j, k) - w(i, j, k - 1)) / g.dz(k);
  });
  return div;
}

SorCoeffs pressure_coeffs(const Grid& g) {
  g.validate();
  auto coupling = [&](int d, int idx, int nb) {
    return 2.0f / (spacing(g, d, idx) * (spacing(g, d, idx) + spacing(g, d, nb)));
  };
  SorCoeffs c;
  c.cn2l.resize(static_cast<std::size_t>(g.im));
  c.cn2s.resize(static_cast<std::size_t>(g.im));
  c.cn3l.resize(static_cast<std::size_t>(g.jm));
  c.cn3s.resize(static_cast<std::size_t>(g.jm));
  c.cn4l.resize(static_cast<std::size_t>(g.km));
  c.cn4s.resize(static_cast<std::size_t>(g.km));
  for (int i = 1; i <= g.im; ++i) {
    const auto n = static_cast<std::size_t>(i - 1);
    c.cn2l[n] = coupling(0, i, i + 1);  // open outflow past im
    c.cn2s[n] = i == 1 ? 0.0f : coupling(0, i, i - 1);
  }
  for (int j = 1; j <= g.jm; ++j) {
    const auto n = static_cast<std::size_t>(j - 1);
    c.cn3l[n] = j == g.jm ? 0.0f : coupling(1, j, j + 1);
    c.cn3s[n] = j == 1 ? 0.0f : coupling(1, j, j - 1);
  }
  for (int k = 1; k <= g.km; ++k) {
    const auto n = static_cast<std::size_t>(k - 1);
    c.cn4l[n] = k == g.km ? 0.0f : coupling(2, k, k + 1);
    c.cn4s[n] = k == 1 ? 0.0f : coupling(2, k, k - 1);
  }
  c.cn1 = g.make_field<float>();
  for_interior(g, [&](Index3 p) {
    const auto [i, j, k] = p;
    const float sum = c.cn2l[static_cast<std::size_t>(i - 1)] +
                      c.cn2s[static_cast<std::size_t>(i - 1)] +
                      c.cn3l[static_cast<std::size_t>(j - 1)] +
                      c.cn3s[static_cast<std::size_t>(j - 1)] +
                      c.cn4l[static_cast<std::size_t>(k - 1)] +
                      c.cn4s[static_cast<std::size_t>(k - 1)];
    at(c.cn1, p) = 1.0f / sum;
  });
  return c;
}

ScalarField provisional_divergence(const FlowState& s) {
  const Grid& g = s.grid;
  ScalarField us = s.u;
  ScalarField vs = s.v;
  ScalarField ws = s.w;
  std::array<ScalarField*, 3> star = {&us, &vs, &ws};
  for (int c = 0; c < 3; ++c) {
    ScalarField& f = *star[static_cast<std::size_t>(c)];
    for_free_faces(g, c, [&](Index3 q) {
      at(f, q) += s.dt * at(s.fgh, q)[static_cast<std::size_t>(c)];
    });
  }
  return divergence(g, us, vs, ws);
}

std::vector<double> press(FlowState& s, const PressOptions& opts) {
  ScalarField rhs = provisional_divergence(s);
  for (float& x : rhs.data()) x /= s.dt;

  const SorCoeffs coeffs = pressure_coeffs(s.grid);
  const float omega = opts.omega.value_or(default_omega(opts.scheme));
  PressureSolution sol = solve_pressure(s.p, rhs, coeffs, omega, opts.n_iter,
                                        opts.scheme, opts.workers);
  s.p = std::move(sol.p);
  return sol.residuals;
}

double max_abs_interior(const ScalarField& f) {
  double m = 0.0;
  for (int k = 1; k <= f.km(); ++k)
    for (int j = 1; j <= f.jm(); ++j)
      for (int i = 1; i <= f.im(); ++i)
        m = std::max(m, std::abs(static_cast<double>(f(i, j, k))));
  return m;
}

void check_finite(const FlowState& s, std::string_view stage) {
  if (all_finite(s.u) && all_finite(s.v) && all_finite(s.w) &&
      all_finite(s.fgh) && all_finite(s.p)) {
    return;
  }
  throw NumericalError(std::string(stage),
                       "les: non-finite field values after stage '" +
                           std::string(stage) + "'");
}

std::vector<double> step(FlowState& s, const WindProfile& inflow,
                         const PressOptions& opts) {
  velnw(s);
  check_finite(s, "velnw");
  bondv1(s, inflow);
  check_finite(s, "bondv1");
  velfg_merged(s);
  check_finite(s, "velfg");
  feedbf(s);
  check_finite(s, "feedbf");
  les_viscosity(s);
  check_finite(s, "les");
  adam(s);
  check_finite(s, "adam");
  auto residuals = press(s, opts);
  check_finite(s, "press");
  return residuals;
}

}  // namespace gmcf
