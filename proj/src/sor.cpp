#include "gmcf/sor.hpp"

#include <algorithm>
#include <array>
#include <barrier>
#include <string>
#include <thread>

#include "gmcf/errors.hpp"

namespace gmcf {

namespace {

void check_inputs(const ScalarField& rhs, const SorCoeffs& c, int im, int jm,
                  int km, const char* what) {
  auto fail = [what](const std::string& m) {
    throw ShapeError(std::string(what) + ": " + m);
  };
  if (rhs.im() != im || rhs.jm() != jm || rhs.km() != km) {
    fail("rhs dimensions differ from p");
  }
  if (c.cn1.im() != im || c.cn1.jm() != jm || c.cn1.km() != km) {
    fail("cn1 dimensions differ from p");
  }
  const auto ui = static_cast<std::size_t>(im);
  const auto uj = static_cast<std::size_t>(jm);
  const auto uk = static_cast<std::size_t>(km);
  if (c.cn2l.size() != ui || c.cn2s.size() != ui || c.cn3l.size() != uj ||
      c.cn3s.size() != uj || c.cn4l.size() != uk || c.cn4s.size() != uk) {
    fail("coefficient array lengths do not match the grid");
  }
}

// Sum of squared corrections over one k-plane of the double-buffer sweep.
double twinned_plane(TwinnedField3D& tp, const ScalarField& rhs,
                     const SorCoeffs& c, float omega, int nrd, int k) {
  const int src = nrd;
  const int dst = 1 - nrd;
  const float c4l = c.cn4l[static_cast<std::size_t>(k - 1)];
  const float c4s = c.cn4s[static_cast<std::size_t>(k - 1)];
  double sor = 0.0;
  for (int j = 1; j <= tp.jm(); ++j) {
    const float c3l = c.cn3l[static_cast<std::size_t>(j - 1)];
    const float c3s = c.cn3s[static_cast<std::size_t>(j - 1)];
    for (int i = 1; i <= tp.im(); ++i) {
      const float pc = tp(i, j, k)[src];
      const float reltmp =
          omega * (c.cn1(i, j, k) *
                       (c.cn2l[static_cast<std::size_t>(i - 1)] * tp(i + 1, j, k)[src] +
                        c.cn2s[static_cast<std::size_t>(i - 1)] * tp(i - 1, j, k)[src] +
                        c3l * tp(i, j + 1, k)[src] + c3s * tp(i, j - 1, k)[src] +
                        c4l * tp(i, j, k + 1)[src] + c4s * tp(i, j, k - 1)[src] -
                        rhs(i, j, k)) -
                   pc);
      tp(i, j, k)[dst] = pc + reltmp;
      sor += static_cast<double>(reltmp) * static_cast<double>(reltmp);
    }
  }
  return sor;
}

double sum_in_order(const std::vector<double>& parts) {
  double s = 0.0;
  for (double x : parts) s += x;
  return s;
}

std::vector<double> solve_twinned(TwinnedField3D& tp, const ScalarField& rhs,
                                  const SorCoeffs& c, float omega, int n_iter,
                                  int workers) {
  const int km = tp.km();
  const int nworkers = std::clamp(workers, 1, km);
  std::array<std::vector<double>, 2> plane_sor{std::vector<double>(km, 0.0),
                                               std::vector<double>(km, 0.0)};
  std::vector<double> residuals(static_cast<std::size_t>(n_iter), 0.0);

  std::size_t phase = 0;
  auto on_phase_done = [&]() noexcept {
    if (phase % 2 == 1) {
      residuals[phase / 2] =
          sum_in_order(plane_sor[0]) + sum_in_order(plane_sor[1]);
    }
    ++phase;
  };
  std::barrier sync(nworkers, on_phase_done);

  auto work = [&](int w) {
    const int k0 = 1 + w * km / nworkers;
    const int k1 = 1 + (w + 1) * km / nworkers;
    for (int it = 0; it < n_iter; ++it) {
      for (int nrd = 0; nrd < 2; ++nrd) {
        for (int k = k0; k < k1; ++k) {
          plane_sor[static_cast<std::size_t>(nrd)][static_cast<std::size_t>(k - 1)] =
              twinned_plane(tp, rhs, c, omega, nrd, k);
        }
        sync.arrive_and_wait();
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < nworkers; ++w) pool.emplace_back(work, w);
    work(0);
  }
  return residuals;
}

}  // namespace

SorCoeffs build_uniform_coeffs(const Grid& grid) {
  grid.validate();
  const auto h = grid.uniform_spacing();
  if (!h) {
    throw UnsupportedError(
        "build_uniform_coeffs: grid spacing is not uniform");
  }
  const float inv_h2 = 1.0f / (*h * *h);
  SorCoeffs c;
  c.cn1 = grid.make_field<float>(*h * *h / 6.0f);
  c.cn2l.assign(static_cast<std::size_t>(grid.im), inv_h2);
  c.cn2s = c.cn2l;
  c.cn3l.assign(static_cast<std::size_t>(grid.jm), inv_h2);
  c.cn3s = c.cn3l;
  c.cn4l.assign(static_cast<std::size_t>(grid.km), inv_h2);
  c.cn4s = c.cn4l;
  return c;
}

double redblack_iteration(ScalarField& p, const ScalarField& rhs,
                          const SorCoeffs& c, float omega) {
  check_inputs(rhs, c, p.im(), p.jm(), p.km(), "redblack_iteration");
  double sor = 0.0;
  for (int nrd = 0; nrd < 2; ++nrd) {
    for (int k = 1; k <= p.km(); ++k) {
      const float c4l = c.cn4l[static_cast<std::size_t>(k - 1)];
      const float c4s = c.cn4s[static_cast<std::size_t>(k - 1)];
      for (int j = 1; j <= p.jm(); ++j) {
        const float c3l = c.cn3l[static_cast<std::size_t>(j - 1)];
        const float c3s = c.cn3s[static_cast<std::size_t>(j - 1)];
        for (int i = 1 + (k + j + nrd) % 2; i <= p.im(); i += 2) {
          const float reltmp =
              omega * (c.cn1(i, j, k) *
                           (c.cn2l[static_cast<std::size_t>(i - 1)] * p(i + 1, j, k) +
                            c.cn2s[static_cast<std::size_t>(i - 1)] * p(i - 1, j, k) +
                            c3l * p(i, j + 1, k) + c3s * p(i, j - 1, k) +
                            c4l * p(i, j, k + 1) + c4s * p(i, j, k - 1) -
                            rhs(i, j, k)) -
                       p(i, j, k));
          p(i, j, k) = p(i, j, k) + reltmp;
          sor += static_cast<double>(reltmp) * static_cast<double>(reltmp);
        }
      }
    }
    // Dirichlet halo: nothing to refresh between the colour passes.
  }
  return sor;
}

double twinned_sweep(TwinnedField3D& tp, const ScalarField& rhs,
                     const SorCoeffs& c, float omega, int nrd) {
  check_inputs(rhs, c, tp.im(), tp.jm(), tp.km(), "twinned_sweep");
  if (nrd != 0 && nrd != 1) {
    throw std::invalid_argument("twinned_sweep: nrd must be 0 or 1");
  }
  std::vector<double> planes(static_cast<std::size_t>(tp.km()));
  for (int k = 1; k <= tp.km(); ++k) {
    planes[static_cast<std::size_t>(k - 1)] =
        twinned_plane(tp, rhs, c, omega, nrd, k);
  }
  return sum_in_order(planes);
}

TwinnedField3D pack_twinned(const ScalarField& p) {
  TwinnedField3D tp(p.im(), p.jm(), p.km());
  auto src = p.data();
  auto dst = tp.data();
  for (std::size_t n = 0; n < src.size(); ++n) dst[n] = Twin{src[n], src[n]};
  return tp;
}

ScalarField unpack_twinned(const TwinnedField3D& tp, int component) {
  if (component != 0 && component != 1) {
    throw std::invalid_argument("unpack_twinned: component must be 0 or 1");
  }
  ScalarField p(tp.im(), tp.jm(), tp.km());
  auto src = tp.data();
  auto dst = p.data();
  for (std::size_t n = 0; n < src.size(); ++n) {
    dst[n] = src[n][static_cast<std::size_t>(component)];
  }
  return p;
}

PressureSolution solve_pressure(const ScalarField& p0, const ScalarField& rhs,
                                const SorCoeffs& c, float omega, int n_iter,
                                SorScheme scheme, int workers) {
  if (n_iter < 1) throw std::invalid_argument("solve_pressure: n_iter must be >= 1");
  if (workers < 1) throw std::invalid_argument("solve_pressure: workers must be >= 1");
  if (scheme == SorScheme::RedBlack && workers > 1) {
    throw UnsupportedError(
        "solve_pressure: the red-black scheme is single-worker; use the "
        "twinned scheme for workers > 1");
  }
  check_inputs(rhs, c, p0.im(), p0.jm(), p0.km(), "solve_pressure");

  PressureSolution out;
  if (scheme == SorScheme::RedBlack) {
    out.p = p0;
    out.residuals.reserve(static_cast<std::size_t>(n_iter));
    for (int it = 0; it < n_iter; ++it) {
      out.residuals.push_back(redblack_iteration(out.p, rhs, c, omega));
    }
    return out;
  }

  TwinnedField3D tp = pack_twinned(p0);
  out.residuals = solve_twinned(tp, rhs, c, omega, n_iter, workers);
  // After the nrd = 1 sweep the newest iterate sits in component 0.
  out.p = unpack_twinned(tp, 0);
  return out;
}

}  // namespace gmcf
