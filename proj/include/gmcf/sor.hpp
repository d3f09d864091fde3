#pragma once

#include <vector>

#include "gmcf/field.hpp"

namespace gmcf {

enum class SorScheme { RedBlack, Twinned };

inline constexpr float kDefaultOmegaRedBlack = 1.7f;
inline constexpr float kDefaultOmegaTwinned = 1.0f;
inline constexpr int kDefaultSorIterations = 50;

constexpr float default_omega(SorScheme s) noexcept {
  return s == SorScheme::RedBlack ? kDefaultOmegaRedBlack
                                  : kDefaultOmegaTwinned;
}

/// Stencil coefficients of the pressure update. cn2*/cn3*/cn4* are indexed
/// by i-1, j-1 and k-1 respectively; cn1 uses the interior of a field.
struct SorCoeffs {
  ScalarField cn1;
  std::vector<float> cn2l, cn2s;
  std::vector<float> cn3l, cn3s;
  std::vector<float> cn4l, cn4s;
};

// cn2l = ... = cn4s = 1/h^2 and cn1 = h^2/6. Throws UnsupportedError for a
// grid whose spacings are not all equal.
SorCoeffs build_uniform_coeffs(const Grid& grid);

// All iterations below treat the halo of p as fixed (Dirichlet) values.

/// One red-black iteration (both colour passes) in place. Returns the sum of
/// squared corrections.
double redblack_iteration(ScalarField& p, const ScalarField& rhs,
                          const SorCoeffs& c, float omega);

/// Double-buffer sweep over every interior cell: reads component `nrd` and
/// writes component 1 - nrd. The source component is left untouched.
double twinned_sweep(TwinnedField3D& tp, const ScalarField& rhs,
                     const SorCoeffs& c, float omega, int nrd);

// Copies p (halo included) into both components.
TwinnedField3D pack_twinned(const ScalarField& p);
ScalarField unpack_twinned(const TwinnedField3D& tp, int component);

struct PressureSolution {
  ScalarField p;
  std::vector<double> residuals;  // one entry per iteration
};

/// Runs n_iter iterations of the chosen scheme starting from p0. For the
/// twinned scheme the k-planes are split over `workers` threads; results do
/// not depend on the worker count. The red-black scheme is single-worker.
PressureSolution solve_pressure(const ScalarField& p0, const ScalarField& rhs,
                                const SorCoeffs& c, float omega, int n_iter,
                                SorScheme scheme, int workers = 1);

}  // namespace gmcf
