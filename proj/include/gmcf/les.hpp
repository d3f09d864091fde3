#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "gmcf/field.hpp"
#include "gmcf/sor.hpp"
#include "gmcf/wind_profile.hpp"

namespace gmcf {

/// Prognostic state of the miniature LES.
///
/// Staggering: u(i,j,k) sits on the east face of cell (i,j,k), v on the
/// north face and w on the top face, so u(0,·,·) is the west (inflow)
/// boundary face. p and mask are cell centred. fgh holds the merged
/// (x, y, z) force on the corresponding velocity points.
struct FlowState {
  Grid grid;
  ScalarField u, v, w;
  VectorField fgh;
  VectorField fgh_old;
  ScalarField p;
  ScalarField mask;  // 1 = solid
  float dt = 0.0f;   // s
  float vn = 0.0f;   // molecular viscosity, m^2/s
  float cs = 0.0f;   // Smagorinsky constant

  static FlowState create(Grid grid, float dt, float vn, float cs);
  void validate() const;

  std::array<ScalarField*, 3> velocity() { return {&u, &v, &w}; }
  std::array<const ScalarField*, 3> velocity() const { return {&u, &v, &w}; }
};

/// Advection (cov) and first-derivative diffusion (diu) terms of one
/// momentum component, one entry per direction.
struct StencilPair {
  Vec3f cov{};
  Vec3f diu{};
};

struct PressOptions {
  int n_iter = kDefaultSorIterations;
  SorScheme scheme = SorScheme::RedBlack;
  std::optional<float> omega;  // scheme default when empty
  int workers = 1;
};

// Pipeline stages, in the order step() applies them.
// u += dt (fgh.x - dp/dx) and likewise for v, w, on every interior face
// except the wall faces v(·,jm,·) and w(·,·,km), which stay zero.
void velnw(FlowState& s);
// Halo values only: west inflow from the profile, east zero-gradient
// outflow, free-slip walls on the sides, ground and lid.
void bondv1(FlowState& s, const WindProfile& inflow);
void velfg_merged(FlowState& s);
void feedbf(FlowState& s);
void les_viscosity(FlowState& s);
// fgh <- 1.5 fgh - 0.5 fgh_old, blended to plain fgh as mask -> 1;
// fgh_old <- fgh before the call.
void adam(FlowState& s);
std::vector<double> press(FlowState& s, const PressOptions& opts = {});

/// Reference form of velfg: materialises cov/diu over the whole domain, then
/// combines neighbouring values. Kept as the equivalence oracle for
/// velfg_merged.
void velfg_twopass(FlowState& s);

/// One time step: velnw, bondv1, velfg, feedbf, les, adam, press. Throws
/// NumericalError naming the first stage that produced a non-finite value.
std::vector<double> step(FlowState& s, const WindProfile& inflow,
                         const PressOptions& opts = {});

// Smagorinsky eddy viscosity (cs * delta)^2 * |S| at cell centres, with
// |S| = sqrt(S_ij S_ij). The halo copies the nearest interior value.
ScalarField eddy_viscosity(const FlowState& s);

/// Poisson coefficients matching velnw's pressure gradient: walls (west
/// inflow, sides, ground, lid) are closed, so their couplings are zero; the
/// east outflow couples to the held p = 0 halo.
SorCoeffs pressure_coeffs(const Grid& g);

// div(u + dt fgh) over the interior, with fgh applied on the faces velnw owns.
ScalarField provisional_divergence(const FlowState& s);

// Discrete divergence of (u, v, w) at cell centres (interior only).
ScalarField divergence(const Grid& g, const ScalarField& u,
                       const ScalarField& v, const ScalarField& w);

double max_abs_interior(const ScalarField& f);

void check_finite(const FlowState& s, std::string_view stage);

}  // namespace gmcf
