#pragma once

#include <cstdint>
#include <vector>

namespace gmcf {

// Time stamps are counted in microsteps: the smallest model time step of the
// configuration.
using Microsteps = std::int64_t;

/// Vertical (u, v, w) profile in m/s, one value per level, stamped with the
/// producer's model time.
struct WindProfile {
  std::vector<float> u;
  std::vector<float> v;
  std::vector<float> w;
  Microsteps t = 0;

  int levels() const noexcept { return static_cast<int>(u.size()); }

  // Throws ShapeError unless u, v, w have the same length >= 1.
  void validate() const;

  static WindProfile zeros(int levels, Microsteps t = 0);

  bool operator==(const WindProfile&) const = default;
};

}  // namespace gmcf
