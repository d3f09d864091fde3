#include "gmcf/wind_profile.hpp"

#include "gmcf/errors.hpp"

namespace gmcf {

void WindProfile::validate() const {
  if (u.empty()) throw ShapeError("wind profile: at least one level required");
  if (v.size() != u.size() || w.size() != u.size()) {
    throw ShapeError("wind profile: u, v, w lengths differ");
  }
}

WindProfile WindProfile::zeros(int levels, Microsteps t) {
  const auto n = static_cast<std::size_t>(levels);
  WindProfile p{std::vector<float>(n, 0.0f), std::vector<float>(n, 0.0f),
                std::vector<float>(n, 0.0f), t};
  p.validate();
  return p;
}

}  // namespace gmcf
