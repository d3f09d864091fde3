#include "gmcf/field.hpp"

#include <algorithm>

namespace gmcf {

Grid Grid::uniform(int im, int jm, int km, float h) {
  Grid g;
  g.im = im;
  g.jm = jm;
  g.km = km;
  g.dx1.assign(static_cast<std::size_t>(im + 3), h);
  g.dy1.assign(static_cast<std::size_t>(jm + 2), h);
  g.dzn.assign(static_cast<std::size_t>(km + 2), h);
  g.validate();
  return g;
}

void Grid::validate() const {
  if (im < 1 || jm < 1 || km < 1) {
    throw ShapeError("grid: im, jm, km must be >= 1");
  }
  if (dx1.size() != static_cast<std::size_t>(im + 3) ||
      dy1.size() != static_cast<std::size_t>(jm + 2) ||
      dzn.size() != static_cast<std::size_t>(km + 2)) {
    throw ShapeError("grid: spacing array lengths must be im+3, jm+2, km+2");
  }
  auto positive = [](const std::vector<float>& a) {
    return std::all_of(a.begin(), a.end(), [](float x) { return x > 0.0f; });
  };
  if (!positive(dx1) || !positive(dy1) || !positive(dzn)) {
    throw ConfigError("grid: all spacings must be > 0");
  }
}

std::optional<float> Grid::uniform_spacing() const {
  if (dx1.empty()) return std::nullopt;
  const float h = dx1.front();
  auto all_h = [h](const std::vector<float>& a) {
    return std::all_of(a.begin(), a.end(), [h](float x) { return x == h; });
  };
  if (all_h(dx1) && all_h(dy1) && all_h(dzn)) return h;
  return std::nullopt;
}

}  // namespace gmcf
