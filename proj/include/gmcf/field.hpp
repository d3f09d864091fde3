#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmcf/errors.hpp"

namespace gmcf {

using Vec3f = std::array<float, 3>;
// Element of a twinned array: component b holds buffer b of the double buffer.
using Twin = std::array<float, 2>;

/// Cell-centred 3-D array over an interior of im x jm x km cells plus a halo
/// of width one, indexed (i, j, k) with i, j, k in [0, im+1] x [0, jm+1] x
/// [0, km+1]. Storage is i-fastest (Fortran order).
template <typename T>
class Field3D {
 public:
  Field3D() = default;
  Field3D(int im, int jm, int km, T fill = T{})
      : im_(im), jm_(jm), km_(km) {
    if (im < 1 || jm < 1 || km < 1) {
      throw ShapeError("Field3D: interior extents must be >= 1");
    }
    data_.assign(static_cast<std::size_t>(im + 2) * (jm + 2) * (km + 2), fill);
  }

  int im() const noexcept { return im_; }
  int jm() const noexcept { return jm_; }
  int km() const noexcept { return km_; }

  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(k) * (jm_ + 2) + j) * (im_ + 2) + i;
  }

  T& operator()(int i, int j, int k) noexcept { return data_[index(i, j, k)]; }
  const T& operator()(int i, int j, int k) const noexcept {
    return data_[index(i, j, k)];
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool is_halo(int i, int j, int k) const noexcept {
    return i == 0 || j == 0 || k == 0 || i == im_ + 1 || j == jm_ + 1 ||
           k == km_ + 1;
  }

  template <typename U>
  bool same_shape(const Field3D<U>& other) const noexcept {
    return im_ == other.im() && jm_ == other.jm() && km_ == other.km();
  }

  void fill(const T& value) { data_.assign(data_.size(), value); }

  bool operator==(const Field3D&) const = default;

 private:
  int im_ = 0;
  int jm_ = 0;
  int km_ = 0;
  std::vector<T> data_;
};

using ScalarField = Field3D<float>;
using VectorField = Field3D<Vec3f>;
using TwinnedField3D = Field3D<Twin>;

template <typename T, typename U>
void require_same_shape(const Field3D<T>& a, const Field3D<U>& b,
                        const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": field dimensions differ");
  }
}

/// Structured grid with per-axis spacing arrays.
///
/// dx1 covers i in [-1, im+1] (im+3 entries), dy1 covers j in [0, jm+1] and
/// dzn covers k in [0, km+1]. Use the accessors rather than raw offsets.
struct Grid {
  int im = 0;
  int jm = 0;
  int km = 0;
  std::vector<float> dx1;
  std::vector<float> dy1;
  std::vector<float> dzn;

  static Grid uniform(int im, int jm, int km, float h);

  float dx(int i) const noexcept { return dx1[static_cast<std::size_t>(i + 1)]; }
  float dy(int j) const noexcept { return dy1[static_cast<std::size_t>(j)]; }
  float dz(int k) const noexcept { return dzn[static_cast<std::size_t>(k)]; }

  // Throws ShapeError / ConfigError when the invariants do not hold.
  void validate() const;

  // The common spacing when every entry of every axis is identical.
  std::optional<float> uniform_spacing() const;

  template <typename T>
  Field3D<T> make_field(T fill = T{}) const {
    return Field3D<T>(im, jm, km, fill);
  }
};

}  // namespace gmcf
