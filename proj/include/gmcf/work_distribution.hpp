#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace gmcf {

// Boundary face families, in the order the boundary range enumerates them.
enum class Face { YZ, ZX, XY };

const char* to_string(Face f) noexcept;

/// A point on one boundary face. `coords` holds the two in-face indices:
/// (j, k) for YZ, (k, i) for ZX and (j, i) for XY.
struct BoundaryPoint {
  Face face = Face::YZ;
  std::array<std::int64_t, 2> coords{};

  bool operator==(const BoundaryPoint&) const = default;
};

// jp*kp + kp*ip + jp*ip.
std::int64_t boundary_range(std::int64_t ip, std::int64_t jp, std::int64_t kp);

/// Decodes a global id of the boundary range. Ids at or past
/// boundary_range(ip, jp, kp) are padding and yield std::nullopt.
std::optional<BoundaryPoint> map_boundary_gid(std::int64_t gid, std::int64_t ip,
                                              std::int64_t jp, std::int64_t kp);

// Rounds range up to a multiple of nthreads * nunits.
std::int64_t padded_range(std::int64_t range, std::int64_t nthreads,
                          std::int64_t nunits);

struct BoundaryAudit {
  std::int64_t boundary_range = 0;
  std::int64_t padded_range = 0;
  std::int64_t covered = 0;  // distinct boundary points hit
  std::int64_t padding = 0;  // gids that decoded to padding
  std::optional<std::int64_t> first_offending_gid;
  std::string violation;

  bool ok() const noexcept { return !first_offending_gid.has_value(); }
};

/// Enumerates every gid of the padded range and checks that each boundary
/// point is hit exactly once and that every id past the boundary range is
/// padding.
BoundaryAudit audit_boundary_coverage(std::int64_t ip, std::int64_t jp,
                                      std::int64_t kp, std::int64_t nthreads,
                                      std::int64_t nunits);

}  // namespace gmcf
