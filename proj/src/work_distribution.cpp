#include "gmcf/work_distribution.hpp"

#include <stdexcept>
#include <vector>

namespace gmcf {

const char* to_string(Face f) noexcept {
  switch (f) {
    case Face::YZ: return "YZ";
    case Face::ZX: return "ZX";
    case Face::XY: return "XY";
  }
  return "?";
}

std::int64_t boundary_range(std::int64_t ip, std::int64_t jp, std::int64_t kp) {
  if (ip < 1 || jp < 1 || kp < 1) {
    throw std::invalid_argument("boundary_range: extents must be >= 1");
  }
  return jp * kp + kp * ip + jp * ip;
}

std::optional<BoundaryPoint> map_boundary_gid(std::int64_t gid, std::int64_t ip,
                                              std::int64_t jp, std::int64_t kp) {
  if (gid < 0) throw std::invalid_argument("map_boundary_gid: gid must be >= 0");
  if (gid < jp * kp) {
    return BoundaryPoint{Face::YZ, {gid % jp, gid / jp}};
  }
  if (gid < jp * kp + kp * ip) {
    const std::int64_t r = gid - jp * kp;
    return BoundaryPoint{Face::ZX, {r / ip, r % ip}};
  }
  if (gid < jp * kp + kp * ip + jp * ip) {
    const std::int64_t r = gid - jp * kp - kp * ip;
    return BoundaryPoint{Face::XY, {r / ip, r % ip}};
  }
  return std::nullopt;
}

std::int64_t padded_range(std::int64_t range, std::int64_t nthreads,
                          std::int64_t nunits) {
  if (range < 0 || nthreads < 1 || nunits < 1) {
    throw std::invalid_argument("padded_range: bad arguments");
  }
  const std::int64_t m = nthreads * nunits;
  if (range % m != 0) range += m - (range % m);
  return range;
}

BoundaryAudit audit_boundary_coverage(std::int64_t ip, std::int64_t jp,
                                      std::int64_t kp, std::int64_t nthreads,
                                      std::int64_t nunits) {
  BoundaryAudit a;
  a.boundary_range = boundary_range(ip, jp, kp);
  a.padded_range = padded_range(a.boundary_range, nthreads, nunits);

  // One hit counter per (face, point): YZ is jp x kp, ZX kp x ip, XY jp x ip.
  std::vector<int> yz(static_cast<std::size_t>(jp * kp), 0);
  std::vector<int> zx(static_cast<std::size_t>(kp * ip), 0);
  std::vector<int> xy(static_cast<std::size_t>(jp * ip), 0);

  auto flag = [&a](std::int64_t gid, std::string why) {
    if (!a.first_offending_gid) {
      a.first_offending_gid = gid;
      a.violation = std::move(why);
    }
  };

  for (std::int64_t gid = 0; gid < a.padded_range; ++gid) {
    const auto pt = map_boundary_gid(gid, ip, jp, kp);
    if (!pt) {
      ++a.padding;
      if (gid < a.boundary_range) flag(gid, "boundary gid decoded as padding");
      continue;
    }
    if (gid >= a.boundary_range) {
      flag(gid, "padding gid decoded as a boundary point");
      continue;
    }
    const auto [c0, c1] = pt->coords;
    int* slot = nullptr;
    switch (pt->face) {
      case Face::YZ:  // (j, k)
        if (c0 < jp && c1 < kp) slot = &yz[static_cast<std::size_t>(c1 * jp + c0)];
        break;
      case Face::ZX:  // (k, i)
        if (c0 < kp && c1 < ip) slot = &zx[static_cast<std::size_t>(c0 * ip + c1)];
        break;
      case Face::XY:  // (j, i)
        if (c0 < jp && c1 < ip) slot = &xy[static_cast<std::size_t>(c0 * ip + c1)];
        break;
    }
    if (slot == nullptr || c0 < 0 || c1 < 0) {
      flag(gid, "coordinates outside the face");
      continue;
    }
    if (++*slot > 1) flag(gid, "boundary point hit twice");
  }

  for (const auto* face : {&yz, &zx, &xy}) {
    for (int hits : *face) {
      if (hits == 1) ++a.covered;
    }
  }
  if (a.ok() && a.covered != a.boundary_range) {
    a.first_offending_gid = a.boundary_range;
    a.violation = "boundary points left uncovered";
  }
  return a;
}

}  // namespace gmcf
