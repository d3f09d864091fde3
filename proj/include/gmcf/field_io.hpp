#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gmcf/field.hpp"

namespace gmcf {

// Writes `contents` to a temporary sibling and renames it into place, so
// the target is either complete or absent.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Binary field dump: "GMCF", int32 im, jm, km (interior extents), then the
/// interior as little-endian float32 with i varying fastest, then j, then k.
std::string encode_field(const ScalarField& f);

struct DecodedField {
  int im = 0, jm = 0, km = 0;
  std::vector<float> values;  // i fastest
};

// Throws std::runtime_error on a malformed buffer.
DecodedField decode_field(std::string_view bytes);

/// Writes <dir>/<name>.bin and the sidecar <dir>/<name>.hdr.
void dump_field(const std::filesystem::path& dir, const std::string& name,
                const ScalarField& f, std::string_view units);

}  // namespace gmcf
