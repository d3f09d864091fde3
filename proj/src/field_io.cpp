#include "gmcf/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gmcf {

namespace {

constexpr char kMagic[4] = {'G', 'M', 'C', 'F'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(sizeof(T) == 4);
  auto bits = std::bit_cast<std::uint32_t>(value);
  for (int b = 0; b < 4; ++b) {
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
  }
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + b]))
            << (8 * b);
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    os.flush();
    if (!os) {
      os.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot replace " + path.string() + ": " + ec.message());
  }
}

std::string encode_field(const ScalarField& f) {
  std::string out;
  out.reserve(16 + 4 * static_cast<std::size_t>(f.im()) * f.jm() * f.km());
  out.append(kMagic, 4);
  put_le<std::int32_t>(out, f.im());
  put_le<std::int32_t>(out, f.jm());
  put_le<std::int32_t>(out, f.km());
  for (int k = 1; k <= f.km(); ++k)
    for (int j = 1; j <= f.jm(); ++j)
      for (int i = 1; i <= f.im(); ++i) put_le<float>(out, f(i, j, k));
  return out;
}

DecodedField decode_field(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("field dump: bad magic");
  }
  DecodedField d;
  d.im = get_le<std::int32_t>(bytes, 4);
  d.jm = get_le<std::int32_t>(bytes, 8);
  d.km = get_le<std::int32_t>(bytes, 12);
  if (d.im < 0 || d.jm < 0 || d.km < 0) throw std::runtime_error("field dump: bad dims");
  const auto n = static_cast<std::size_t>(d.im) * d.jm * d.km;
  if (bytes.size() != 16 + 4 * n) throw std::runtime_error("field dump: size mismatch");
  d.values.resize(n);
  for (std::size_t x = 0; x < n; ++x) d.values[x] = get_le<float>(bytes, 16 + 4 * x);
  return d;
}

void dump_field(const std::filesystem::path& dir, const std::string& name,
                const ScalarField& f, std::string_view units) {
  std::ostringstream hdr;
  hdr << "name = " << name << "\n"
      << "format = GMCF\n"
      << "dtype = float32le\n"
      << "dims = " << f.im() << " " << f.jm() << " " << f.km() << "\n"
      << "order = i,j,k (i fastest)\n"
      << "units = " << units << "\n";
  write_file_atomic(dir / (name + ".bin"), encode_field(f));
  write_file_atomic(dir / (name + ".hdr"), hdr.str());
}

}  // namespace gmcf
