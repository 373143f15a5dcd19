#include "nlsv/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nlsv/error.hpp"

namespace nlsv {

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    fail(ErrorCode::Io, "snapshot " + path + ": truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void save_snapshot(const Field& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorCode::Io, "snapshot " + path + ": cannot open for writing");
  os.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid().n()));
  put_le<double>(os, f.grid().box_length());
  os.write(kSnapshotLayout, sizeof(kSnapshotLayout));
  for (const auto& v : f.values()) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
  if (!os) fail(ErrorCode::Io, "snapshot " + path + ": write failed");
}

Field load_snapshot(const std::string& path, const std::optional<Grid>& expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "snapshot " + path + ": cannot open for reading");
  char magic[sizeof(kSnapshotMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
    fail(ErrorCode::Io, "snapshot " + path + ": bad magic (expected NLSF1)");
  const auto n = get_le<std::uint64_t>(is, path);
  const auto box_length = get_le<double>(is, path);
  char layout[sizeof(kSnapshotLayout)];
  if (!is.read(layout, sizeof(layout)) || std::memcmp(layout, kSnapshotLayout, sizeof(layout)) != 0)
    fail(ErrorCode::Io, "snapshot " + path + ": unknown layout tag");
  if (n < 8 || n > 4096) fail(ErrorCode::Io, "snapshot " + path + ": implausible n = " + std::to_string(n));
  if (expected) {
    if (static_cast<std::uint64_t>(expected->n()) != n) {
      std::ostringstream msg;
      msg << "snapshot " << path << ": grid mismatch, expected n = " << expected->n()
          << ", actual n = " << n;
      fail(ErrorCode::InvalidArgument, msg.str());
    }
    if (expected->box_length() != box_length) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "snapshot " << path << ": grid mismatch, expected box_length = "
          << expected->box_length() << ", actual box_length = " << box_length;
      fail(ErrorCode::InvalidArgument, msg.str());
    }
  }
  Grid grid(static_cast<int>(n), box_length);
  Field f(grid);
  for (auto& v : f.values()) {
    const double re = get_le<double>(is, path);
    const double im = get_le<double>(is, path);
    v = Complex(re, im);
  }
  return f;
}

}  // namespace nlsv
