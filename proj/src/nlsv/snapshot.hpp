#pragma once

#include <optional>
#include <string>

#include "nlsv/grid_field.hpp"

namespace nlsv {

// Binary field snapshot, all numbers little-endian:
//   bytes 0..4    magic "NLSF1"
//   bytes 5..12   n as uint64
//   bytes 13..20  box_length as IEEE-754 binary64
//   bytes 21..24  layout tag "XYZR": row-major, x fastest, z slowest
//   then n^3 samples, each (re, im) as two binary64
inline constexpr char kSnapshotMagic[5] = {'N', 'L', 'S', 'F', '1'};
inline constexpr char kSnapshotLayout[4] = {'X', 'Y', 'Z', 'R'};

void save_snapshot(const Field& f, const std::string& path);

/// Throws ErrorCode::Io on read failures and ErrorCode::InvalidArgument when
/// `expected` is given and the stored grid differs.
Field load_snapshot(const std::string& path, const std::optional<Grid>& expected = std::nullopt);

}  // namespace nlsv
