#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cht/grid.hpp"

namespace cht {

/// A field captured at one sample time.
struct Snapshot {
  std::string name;
  double t = 0.0;
  Field field;
};

// CSV layout:
//   # dim=2 extents=1,1 cells=64,64 field=u t=0.5
//   then cells(1) lines of cells(0) comma-separated values (row j = y index),
//   printed with 17 significant digits so values round-trip exactly.
void write_snapshot_csv(std::ostream& out, const Snapshot& snap);
Snapshot read_snapshot_csv(std::istream& in);

// Binary layout, all little-endian:
//   bytes  0..7   magic "CHTSNAP1"
//          8..11  uint32 dim
//         12..15  uint32 cells x
//         16..19  uint32 cells y (1 for 1D)
//         20..23  uint32 length of the field name in bytes
//         24..31  float64 extent x
//         32..39  float64 extent y
//         40..47  float64 sample time
//         48..    field name (no terminator), then cells x * cells y float64
//                 values, x fastest
void write_snapshot_binary(std::ostream& out, const Snapshot& snap);
Snapshot read_snapshot_binary(std::istream& in);

/// Writes `<dir>/<name>_<index>.csv`; returns the path.
std::filesystem::path save_snapshot_csv(const std::filesystem::path& dir, const Snapshot& snap,
                                        std::size_t index);

}  // namespace cht
