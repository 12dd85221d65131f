#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace shapepose {

struct VoxelCoord {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::uint16_t z = 0;

  bool operator==(const VoxelCoord&) const = default;
};

/// Raster order: z-major, then y, then x.
bool raster_less(const VoxelCoord& a, const VoxelCoord& b);

/// Dense N^3 binary occupancy; N is a power of two, at most 65536.
class OccupancyGrid {
public:
  explicit OccupancyGrid(int resolution = 64);

  int resolution() const { return n_; }
  bool at(int x, int y, int z) const { return cells_[index(x, y, z)] != 0; }
  void set(int x, int y, int z, bool on) { cells_[index(x, y, z)] = on ? 1 : 0; }
  std::size_t count() const;

  bool operator==(const OccupancyGrid&) const = default;

private:
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * n_ + y) * n_ + x;
  }

  int n_;
  std::vector<std::uint8_t> cells_;
};

/// Active voxels, unique and sorted in raster order.
struct SparseStructure {
  int resolution = 64;
  std::vector<VoxelCoord> coords;

  /// Throws OutOfBounds / MalformedLayout when the invariants do not hold.
  void validate() const;
  bool operator==(const SparseStructure&) const = default;
};

/// Per-voxel features with a uniform channel width.
struct SparseFeatures {
  SparseStructure structure;
  int channels = 0;
  /// Row-major: features[i * channels + c].
  std::vector<double> features;

  bool operator==(const SparseFeatures&) const = default;
};

SparseStructure grid_to_sparse(const OccupancyGrid& g);
OccupancyGrid sparse_to_grid(const SparseStructure& s, int resolution);

/// Child slot of a voxel inside its 2^3 cell: 4*(z%2) + 2*(y%2) + (x%2).
inline int child_slot(const VoxelCoord& c) { return 4 * (c.z & 1) + 2 * (c.y & 1) + (c.x & 1); }

/// Packs each 2^3 neighborhood into one coarse voxel at resolution N/2.
///
/// Channel layout of a packed voxel with input width C (total 8*C + 8):
///   [slot 0 features (C)] ... [slot 7 features (C)] [presence slot 0..7]
/// Absent children contribute zero features and a 0 presence entry.
SparseFeatures pack_neighborhoods(const SparseFeatures& f);
SparseFeatures unpack_neighborhoods(const SparseFeatures& f);

/// Binary record, little-endian:
///   "SPVX" | u32 resolution | u32 count | count x (u16 x, u16 y, u16 z)
void write_sparse_binary(std::ostream& os, const SparseStructure& s);
SparseStructure read_sparse_binary(std::istream& is);

/// Text form: header line `sparse_structure <N> <L>` then one `x y z` line per voxel.
void write_sparse_text(std::ostream& os, const SparseStructure& s);
SparseStructure read_sparse_text(std::istream& is);

}  // namespace shapepose
