#include <random>
#include <sstream>

#include "check.hpp"
#include "fixtures.hpp"
#include "shapepose/voxel.hpp"

using namespace shapepose;

TEST_CASE("grid to sparse basics") {
  CHECK(grid_to_sparse(OccupancyGrid(8)).coords.empty());
  OccupancyGrid g(8);
  g.set(3, 4, 5, true);
  const SparseStructure s = grid_to_sparse(g);
  REQUIRE(s.coords.size() == 1);
  CHECK(s.coords[0] == VoxelCoord{3, 4, 5});
  CHECK(s.resolution == 8);
  CHECK_ERROR_KIND(OccupancyGrid(12), ErrorKind::DegenerateInput);
}

TEST_CASE("raster order is z-major then y then x") {
  OccupancyGrid g(4);
  g.set(3, 0, 0, true);
  g.set(0, 1, 0, true);
  g.set(0, 0, 1, true);
  g.set(1, 0, 1, true);
  const auto c = grid_to_sparse(g).coords;
  REQUIRE(c.size() == 4);
  CHECK(c[0] == VoxelCoord{3, 0, 0});
  CHECK(c[1] == VoxelCoord{0, 1, 0});
  CHECK(c[2] == VoxelCoord{0, 0, 1});
  CHECK(c[3] == VoxelCoord{1, 0, 1});
}

TEST_CASE("random 8^3 grid with 17 voxels round trips") {
  std::mt19937_64 rng(21);
  const auto f = testing::random_sparse_features(rng, 8, 17, 0);
  const OccupancyGrid g = sparse_to_grid(f.structure, 8);
  CHECK(g.count() == 17);
  CHECK(grid_to_sparse(g) == f.structure);

  SparseStructure bad;
  bad.resolution = 8;
  bad.coords = {{8, 0, 0}};
  CHECK_ERROR_KIND(sparse_to_grid(bad, 8), ErrorKind::OutOfBounds);
}

TEST_CASE("packing a single voxel") {
  SparseFeatures f;
  f.structure.resolution = 4;
  f.structure.coords = {{0, 0, 0}};
  f.channels = 1;
  f.features = {1.0};
  const SparseFeatures p = pack_neighborhoods(f);
  CHECK(p.structure.resolution == 2);
  REQUIRE(p.structure.coords.size() == 1);
  CHECK(p.structure.coords[0] == VoxelCoord{0, 0, 0});
  REQUIRE(p.channels == 16);
  const std::vector<double> expected{1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0};
  CHECK(p.features == expected);
}

TEST_CASE("packing a full cell uses the documented child order") {
  SparseFeatures f;
  f.structure.resolution = 4;
  f.channels = 1;
  // Raster order within cell (1,1,1) at fine coordinates 2..3.
  for (int z = 2; z < 4; ++z) {
    for (int y = 2; y < 4; ++y) {
      for (int x = 2; x < 4; ++x) {
        f.structure.coords.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                                      static_cast<std::uint16_t>(z)});
        // Scalar encodes the position: 100·z + 10·y + x.
        f.features.push_back(100.0 * z + 10.0 * y + x);
      }
    }
  }
  const SparseFeatures p = pack_neighborhoods(f);
  REQUIRE(p.structure.coords.size() == 1);
  CHECK(p.structure.coords[0] == VoxelCoord{1, 1, 1});
  // Slot 4·(z%2) + 2·(y%2) + x%2.
  for (int slot = 0; slot < 8; ++slot) {
    const int x = 2 + (slot & 1), y = 2 + ((slot >> 1) & 1), z = 2 + ((slot >> 2) & 1);
    CHECK(p.features[slot] == 100.0 * z + 10.0 * y + x);
    CHECK(p.features[8 + slot] == 1.0);
  }
}

TEST_CASE("pack and unpack are inverse on random inputs") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = testing::random_sparse_features(rng, 16, 1 + trial * 5, 1 + trial % 4);
    const auto p = pack_neighborhoods(f);
    CHECK(p.structure.coords.size() <= f.structure.coords.size());
    CHECK(p.structure.coords.size() * 8 >= f.structure.coords.size());
    CHECK(unpack_neighborhoods(p) == f);
  }
}

TEST_CASE("unpack rejects malformed layouts") {
  SparseFeatures f;
  f.structure.resolution = 2;
  f.structure.coords = {{0, 0, 0}};
  f.channels = 15;
  f.features.assign(15, 0.0);
  CHECK_ERROR_KIND(unpack_neighborhoods(f), ErrorKind::MalformedLayout);
  f.channels = 16;
  f.features.assign(16, 0.0);
  f.features[8] = 0.5;  // presence must be 0 or 1
  CHECK_ERROR_KIND(unpack_neighborhoods(f), ErrorKind::MalformedLayout);
}

TEST_CASE("binary record layout is byte exact") {
  SparseStructure s;
  s.resolution = 512;
  s.coords = {{1, 2, 3}, {258, 0, 4}};
  std::stringstream ss;
  write_sparse_binary(ss, s);
  const std::string bytes = ss.str();
  const std::string expected("SPVX"
                             "\x00\x02\x00\x00"
                             "\x02\x00\x00\x00"
                             "\x01\x00\x02\x00\x03\x00"
                             "\x02\x01\x00\x00\x04\x00",
                             24);
  CHECK(bytes == expected);
  std::stringstream in(bytes);
  CHECK(read_sparse_binary(in) == s);
  std::stringstream truncated(bytes.substr(0, 20));
  CHECK_ERROR_KIND(read_sparse_binary(truncated), ErrorKind::MalformedRecord);
  std::stringstream magic("XXXX" + bytes.substr(4));
  CHECK_ERROR_KIND(read_sparse_binary(magic), ErrorKind::MalformedRecord);
}

TEST_CASE("text record") {
  SparseStructure s;
  s.resolution = 8;
  s.coords = {{1, 2, 3}, {0, 0, 4}};
  std::stringstream ss;
  write_sparse_text(ss, s);
  CHECK(ss.str() == "sparse_structure 8 2\n1 2 3\n0 0 4\n");
  CHECK(read_sparse_text(ss) == s);
}
