#include "shapepose/voxel.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "shapepose/errors.hpp"

namespace shapepose {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void put_u16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
  os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(ErrorKind::MalformedRecord, "truncated sparse structure record");
  }
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t get_u16(std::istream& is) {
  unsigned char b[2];
  if (!is.read(reinterpret_cast<char*>(b), 2)) {
    throw Error(ErrorKind::MalformedRecord, "truncated sparse structure record");
  }
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

}  // namespace

bool raster_less(const VoxelCoord& a, const VoxelCoord& b) {
  if (a.z != b.z) return a.z < b.z;
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

OccupancyGrid::OccupancyGrid(int resolution) : n_(resolution) {
  if (!is_power_of_two(resolution) || resolution > 65536) {
    throw Error(ErrorKind::DegenerateInput,
                "grid resolution must be a power of two, got " + std::to_string(resolution));
  }
  cells_.assign(static_cast<std::size_t>(n_) * n_ * n_, 0);
}

std::size_t OccupancyGrid::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

void SparseStructure::validate() const {
  if (!is_power_of_two(resolution) || resolution > 65536) {
    throw Error(ErrorKind::MalformedLayout, "sparse resolution must be a power of two");
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    if (c.x >= resolution || c.y >= resolution || c.z >= resolution) {
      throw Error(ErrorKind::OutOfBounds, "voxel coordinate outside the grid");
    }
    if (i > 0 && !raster_less(coords[i - 1], c)) {
      throw Error(ErrorKind::MalformedLayout, "voxel coordinates not strictly raster ordered");
    }
  }
}

SparseStructure grid_to_sparse(const OccupancyGrid& g) {
  SparseStructure s;
  s.resolution = g.resolution();
  const int n = g.resolution();
  for (int z = 0; z < n; ++z) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (g.at(x, y, z)) {
          s.coords.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                              static_cast<std::uint16_t>(z)});
        }
      }
    }
  }
  return s;
}

OccupancyGrid sparse_to_grid(const SparseStructure& s, int resolution) {
  OccupancyGrid g(resolution);
  for (const auto& c : s.coords) {
    if (c.x >= resolution || c.y >= resolution || c.z >= resolution) {
      throw Error(ErrorKind::OutOfBounds, "voxel (" + std::to_string(c.x) + "," +
                                              std::to_string(c.y) + "," + std::to_string(c.z) +
                                              ") outside resolution " + std::to_string(resolution));
    }
    g.set(c.x, c.y, c.z, true);
  }
  return g;
}

SparseFeatures pack_neighborhoods(const SparseFeatures& f) {
  const int n = f.structure.resolution;
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::DegenerateInput, "packing needs an even resolution");
  }
  const auto& coords = f.structure.coords;
  const std::size_t c = static_cast<std::size_t>(f.channels);
  if (f.features.size() != coords.size() * c) {
    throw Error(ErrorKind::MalformedLayout, "feature count does not match voxel count");
  }

  std::vector<std::size_t> order(coords.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto parent = [&](std::size_t i) {
    const auto& p = coords[i];
    return VoxelCoord{static_cast<std::uint16_t>(p.x / 2), static_cast<std::uint16_t>(p.y / 2),
                      static_cast<std::uint16_t>(p.z / 2)};
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raster_less(parent(a), parent(b));
  });

  SparseFeatures out;
  out.structure.resolution = n / 2;
  out.channels = static_cast<int>(8 * c + 8);
  const std::size_t width = 8 * c + 8;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    const VoxelCoord q = parent(i);
    if (out.structure.coords.empty() || !(out.structure.coords.back() == q)) {
      out.structure.coords.push_back(q);
      out.features.resize(out.features.size() + width, 0.0);
    }
    double* row = out.features.data() + (out.structure.coords.size() - 1) * width;
    const int slot = child_slot(coords[i]);
    if (row[8 * c + slot] != 0.0) {
      throw Error(ErrorKind::MalformedLayout, "duplicate voxel coordinate");
    }
    std::copy_n(f.features.data() + i * c, c, row + slot * c);
    row[8 * c + slot] = 1.0;
  }
  return out;
}

SparseFeatures unpack_neighborhoods(const SparseFeatures& f) {
  if (f.channels < 8 || (f.channels - 8) % 8 != 0) {
    throw Error(ErrorKind::MalformedLayout,
                "packed width must be 8*C + 8, got " + std::to_string(f.channels));
  }
  const std::size_t c = static_cast<std::size_t>(f.channels - 8) / 8;
  const std::size_t width = static_cast<std::size_t>(f.channels);
  if (f.features.size() != f.structure.coords.size() * width) {
    throw Error(ErrorKind::MalformedLayout, "feature count does not match voxel count");
  }

  SparseFeatures out;
  out.structure.resolution = f.structure.resolution * 2;
  out.channels = static_cast<int>(c);
  for (std::size_t i = 0; i < f.structure.coords.size(); ++i) {
    const VoxelCoord q = f.structure.coords[i];
    const double* row = f.features.data() + i * width;
    for (int slot = 0; slot < 8; ++slot) {
      const double presence = row[8 * c + slot];
      if (presence != 0.0 && presence != 1.0) {
        throw Error(ErrorKind::MalformedLayout, "presence entries must be 0 or 1");
      }
      const double* child = row + slot * c;
      if (presence == 0.0) {
        if (std::any_of(child, child + c, [](double v) { return v != 0.0; })) {
          throw Error(ErrorKind::MalformedLayout, "absent child carries non-zero features");
        }
        continue;
      }
      out.structure.coords.push_back({static_cast<std::uint16_t>(2 * q.x + (slot & 1)),
                                      static_cast<std::uint16_t>(2 * q.y + ((slot >> 1) & 1)),
                                      static_cast<std::uint16_t>(2 * q.z + ((slot >> 2) & 1))});
      out.features.insert(out.features.end(), child, child + c);
    }
  }

  // Children of one coarse cell interleave with those of its neighbors in raster order.
  std::vector<std::size_t> order(out.structure.coords.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raster_less(out.structure.coords[a], out.structure.coords[b]);
  });
  SparseFeatures sorted;
  sorted.structure.resolution = out.structure.resolution;
  sorted.channels = out.channels;
  sorted.structure.coords.reserve(order.size());
  sorted.features.reserve(out.features.size());
  for (std::size_t i : order) {
    sorted.structure.coords.push_back(out.structure.coords[i]);
    sorted.features.insert(sorted.features.end(), out.features.begin() + i * c,
                           out.features.begin() + (i + 1) * c);
  }
  return sorted;
}

void write_sparse_binary(std::ostream& os, const SparseStructure& s) {
  s.validate();
  os.write("SPVX", 4);
  put_u32(os, static_cast<std::uint32_t>(s.resolution));
  put_u32(os, static_cast<std::uint32_t>(s.coords.size()));
  for (const auto& c : s.coords) {
    put_u16(os, c.x);
    put_u16(os, c.y);
    put_u16(os, c.z);
  }
  if (!os) throw Error(ErrorKind::IoError, "failed writing sparse structure");
}

SparseStructure read_sparse_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "SPVX") {
    throw Error(ErrorKind::MalformedRecord, "bad sparse structure magic");
  }
  SparseStructure s;
  s.resolution = static_cast<int>(get_u32(is));
  const std::uint32_t count = get_u32(is);
  s.coords.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    VoxelCoord c;
    c.x = get_u16(is);
    c.y = get_u16(is);
    c.z = get_u16(is);
    s.coords.push_back(c);
  }
  s.validate();
  return s;
}

void write_sparse_text(std::ostream& os, const SparseStructure& s) {
  s.validate();
  os << "sparse_structure " << s.resolution << ' ' << s.coords.size() << '\n';
  for (const auto& c : s.coords) os << c.x << ' ' << c.y << ' ' << c.z << '\n';
}

SparseStructure read_sparse_text(std::istream& is) {
  std::string tag;
  SparseStructure s;
  std::size_t count = 0;
  if (!(is >> tag >> s.resolution >> count) || tag != "sparse_structure") {
    throw Error(ErrorKind::MalformedRecord, "bad sparse structure text header");
  }
  s.coords.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned x = 0, y = 0, z = 0;
    if (!(is >> x >> y >> z)) {
      throw Error(ErrorKind::MalformedRecord, "truncated sparse structure text");
    }
    if (x > 0xffff || y > 0xffff || z > 0xffff) {
      throw Error(ErrorKind::OutOfBounds, "voxel coordinate exceeds 16 bits");
    }
    s.coords.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                        static_cast<std::uint16_t>(z)});
  }
  s.validate();
  return s;
}

}  // namespace shapepose
