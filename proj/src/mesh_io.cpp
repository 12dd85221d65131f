#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shapepose/errors.hpp"
#include "shapepose/mesh.hpp"

namespace shapepose {

namespace {

enum class PlyFormat { Ascii, BinaryLittle, BinaryBig };

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

std::size_t type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" ||
      t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  throw Error(ErrorKind::MalformedRecord, "unknown PLY property type '" + t + "'");
}

double read_binary_value(std::istream& is, const std::string& t, PlyFormat fmt) {
  const std::size_t n = type_size(t);
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n))) {
    throw Error(ErrorKind::MalformedRecord, "truncated binary PLY body");
  }
  const bool file_little = fmt == PlyFormat::BinaryLittle;
  const bool host_little = std::endian::native == std::endian::little;
  if (file_little != host_little) std::reverse(buf, buf + n);
  auto as = [&buf]<typename T>(T) {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return as(std::int8_t{});
  if (t == "uchar" || t == "uint8") return as(std::uint8_t{});
  if (t == "short" || t == "int16") return as(std::int16_t{});
  if (t == "ushort" || t == "uint16") return as(std::uint16_t{});
  if (t == "int" || t == "int32") return as(std::int32_t{});
  if (t == "uint" || t == "uint32") return as(std::uint32_t{});
  if (t == "float" || t == "float32") return as(float{});
  return as(double{});
}

void add_polygon(TriMesh& m, const std::vector<std::int64_t>& idx, const std::string& where) {
  if (idx.size() < 3) {
    throw Error(ErrorKind::MalformedRecord, where + ": face with fewer than 3 vertices");
  }
  for (auto i : idx) {
    if (i < 0 || static_cast<std::size_t>(i) >= m.vertices.size()) {
      throw Error(ErrorKind::MalformedRecord, where + ": face index out of range");
    }
  }
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    m.triangles.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                           static_cast<std::uint32_t>(idx[k + 1])});
  }
}

TriMesh load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path);

  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw Error(ErrorKind::MalformedRecord, path + ": not a PLY file");

  PlyFormat fmt = PlyFormat::Ascii;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string f;
      ls >> f;
      if (f == "ascii") fmt = PlyFormat::Ascii;
      else if (f == "binary_little_endian") fmt = PlyFormat::BinaryLittle;
      else if (f == "binary_big_endian") fmt = PlyFormat::BinaryBig;
      else throw Error(ErrorKind::MalformedRecord, path + ": unknown PLY format " + f);
    } else if (word == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (word == "property") {
      if (elements.empty()) throw Error(ErrorKind::MalformedRecord, path + ": stray property");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        ls >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (word == "end_header") {
      break;
    }
  }

  TriMesh m;
  for (const auto& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t k = 0; k < e.props.size(); ++k) {
      if (e.props[k].name == "x") ix = static_cast<int>(k);
      if (e.props[k].name == "y") iy = static_cast<int>(k);
      if (e.props[k].name == "z") iz = static_cast<int>(k);
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) {
      throw Error(ErrorKind::MalformedRecord, path + ": vertex element lacks x/y/z");
    }
    for (std::size_t r = 0; r < e.count; ++r) {
      std::istringstream row;
      if (fmt == PlyFormat::Ascii) {
        do {
          if (!std::getline(in, line)) {
            throw Error(ErrorKind::MalformedRecord, path + ": truncated ASCII PLY body");
          }
        } while (line.find_first_not_of(" \t\r") == std::string::npos);
        row.str(line);
      }
      auto next = [&](const std::string& type) {
        if (fmt != PlyFormat::Ascii) return read_binary_value(in, type, fmt);
        double v;
        if (!(row >> v)) throw Error(ErrorKind::MalformedRecord, path + ": bad ASCII PLY row");
        return v;
      };
      Eigen::Vector3d vtx = Eigen::Vector3d::Zero();
      std::vector<std::int64_t> face;
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        const auto& p = e.props[k];
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(next(p.count_type));
          std::vector<std::int64_t> vals(n);
          for (auto& v : vals) v = static_cast<std::int64_t>(next(p.type));
          if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) face = vals;
        } else {
          const double v = next(p.type);
          if (static_cast<int>(k) == ix) vtx.x() = v;
          if (static_cast<int>(k) == iy) vtx.y() = v;
          if (static_cast<int>(k) == iz) vtx.z() = v;
        }
      }
      if (is_vertex) m.vertices.push_back(vtx);
      if (is_face) add_polygon(m, face, path);
    }
  }
  return m;
}

TriMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path);
  TriMesh m;
  std::string line;
  std::vector<std::vector<std::int64_t>> faces;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Eigen::Vector3d v;
      if (!(ls >> v.x() >> v.y() >> v.z())) {
        throw Error(ErrorKind::MalformedRecord, path + ": bad vertex line");
      }
      m.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<std::int64_t> idx;
      std::string tok;
      while (ls >> tok) {
        // v, v/vt, v/vt/vn or v//vn; negative indices are relative to the end.
        const std::int64_t i = std::stoll(tok.substr(0, tok.find('/')));
        idx.push_back(i < 0 ? static_cast<std::int64_t>(m.vertices.size()) + i : i - 1);
      }
      faces.push_back(std::move(idx));
    }
  }
  for (const auto& f : faces) add_polygon(m, f, path);
  return m;
}

}  // namespace

TriMesh load_mesh(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".ply") return load_ply(path);
  if (ext == ".obj") return load_obj(path);
  throw Error(ErrorKind::UnsupportedMeshFormat, path);
}

void save_ply(const std::string& path, const TriMesh& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << m.vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "element face " << m.triangles.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : m.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

}  // namespace shapepose
