#include "hoalign/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "hoalign/error.hpp"

namespace hoalign {

static_assert(std::endian::native == std::endian::little, "PLY I/O assumes a little-endian host");

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, const std::string& what) {
  fail(ErrorKind::kParseError, path.string() + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail(path, "cannot open file");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kConfigError, path.string() + ": cannot open for writing");
  return out;
}

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUInt8: return 1;
    case PlyType::kInt16:
    case PlyType::kUInt16: return 2;
    case PlyType::kInt32:
    case PlyType::kUInt32:
    case PlyType::kFloat32: return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

std::optional<PlyType> parse_type(const std::string& name) {
  if (name == "char" || name == "int8") return PlyType::kInt8;
  if (name == "uchar" || name == "uint8") return PlyType::kUInt8;
  if (name == "short" || name == "int16") return PlyType::kInt16;
  if (name == "ushort" || name == "uint16") return PlyType::kUInt16;
  if (name == "int" || name == "int32") return PlyType::kInt32;
  if (name == "uint" || name == "uint32") return PlyType::kUInt32;
  if (name == "float" || name == "float32") return PlyType::kFloat32;
  if (name == "double" || name == "float64") return PlyType::kFloat64;
  return std::nullopt;
}

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double decode(PlyType t, const char* p) {
  switch (t) {
    case PlyType::kInt8: return load<std::int8_t>(p);
    case PlyType::kUInt8: return load<std::uint8_t>(p);
    case PlyType::kInt16: return load<std::int16_t>(p);
    case PlyType::kUInt16: return load<std::uint16_t>(p);
    case PlyType::kInt32: return load<std::int32_t>(p);
    case PlyType::kUInt32: return load<std::uint32_t>(p);
    case PlyType::kFloat32: return load<float>(p);
    case PlyType::kFloat64: return load<double>(p);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyData {
  // Scalar values per element, laid out record-major; list properties go to `lists`.
  struct ElementData {
    std::vector<double> scalars;
    std::size_t scalar_stride = 0;
    std::vector<std::vector<std::vector<double>>> lists;  // [record][list property]
  };
  std::vector<PlyElement> elements;
  std::vector<ElementData> data;

  const PlyElement* element(const std::string& name, std::size_t* index = nullptr) const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (elements[i].name == name) {
        if (index) *index = i;
        return &elements[i];
      }
    }
    return nullptr;
  }
};

std::vector<PlyElement> read_ply_header(std::istream& in, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") parse_fail(path, "missing 'ply' magic");
  std::vector<PlyElement> elements;
  bool format_ok = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "format") {
      std::string fmt, version;
      ss >> fmt >> version;
      if (fmt != "binary_little_endian") parse_fail(path, "unsupported PLY format '" + fmt + "'");
      format_ok = true;
    } else if (key == "element") {
      PlyElement e;
      ss >> e.name >> e.count;
      if (!ss) parse_fail(path, "malformed element line");
      elements.push_back(std::move(e));
    } else if (key == "property") {
      if (elements.empty()) parse_fail(path, "property before any element");
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ss >> count_type >> item_type >> p.name;
        auto ct = parse_type(count_type);
        auto it = parse_type(item_type);
        if (!ct || !it) parse_fail(path, "unknown list property type");
        p.is_list = true;
        p.count_type = *ct;
        p.type = *it;
      } else {
        auto t = parse_type(type);
        if (!t) parse_fail(path, "unknown property type '" + type + "'");
        p.type = *t;
        ss >> p.name;
      }
      elements.back().properties.push_back(std::move(p));
    } else if (key == "end_header") {
      if (!format_ok) parse_fail(path, "missing format line");
      return elements;
    }
  }
  parse_fail(path, "missing end_header");
}

PlyData read_ply(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  PlyData ply;
  ply.elements = read_ply_header(in, path);
  const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > body.size()) parse_fail(path, "unexpected end of binary data");
  };
  for (const PlyElement& e : ply.elements) {
    PlyData::ElementData d;
    std::size_t n_lists = 0;
    for (const auto& p : e.properties) {
      if (p.is_list) ++n_lists; else ++d.scalar_stride;
    }
    d.scalars.reserve(e.count * d.scalar_stride);
    if (n_lists) d.lists.resize(e.count);
    for (std::size_t r = 0; r < e.count; ++r) {
      for (const auto& p : e.properties) {
        if (!p.is_list) {
          need(type_size(p.type));
          d.scalars.push_back(decode(p.type, body.data() + pos));
          pos += type_size(p.type);
          continue;
        }
        need(type_size(p.count_type));
        const double count = decode(p.count_type, body.data() + pos);
        pos += type_size(p.count_type);
        if (count < 0) parse_fail(path, "negative list length");
        const auto n = static_cast<std::size_t>(count);
        need(n * type_size(p.type));
        std::vector<double> items(n);
        for (std::size_t k = 0; k < n; ++k) {
          items[k] = decode(p.type, body.data() + pos);
          pos += type_size(p.type);
        }
        d.lists[r].push_back(std::move(items));
      }
    }
    ply.data.push_back(std::move(d));
  }
  return ply;
}

struct VertexColumns {
  int x = -1, y = -1, z = -1;
};

// Index of `name` among the scalar (non-list) properties of `e`.
int scalar_column(const PlyElement& e, const std::string& name) {
  int col = 0;
  for (const auto& p : e.properties) {
    if (p.name == name) return p.is_list ? -1 : col;
    if (!p.is_list) ++col;
  }
  return -1;
}

std::vector<Vec3> read_vertices(const PlyData& ply, const std::filesystem::path& path, std::size_t* vindex) {
  const PlyElement* v = ply.element("vertex", vindex);
  if (!v) parse_fail(path, "no vertex element");
  const VertexColumns cols{scalar_column(*v, "x"), scalar_column(*v, "y"), scalar_column(*v, "z")};
  if (cols.x < 0 || cols.y < 0 || cols.z < 0) parse_fail(path, "vertex element lacks x/y/z");
  const auto& d = ply.data[*vindex];
  std::vector<Vec3> out(v->count);
  for (std::size_t i = 0; i < v->count; ++i) {
    const double* rec = d.scalars.data() + i * d.scalar_stride;
    out[i] = Vec3(rec[cols.x], rec[cols.y], rec[cols.z]);
    if (!out[i].allFinite()) parse_fail(path, "non-finite vertex " + std::to_string(i));
  }
  return out;
}

void write_header(std::ostream& out, const std::string& body) {
  out << "ply\nformat binary_little_endian 1.0\n" << body << "end_header\n";
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

std::vector<Face> fan(const std::vector<long long>& poly, std::size_t n_vertices,
                      const std::filesystem::path& path) {
  std::vector<Face> faces;
  for (long long idx : poly) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= n_vertices) {
      parse_fail(path, "face index " + std::to_string(idx) + " out of range");
    }
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    Face f{static_cast<std::uint32_t>(poly[0]), static_cast<std::uint32_t>(poly[k]),
           static_cast<std::uint32_t>(poly[k + 1])};
    if (f[0] == f[1] && f[1] == f[2]) continue;
    faces.push_back(f);
  }
  return faces;
}

}  // namespace

TriangleMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<Vec3> vertices;
  std::vector<std::vector<long long>> polys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) parse_fail(path, "malformed vertex on line " + std::to_string(line_no));
      vertices.emplace_back(x, y, z);
      if (!vertices.back().allFinite()) parse_fail(path, "non-finite vertex on line " + std::to_string(line_no));
    } else if (key == "f") {
      std::vector<long long> poly;
      std::string tok;
      while (ss >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        long long idx = 0;
        try {
          idx = std::stoll(head);
        } catch (const std::exception&) {
          parse_fail(path, "malformed face on line " + std::to_string(line_no));
        }
        if (idx == 0) parse_fail(path, "zero face index on line " + std::to_string(line_no));
        poly.push_back(idx > 0 ? idx - 1 : static_cast<long long>(vertices.size()) + idx);
      }
      if (poly.size() < 3) parse_fail(path, "face with fewer than 3 vertices on line " + std::to_string(line_no));
      polys.push_back(std::move(poly));
    }
  }
  std::vector<Face> faces;
  for (const auto& poly : polys) {
    auto tris = fan(poly, vertices.size(), path);
    faces.insert(faces.end(), tris.begin(), tris.end());
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out = open_out(path);
  out.precision(17);
  for (const Vec3& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Face& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

TriangleMesh read_ply_mesh(const std::filesystem::path& path) {
  const PlyData ply = read_ply(path);
  std::size_t vindex = 0;
  std::vector<Vec3> vertices = read_vertices(ply, path, &vindex);
  std::size_t findex = 0;
  const PlyElement* fe = ply.element("face", &findex);
  std::vector<Face> faces;
  if (fe) {
    int list_slot = -1, slot = 0;
    for (const auto& p : fe->properties) {
      if (!p.is_list) continue;
      if (p.name == "vertex_indices" || p.name == "vertex_index") list_slot = slot;
      ++slot;
    }
    if (list_slot < 0) parse_fail(path, "face element lacks vertex_indices");
    const auto& d = ply.data[findex];
    for (std::size_t r = 0; r < fe->count; ++r) {
      const auto& items = d.lists[r][static_cast<std::size_t>(list_slot)];
      if (items.size() < 3) parse_fail(path, "face " + std::to_string(r) + " has fewer than 3 vertices");
      std::vector<long long> poly(items.begin(), items.end());
      auto tris = fan(poly, vertices.size(), path);
      faces.insert(faces.end(), tris.begin(), tris.end());
    }
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

bool ply_has_faces(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  for (const auto& e : read_ply_header(in, path)) {
    if (e.name == "face" && e.count > 0) return true;
  }
  return false;
}

void write_ply_mesh(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out = open_out(path);
  write_header(out, "element vertex " + std::to_string(mesh.vertices().size()) +
                        "\nproperty float x\nproperty float y\nproperty float z\nelement face " +
                        std::to_string(mesh.faces().size()) + "\nproperty list uchar int vertex_indices\n");
  for (const Vec3& v : mesh.vertices()) {
    put(out, static_cast<float>(v.x()));
    put(out, static_cast<float>(v.y()));
    put(out, static_cast<float>(v.z()));
  }
  for (const Face& f : mesh.faces()) {
    put(out, std::uint8_t{3});
    for (std::uint32_t idx : f) put(out, static_cast<std::int32_t>(idx));
  }
}

PointCloud read_ply_cloud(const std::filesystem::path& path) {
  const PlyData ply = read_ply(path);
  std::size_t vindex = 0;
  std::vector<Vec3> points = read_vertices(ply, path, &vindex);
  const PlyElement& v = ply.elements[vindex];
  const auto& d = ply.data[vindex];
  const int r = scalar_column(v, "red"), g = scalar_column(v, "green"), b = scalar_column(v, "blue");
  const int l = scalar_column(v, "label");
  std::vector<Vec3> colors;
  std::vector<PointLabel> labels;
  if (r >= 0 && g >= 0 && b >= 0) {
    colors.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double* rec = d.scalars.data() + i * d.scalar_stride;
      colors.emplace_back(Vec3(rec[r], rec[g], rec[b]) / 255.0);
    }
  }
  if (l >= 0) {
    labels.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double value = d.scalars[i * d.scalar_stride + static_cast<std::size_t>(l)];
      if (value != 0.0 && value != 1.0 && value != 2.0) {
        parse_fail(path, "label " + std::to_string(value) + " outside {0, 1, 2} at point " + std::to_string(i));
      }
      labels.push_back(static_cast<PointLabel>(static_cast<std::uint8_t>(value)));
    }
  }
  return PointCloud(std::move(points), std::move(colors), std::move(labels));
}

void write_ply_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out = open_out(path);
  std::string body = "element vertex " + std::to_string(cloud.size()) +
                     "\nproperty float x\nproperty float y\nproperty float z\n";
  if (cloud.has_colors()) body += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (cloud.has_labels()) body += "property uchar label\n";
  write_header(out, body);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points()[i];
    put(out, static_cast<float>(p.x()));
    put(out, static_cast<float>(p.y()));
    put(out, static_cast<float>(p.z()));
    if (cloud.has_colors()) {
      for (int c = 0; c < 3; ++c) {
        put(out, static_cast<std::uint8_t>(std::lround(std::clamp(cloud.colors()[i][c], 0.0, 1.0) * 255.0)));
      }
    }
    if (cloud.has_labels()) put(out, static_cast<std::uint8_t>(cloud.labels()[i]));
  }
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".obj") return read_obj(path);
  if (ext == ".ply") return read_ply_mesh(path);
  fail(ErrorKind::kParseError, path.string() + ": unsupported mesh extension '" + ext + "'");
}

}  // namespace hoalign
