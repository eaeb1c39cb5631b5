#include "bcreg/cloud_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace bcreg {

namespace {

bool blank_or_comment(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

PointCloud parse_xyz(std::istream& in, const std::string& name) {
  PointCloud c;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) {
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": malformed XYZ line (expected 3 decimals): " + line);
    }
    std::string extra;
    if (ls >> extra && extra[0] != '#') {
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": trailing content on XYZ line: " + line);
    }
    c.points.emplace_back(x, y, z);
  }
  if (c.empty()) throw std::runtime_error(name + ": no points found");
  return c;
}

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<std::string> properties;
};

PointCloud parse_ply_ascii(std::istream& in, const std::string& name) {
  std::string line;
  long line_no = 0;

  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line)) {
      throw std::runtime_error(name + ": unexpected end of PLY file at line " +
                               std::to_string(line_no));
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (next_line() != "ply") {
    throw std::runtime_error(name + ":1: not a PLY file (missing magic)");
  }

  std::vector<PlyElement> elements;
  bool ascii = false;
  while (true) {
    std::istringstream ls(next_line());
    std::string keyword;
    ls >> keyword;
    if (keyword == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") {
        throw std::runtime_error(name + ": unsupported PLY format \"" + fmt +
                                 "\" (only ascii is supported)");
      }
      ascii = true;
    } else if (keyword == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      if (!ls || e.count < 0) {
        throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                 ": malformed element declaration");
      }
      elements.push_back(e);
    } else if (keyword == "property") {
      if (elements.empty()) {
        throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                 ": property before any element");
      }
      std::string type, prop;
      ls >> type;
      if (type == "list") {
        // list properties occupy a variable slot per line; only non-vertex
        // elements may carry them here
        ls >> type >> type >> prop;
        elements.back().properties.push_back("list:" + prop);
      } else {
        ls >> prop;
        elements.back().properties.push_back(prop);
      }
    } else if (keyword == "end_header") {
      break;
    } else if (keyword == "comment" || keyword == "obj_info") {
      // ignored
    } else {
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": unknown PLY header keyword \"" + keyword + "\"");
    }
  }
  if (!ascii) throw std::runtime_error(name + ": PLY file missing format line");

  PointCloud c;
  for (const PlyElement& e : elements) {
    if (e.name != "vertex") {
      for (long i = 0; i < e.count; ++i) next_line();  // skip foreign elements
      continue;
    }
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      if (e.properties[p] == "x") ix = static_cast<int>(p);
      if (e.properties[p] == "y") iy = static_cast<int>(p);
      if (e.properties[p] == "z") iz = static_cast<int>(p);
    }
    if (ix < 0 || iy < 0 || iz < 0) {
      throw std::runtime_error(name + ": vertex element lacks x/y/z properties");
    }
    c.points.reserve(e.count);
    for (long i = 0; i < e.count; ++i) {
      std::istringstream ls(next_line());
      std::vector<double> values;
      double v;
      while (ls >> v) values.push_back(v);
      if (static_cast<int>(values.size()) < static_cast<int>(e.properties.size())) {
        throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                 ": malformed vertex line: " + line);
      }
      c.points.emplace_back(values[ix], values[iy], values[iz]);
    }
  }
  if (c.empty()) throw std::runtime_error(name + ": PLY file has no vertices");
  return c;
}

}  // namespace

PointCloud parse_cloud_stream(std::istream& in, CloudFormat format, const std::string& name) {
  if (format == CloudFormat::kAuto) {
    const auto start = in.tellg();
    std::string first;
    std::getline(in, first);
    if (!first.empty() && first.back() == '\r') first.pop_back();
    in.clear();
    in.seekg(start);
    format = first == "ply" ? CloudFormat::kPlyAscii : CloudFormat::kXyz;
  }
  return format == CloudFormat::kPlyAscii ? parse_ply_ascii(in, name) : parse_xyz(in, name);
}

PointCloud parse_cloud(const std::string& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cloud file: " + path);
  PointCloud c = parse_cloud_stream(in, format, path);
  c.id = path;
  return c;
}

void write_xyz(std::ostream& out, const PointCloud& c) {
  char buf[96];
  for (const auto& p : c.points) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x(), p.y(), p.z());
    out << buf;
  }
}

void write_xyz_file(const std::string& path, const PointCloud& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cloud file: " + path);
  write_xyz(out, c);
  if (!out) throw std::runtime_error("failed writing cloud file: " + path);
}

std::string transform_to_json(const RigidTransform& t) {
  nlohmann::ordered_json j;
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot[r * 3 + c] = t.rotation(r, c);
  }
  j["rotation"] = rot;
  j["translation"] = {t.translation.x(), t.translation.y(), t.translation.z()};
  return j.dump(2) + "\n";
}

RigidTransform transform_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto rot = j.at("rotation").get<std::vector<double>>();
  const auto tr = j.at("translation").get<std::vector<double>>();
  if (rot.size() != 9 || tr.size() != 3) {
    throw std::runtime_error("transform JSON must hold a 9-entry rotation and 3-entry translation");
  }
  RigidTransform t;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) t.rotation(r, c) = rot[r * 3 + c];
  }
  t.translation = {tr[0], tr[1], tr[2]};
  return t;
}

RigidTransform load_transform_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transform file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return transform_from_json(ss.str());
}

void save_transform_json(const std::string& path, const RigidTransform& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write transform file: " + path);
  out << transform_to_json(t);
}

}  // namespace bcreg
