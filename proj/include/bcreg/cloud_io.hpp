#pragma once

#include <iosfwd>
#include <string>

#include "bcreg/geometry.hpp"

namespace bcreg {

enum class CloudFormat { kAuto, kXyz, kPlyAscii };

// XYZ: one point per line, three whitespace-separated decimals, '#' comments.
// PLY: ASCII header with an "element vertex N" and float x/y/z properties;
// other properties and elements are skipped; binary PLY is rejected.
// kAuto sniffs the "ply" magic, otherwise parses as XYZ.
PointCloud parse_cloud(const std::string& path, CloudFormat format = CloudFormat::kAuto);
PointCloud parse_cloud_stream(std::istream& in, CloudFormat format,
                              const std::string& name = "<stream>");

void write_xyz(std::ostream& out, const PointCloud& c);
void write_xyz_file(const std::string& path, const PointCloud& c);

// {"rotation": [9, row-major], "translation": [3]}
RigidTransform load_transform_json(const std::string& path);
void save_transform_json(const std::string& path, const RigidTransform& t);
std::string transform_to_json(const RigidTransform& t);
RigidTransform transform_from_json(const std::string& text);

}  // namespace bcreg
