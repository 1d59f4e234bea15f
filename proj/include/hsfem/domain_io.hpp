#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hsfem/geometry.hpp"

namespace hsfem {

// Line-oriented domain description. Blank lines and text after '#' are
// ignored. The first line names the kind, followed by its parameters:
//
//   disk               ellipse          rectangle          polygon
//   <r>                <a> <b>          <w> <h> [<x0> <y0>] <x> <y>   (one vertex per line, CCW)
//
// Polygons round-trip bit-exactly through write_domain_description.
CanonicalShape parse_domain_description(std::istream& in, const std::string& source = "<stream>");
CanonicalShape read_domain_file(const std::filesystem::path& path);
void write_domain_description(std::ostream& out, const CanonicalShape& shape);
void write_domain_file(const std::filesystem::path& path, const CanonicalShape& shape);

// Command-line domain mini-language:
//   square | rectangle:w,h | disk:r | ellipse:a,b | polygon:<name or file> | file:<path>
// Named polygons: lip_triangle, equilateral, right_triangle.
CanonicalShape parse_domain_spec(const std::string& spec);

}  // namespace hsfem
