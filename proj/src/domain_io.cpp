#include "hsfem/domain_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "hsfem/error.hpp"

namespace hsfem {

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> significant_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = raw.find_last_not_of(" \t\r");
    lines.push_back({number, raw.substr(first, last - first + 1)});
  }
  return lines;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw ParseError(os.str());
}

std::vector<double> numbers(const Line& line, const std::string& source) {
  std::istringstream is(line.text);
  std::vector<double> out;
  std::string token;
  while (is >> token) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      fail(source, line.number, "expected a number, got '" + token + "'");
    }
    if (used != token.size() || !std::isfinite(value))
      fail(source, line.number, "expected a number, got '" + token + "'");
    out.push_back(value);
  }
  return out;
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> split_numbers(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParseError("bad number '" + item + "' in domain spec '" + spec + "'");
    }
    if (used != item.size()) throw ParseError("bad number '" + item + "' in domain spec '" + spec + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

CanonicalShape parse_domain_description(std::istream& in, const std::string& source) {
  const auto lines = significant_lines(in);
  if (lines.empty()) throw ParseError(source + ": empty domain description");
  const std::string& kind = lines.front().text;
  const auto expect_params = [&](std::size_t count) {
    if (lines.size() != 2) fail(source, lines.front().number, kind + " expects one parameter line");
    auto v = numbers(lines[1], source);
    if (v.size() != count && !(kind == "rectangle" && v.size() == 4))
      fail(source, lines[1].number, "wrong number of parameters for " + kind);
    for (std::size_t i = 0; i < std::min<std::size_t>(v.size(), 2); ++i)
      if (!(v[i] > 0.0)) fail(source, lines[1].number, "dimensions must be positive");
    return v;
  };
  if (kind == "disk") return DiskShape{expect_params(1)[0]};
  if (kind == "ellipse") {
    const auto v = expect_params(2);
    return EllipseShape{v[0], v[1]};
  }
  if (kind == "rectangle") {
    const auto v = expect_params(2);
    RectangleShape r{v[0], v[1], Vec2::Zero()};
    if (v.size() == 4) r.origin = Vec2(v[2], v[3]);
    return r;
  }
  if (kind == "polygon") {
    PolygonShape poly;
    poly.name = "polygon";
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto v = numbers(lines[i], source);
      if (v.size() != 2) fail(source, lines[i].number, "polygon vertex lines hold exactly 'x y'");
      poly.vertices.emplace_back(v[0], v[1]);
    }
    if (poly.vertices.size() < 3) fail(source, lines.back().number, "polygon needs at least three vertices");
    return poly;
  }
  fail(source, lines.front().number, "unknown domain kind '" + kind + "'");
}

CanonicalShape read_domain_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open domain file " + path.string());
  return parse_domain_description(in, path.string());
}

void write_domain_description(std::ostream& out, const CanonicalShape& shape) {
  std::visit(
      [&out](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DiskShape>) {
          out << "disk\n" << format(s.radius) << "\n";
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          out << "ellipse\n" << format(s.semi_x) << " " << format(s.semi_y) << "\n";
        } else if constexpr (std::is_same_v<T, RectangleShape>) {
          out << "rectangle\n" << format(s.width) << " " << format(s.height) << " "
              << format(s.origin.x()) << " " << format(s.origin.y()) << "\n";
        } else if constexpr (std::is_same_v<T, PolygonShape>) {
          out << "polygon\n";
          for (const auto& v : s.vertices) out << format(v.x()) << " " << format(v.y()) << "\n";
        } else {
          throw ParseError("lip profiles have no file representation; sample them into a polygon");
        }
      },
      shape);
}

void write_domain_file(const std::filesystem::path& path, const CanonicalShape& shape) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write domain file " + path.string());
  write_domain_description(out, shape);
}

CanonicalShape parse_domain_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "square" && colon == std::string::npos) return RectangleShape{1.0, 1.0, Vec2::Zero()};
  if (head == "disk") {
    const auto v = split_numbers(rest, spec);
    if (v.size() != 1 || !(v[0] > 0.0)) throw ParseError("disk spec is disk:<radius>");
    return DiskShape{v[0]};
  }
  if (head == "ellipse") {
    const auto v = split_numbers(rest, spec);
    if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > 0.0))
      throw ParseError("ellipse spec is ellipse:<a>,<b>");
    return EllipseShape{v[0], v[1]};
  }
  if (head == "rectangle") {
    const auto v = split_numbers(rest, spec);
    if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > 0.0))
      throw ParseError("rectangle spec is rectangle:<w>,<h>");
    return RectangleShape{v[0], v[1], Vec2::Zero()};
  }
  if (head == "polygon") {
    if (rest == "lip_triangle")
      return PolygonShape{{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.45}}, "lip_triangle"};
    if (rest == "equilateral")
      return PolygonShape{{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}, "equilateral"};
    if (rest == "right_triangle")
      return PolygonShape{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, "right_triangle"};
    if (rest.empty()) throw ParseError("polygon spec is polygon:<name or file>");
    auto shape = read_domain_file(rest);
    if (!std::holds_alternative<PolygonShape>(shape))
      throw ParseError("file " + rest + " does not describe a polygon");
    return shape;
  }
  if (head == "file") {
    if (rest.empty()) throw ParseError("file spec is file:<path>");
    return read_domain_file(rest);
  }
  throw ParseError("unknown domain spec '" + spec + "'");
}

}  // namespace hsfem
