#include "hsfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "hsfem/error.hpp"
#include "triangulation.hpp"

namespace hsfem {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kVertexCap = 2'000'000;

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (a + t * d - p).norm();
}

double loop_distance(const Vec2& p, const std::vector<Vec2>& loop) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < loop.size(); ++i)
    best = std::min(best, point_segment_distance(p, loop[i], loop[(i + 1) % loop.size()]));
  return best;
}

bool strictly_inside(const Vec2& p, const std::vector<Vec2>& loop) {
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % loop.size()];
    if (cross(b - a, p - a) <= 0.0) return false;
  }
  return true;
}

// Hexagonal lattice points inside the loop that keep a clearance of
// `clearance * spacing` from it. A tiny deterministic jitter keeps the
// incremental Delaunay insertion away from cocircular ties.
std::vector<Vec2> lattice_points(const std::vector<Vec2>& loop, double spacing, double clearance,
                                 std::uint64_t seed) {
  Eigen::AlignedBox2d box;
  for (const auto& p : loop) box.extend(p);
  const double dy = spacing * std::sqrt(3.0) / 2.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1e-4 * spacing, 1e-4 * spacing);
  std::vector<Vec2> pts;
  int row = 0;
  for (double y = box.min().y() + 0.5 * dy; y < box.max().y(); y += dy, ++row) {
    const double shift = (row % 2 == 0) ? 0.0 : 0.5 * spacing;
    for (double x = box.min().x() + 0.5 * spacing + shift; x < box.max().x(); x += spacing) {
      Vec2 p(x + jitter(rng), y + jitter(rng));
      if (!strictly_inside(p, loop)) continue;
      if (loop_distance(p, loop) < clearance * spacing) continue;
      pts.push_back(p);
    }
  }
  return pts;
}

std::size_t segments_for(double length, double spacing) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / spacing - 1e-9)));
}

double piece_length_between(const BoundaryPiece& piece, double t0, double t1) {
  constexpr int kSamples = 512;
  double len = 0.0;
  Vec2 prev = piece.point(t0);
  for (int k = 1; k <= kSamples; ++k) {
    const Vec2 cur = piece.point(t0 + (t1 - t0) * k / kSamples);
    len += (cur - prev).norm();
    prev = cur;
  }
  return len;
}

bool is_axis_aligned_rectangle(const Domain& domain) {
  if (domain.num_pieces() != 4) return false;
  for (const auto& p : domain.pieces()) {
    const auto* s = std::get_if<Segment>(&p.shape());
    if (s == nullptr) return false;
    if (s->from.x() != s->to.x() && s->from.y() != s->to.y()) return false;
  }
  return true;
}

// Union-jack triangulation: diagonals alternate in a checkerboard so the
// mesh is mirror symmetric about both midlines when the cell counts are even.
Mesh structured_rectangle(const Domain& domain, double target_h) {
  const auto box = domain.bounding_box();
  const Vec2 lo = box.min(), hi = box.max();
  const auto even_count = [target_h](double len) {
    auto n = static_cast<int>(std::ceil(len / target_h - 1e-9));
    n = std::max(n, 2);
    return n + (n % 2);
  };
  const int nx = even_count(hi.x() - lo.x());
  const int ny = even_count(hi.y() - lo.y());
  Mesh mesh;
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = j == ny ? hi.y() : lo.y() + (hi.y() - lo.y()) * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? hi.x() : lo.x() + (hi.x() - lo.x()) * i / nx;
      mesh.vertices.emplace_back(x, y);
    }
  }
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }
  return mesh;
}

Mesh from_triangulation(const detail::PlanarTriangulation& tri) {
  Mesh mesh;
  mesh.vertices = tri.points;
  mesh.triangles = tri.triangles;
  return mesh;
}

Mesh generic_convex(const Domain& domain, double spacing, std::uint64_t seed) {
  std::vector<Vec2> loop;
  for (const auto& piece : domain.pieces()) {
    const std::size_t n = std::max<std::size_t>(piece.is_closed() ? 6 : 1,
                                                segments_for(piece.length(), spacing));
    const auto ts = arclength_parameters(piece, 0.0, 1.0, n);
    for (std::size_t k = 0; k < n; ++k) loop.push_back(piece.point(ts[k]));
  }
  const auto interior = lattice_points(loop, spacing, 0.6, seed);
  return from_triangulation(detail::triangulate_convex_region(loop, interior, 8));
}

// Triangulates the first quadrant of an axis-symmetric domain bounded by a
// single closed arc and mirrors it into the other three quadrants.
Mesh mirrored_quadrants(const Domain& domain, double spacing, std::uint64_t seed) {
  const auto& piece = domain.piece(0);
  const auto& arc = std::get<EllipticArc>(piece.shape());
  const double span = arc.theta_end - arc.theta_begin;
  const auto param = [&](double theta) {
    double t = (theta - arc.theta_begin) / span;
    return t - std::floor(t);
  };
  double t_x = param(-arc.phase);
  double t_y = param(0.5 * kPi - arc.phase);
  if (t_y < t_x) t_y += 1.0;
  const auto wrap = [](double t) { return t >= 1.0 ? t - 1.0 : t; };

  const double x_end = piece.point(wrap(t_x)).norm();
  const double y_end = piece.point(wrap(t_y)).norm();

  std::vector<Vec2> loop;
  const std::size_t nx = segments_for(x_end, spacing);
  for (std::size_t k = 0; k < nx; ++k) loop.emplace_back(x_end * k / nx, 0.0);
  const std::size_t narc = segments_for(piece_length_between(piece, t_x, t_y), spacing);
  const auto ts = arclength_parameters(piece, t_x, t_y, narc);
  loop.emplace_back(x_end, 0.0);
  for (std::size_t k = 1; k < narc; ++k) loop.push_back(piece.point(wrap(ts[k])));
  const std::size_t ny = segments_for(y_end, spacing);
  loop.emplace_back(0.0, y_end);
  for (std::size_t k = 1; k < ny; ++k) loop.emplace_back(0.0, y_end * (ny - k) / ny);

  const auto interior = lattice_points(loop, spacing, 0.6, seed);
  const auto quarter = detail::triangulate_convex_region(loop, interior, 8);

  const int nq = static_cast<int>(quarter.points.size());
  Mesh mesh;
  std::vector<std::vector<int>> index(4, std::vector<int>(nq, -1));
  const std::array<std::array<double, 2>, 4> signs = {{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  const auto quadrant_of = [](double sx, double sy) {
    return sx > 0 ? (sy > 0 ? 0 : 3) : (sy > 0 ? 1 : 2);
  };
  for (int q = 0; q < 4; ++q) {
    const double sx = signs[q][0], sy = signs[q][1];
    for (int v = 0; v < nq; ++v) {
      const Vec2& p = quarter.points[v];
      int shared = -1;
      if (p.x() == 0.0) shared = index[quadrant_of(-sx, sy)][v];
      if (shared < 0 && p.y() == 0.0) shared = index[quadrant_of(sx, -sy)][v];
      if (shared >= 0) {
        index[q][v] = shared;
      } else {
        index[q][v] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.emplace_back(sx * p.x(), sy * p.y());
      }
    }
    for (const auto& t : quarter.triangles) {
      std::array<int, 3> mapped = {index[q][t[0]], index[q][t[1]], index[q][t[2]]};
      if (sx * sy < 0) std::swap(mapped[1], mapped[2]);
      mesh.triangles.push_back(mapped);
    }
  }
  return mesh;
}

double triangle_min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  const auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), u.dot(v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double signed_area(const Mesh& mesh, std::size_t triangle) {
  const auto& t = mesh.triangles[triangle];
  const Vec2& a = mesh.vertices[t[0]];
  return 0.5 * cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a);
}

double total_area(const Mesh& mesh) {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) sum += signed_area(mesh, t);
  return sum;
}

double boundary_length(const Mesh& mesh) {
  double sum = 0.0;
  for (const auto& e : mesh.boundary_edges) sum += (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
  return sum;
}

double min_angle_degrees(const Mesh& mesh) {
  double best = kPi;
  for (const auto& t : mesh.triangles)
    best = std::min(best, triangle_min_angle(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                             mesh.vertices[t[2]]));
  return best * 180.0 / kPi;
}

double longest_edge(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      h = std::max(h, (mesh.vertices[t[k]] - mesh.vertices[t[(k + 1) % 3]]).norm());
  return h;
}

std::vector<int> boundary_slots(const Mesh& mesh) {
  std::vector<int> slot(mesh.num_vertices(), -1);
  for (std::size_t i = 0; i < mesh.boundary_vertices.size(); ++i)
    slot[mesh.boundary_vertices[i].vertex] = static_cast<int>(i);
  return slot;
}

namespace {

using DirectedEdges = std::map<std::pair<int, int>, int>;

DirectedEdges directed_edges(const Mesh& mesh) {
  DirectedEdges edges;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const auto key = std::make_pair(tri[k], tri[(k + 1) % 3]);
      if (!edges.emplace(key, static_cast<int>(t)).second) {
        std::ostringstream os;
        os << "non-conforming connectivity: edge (" << key.first << ", " << key.second
           << ") is used twice with the same orientation";
        throw MeshError(os.str());
      }
    }
  }
  return edges;
}

// Boundary edges (directed edges without a reverse twin) arranged as the
// single CCW cycle starting at the smallest boundary vertex.
std::vector<std::pair<int, int>> boundary_cycle(const Mesh& mesh) {
  const auto edges = directed_edges(mesh);
  std::map<int, int> next;
  for (const auto& [key, t] : edges) {
    if (edges.count({key.second, key.first}) != 0) continue;
    if (!next.emplace(key.first, key.second).second)
      throw MeshError("boundary vertex " + std::to_string(key.first) +
                      " has two outgoing boundary edges");
  }
  if (next.empty()) throw MeshError("empty boundary");
  std::vector<std::pair<int, int>> cycle;
  const int start = next.begin()->first;
  int v = start;
  do {
    const auto it = next.find(v);
    if (it == next.end()) throw MeshError("boundary is not a closed cycle");
    cycle.emplace_back(v, it->second);
    v = it->second;
    if (cycle.size() > next.size()) throw MeshError("boundary is not a closed cycle");
  } while (v != start);
  if (cycle.size() != next.size()) throw MeshError("boundary consists of more than one cycle");
  return cycle;
}

void derive_vertex_data(Mesh& mesh, const std::vector<char>& corner_flag) {
  const std::size_t n = mesh.boundary_edges.size();
  mesh.boundary_vertices.assign(n, BoundaryVertex{});
  for (std::size_t i = 0; i < n; ++i) {
    const int v = mesh.boundary_edges[i].a;
    const int prev = mesh.boundary_edges[(i + n - 1) % n].a;
    const int next = mesh.boundary_edges[i].b;
    auto& bv = mesh.boundary_vertices[i];
    bv.vertex = v;
    bv.is_corner = corner_flag[v] != 0;
    if (!bv.is_corner) {
      // Length-weighted average of the two adjacent chord normals.
      const Vec2 d = mesh.vertices[next] - mesh.vertices[prev];
      bv.normal = Vec2(d.y(), -d.x()).normalized();
    }
  }
  mesh.h_max = longest_edge(mesh);
}

}  // namespace

void attach_boundary_data(Mesh& mesh, const Domain& domain) {
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (signed_area(mesh, t) <= 0.0)
      throw MeshError("triangle " + std::to_string(t) + " has nonpositive area");
  }
  const auto cycle = boundary_cycle(mesh);
  const double tol = 1e-9 * domain.diameter();
  for (const auto& edge : cycle) {
    if (closest_boundary_point(domain, mesh.vertices[edge.first]).distance > tol)
      throw MeshError("boundary vertex " + std::to_string(edge.first) + " is off the domain boundary");
  }
  mesh.boundary_edges.clear();
  mesh.boundary_edges.reserve(cycle.size());
  for (const auto& [a, b] : cycle) {
    const Vec2 mid = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    const auto loc = closest_boundary_point(domain, mid);
    BoundaryEdge e;
    e.a = a;
    e.b = b;
    e.piece = loc.piece;
    e.kappa = signed_curvature(domain, loc.piece, loc.t);
    e.normal = outward_normal(domain, loc.piece, loc.t);
    mesh.boundary_edges.push_back(e);
  }

  std::vector<char> corner_flag(mesh.num_vertices(), 0);
  for (const auto& c : domain.corner_points()) {
    bool found = false;
    for (const auto& [a, b] : cycle) {
      if ((mesh.vertices[a] - c).norm() <= tol) {
        corner_flag[a] = 1;
        found = true;
      }
    }
    if (!found) throw MeshError("domain corner is not a mesh vertex");
  }
  derive_vertex_data(mesh, corner_flag);
}

Mesh generate_mesh(const Domain& domain, double target_h) {
  const double diameter = domain.diameter();
  if (!(target_h > 0.0)) throw MeshError("target_h must be positive");
  if (!(target_h < 0.5 * diameter))
    throw MeshError("target_h must be smaller than half the domain diameter");
  const double estimate = 2.5 * domain.signed_area() / (target_h * target_h);
  if (estimate > static_cast<double>(kVertexCap)) {
    std::ostringstream os;
    os << "target_h " << target_h << " exceeds the vertex cap of " << kVertexCap
       << "; smallest achievable h is about "
       << std::sqrt(2.5 * domain.signed_area() / static_cast<double>(kVertexCap));
    throw MeshError(os.str());
  }

  double min_corner = kPi;
  for (const auto& c : domain.corners()) min_corner = std::min(min_corner, c.interior_angle);
  const double angle_floor = std::min(20.0, min_corner * 180.0 / kPi - 1e-6);

  if (is_axis_aligned_rectangle(domain)) {
    Mesh mesh = structured_rectangle(domain, target_h);
    attach_boundary_data(mesh, domain);
    return mesh;
  }

  const bool mirrored = domain.symmetric_about_axes() && domain.num_pieces() == 1 &&
                        !domain.piece(0).is_straight() && domain.piece(0).is_closed();
  double spacing = 0.8 * target_h;
  double achieved_h = 0.0, achieved_angle = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Mesh mesh;
    try {
      mesh = mirrored ? mirrored_quadrants(domain, spacing, 0x9e3779b9ULL + attempt)
                      : generic_convex(domain, spacing, 0x9e3779b9ULL + attempt);
    } catch (const MeshError&) {
      spacing *= 0.97;
      continue;
    }
    attach_boundary_data(mesh, domain);
    achieved_h = mesh.h_max;
    achieved_angle = min_angle_degrees(mesh);
    if (achieved_h <= 1.5 * target_h && achieved_angle >= angle_floor) return mesh;
    spacing *= 0.92;
  }
  std::ostringstream os;
  os << "mesh generation failed to meet quality targets: achieved h " << achieved_h
     << " (target " << target_h << "), minimum angle " << achieved_angle << " degrees";
  throw MeshError(os.str());
}

Mesh refine_uniform(const Mesh& mesh, const Domain& domain) {
  Mesh fine;
  fine.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  std::vector<char> on_boundary_edge;
  std::map<std::pair<int, int>, bool> boundary;
  for (const auto& e : mesh.boundary_edges) boundary[{std::min(e.a, e.b), std::max(e.a, e.b)}] = true;

  const auto mid = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec2 p = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    if (boundary.count(key) != 0) p = closest_boundary_point(domain, p).point;
    const int id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back(p);
    midpoint.emplace(key, id);
    return id;
  };

  fine.triangles.reserve(4 * mesh.num_triangles());
  for (const auto& t : mesh.triangles) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    fine.triangles.push_back({t[0], ab, ca});
    fine.triangles.push_back({ab, t[1], bc});
    fine.triangles.push_back({ca, bc, t[2]});
    fine.triangles.push_back({ab, bc, ca});
  }
  attach_boundary_data(fine, domain);
  return fine;
}

Mesh scale_mesh(const Mesh& mesh, double factor) {
  if (!(factor > 0.0)) throw MeshError("scale factor must be positive");
  Mesh out = mesh;
  for (auto& v : out.vertices) v *= factor;
  for (auto& e : out.boundary_edges) e.kappa /= factor;
  out.h_max = longest_edge(out);
  return out;
}

Mesh rotate_mesh(const Mesh& mesh, double angle) {
  const Eigen::Rotation2Dd r(angle);
  Mesh out = mesh;
  for (auto& v : out.vertices) v = r * v;
  for (auto& e : out.boundary_edges) e.normal = r * e.normal;
  for (auto& bv : out.boundary_vertices)
    if (!bv.is_corner) bv.normal = r * bv.normal;
  out.h_max = longest_edge(out);
  return out;
}

void validate_mesh(const Mesh& mesh) {
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (int v : mesh.triangles[t])
      if (v < 0 || static_cast<std::size_t>(v) >= mesh.num_vertices())
        throw MeshError("triangle " + std::to_string(t) + " references a missing vertex");
    if (signed_area(mesh, t) <= 0.0)
      throw MeshError("triangle " + std::to_string(t) + " has nonpositive area");
  }
  const auto cycle = boundary_cycle(mesh);
  if (cycle.size() != mesh.boundary_edges.size())
    throw MeshError("boundary edge list does not match the triangulation");
  std::map<std::pair<int, int>, bool> listed;
  for (const auto& e : mesh.boundary_edges) listed[{e.a, e.b}] = true;
  for (const auto& key : cycle)
    if (listed.count(key) == 0) throw MeshError("boundary edge list does not match the triangulation");
  const std::size_t n = mesh.boundary_edges.size();
  for (std::size_t i = 0; i < n; ++i)
    if (mesh.boundary_edges[i].b != mesh.boundary_edges[(i + 1) % n].a)
      throw MeshError("boundary edges are not listed in cycle order");
}

// ---------------------------------------------------------------------------
// File format

namespace {

struct LineReader {
  std::istream& in;
  std::string source;
  std::size_t number = 0;

  std::string next(const char* what) {
    std::string line;
    while (std::getline(in, line)) {
      ++number;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
    }
    fail(std::string("unexpected end of file while reading ") + what);
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << source << ":" << number << ": " << what;
    throw ParseError(os.str());
  }
};

template <typename... T>
void parse_fields(LineReader& r, const std::string& line, const char* what, T&... out) {
  std::istringstream is(line);
  ((is >> out) && ...);
  std::string extra;
  if (is.fail() || (is >> extra)) r.fail(std::string("malformed ") + what + " line");
}

}  // namespace

Mesh read_mesh(std::istream& in, const std::string& source) {
  LineReader r{in, source};
  long long nv = 0, nt = 0, nbe = 0;
  parse_fields(r, r.next("header"), "header", nv, nt, nbe);
  if (nv < 3 || nt < 1) r.fail("malformed counts: need nv >= 3 and nt >= 1");
  if (nbe < 0) r.fail("malformed counts: negative boundary edge count");
  if (nbe == 0) r.fail("empty boundary");

  Mesh mesh;
  mesh.vertices.resize(static_cast<std::size_t>(nv));
  for (auto& v : mesh.vertices) {
    double x = 0.0, y = 0.0;
    parse_fields(r, r.next("vertex"), "vertex", x, y);
    v = Vec2(x, y);
  }
  mesh.triangles.resize(static_cast<std::size_t>(nt));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    long long i = 0, j = 0, k = 0;
    parse_fields(r, r.next("triangle"), "triangle", i, j, k);
    for (long long v : {i, j, k})
      if (v < 0 || v >= nv) r.fail("triangle references vertex index " + std::to_string(v) + " >= nv");
    mesh.triangles[t] = {static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)};
    if (signed_area(mesh, t) <= 0.0) r.fail("triangle is not counterclockwise or is degenerate");
  }
  mesh.boundary_edges.resize(static_cast<std::size_t>(nbe));
  for (auto& e : mesh.boundary_edges) {
    long long a = 0, b = 0, piece = 0;
    double kappa = 0.0, nx = 0.0, ny = 0.0;
    parse_fields(r, r.next("boundary edge"), "boundary edge", a, b, piece, kappa, nx, ny);
    if (a < 0 || a >= nv || b < 0 || b >= nv) r.fail("boundary edge references a missing vertex");
    if (piece < 0) r.fail("boundary edge has a negative piece id");
    e = BoundaryEdge{static_cast<int>(a), static_cast<int>(b), static_cast<std::size_t>(piece),
                     kappa, Vec2(nx, ny)};
  }
  const std::string corners_line = r.next("corners");
  if (corners_line.rfind("corners:", 0) != 0) r.fail("expected 'corners:' line");
  std::vector<char> corner_flag(mesh.num_vertices(), 0);
  {
    std::istringstream is(corners_line.substr(8));
    std::string token;
    while (is >> token) {
      std::size_t used = 0;
      long long c = -1;
      try {
        c = std::stoll(token, &used);
      } catch (const std::exception&) {
        r.fail("malformed corner index '" + token + "'");
      }
      if (used != token.size() || c < 0 || c >= nv) r.fail("corner index out of range");
      corner_flag[static_cast<std::size_t>(c)] = 1;
    }
  }
  try {
    validate_mesh(mesh);
  } catch (const MeshError& e) {
    r.fail(e.what());
  }
  for (std::size_t v = 0; v < corner_flag.size(); ++v) {
    if (corner_flag[v] == 0) continue;
    const bool on_boundary = std::any_of(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
                                         [v](const BoundaryEdge& e) { return e.a == static_cast<int>(v); });
    if (!on_boundary) r.fail("corner vertex " + std::to_string(v) + " is not on the boundary");
  }
  derive_vertex_data(mesh, corner_flag);
  return mesh;
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  return read_mesh(in, path.string());
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << mesh.num_vertices() << " " << mesh.num_triangles() << " " << mesh.boundary_edges.size()
      << "\n";
  for (const auto& v : mesh.vertices) out << format_double(v.x()) << " " << format_double(v.y()) << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (const auto& e : mesh.boundary_edges)
    out << e.a << " " << e.b << " " << e.piece << " " << format_double(e.kappa) << " "
        << format_double(e.normal.x()) << " " << format_double(e.normal.y()) << "\n";
  out << "corners:";
  for (const auto& bv : mesh.boundary_vertices)
    if (bv.is_corner) out << " " << bv.vertex;
  out << "\n";
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw MeshError("cannot write mesh file " + path.string());
    write_mesh(out, mesh);
    if (!out) throw MeshError("failed while writing mesh file " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::vector<int>> reflection_map(const Mesh& mesh, int axis) {
  Eigen::AlignedBox2d box;
  for (const auto& v : mesh.vertices) box.extend(v);
  const double tol = 1e-9 * box.diagonal().norm();
  std::vector<int> order(mesh.num_vertices());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return mesh.vertices[a].x() < mesh.vertices[b].x();
  });
  std::vector<double> xs(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) xs[i] = mesh.vertices[order[i]].x();

  std::vector<int> map(mesh.num_vertices(), -1);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    Vec2 target = mesh.vertices[v];
    target[axis] = -target[axis];
    const auto lo = std::lower_bound(xs.begin(), xs.end(), target.x() - tol);
    for (auto it = lo; it != xs.end() && *it <= target.x() + tol; ++it) {
      const int w = order[static_cast<std::size_t>(it - xs.begin())];
      if ((mesh.vertices[w] - target).norm() <= tol) {
        map[v] = w;
        break;
      }
    }
    if (map[v] < 0) return std::nullopt;
  }
  return map;
}

std::vector<double> barycenter_boundary_distance(const Mesh& mesh) {
  std::vector<double> out(mesh.num_triangles(), std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 c = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    for (const auto& e : mesh.boundary_edges)
      out[t] = std::min(out[t], point_segment_distance(c, mesh.vertices[e.a], mesh.vertices[e.b]));
  }
  return out;
}

}  // namespace hsfem
