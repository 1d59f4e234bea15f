#include "hsfem/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hsfem/error.hpp"

namespace hsfem {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

// Five-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 5> kGaussX = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                           0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussW = {0.2369268850561891, 0.4786286704993665,
                                           0.5688888888888889, 0.4786286704993665,
                                           0.2369268850561891};

template <typename F>
double integrate(F&& f, double lo, double hi, int panels) {
  double sum = 0.0;
  const double w = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * w;
    for (std::size_t q = 0; q < kGaussX.size(); ++q)
      sum += kGaussW[q] * f(mid + 0.5 * w * kGaussX[q]);
  }
  return 0.5 * w * sum;
}

struct ArcFrame {
  double theta;
  double dtheta;
};

ArcFrame arc_frame(const EllipticArc& arc, double t) {
  const double d = arc.theta_end - arc.theta_begin;
  return {arc.theta_begin + t * d, d};
}

double turning_angle(const Vec2& incoming, const Vec2& outgoing) {
  return std::atan2(cross(incoming, outgoing), incoming.dot(outgoing));
}

}  // namespace

Vec2 BoundaryPiece::point(double t) const {
  if (const auto* s = std::get_if<Segment>(&shape_)) return s->from + t * (s->to - s->from);
  const auto& a = std::get<EllipticArc>(shape_);
  const auto f = arc_frame(a, t);
  return a.center + rotate({a.semi_x * std::cos(f.theta), a.semi_y * std::sin(f.theta)}, a.phase);
}

Vec2 BoundaryPiece::deriv1(double t) const {
  if (const auto* s = std::get_if<Segment>(&shape_)) return s->to - s->from;
  const auto& a = std::get<EllipticArc>(shape_);
  const auto f = arc_frame(a, t);
  return rotate(
      {-f.dtheta * a.semi_x * std::sin(f.theta), f.dtheta * a.semi_y * std::cos(f.theta)},
      a.phase);
}

Vec2 BoundaryPiece::deriv2(double t) const {
  if (std::holds_alternative<Segment>(shape_)) return Vec2::Zero();
  const auto& a = std::get<EllipticArc>(shape_);
  const auto f = arc_frame(a, t);
  const double d2 = f.dtheta * f.dtheta;
  return rotate({-d2 * a.semi_x * std::cos(f.theta), -d2 * a.semi_y * std::sin(f.theta)},
                a.phase);
}

bool BoundaryPiece::is_closed() const {
  if (is_straight()) return false;
  const auto& a = std::get<EllipticArc>(shape_);
  return std::abs(std::abs(a.theta_end - a.theta_begin) - 2.0 * kPi) < 1e-12;
}

double BoundaryPiece::length() const {
  if (const auto* s = std::get_if<Segment>(&shape_)) return (s->to - s->from).norm();
  return integrate([this](double t) { return deriv1(t).norm(); }, 0.0, 1.0, 256);
}

BoundaryPiece BoundaryPiece::rotated(double angle) const {
  if (const auto* s = std::get_if<Segment>(&shape_))
    return BoundaryPiece(Segment{rotate(s->from, angle), rotate(s->to, angle)});
  auto a = std::get<EllipticArc>(shape_);
  a.center = rotate(a.center, angle);
  a.phase += angle;
  return BoundaryPiece(a);
}

BoundaryPiece BoundaryPiece::scaled(double factor) const {
  if (const auto* s = std::get_if<Segment>(&shape_))
    return BoundaryPiece(Segment{factor * s->from, factor * s->to});
  auto a = std::get<EllipticArc>(shape_);
  a.center *= factor;
  a.semi_x *= factor;
  a.semi_y *= factor;
  return BoundaryPiece(a);
}

Domain::Domain(std::vector<BoundaryPiece> pieces, DomainKind kind, std::string label)
    : pieces_(std::move(pieces)), kind_(kind), label_(std::move(label)) {
  if (pieces_.empty()) throw GeometryError("domain has no boundary pieces");

  for (const auto& p : pieces_) {
    for (int k = 0; k <= 32; ++k) {
      if (p.deriv1(k / 32.0).norm() <= 1e-12)
        throw GeometryError("singular parameterization");
    }
  }

  const double scale = diameter();
  const std::size_t n = pieces_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 end = pieces_[i].point(1.0);
    const Vec2 next = pieces_[(i + 1) % n].point(0.0);
    if ((end - next).norm() > 1e-12 * scale + 1e-15) {
      std::ostringstream os;
      os << "boundary is not closed: piece " << i << " ends at (" << end.x() << ", " << end.y()
         << ") but piece " << (i + 1) % n << " starts at (" << next.x() << ", " << next.y() << ")";
      throw GeometryError(os.str());
    }
  }

  if (signed_area() <= 0.0) throw GeometryError("boundary must be oriented counterclockwise");

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 in = pieces_[(i + n - 1) % n].deriv1(1.0);
    const Vec2 out = pieces_[i].deriv1(0.0);
    const double interior = kPi - turning_angle(in, out);
    if (interior > kPi + 1e-9) throw GeometryError("non-convex corner");
    if (interior <= 1e-9) throw GeometryError("degenerate corner with zero interior angle");
    if (interior < kPi - 1e-9) corners_.push_back({i, interior});
  }
}

bool Domain::is_corner(std::size_t piece, double t) const {
  const std::size_t n = pieces_.size();
  for (const auto& c : corners_) {
    if (c.piece == piece && t <= 1e-12) return true;
    if (c.piece == (piece + 1) % n && t >= 1.0 - 1e-12) return true;
  }
  return false;
}

std::vector<Vec2> Domain::corner_points() const {
  std::vector<Vec2> out;
  out.reserve(corners_.size());
  for (const auto& c : corners_) out.push_back(pieces_[c.piece].point(0.0));
  return out;
}

double Domain::signed_area() const {
  double area = 0.0;
  for (const auto& p : pieces_) {
    if (const auto* s = std::get_if<Segment>(&p.shape())) {
      area += 0.5 * cross(s->from, s->to);
    } else {
      area += integrate([&p](double t) { return 0.5 * cross(p.point(t), p.deriv1(t)); }, 0.0,
                        1.0, 128);
    }
  }
  return area;
}

double Domain::perimeter() const {
  double sum = 0.0;
  for (const auto& p : pieces_) sum += p.length();
  return sum;
}

Eigen::AlignedBox2d Domain::bounding_box() const {
  Eigen::AlignedBox2d box;
  for (const auto& p : pieces_) {
    const int samples = p.is_straight() ? 1 : 1024;
    for (int k = 0; k <= samples; ++k) box.extend(p.point(static_cast<double>(k) / samples));
  }
  return box;
}

double Domain::diameter() const { return bounding_box().diagonal().norm(); }

Vec2 outward_normal(const Domain& domain, std::size_t piece, double t) {
  if (domain.is_corner(piece, t)) throw GeometryError("normal undefined at corner");
  const Vec2 d = domain.piece(piece).deriv1(t);
  const double len = d.norm();
  if (len <= 1e-12) throw GeometryError("singular parameterization");
  return Vec2(d.y(), -d.x()) / len;
}

double signed_curvature(const Domain& domain, std::size_t piece, double t) {
  const auto& p = domain.piece(piece);
  const Vec2 d1 = p.deriv1(t);
  const double len = d1.norm();
  if (len <= 1e-12) throw GeometryError("singular parameterization");
  if (p.is_straight()) return 0.0;
  return -cross(d1, p.deriv2(t)) / (len * len * len);
}

BoundaryLocation closest_point_on_piece(const BoundaryPiece& piece, const Vec2& p) {
  BoundaryLocation best;
  if (const auto* s = std::get_if<Segment>(&piece.shape())) {
    const Vec2 d = s->to - s->from;
    const double t = std::clamp((p - s->from).dot(d) / d.squaredNorm(), 0.0, 1.0);
    best.t = t;
    best.point = piece.point(t);
    best.distance = (best.point - p).norm();
    return best;
  }

  const bool closed = piece.is_closed();
  constexpr int kCoarse = 256;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kCoarse; ++k) {
    const double t = static_cast<double>(k) / kCoarse;
    const double d2 = (piece.point(t) - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.t = t;
    }
  }
  double t = best.t;
  for (int it = 0; it < 50; ++it) {
    const Vec2 r = piece.point(t) - p;
    const Vec2 d1 = piece.deriv1(t);
    const double g = r.dot(d1);
    const double dg = d1.squaredNorm() + r.dot(piece.deriv2(t));
    if (dg <= 0.0) break;
    double next = t - g / dg;
    if (closed) {
      next -= std::floor(next);
    } else {
      next = std::clamp(next, 0.0, 1.0);
    }
    const double step = std::abs(next - t);
    t = next;
    if (step < 1e-15) break;
  }
  best.t = t;
  best.point = piece.point(t);
  best.distance = (best.point - p).norm();
  return best;
}

BoundaryLocation closest_boundary_point(const Domain& domain, const Vec2& p) {
  BoundaryLocation best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < domain.num_pieces(); ++i) {
    auto loc = closest_point_on_piece(domain.piece(i), p);
    if (loc.distance < best.distance) {
      loc.piece = i;
      best = loc;
    }
  }
  return best;
}

std::vector<double> arclength_parameters(const BoundaryPiece& piece, double t_begin, double t_end,
                                         std::size_t n) {
  std::vector<double> ts(n + 1);
  if (piece.is_straight()) {
    for (std::size_t k = 0; k <= n; ++k)
      ts[k] = t_begin + (t_end - t_begin) * static_cast<double>(k) / static_cast<double>(n);
    return ts;
  }
  constexpr std::size_t kTable = 4096;
  std::vector<double> cumulative(kTable + 1, 0.0);
  const double dt = (t_end - t_begin) / kTable;
  for (std::size_t i = 0; i < kTable; ++i) {
    const double lo = t_begin + i * dt;
    cumulative[i + 1] =
        cumulative[i] + integrate([&](double t) { return piece.deriv1(t).norm(); }, lo, lo + dt, 1);
  }
  const double total = cumulative.back();
  ts.front() = t_begin;
  ts.back() = t_end;
  for (std::size_t k = 1; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t i = static_cast<std::size_t>(std::distance(cumulative.begin(), it)) - 1;
    const double frac = (target - cumulative[i]) / (cumulative[i + 1] - cumulative[i]);
    double t = t_begin + (i + frac) * dt;
    // One Newton correction on s(t) = target.
    const double s_at =
        cumulative[i] + integrate([&](double u) { return piece.deriv1(u).norm(); },
                                  t_begin + i * dt, t, 1);
    t -= (s_at - target) / piece.deriv1(t).norm();
    ts[k] = t;
  }
  return ts;
}

Domain make_disk(double radius) {
  if (!(radius > 0.0)) throw GeometryError("disk radius must be positive");
  EllipticArc arc{Vec2::Zero(), radius, radius, 0.0, 0.0, 2.0 * kPi};
  std::ostringstream label;
  label << "disk:" << radius;
  Domain d({BoundaryPiece(arc)}, DomainKind::disk, label.str());
  d.set_symmetric_about_axes(true);
  return d;
}

Domain make_ellipse(double semi_x, double semi_y) {
  if (!(semi_x > 0.0 && semi_y > 0.0)) throw GeometryError("ellipse semi-axes must be positive");
  EllipticArc arc{Vec2::Zero(), semi_x, semi_y, 0.0, 0.0, 2.0 * kPi};
  std::ostringstream label;
  label << "ellipse:" << semi_x << "," << semi_y;
  Domain d({BoundaryPiece(arc)}, DomainKind::ellipse, label.str());
  d.set_symmetric_about_axes(true);
  return d;
}

Domain make_rectangle(double width, double height, const Vec2& origin) {
  if (!(width > 0.0 && height > 0.0)) throw GeometryError("rectangle sides must be positive");
  const Vec2 p0 = origin;
  const Vec2 p1 = origin + Vec2(width, 0.0);
  const Vec2 p2 = origin + Vec2(width, height);
  const Vec2 p3 = origin + Vec2(0.0, height);
  std::vector<BoundaryPiece> pieces{BoundaryPiece(Segment{p0, p1}), BoundaryPiece(Segment{p1, p2}),
                                    BoundaryPiece(Segment{p2, p3}), BoundaryPiece(Segment{p3, p0})};
  std::ostringstream label;
  label << "rectangle:" << width << "," << height;
  Domain d(std::move(pieces), DomainKind::rectangle, label.str());
  d.set_symmetric_about_axes(origin.x() == -0.5 * width && origin.y() == -0.5 * height);
  return d;
}

namespace {

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return cross(q - p, r - p);
  };
  const auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

Domain make_polygon(const std::vector<Vec2>& vertices, const std::string& name) {
  const std::size_t n = vertices.size();
  if (n < 3) throw GeometryError("polygon needs at least three vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if ((vertices[i] - vertices[(i + 1) % n]).norm() == 0.0)
      throw GeometryError("polygon has repeated consecutive vertices");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                             vertices[(j + 1) % n]))
        throw GeometryError("self-intersecting polygon");
    }
  }
  std::vector<BoundaryPiece> pieces;
  pieces.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pieces.emplace_back(Segment{vertices[i], vertices[(i + 1) % n]});
  return Domain(std::move(pieces), DomainKind::polygon, name);
}

void validate_lip_profile(const LipProfile& profile, std::size_t grid) {
  if (!profile.lower || !profile.upper) throw GeometryError("lip profile is missing a function");
  if (!(profile.b > profile.a)) throw GeometryError("lip profile interval must satisfy a < b");
  if (grid < 2) throw GeometryError("lip profile grid too small");
  const double scale = profile.b - profile.a;
  if (std::abs(profile.lower(profile.a) - profile.upper(profile.a)) > 1e-12 * scale ||
      std::abs(profile.lower(profile.b) - profile.upper(profile.b)) > 1e-12 * scale)
    throw GeometryError("lip profile must pinch at both ends: f1(a) = f2(a), f1(b) = f2(b)");
  std::vector<double> xs(grid), lo(grid), hi(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    xs[i] = profile.a + (profile.b - profile.a) * static_cast<double>(i) / (grid - 1);
    lo[i] = profile.lower(xs[i]);
    hi[i] = profile.upper(xs[i]);
    if (i > 0 && i + 1 < grid && !(lo[i] < hi[i]))
      throw GeometryError("lip profile requires f1 < f2 inside (a, b)");
  }
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = i + 1; j < grid; ++j) {
      const double dx = xs[j] - xs[i];
      if (std::abs(lo[j] - lo[i]) > (1.0 + 1e-9) * dx ||
          std::abs(hi[j] - hi[i]) > (1.0 + 1e-9) * dx)
        throw GeometryError("lip profile has Lipschitz constant above one");
    }
  }
}

Domain make_lip_polygon(const LipProfile& profile, std::size_t samples) {
  if (samples < 2) throw GeometryError("lip polygon needs at least two samples");
  validate_lip_profile(profile);
  std::vector<Vec2> vertices;
  const auto x_at = [&](std::size_t i) {
    return profile.a + (profile.b - profile.a) * static_cast<double>(i) / samples;
  };
  for (std::size_t i = 0; i <= samples; ++i) vertices.emplace_back(x_at(i), profile.lower(x_at(i)));
  for (std::size_t i = samples - 1; i >= 1; --i)
    vertices.emplace_back(x_at(i), profile.upper(x_at(i)));
  return make_polygon(vertices, "lip_polygon");
}

Domain make_canonical(const CanonicalShape& shape) {
  return std::visit(
      [](const auto& s) -> Domain {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DiskShape>) {
          return make_disk(s.radius);
        } else if constexpr (std::is_same_v<T, RectangleShape>) {
          return make_rectangle(s.width, s.height, s.origin);
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          return make_ellipse(s.semi_x, s.semi_y);
        } else if constexpr (std::is_same_v<T, PolygonShape>) {
          return make_polygon(s.vertices, s.name);
        } else {
          return make_lip_polygon(s.profile, s.samples);
        }
      },
      shape);
}

namespace {

// Dense polyline approximation of the boundary.
std::vector<Vec2> boundary_polyline(const Domain& domain) {
  std::vector<Vec2> pts;
  for (const auto& p : domain.pieces()) {
    const int samples = p.is_straight() ? 1 : 4096;
    for (int k = 0; k < samples; ++k) pts.push_back(p.point(static_cast<double>(k) / samples));
  }
  return pts;
}

}  // namespace

LipCheck is_lip_domain(const Domain& domain, std::size_t grid) {
  if (grid < 64) throw GeometryError("lip check grid must be at least 64");
  const auto pts = boundary_polyline(domain);
  const std::size_t n = pts.size();
  const auto box = domain.bounding_box();
  const double a = box.min().x(), b = box.max().x();
  const double scale = domain.diameter();
  const double tol = 1e-12 * scale;

  bool degenerate_left = false, degenerate_right = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % n];
    if (std::abs(p.x() - q.x()) <= tol && std::abs(p.y() - q.y()) > tol) {
      if (std::abs(p.x() - a) <= tol * 1e3) {
        degenerate_left = true;
      } else if (std::abs(p.x() - b) <= tol * 1e3) {
        degenerate_right = true;
      } else {
        return {false, "cross section not an interval graph"};
      }
    }
  }

  std::vector<double> xs(grid), lower(grid), upper(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    const double x = a + (b - a) * static_cast<double>(g) / (grid - 1);
    xs[g] = x;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> hits;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = pts[i];
      const Vec2& q = pts[(i + 1) % n];
      const double xmin = std::min(p.x(), q.x()), xmax = std::max(p.x(), q.x());
      if (x < xmin - tol || x > xmax + tol) continue;
      if (xmax - xmin <= tol) {
        hits.push_back(p.y());
        hits.push_back(q.y());
      } else {
        const double s = std::clamp((x - p.x()) / (q.x() - p.x()), 0.0, 1.0);
        hits.push_back(p.y() + s * (q.y() - p.y()));
      }
    }
    std::sort(hits.begin(), hits.end());
    // Interior cross sections of a simply connected domain bounded by two
    // graphs meet the boundary in exactly two heights.
    std::vector<double> distinct;
    for (double y : hits)
      if (distinct.empty() || y - distinct.back() > 1e-9 * scale) distinct.push_back(y);
    const bool end_slice = g == 0 || g + 1 == grid;
    if (!end_slice && distinct.size() != 2) return {false, "cross section not an interval graph"};
    lo = hits.front();
    hi = hits.back();
    lower[g] = lo;
    upper[g] = hi;
  }

  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = i + 1; j < grid; ++j) {
      const double dx = xs[j] - xs[i];
      const double s1 = std::abs(lower[j] - lower[i]) / dx;
      const double s2 = std::abs(upper[j] - upper[i]) / dx;
      if (s1 > 1.0 + 1e-9 || s2 > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "Lipschitz constant above one: " << (s1 > s2 ? "lower" : "upper")
           << " profile slope " << std::max(s1, s2) << " between x=" << xs[i] << " and x=" << xs[j];
        return {false, os.str()};
      }
    }
  }

  const bool pinched_left = std::abs(upper.front() - lower.front()) <= 1e-9 * scale;
  const bool pinched_right = std::abs(upper.back() - lower.back()) <= 1e-9 * scale;
  if (!pinched_left || !pinched_right || degenerate_left || degenerate_right) {
    std::ostringstream os;
    os << "degenerate endpoints:";
    if (!pinched_left) os << " f1(a) != f2(a)";
    if (!pinched_right) os << " f1(b) != f2(b)";
    return {true, os.str()};
  }
  return {true, ""};
}

Domain rotate_domain(const Domain& domain, double angle) {
  std::vector<BoundaryPiece> pieces;
  pieces.reserve(domain.num_pieces());
  for (const auto& p : domain.pieces()) pieces.push_back(p.rotated(angle));
  DomainKind kind = domain.kind();
  if (kind == DomainKind::rectangle && angle != 0.0) kind = DomainKind::polygon;
  std::ostringstream label;
  label << domain.label() << "@rot" << angle;
  Domain rotated(std::move(pieces), kind, label.str());
  const double quarter_turns = angle / (0.5 * kPi);
  const bool axis_preserving = std::abs(quarter_turns - std::round(quarter_turns)) < 1e-14;
  rotated.set_symmetric_about_axes(domain.symmetric_about_axes() &&
                                   (kind == DomainKind::disk || axis_preserving));
  return rotated;
}

Domain scale_domain(const Domain& domain, double factor) {
  if (!(factor > 0.0)) throw GeometryError("scale factor must be positive");
  std::vector<BoundaryPiece> pieces;
  pieces.reserve(domain.num_pieces());
  for (const auto& p : domain.pieces()) pieces.push_back(p.scaled(factor));
  std::ostringstream label;
  label << domain.label() << "*" << factor;
  Domain scaled(std::move(pieces), domain.kind(), label.str());
  scaled.set_symmetric_about_axes(domain.symmetric_about_axes());
  return scaled;
}

QuadrantCheck normals_in_opposite_quadrants(const Domain& domain, std::size_t samples) {
  if (samples < 16) throw GeometryError("quadrant check needs at least 16 samples per piece");
  for (std::size_t i = 0; i < domain.num_pieces(); ++i) {
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = (k + 0.5) / static_cast<double>(samples);
      const Vec2 nu = outward_normal(domain, i, t);
      if (nu.x() * nu.y() > 1e-12)
        return {false, domain.piece(i).point(t), nu};
    }
  }
  return {};
}

}  // namespace hsfem
