#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hsfem {

using Vec2 = Eigen::Vector2d;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Segment {
  Vec2 from;
  Vec2 to;
};

// center + R(phase) * (semi_x cos(theta), semi_y sin(theta)),
// theta = theta_begin + t (theta_end - theta_begin).
struct EllipticArc {
  Vec2 center = Vec2::Zero();
  double semi_x = 1.0;
  double semi_y = 1.0;
  double phase = 0.0;
  double theta_begin = 0.0;
  double theta_end = 0.0;
};

// One smooth piece of a boundary, parameterized over t in [0, 1] and
// oriented counterclockwise with respect to the enclosed domain.
class BoundaryPiece {
 public:
  using Shape = std::variant<Segment, EllipticArc>;

  explicit BoundaryPiece(Shape shape) : shape_(std::move(shape)) {}

  Vec2 point(double t) const;
  Vec2 deriv1(double t) const;
  Vec2 deriv2(double t) const;

  bool is_straight() const { return std::holds_alternative<Segment>(shape_); }
  bool is_closed() const;  // start point equals end point (a full ellipse)
  double length() const;
  const Shape& shape() const { return shape_; }

  BoundaryPiece rotated(double angle) const;
  BoundaryPiece scaled(double factor) const;

 private:
  Shape shape_;
};

// Corner sitting at the start point of `piece` (the junction with the
// previous piece).
struct Corner {
  std::size_t piece = 0;
  double interior_angle = 0.0;
};

enum class DomainKind { disk, ellipse, rectangle, polygon };

class Domain {
 public:
  // Validates closure, regularity, CCW winding and convexity of corners, and
  // derives the corner list from one-sided tangents.
  Domain(std::vector<BoundaryPiece> pieces, DomainKind kind, std::string label);

  const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
  const BoundaryPiece& piece(std::size_t i) const { return pieces_.at(i); }
  std::size_t num_pieces() const { return pieces_.size(); }
  const std::vector<Corner>& corners() const { return corners_; }
  DomainKind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  // True when the domain is mirror symmetric about both coordinate axes;
  // the mesh generator then builds a mirror-symmetric triangulation.
  bool symmetric_about_axes() const { return symmetric_; }
  void set_symmetric_about_axes(bool s) { symmetric_ = s; }

  bool is_corner(std::size_t piece, double t) const;
  std::vector<Vec2> corner_points() const;

  double signed_area() const;
  double perimeter() const;
  double diameter() const;  // of the bounding box
  Eigen::AlignedBox2d bounding_box() const;

 private:
  std::vector<BoundaryPiece> pieces_;
  std::vector<Corner> corners_;
  DomainKind kind_;
  std::string label_;
  bool symmetric_ = false;
};

Vec2 outward_normal(const Domain& domain, std::size_t piece, double t);
double signed_curvature(const Domain& domain, std::size_t piece, double t);

// Closest boundary point to `p`.
struct BoundaryLocation {
  std::size_t piece = 0;
  double t = 0.0;
  Vec2 point = Vec2::Zero();
  double distance = 0.0;
};
BoundaryLocation closest_boundary_point(const Domain& domain, const Vec2& p);
BoundaryLocation closest_point_on_piece(const BoundaryPiece& piece, const Vec2& p);

// Parameter values splitting [t_begin, t_end] of a piece into `n` arcs of
// equal length.
std::vector<double> arclength_parameters(const BoundaryPiece& piece, double t_begin, double t_end,
                                         std::size_t n);

// Canonical constructors.
struct DiskShape {
  double radius = 1.0;
};
struct RectangleShape {
  double width = 1.0;
  double height = 1.0;
  Vec2 origin = Vec2::Zero();  // lower-left corner
};
struct EllipseShape {
  double semi_x = 2.0;
  double semi_y = 1.0;
};
struct PolygonShape {
  std::vector<Vec2> vertices;  // CCW
  std::string name = "polygon";
};
struct LipProfile {
  std::function<double(double)> lower;  // f1
  std::function<double(double)> upper;  // f2
  double a = 0.0;
  double b = 1.0;
};
struct LipPolygonShape {
  LipProfile profile;
  std::size_t samples = 64;
};
using CanonicalShape =
    std::variant<DiskShape, RectangleShape, EllipseShape, PolygonShape, LipPolygonShape>;

Domain make_canonical(const CanonicalShape& shape);
Domain make_disk(double radius);
Domain make_rectangle(double width, double height, const Vec2& origin = Vec2::Zero());
Domain make_ellipse(double semi_x, double semi_y);
Domain make_polygon(const std::vector<Vec2>& vertices, const std::string& name = "polygon");
Domain make_lip_polygon(const LipProfile& profile, std::size_t samples);

// Lipschitz constant of both profiles must be at most one on a uniform grid.
void validate_lip_profile(const LipProfile& profile, std::size_t grid = 512);

struct LipCheck {
  bool is_lip = false;
  std::string reason;
};
LipCheck is_lip_domain(const Domain& domain, std::size_t grid = 512);

Domain rotate_domain(const Domain& domain, double angle);
Domain scale_domain(const Domain& domain, double factor);

struct QuadrantCheck {
  bool holds = true;
  std::optional<Vec2> failure_point;
  std::optional<Vec2> failure_normal;
};
QuadrantCheck normals_in_opposite_quadrants(const Domain& domain, std::size_t samples = 64);

}  // namespace hsfem
