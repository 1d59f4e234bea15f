#include "triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hsfem/error.hpp"

namespace hsfem::detail {

namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] lies across the edge opposite v[i]; -1 on the boundary
};

class Triangulator {
 public:
  explicit Triangulator(std::vector<Vec2> points) : pts_(std::move(points)) {}

  std::vector<Vec2>& points() { return pts_; }
  std::vector<Tri>& tris() { return tris_; }

  void fan(int center, int loop_size) {
    tris_.clear();
    for (int i = 0; i < loop_size; ++i) {
      const int next = (i + 1) % loop_size;
      Tri t;
      t.v = {i, next, center};
      t.nb = {(i + 1) % loop_size, (i + loop_size - 1) % loop_size, -1};
      if (orient(t.v[0], t.v[1], pts_[center]) <= 0.0)
        throw MeshError("fan center is not strictly inside the boundary loop");
      tris_.push_back(t);
    }
  }

  void legalize_all() {
    std::vector<std::pair<int, int>> stack;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      for (int i = 0; i < 3; ++i)
        if (tris_[t].nb[i] >= 0) stack.emplace_back(t, i);
    std::size_t budget = 200 * tris_.size() + 1000;
    while (!stack.empty()) {
      if (budget-- == 0) throw MeshError("edge flipping did not terminate");
      const auto [t, i] = stack.back();
      stack.pop_back();
      if (!illegal(t, i)) continue;
      const int u = tris_[t].nb[i];
      flip(t, i);
      for (int k = 0; k < 3; ++k) {
        stack.emplace_back(t, k);
        stack.emplace_back(u, k);
      }
    }
  }

  void insert(int p) {
    const int t = locate(pts_[p]);
    if (t < 0) throw MeshError("interior point lies outside the boundary loop");
    const Tri old = tris_[t];
    for (int k = 0; k < 3; ++k) {
      if (orient(old.v[(k + 1) % 3], old.v[(k + 2) % 3], pts_[p]) <= area_eps(old))
        throw MeshError("interior point coincides with an existing edge");
    }
    const int a = old.v[0], b = old.v[1], c = old.v[2];
    const int na = old.nb[0], nbb = old.nb[1], nc = old.nb[2];
    const int t1 = static_cast<int>(tris_.size());
    const int t2 = t1 + 1;
    tris_[t] = Tri{{a, b, p}, {t1, t2, nc}};
    tris_.push_back(Tri{{b, c, p}, {t2, t, na}});
    tris_.push_back(Tri{{c, a, p}, {t, t1, nbb}});
    if (na >= 0) replace_neighbor(na, t, t1);
    if (nbb >= 0) replace_neighbor(nbb, t, t2);
    last_ = t;

    std::vector<std::pair<int, int>> stack{{t, 2}, {t1, 2}, {t2, 2}};
    while (!stack.empty()) {
      const auto [s, i] = stack.back();
      stack.pop_back();
      if (!illegal(s, i)) continue;
      const int u = tris_[s].nb[i];
      flip(s, i);
      stack.emplace_back(s, 0);
      stack.emplace_back(u, 0);
    }
  }

  // One sweep of Laplacian smoothing over vertices with index >= first_free.
  void smooth(int first_free) {
    const int n = static_cast<int>(pts_.size());
    std::vector<std::vector<int>> incident(n);
    std::vector<std::vector<int>> neighbors(n);
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      for (int k = 0; k < 3; ++k) {
        const int v = tris_[t].v[k];
        incident[v].push_back(t);
        neighbors[v].push_back(tris_[t].v[(k + 1) % 3]);
        neighbors[v].push_back(tris_[t].v[(k + 2) % 3]);
      }
    }
    for (int v = first_free; v < n; ++v) {
      auto& nb = neighbors[v];
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      if (nb.empty()) continue;
      Vec2 target = Vec2::Zero();
      for (int w : nb) target += pts_[w];
      target /= static_cast<double>(nb.size());
      const Vec2 saved = pts_[v];
      pts_[v] = target;
      bool ok = true;
      for (int t : incident[v]) {
        const auto& tv = tris_[t].v;
        const double area = cross(pts_[tv[1]] - pts_[tv[0]], pts_[tv[2]] - pts_[tv[0]]);
        if (area <= 0.0) {
          ok = false;
          break;
        }
      }
      if (!ok) pts_[v] = saved;
    }
  }

 private:
  double orient(int a, int b, const Vec2& p) const {
    return cross(pts_[b] - pts_[a], p - pts_[a]);
  }

  double area_eps(const Tri& t) const {
    const double l = std::max({(pts_[t.v[0]] - pts_[t.v[1]]).squaredNorm(),
                               (pts_[t.v[1]] - pts_[t.v[2]]).squaredNorm(),
                               (pts_[t.v[2]] - pts_[t.v[0]]).squaredNorm()});
    return 1e-12 * l;
  }

  void replace_neighbor(int t, int from, int to) {
    for (int k = 0; k < 3; ++k) {
      if (tris_[t].nb[k] == from) {
        tris_[t].nb[k] = to;
        return;
      }
    }
    throw MeshError("triangulation adjacency is inconsistent");
  }

  int slot_of(int t, int neighbor) const {
    for (int k = 0; k < 3; ++k)
      if (tris_[t].nb[k] == neighbor) return k;
    throw MeshError("triangulation adjacency is inconsistent");
  }

  // Edge opposite v[i] of triangle t is illegal when the opposite vertex of
  // the neighbor lies strictly inside the circumcircle and the flip keeps
  // both triangles nondegenerate.
  bool illegal(int t, int i) const {
    const int u = tris_[t].nb[i];
    if (u < 0) return false;
    const int j = slot_of(u, t);
    const int a = tris_[t].v[i], b = tris_[t].v[(i + 1) % 3], c = tris_[t].v[(i + 2) % 3];
    const int d = tris_[u].v[j];
    const Vec2 pa = pts_[a] - pts_[d], pb = pts_[b] - pts_[d], pc = pts_[c] - pts_[d];
    const double det = pa.squaredNorm() * cross(pb, pc) + pb.squaredNorm() * cross(pc, pa) +
                       pc.squaredNorm() * cross(pa, pb);
    const double l2 = std::max({pa.squaredNorm(), pb.squaredNorm(), pc.squaredNorm()});
    if (det <= 1e-12 * l2 * l2) return false;
    const double eps = 1e-12 * l2;
    return orient(a, b, pts_[d]) > eps && orient(a, d, pts_[c]) > eps;
  }

  void flip(int t, int i) {
    const int u = tris_[t].nb[i];
    const int j = slot_of(u, t);
    const int a = tris_[t].v[i], b = tris_[t].v[(i + 1) % 3], c = tris_[t].v[(i + 2) % 3];
    const int d = tris_[u].v[j];
    const int nb_t_b = tris_[t].nb[(i + 1) % 3];
    const int nb_t_c = tris_[t].nb[(i + 2) % 3];
    const int nb_u_c = tris_[u].nb[(j + 1) % 3];
    const int nb_u_b = tris_[u].nb[(j + 2) % 3];
    tris_[t] = Tri{{a, b, d}, {nb_u_c, u, nb_t_c}};
    tris_[u] = Tri{{a, d, c}, {nb_u_b, nb_t_b, t}};
    if (nb_u_c >= 0) replace_neighbor(nb_u_c, u, t);
    if (nb_t_b >= 0) replace_neighbor(nb_t_b, t, u);
  }

  int locate(const Vec2& p) {
    int t = std::clamp(last_, 0, static_cast<int>(tris_.size()) - 1);
    const std::size_t cap = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < cap; ++step) {
      int next = -2;
      for (int k = 0; k < 3; ++k) {
        const int e = (k + static_cast<int>(step)) % 3;
        if (orient(tris_[t].v[(e + 1) % 3], tris_[t].v[(e + 2) % 3], p) < 0.0) {
          next = tris_[t].nb[e];
          break;
        }
      }
      if (next == -2) return t;
      if (next == -1) break;
      t = next;
    }
    for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k)
        inside = orient(tris_[s].v[(k + 1) % 3], tris_[s].v[(k + 2) % 3], p) >= 0.0;
      if (inside) return s;
    }
    return -1;
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  int last_ = 0;
};

}  // namespace

PlanarTriangulation triangulate_convex_region(const std::vector<Vec2>& loop,
                                              const std::vector<Vec2>& interior,
                                              int smoothing_sweeps) {
  if (loop.size() < 3) throw MeshError("boundary loop needs at least three points");
  // The first interior point (or the loop centroid when there is none)
  // seeds a fan triangulation of the convex loop.
  std::vector<Vec2> pts = loop;
  if (interior.empty()) {
    Vec2 center = Vec2::Zero();
    for (const auto& p : loop) center += p;
    pts.push_back(center / static_cast<double>(loop.size()));
  }
  pts.insert(pts.end(), interior.begin(), interior.end());

  const int loop_size = static_cast<int>(loop.size());
  Triangulator tri(std::move(pts));
  tri.fan(loop_size, loop_size);
  tri.legalize_all();
  for (int p = loop_size + 1; p < static_cast<int>(tri.points().size()); ++p) tri.insert(p);
  for (int s = 0; s < smoothing_sweeps; ++s) {
    tri.smooth(loop_size);
    tri.legalize_all();
  }

  PlanarTriangulation out;
  out.points = tri.points();
  out.triangles.reserve(tri.tris().size());
  for (const auto& t : tri.tris()) out.triangles.push_back(t.v);
  return out;
}

}  // namespace hsfem::detail
