// Incremental Delaunay triangulation of the unit square (Lawson flips) with
// Ruppert-style refinement. Boundary edges are the only constrained segments;
// a triangle edge without neighbor is a boundary segment.
#include <algorithm>
#include <cmath>
#include <limits>

#include "ugfem/errors.hpp"
#include "ugfem/mesh.hpp"

namespace ugfem {

namespace {

constexpr double kMinAngle = 20.5;  // degrees; Ruppert terminates below ~20.7

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d lies inside the circumcircle of the counterclockwise triangle abc.
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  double adx = a.x() - d.x(), ady = a.y() - d.y();
  double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nbr;  // nbr[i] across the edge opposite v[i]
  bool alive = true;
};

class Triangulator {
 public:
  std::vector<Vec2> pts;
  std::vector<Tri> tris;

  Triangulator() {
    pts = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    tris.push_back({{0, 1, 2}, {-1, 1, -1}});
    tris.push_back({{0, 2, 3}, {-1, -1, 0}});
  }

  static int edge_of(const Tri& t, int a, int b) {
    for (int i = 0; i < 3; ++i) {
      int p = t.v[(i + 1) % 3], q = t.v[(i + 2) % 3];
      if ((p == a && q == b) || (p == b && q == a)) return i;
    }
    return -1;
  }

  void relink(int t, int a, int b, int nb) {
    if (t < 0) return;
    int i = edge_of(tris[t], a, b);
    if (i < 0) fail(ErrorCode::Internal, "mesh generator lost adjacency");
    tris[t].nbr[i] = nb;
  }

  int index_of(const Tri& t, int v) const {
    for (int i = 0; i < 3; ++i)
      if (t.v[i] == v) return i;
    return -1;
  }

  // Returns (triangle, local edge or -1) containing p; edge >= 0 when p is on it.
  std::pair<int, int> locate(const Vec2& p) const {
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      const auto& v = tris[t].v;
      double o[3];
      bool inside = true;
      for (int i = 0; i < 3; ++i) {
        const Vec2& a = pts[v[(i + 1) % 3]];
        const Vec2& b = pts[v[(i + 2) % 3]];
        o[i] = orient(a, b, p) / (b - a).norm();
        if (o[i] < -1e-13) inside = false;
      }
      if (!inside) continue;
      for (int i = 0; i < 3; ++i)
        if (std::abs(o[i]) <= 1e-13) return {t, i};
      return {t, -1};
    }
    return {-1, -1};
  }

  void legalize(std::vector<std::pair<int, int>>& stack) {
    while (!stack.empty()) {
      auto [t, p] = stack.back();
      stack.pop_back();
      if (!tris[t].alive) continue;
      int ia = index_of(tris[t], p);
      if (ia < 0) continue;
      int u = tris[t].nbr[ia];
      if (u < 0) continue;
      int a = p, b = tris[t].v[(ia + 1) % 3], c = tris[t].v[(ia + 2) % 3];
      int ju = edge_of(tris[u], b, c);
      int d = tris[u].v[ju];
      if (incircle(pts[a], pts[b], pts[c], pts[d]) <= 0) continue;
      int n_ab = tris[t].nbr[index_of(tris[t], c)];
      int n_ca = tris[t].nbr[index_of(tris[t], b)];
      int n_bd = tris[u].nbr[index_of(tris[u], c)];
      int n_dc = tris[u].nbr[index_of(tris[u], b)];
      tris[t] = {{a, b, d}, {n_bd, u, n_ab}};
      tris[u] = {{a, d, c}, {n_dc, n_ca, t}};
      relink(n_bd, b, d, t);
      relink(n_ca, c, a, u);
      stack.push_back({t, a});
      stack.push_back({u, a});
    }
  }

  int add_point(const Vec2& p) {
    auto [t, edge] = locate(p);
    if (t < 0) fail(ErrorCode::Internal, "mesh generator point outside the domain");
    for (int v : tris[t].v)
      if ((pts[v] - p).norm() < 1e-12) return v;
    int id = static_cast<int>(pts.size());
    pts.push_back(p);
    std::vector<std::pair<int, int>> stack;
    if (edge < 0) {
      auto [a, b, c] = tris[t].v;
      auto [na, nb, nc] = tris[t].nbr;
      int t1 = static_cast<int>(tris.size()), t2 = t1 + 1;
      tris[t] = {{a, b, id}, {t1, t2, nc}};
      tris.push_back({{b, c, id}, {t2, t, na}});
      tris.push_back({{c, a, id}, {t, t1, nb}});
      relink(na, b, c, t1);
      relink(nb, c, a, t2);
      stack = {{t, id}, {t1, id}, {t2, id}};
    } else {
      split_edge(t, edge, id, stack);
    }
    legalize(stack);
    return id;
  }

  // Inserts vertex id on the edge opposite local vertex i of triangle t.
  void split_edge(int t, int i, int id, std::vector<std::pair<int, int>>& stack) {
    int a = tris[t].v[i], b = tris[t].v[(i + 1) % 3], c = tris[t].v[(i + 2) % 3];
    int u = tris[t].nbr[i];
    int n_ab = tris[t].nbr[(i + 2) % 3];
    int n_ca = tris[t].nbr[(i + 1) % 3];
    int t1 = static_cast<int>(tris.size());
    // t = (a, b, id), t1 = (a, id, c)
    tris[t] = {{a, b, id}, {-1, t1, n_ab}};
    tris.push_back({{a, id, c}, {-1, n_ca, t}});
    relink(n_ca, c, a, t1);
    stack.push_back({t, id});
    stack.push_back({t1, id});
    if (u < 0) return;
    int ju = edge_of(tris[u], b, c);
    int d = tris[u].v[ju];
    int n_cd = tris[u].nbr[index_of(tris[u], b)];
    int n_db = tris[u].nbr[index_of(tris[u], c)];
    int u1 = static_cast<int>(tris.size());
    // u = (d, c, id), u1 = (d, id, b)
    tris[u] = {{d, c, id}, {t1, u1, n_cd}};
    tris.push_back({{d, id, b}, {t, n_db, u}});
    relink(n_db, b, d, u1);
    tris[t].nbr[0] = u1;
    tris[t1].nbr[0] = u;
    stack.push_back({u, id});
    stack.push_back({u1, id});
  }

  void split_boundary(int t, int i) {
    const auto& v = tris[t].v;
    Vec2 mid = 0.5 * (pts[v[(i + 1) % 3]] + pts[v[(i + 2) % 3]]);
    int id = static_cast<int>(pts.size());
    pts.push_back(mid);
    std::vector<std::pair<int, int>> stack;
    split_edge(t, i, id, stack);
    legalize(stack);
  }

  double min_angle(int t) const {
    const auto& v = tris[t].v;
    double best = 180;
    for (int i = 0; i < 3; ++i) {
      Vec2 a = pts[v[(i + 1) % 3]] - pts[v[i]];
      Vec2 b = pts[v[(i + 2) % 3]] - pts[v[i]];
      best = std::min(best, std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b)) * 180 / M_PI);
    }
    return best;
  }

  double longest_edge(int t) const {
    const auto& v = tris[t].v;
    return std::max({(pts[v[0]] - pts[v[1]]).norm(), (pts[v[1]] - pts[v[2]]).norm(), (pts[v[2]] - pts[v[0]]).norm()});
  }

  Vec2 circumcenter(int t) const {
    const Vec2& a = pts[tris[t].v[0]];
    Vec2 b = pts[tris[t].v[1]] - a, c = pts[tris[t].v[2]] - a;
    double d = 2 * (b.x() * c.y() - b.y() * c.x());
    double bb = b.squaredNorm(), cc = c.squaredNorm();
    return a + Vec2((c.y() * bb - b.y() * cc) / d, (b.x() * cc - c.x() * bb) / d);
  }

  // First boundary segment whose diametral circle strictly contains p.
  std::pair<int, int> encroached_by(const Vec2& p) const {
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      for (int i = 0; i < 3; ++i) {
        if (tris[t].nbr[i] >= 0) continue;
        const Vec2& a = pts[tris[t].v[(i + 1) % 3]];
        const Vec2& b = pts[tris[t].v[(i + 2) % 3]];
        if ((a - p).dot(b - p) < -1e-14 * (b - a).squaredNorm()) return {t, i};
      }
    }
    return {-1, -1};
  }

  bool split_encroached_segment() {
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      for (int i = 0; i < 3; ++i) {
        if (tris[t].nbr[i] >= 0) continue;
        const Vec2& a = pts[tris[t].v[(i + 1) % 3]];
        const Vec2& b = pts[tris[t].v[(i + 2) % 3]];
        const Vec2& p = pts[tris[t].v[i]];
        if ((a - p).dot(b - p) < -1e-14 * (b - a).squaredNorm()) {
          split_boundary(t, i);
          return true;
        }
      }
    }
    return false;
  }

  void refine(double hmax) {
    const std::size_t cap = 200000;
    std::vector<char> skip;
    for (std::size_t iter = 0; iter < cap; ++iter) {
      if (split_encroached_segment()) continue;
      skip.resize(tris.size(), 0);
      int worst = -1;
      double worst_q = std::numeric_limits<double>::infinity();
      for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        if (skip[t]) continue;
        double ang = min_angle(t);
        double len = longest_edge(t);
        double q = std::min(ang / kMinAngle, hmax / len);
        if (q < 1.0 && q < worst_q) {
          worst_q = q;
          worst = t;
        }
      }
      if (worst < 0) return;
      Vec2 c = circumcenter(worst);
      auto [st, si] = encroached_by(c);
      if (st >= 0) {
        split_boundary(st, si);
        continue;
      }
      if (c.x() <= 0 || c.x() >= 1 || c.y() <= 0 || c.y() >= 1) {
        skip[worst] = 1;
        continue;
      }
      add_point(c);
      std::fill(skip.begin(), skip.end(), 0);
    }
    fail(ErrorCode::Internal, "mesh refinement did not terminate");
  }
};

}  // namespace

Mesh build_unstructured(double target_h, std::uint64_t seed) {
  require(std::isfinite(target_h) && target_h > 0 && target_h < 1, ErrorCode::InvalidArgument,
          "build_unstructured needs 0 < target_h < 1");
  require(target_h >= 0.004, ErrorCode::InvalidArgument, "target_h below 0.004 is not supported");
  SplitMix64 rng{seed * 0x2545F4914F6CDD1Dull + 1};
  Triangulator tr;

  const int m = std::max(1, static_cast<int>(std::lround(1.0 / target_h)));
  for (int i = 1; i < m; ++i) {
    double s = double(i) / m;
    tr.add_point(Vec2(s, 0));
    tr.add_point(Vec2(1, s));
    tr.add_point(Vec2(1 - s, 1));
    tr.add_point(Vec2(0, 1 - s));
  }

  // Jittered hexagonal lattice for the interior, kept away from the boundary.
  const double s = target_h;
  const double dy = s * std::sqrt(3.0) / 2.0;
  const double ox = rng.uniform() * s, oy = rng.uniform() * dy;
  const double margin = 0.55 * s;
  const double jitter = 0.15 * s;
  for (int j = -1; oy + j * dy < 1.0 + s; ++j) {
    double shift = (j & 1) ? 0.5 * s : 0.0;
    for (int i = -1; ox + shift + i * s < 1.0 + s; ++i) {
      double x = ox + shift + i * s + jitter * (2 * rng.uniform() - 1);
      double y = oy + j * dy + jitter * (2 * rng.uniform() - 1);
      if (std::min({x, 1 - x, y, 1 - y}) < margin) continue;
      tr.add_point(Vec2(x, y));
    }
  }
  tr.refine(1.5 * target_h);

  std::vector<std::array<int, 3>> tris;
  for (const auto& t : tr.tris)
    if (t.alive) tris.push_back(t.v);
  return make_mesh(tr.pts, std::move(tris));
}

}  // namespace ugfem
