#include "ugfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ugfem/errors.hpp"

namespace ugfem {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

}  // namespace

int Mesh::num_interior_edges() const {
  return static_cast<int>(std::count(edge_on_boundary.begin(), edge_on_boundary.end(), 0));
}

Vec2 Mesh::centroid(int K) const {
  const auto& t = triangles[K];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

Vec2 Mesh::edge_point(int e, double t) const {
  return (1.0 - t) * vertices[edges[e][0]] + t * vertices[edges[e][1]];
}

int Mesh::local_edge_index(int K, int e) const {
  for (int i = 0; i < 3; ++i)
    if (element_edges[K][i] == e) return i;
  fail(ErrorCode::InvalidArgument, "edge " + std::to_string(e) + " is not on element " + std::to_string(K));
}

double Mesh::max_h() const { return h_K.empty() ? 0.0 : *std::max_element(h_K.begin(), h_K.end()); }

Mesh make_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
               std::vector<std::string>* warnings) {
  Mesh m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  const int nv = m.num_vertices();
  const int nt = m.num_elements();
  require(nt > 0, ErrorCode::InvalidArgument, "mesh has no triangles");

  for (int K = 0; K < nt; ++K) {
    auto& t = m.triangles[K];
    for (int v : t)
      require(v >= 0 && v < nv, ErrorCode::InvalidArgument,
              "triangle " + std::to_string(K) + " references vertex " + std::to_string(v));
    require(t[0] != t[1] && t[1] != t[2] && t[0] != t[2], ErrorCode::InvalidArgument,
            "triangle " + std::to_string(K) + " repeats a vertex");
    double a = signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    require(std::abs(a) > 0.0, ErrorCode::InvalidArgument, "triangle " + std::to_string(K) + " is degenerate");
    if (a < 0) {
      std::swap(t[1], t[2]);
      if (warnings) warnings->push_back("triangle " + std::to_string(K) + " was clockwise; vertices swapped");
    }
  }

  std::map<std::array<int, 2>, int> edge_id;
  m.element_edges.resize(nt);
  m.element_edge_signs.resize(nt);
  for (int K = 0; K < nt; ++K) {
    const auto& t = m.triangles[K];
    for (int i = 0; i < 3; ++i) {
      int a = t[(i + 1) % 3], b = t[(i + 2) % 3];
      std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto it = edge_id.find(key);
      if (it == edge_id.end()) {
        int id = m.num_edges();
        edge_id.emplace(key, id);
        m.edges.push_back(key);
        m.edge_elements.push_back({K, -1});
        m.element_edges[K][i] = id;
        m.element_edge_signs[K][i] = 1;
      } else {
        int id = it->second;
        require(m.edge_elements[id][1] == -1, ErrorCode::InvalidArgument,
                "edge (" + std::to_string(key[0]) + "," + std::to_string(key[1]) + ") shared by more than two triangles");
        m.edge_elements[id][1] = K;
        m.element_edges[K][i] = id;
        m.element_edge_signs[K][i] = -1;
      }
    }
  }

  const int ne = m.num_edges();
  m.edge_on_boundary.assign(ne, 0);
  m.vertex_on_boundary.assign(nv, 0);
  m.edge_normals.resize(ne);
  m.h_e.resize(ne);
  for (int e = 0; e < ne; ++e) {
    if (m.edge_elements[e][1] < 0) {
      m.edge_on_boundary[e] = 1;
      m.vertex_on_boundary[m.edges[e][0]] = 1;
      m.vertex_on_boundary[m.edges[e][1]] = 1;
    }
    m.h_e[e] = (m.vertices[m.edges[e][1]] - m.vertices[m.edges[e][0]]).norm();
  }
  for (int K = 0; K < nt; ++K) {
    const auto& t = m.triangles[K];
    for (int i = 0; i < 3; ++i) {
      if (m.element_edge_signs[K][i] != 1) continue;
      Vec2 d = m.vertices[t[(i + 2) % 3]] - m.vertices[t[(i + 1) % 3]];
      m.edge_normals[m.element_edges[K][i]] = Vec2(d.y(), -d.x()) / d.norm();
    }
  }
  m.h_K.resize(nt);
  m.area.resize(nt);
  for (int K = 0; K < nt; ++K) {
    double h = 0;
    for (int i = 0; i < 3; ++i) h = std::max(h, m.h_e[m.element_edges[K][i]]);
    m.h_K[K] = h;
    const auto& t = m.triangles[K];
    m.area[K] = signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
  }
  validate(m);
  return m;
}

Mesh build_uniform(int n, DiagonalPattern pattern) {
  require(n >= 1, ErrorCode::InvalidArgument, "build_uniform needs n >= 1, got " + std::to_string(n));
  std::vector<Vec2> v;
  v.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.emplace_back(double(i) / n, double(j) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> t;
  t.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (pattern == DiagonalPattern::LowerLeftUpperRight) {
        t.push_back({a, b, c});
        t.push_back({a, c, d});
      } else {
        t.push_back({a, b, d});
        t.push_back({b, c, d});
      }
    }
  return make_mesh(std::move(v), std::move(t));
}

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;
  std::string name;

  LineReader(std::string_view text, std::string n) : in(std::string(text)), name(std::move(n)) {}

  // Next non-empty line with comments stripped; false at end of text.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      std::istringstream ls(line);
      tokens.clear();
      for (std::string tok; ls >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::ParseError, name + " line " + std::to_string(line_no) + ": " + msg);
  }

  template <class T>
  T number(const std::string& tok) const {
    std::istringstream s(tok);
    T value;
    s >> value;
    if (s.fail() || !s.eof()) error("expected a number, got '" + tok + "'");
    return value;
  }
};

}  // namespace

LoadedMesh load_mesh(std::string_view node_text, std::string_view ele_text) {
  LoadedMesh out;
  std::vector<std::string> tok;

  LineReader nodes(node_text, ".node");
  if (!nodes.next(tok)) nodes.error("missing header");
  if (tok.size() < 2) nodes.error("header needs at least 'N 2'");
  const long nn = nodes.number<long>(tok[0]);
  if (nodes.number<int>(tok[1]) != 2) nodes.error("only dimension 2 is supported");
  const int nattr = tok.size() > 2 ? nodes.number<int>(tok[2]) : 0;
  if (nn <= 0) nodes.error("node count must be positive");
  std::vector<Vec2> v(nn);
  long base = 0;
  for (long i = 0; i < nn; ++i) {
    if (!nodes.next(tok)) nodes.error("expected " + std::to_string(nn) + " nodes, file ends after " + std::to_string(i));
    if (tok.size() < 3 + static_cast<size_t>(nattr)) nodes.error("node line needs index, x, y");
    long idx = nodes.number<long>(tok[0]);
    if (i == 0) {
      if (idx != 0 && idx != 1) nodes.error("first node index must be 0 or 1");
      base = idx;
    }
    if (idx != base + i) nodes.error("node index " + std::to_string(idx) + " out of sequence");
    v[i] = Vec2(nodes.number<double>(tok[1]), nodes.number<double>(tok[2]));
  }

  LineReader eles(ele_text, ".ele");
  if (!eles.next(tok)) eles.error("missing header");
  if (tok.size() < 2) eles.error("header needs at least 'M 3'");
  const long nt = eles.number<long>(tok[0]);
  if (eles.number<int>(tok[1]) != 3) eles.error("only 3-node triangles are supported");
  if (nt <= 0) eles.error("triangle count must be positive");
  std::vector<std::array<int, 3>> t(nt);
  std::set<std::array<int, 3>> seen;
  for (long i = 0; i < nt; ++i) {
    if (!eles.next(tok))
      eles.error("expected " + std::to_string(nt) + " triangles, file ends after " + std::to_string(i));
    if (tok.size() < 4) eles.error("triangle line needs index and three vertices");
    for (int j = 0; j < 3; ++j) {
      long vid = eles.number<long>(tok[1 + j]) - base;
      if (vid < 0 || vid >= nn) eles.error("vertex " + tok[1 + j] + " out of range");
      t[i][j] = static_cast<int>(vid);
    }
    auto key = t[i];
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) eles.error("repeated triangle");
  }
  out.mesh = make_mesh(std::move(v), std::move(t), &out.warnings);
  return out;
}

std::string to_node_text(const Mesh& m) {
  std::ostringstream s;
  s.precision(17);
  s << m.num_vertices() << " 2 0 1\n";
  for (int i = 0; i < m.num_vertices(); ++i)
    s << i + 1 << ' ' << m.vertices[i].x() << ' ' << m.vertices[i].y() << ' ' << int(m.vertex_on_boundary[i]) << '\n';
  return s.str();
}

std::string to_ele_text(const Mesh& m) {
  std::ostringstream s;
  s << m.num_elements() << " 3 0\n";
  for (int K = 0; K < m.num_elements(); ++K) {
    const auto& t = m.triangles[K];
    s << K + 1 << ' ' << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  return s.str();
}

void validate(const Mesh& m) {
  auto bad = [](const std::string& what) { fail(ErrorCode::Internal, "mesh invariant violated: " + what); };
  for (int K = 0; K < m.num_elements(); ++K) {
    const auto& t = m.triangles[K];
    if (!(signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) > 0))
      bad("triangle " + std::to_string(K) + " is not counterclockwise");
    Vec2 closure = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
      int e = m.element_edges[K][i];
      const auto& ee = m.edge_elements[e];
      int s = m.element_edge_signs[K][i];
      if ((s == 1 && ee[0] != K) || (s == -1 && ee[1] != K)) bad("orientation sign of element " + std::to_string(K));
      Vec2 d = m.vertices[t[(i + 2) % 3]] - m.vertices[t[(i + 1) % 3]];
      Vec2 n = Vec2(d.y(), -d.x()) / d.norm();
      if ((n - m.outward_normal(K, i)).norm() > 1e-12) bad("outward normal of element " + std::to_string(K));
      closure += m.h_e[e] * m.outward_normal(K, i);
    }
    if (closure.norm() > 1e-12 * (1.0 + m.h_K[K])) bad("edge normals of element " + std::to_string(K) + " do not close");
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ee = m.edge_elements[e];
    bool boundary = ee[1] < 0;
    if (boundary != bool(m.edge_on_boundary[e])) bad("boundary flag of edge " + std::to_string(e));
    if (!boundary && !(ee[0] < ee[1])) bad("K+ must be the lower element index on edge " + std::to_string(e));
    if (std::abs(m.edge_normals[e].norm() - 1.0) > 1e-12) bad("edge normal not unit on edge " + std::to_string(e));
  }
}

double min_angle_degrees(const Mesh& m) {
  double best = 180.0;
  for (const auto& t : m.triangles)
    for (int i = 0; i < 3; ++i) {
      Vec2 a = m.vertices[t[(i + 1) % 3]] - m.vertices[t[i]];
      Vec2 b = m.vertices[t[(i + 2) % 3]] - m.vertices[t[i]];
      double ang = std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
      best = std::min(best, ang * 180.0 / M_PI);
    }
  return best;
}

}  // namespace ugfem
