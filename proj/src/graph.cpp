#include "latcoh/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace latcoh {

size_t PlumbingGraph::index_of(int64_t id) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) return i;
  throw GraphError(GraphError::Validation, "unknown vertex id " + std::to_string(id));
}

std::vector<size_t> PlumbingGraph::neighbors(size_t i) const {
  std::vector<size_t> out;
  for (auto& [a, b] : edges) {
    if (a == i) out.push_back(b);
    if (b == i) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int64_t PlumbingGraph::max_id() const {
  int64_t m = 0;
  for (auto& v : vertices) m = std::max(m, v.id);
  return m;
}

namespace {

struct Token {
  std::string text;
  size_t col;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
    out.push_back({line.substr(i, j - i), i + 1});
    i = j;
  }
  return out;
}

[[noreturn]] void syntax(size_t line, size_t col, const std::string& msg) {
  throw GraphError(GraphError::Syntax,
                   "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

int64_t parse_int(const Token& t, size_t line) {
  size_t pos = 0;
  int64_t v = 0;
  try {
    v = std::stoll(t.text, &pos);
  } catch (...) {
    syntax(line, t.col, "expected integer, got '" + t.text + "'");
  }
  if (pos != t.text.size()) syntax(line, t.col, "expected integer, got '" + t.text + "'");
  return v;
}

}  // namespace

PlumbingGraph parse_graph(const std::string& text) {
  PlumbingGraph g;
  std::map<int64_t, size_t> ids;
  struct PendingEdge {
    int64_t a, b;
    size_t line, col;
  };
  struct PendingArrow {
    int64_t v, b;
    size_t line, col;
  };
  std::vector<PendingEdge> edges;
  std::vector<PendingArrow> arrows;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].text;
    if (kw == "vertex") {
      if (toks.size() != 3) syntax(lineno, toks[0].col, "usage: vertex <id> <euler>");
      int64_t id = parse_int(toks[1], lineno);
      int64_t e = parse_int(toks[2], lineno);
      if (id <= 0) syntax(lineno, toks[1].col, "vertex id must be positive");
      if (ids.count(id)) syntax(lineno, toks[1].col, "duplicate vertex id " + toks[1].text);
      ids[id] = g.vertices.size();
      g.vertices.push_back({id, e});
    } else if (kw == "edge") {
      if (toks.size() != 3) syntax(lineno, toks[0].col, "usage: edge <id> <id>");
      edges.push_back({parse_int(toks[1], lineno), parse_int(toks[2], lineno), lineno, toks[1].col});
    } else if (kw == "arrow") {
      if (toks.size() != 2 && toks.size() != 3) syntax(lineno, toks[0].col, "usage: arrow <id> [b]");
      int64_t b = toks.size() == 3 ? parse_int(toks[2], lineno) : 0;
      if (b < 0) syntax(lineno, toks[2].col, "decoration must be non-negative");
      arrows.push_back({parse_int(toks[1], lineno), b, lineno, toks[1].col});
    } else {
      syntax(lineno, toks[0].col, "unknown keyword '" + kw + "'");
    }
  }
  for (auto& e : edges) {
    if (!ids.count(e.a) || !ids.count(e.b))
      throw GraphError(GraphError::Validation, "line " + std::to_string(e.line) + ": edge references unknown vertex");
    g.edges.emplace_back(ids[e.a], ids[e.b]);
  }
  for (auto& a : arrows) {
    if (!ids.count(a.v))
      throw GraphError(GraphError::Validation,
                       "line " + std::to_string(a.line) + ": arrow on unknown vertex " + std::to_string(a.v));
    g.arrows.push_back({ids[a.v], a.b});
  }
  validate_graph(g);
  return g;
}

std::string serialize_graph(const PlumbingGraph& g) {
  std::ostringstream out;
  for (auto& v : g.vertices) out << "vertex " << v.id << ' ' << v.euler << '\n';
  for (auto& [a, b] : g.edges) out << "edge " << g.vertices[a].id << ' ' << g.vertices[b].id << '\n';
  for (auto& a : g.arrows) {
    out << "arrow " << g.vertices[a.vertex].id;
    if (a.decoration != 0) out << ' ' << a.decoration;
    out << '\n';
  }
  return out.str();
}

void validate_graph(const PlumbingGraph& g) {
  size_t n = g.size();
  if (n == 0) throw GraphError(GraphError::Validation, "graph has no vertices");
  std::set<std::pair<size_t, size_t>> seen;
  for (auto [a, b] : g.edges) {
    if (a == b) throw GraphError(GraphError::Validation, "not a tree: loop edge");
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) throw GraphError(GraphError::Validation, "not a tree: repeated edge");
  }
  if (g.edges.size() != n - 1) throw GraphError(GraphError::Validation, "not a tree: wrong number of edges");
  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : g.edges) parent[find(a)] = find(b);
  for (size_t i = 0; i < n; ++i)
    if (find(i) != find(0)) throw GraphError(GraphError::Validation, "not a tree: graph is disconnected");
  for (auto& a : g.arrows) {
    if (a.vertex >= n) throw GraphError(GraphError::Validation, "arrow on missing vertex");
    if (a.decoration < 0) throw GraphError(GraphError::Validation, "negative decoration");
  }
  if (!is_negative_definite(intersection_matrix(g)))
    throw GraphError(GraphError::Validation, "intersection form is not negative definite");
}

IntMat intersection_matrix(const PlumbingGraph& g) {
  size_t n = g.size();
  IntMat M(n, IntVec(n, 0));
  for (size_t i = 0; i < n; ++i) M[i][i] = g.vertices[i].euler;
  for (auto [a, b] : g.edges) M[a][b] = M[b][a] = 1;
  return M;
}

namespace {

// Bareiss elimination without pivoting; returns the leading principal minors
// (stops at the first vanishing one).
std::vector<Int> leading_minors(const IntMat& M) {
  size_t n = M.size();
  std::vector<std::vector<Int>> A(n, std::vector<Int>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) A[i][j] = Int(M[i][j]);
  std::vector<Int> minors;
  Int prev = 1;
  for (size_t k = 0; k < n; ++k) {
    minors.push_back(A[k][k]);
    if (A[k][k] == 0) break;
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev;
    prev = A[k][k];
  }
  return minors;
}

}  // namespace

Int determinant(const IntMat& M) {
  size_t n = M.size();
  if (n == 0) return 1;
  std::vector<std::vector<Int>> A(n, std::vector<Int>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) A[i][j] = Int(M[i][j]);
  Int prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (A[k][k] == 0) {
      size_t p = k + 1;
      while (p < n && A[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(A[k], A[p]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev;
    prev = A[k][k];
  }
  return sign * A[n - 1][n - 1];
}

bool is_negative_definite(const IntMat& M) {
  IntMat N = M;
  for (auto& row : N)
    for (auto& x : row) x = -x;
  auto minors = leading_minors(N);
  if (minors.size() != M.size()) return false;
  for (auto& m : minors)
    if (m <= 0) return false;
  return true;
}

RatVec PullbackMap::apply(const RatVec& x) const {
  RatVec y(matrix.size(), Rat(0));
  for (size_t i = 0; i < matrix.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j)
      if (matrix[i][j]) y[i] += Rat(matrix[i][j]) * x[j];
  return y;
}

IntVec PullbackMap::apply(const IntVec& x) const {
  IntVec y(matrix.size(), 0);
  for (size_t i = 0; i < matrix.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] = add_ck(y[i], mul_ck(matrix[i][j], x[j]));
  return y;
}

PullbackMap PullbackMap::then(const PullbackMap& next) const {
  size_t r = next.matrix.size(), m = matrix.size(), c = m ? matrix[0].size() : 0;
  PullbackMap out;
  out.matrix.assign(r, IntVec(c, 0));
  for (size_t i = 0; i < r; ++i)
    for (size_t k = 0; k < m; ++k)
      if (next.matrix[i][k])
        for (size_t j = 0; j < c; ++j) out.matrix[i][j] += next.matrix[i][k] * matrix[k][j];
  return out;
}

BlowUp blow_up(const PlumbingGraph& g, const BlowUpCenter& c) {
  BlowUp out;
  out.graph = g;
  PlumbingGraph& h = out.graph;
  size_t n = g.size();
  size_t nv = n;
  h.vertices.push_back({g.max_id() + 1, -1});
  out.new_vertex = nv;
  out.pullback.matrix.assign(n + 1, IntVec(n, 0));
  for (size_t i = 0; i < n; ++i) out.pullback.matrix[i][i] = 1;
  switch (c.kind) {
    case BlowUpCenter::AtVertex: {
      size_t v = g.index_of(c.a);
      h.vertices[v].euler -= 1;
      h.edges.emplace_back(v, nv);
      out.pullback.matrix[nv][v] = 1;
      break;
    }
    case BlowUpCenter::AtEdge: {
      size_t a = g.index_of(c.a), b = g.index_of(c.b);
      auto it = std::find_if(h.edges.begin(), h.edges.end(), [&](const std::pair<size_t, size_t>& e) {
        return (e.first == a && e.second == b) || (e.first == b && e.second == a);
      });
      if (it == h.edges.end()) throw GraphError(GraphError::Validation, "blow-up center is not an edge");
      h.edges.erase(it);
      h.edges.emplace_back(a, nv);
      h.edges.emplace_back(nv, b);
      h.vertices[a].euler -= 1;
      h.vertices[b].euler -= 1;
      out.pullback.matrix[nv][a] = 1;
      out.pullback.matrix[nv][b] = 1;
      break;
    }
    case BlowUpCenter::AtArrow: {
      if (c.arrow >= g.arrows.size()) throw GraphError(GraphError::Validation, "blow-up center: no such arrow");
      size_t v = g.arrows[c.arrow].vertex;
      h.vertices[v].euler -= 1;
      h.edges.emplace_back(v, nv);
      h.arrows[c.arrow].vertex = nv;
      if (h.arrows[c.arrow].decoration > 0) h.arrows[c.arrow].decoration -= 1;
      out.pullback.matrix[nv][v] = 1;
      out.base_point = true;
      out.moved_arrow = c.arrow;
      break;
    }
  }
  return out;
}

IntVec transport_semigroup(const BlowUp& b, const PlumbingGraph& old, const IntVec& s) {
  // psi^*(E_i^*) is the new E_i^*, so psi^* s has the same coefficients
  IntVec out = s;
  out.push_back(0);
  if (b.base_point) {
    // psi^*(E_v^*) + E_new = E_new^*
    size_t v = old.arrows[b.moved_arrow].vertex;
    if (out[v] <= 0) throw GraphError(GraphError::Validation, "semigroup element does not contain the moved arrow");
    out[v] -= 1;
    out[b.new_vertex] += 1;
  }
  return out;
}

IntVec arrow_divisor(const PlumbingGraph& g) {
  IntVec s(g.size(), 0);
  for (auto& a : g.arrows) s[a.vertex] += 1;
  return s;
}

Decorated apply_decorations(const PlumbingGraph& g) {
  Decorated d{g, arrow_divisor(g)};
  for (size_t k = 0; k < g.arrows.size(); ++k) {
    while (d.graph.arrows[k].decoration > 0) {
      BlowUp b = blow_up(d.graph, BlowUpCenter::at_arrow(k));
      d.s = transport_semigroup(b, d.graph, d.s);
      d.graph = std::move(b.graph);
    }
  }
  return d;
}

}  // namespace latcoh
