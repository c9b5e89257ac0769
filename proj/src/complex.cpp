#include "latcoh/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace latcoh {

size_t default_budget() {
  if (const char* env = std::getenv("LATCOH_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<size_t>(v);
  }
  return 50000000;
}

Box::Box(IntVec hi) : hi_(std::move(hi)) {
  stride_.resize(hi_.size());
  empty_ = false;
  long double vol = 1;
  uint64_t s = 1;
  for (size_t i = 0; i < hi_.size(); ++i) {
    if (hi_[i] < 0) empty_ = true;
    stride_[i] = s;
    s *= static_cast<uint64_t>(std::max<int64_t>(hi_[i], 0) + 1);
    vol *= static_cast<long double>(std::max<int64_t>(hi_[i], 0) + 1);
  }
  if (vol > static_cast<long double>(uint64_t(1) << 44)) throw BudgetError("box too large to index");
  volume_ = empty_ ? 0 : s;
}

uint64_t Box::index(const int64_t* p) const {
  uint64_t idx = 0;
  for (size_t i = 0; i < hi_.size(); ++i) idx += static_cast<uint64_t>(p[i]) * stride_[i];
  return idx;
}

IntVec Box::point(uint64_t idx) const {
  IntVec p(hi_.size());
  for (size_t i = 0; i < hi_.size(); ++i) p[i] = coord(idx, i);
  return p;
}

long double Box::cube_slots() const {
  long double s = 1;
  for (auto h : hi_) s *= static_cast<long double>(2 * h + 1);
  return s;
}

std::vector<std::pair<uint64_t, int64_t>> WeightFunction::scan(const Box& box, int64_t cap) const {
  std::vector<std::pair<uint64_t, int64_t>> out;
  if (box.empty()) return out;
  IntVec l(box.rank(), 0);
  for (uint64_t idx = 0; idx < box.volume(); ++idx) {
    if (idx) {
      size_t i = 0;
      while (l[i] == box.hi()[i]) l[i++] = 0;
      ++l[i];
    }
    int64_t w = (*this)(l);
    if (w <= cap) out.emplace_back(idx, w);
  }
  return out;
}

std::vector<std::pair<uint64_t, int64_t>> ChiWeight::scan(const Box& box, int64_t cap) const {
  std::vector<std::pair<uint64_t, int64_t>> out;
  if (box.empty()) return out;
  size_t r = box.rank();
  const IntMat& M = chi_.M();
  IntVec l(r, 0), pair(r, 0);
  int64_t value = 0;
  for (uint64_t idx = 0; idx < box.volume(); ++idx) {
    if (idx) {
      if (l[0] < box.hi()[0]) {
        value += chi_.step(pair, 0);
        ++l[0];
        for (size_t j = 0; j < r; ++j) pair[j] += M[j][0];
      } else {
        size_t i = 0;
        while (l[i] == box.hi()[i]) l[i++] = 0;
        ++l[i];
        for (size_t j = 0; j < r; ++j) {
          pair[j] = 0;
          for (size_t k = 0; k < r; ++k) pair[j] += M[j][k] * l[k];
        }
        value = chi_(l);
      }
    }
    if (value <= cap) out.emplace_back(idx, value);
  }
  return out;
}

const std::vector<Cell>& CubeComplex::cells(size_t q) const {
  static const std::vector<Cell> none;
  return q < cells_.size() ? cells_[q] : none;
}

void CubeComplex::add(const Cell& c) {
  size_t q = static_cast<size_t>(__builtin_popcount(c.mask));
  if (cells_.size() <= q) cells_.resize(q + 1);
  cells_[q].push_back(c);
}

void CubeComplex::finalize() {
  index_.clear();
  while (!cells_.empty() && cells_.back().empty()) cells_.pop_back();
  for (auto& v : cells_) {
    std::sort(v.begin(), v.end(), [](const Cell& a, const Cell& b) {
      return a.point != b.point ? a.point < b.point : a.mask < b.mask;
    });
    for (uint32_t i = 0; i < v.size(); ++i) index_[key(v[i].point, v[i].mask)] = i;
  }
}

size_t CubeComplex::total() const {
  size_t t = 0;
  for (auto& v : cells_) t += v.size();
  return t;
}

int64_t CubeComplex::find(uint64_t point, uint32_t mask) const {
  auto it = index_.find(key(point, mask));
  return it == index_.end() ? -1 : static_cast<int64_t>(it->second);
}

SparseCol CubeComplex::boundary(size_t q, size_t i) const {
  SparseCol col;
  if (q == 0) return col;
  const Cell& c = cells_[q][i];
  int t = 0;
  for (size_t d = 0; d < box_.rank(); ++d) {
    if (!(c.mask >> d & 1u)) continue;
    int64_t sign = (t % 2 == 0) ? 1 : -1;
    uint32_t m = c.mask & ~(1u << d);
    int64_t lo = find(c.point, m);
    int64_t hi = find(c.point + box_.stride(d), m);
    if (lo >= 0) col.emplace_back(static_cast<uint32_t>(lo), -sign);
    if (hi >= 0) col.emplace_back(static_cast<uint32_t>(hi), sign);
    ++t;
  }
  std::sort(col.begin(), col.end());
  return col;
}

CubeComplex CubeComplex::filter(const std::function<bool(size_t, const Cell&)>& keep) const {
  CubeComplex out(box_);
  for (size_t q = 0; q < cells_.size(); ++q)
    for (auto& c : cells_[q])
      if (keep(q, c)) out.add(c);
  out.finalize();
  return out;
}

CubeComplex sublevel_complex(const Box& box, const WeightFunction& w, int64_t cap) {
  CubeComplex X(box);
  if (box.empty()) return X;
  auto pts = w.scan(box, cap);
  std::unordered_map<uint64_t, int64_t> wt;
  wt.reserve(pts.size() * 2);
  for (auto& [i, v] : pts) wt.emplace(i, v);
  size_t r = box.rank();
  std::vector<uint64_t> verts;
  std::function<void(uint64_t, uint32_t, size_t, int64_t, size_t)> extend =
      [&](uint64_t p, uint32_t mask, size_t nverts, int64_t cw, size_t next) {
        X.add({p, mask, cw});
        for (size_t j = next; j < r; ++j) {
          if (box.coord(p, j) >= box.hi()[j]) continue;
          int64_t m = cw;
          bool ok = true;
          size_t base = verts.size();
          for (size_t k = base - nverts; k < base; ++k) {
            auto it = wt.find(verts[k] + box.stride(j));
            if (it == wt.end()) {
              ok = false;
              break;
            }
            m = std::max(m, it->second);
          }
          if (!ok) continue;
          for (size_t k = base - nverts; k < base; ++k) verts.push_back(verts[k]);
          for (size_t k = base; k < base + nverts; ++k) verts.push_back(verts[k] + box.stride(j));
          extend(p, mask | (1u << j), 2 * nverts, m, j + 1);
          verts.resize(base);
        }
      };
  for (auto& [p, v] : pts) {
    verts.clear();
    verts.push_back(p);
    extend(p, 0, 1, v, 0);
  }
  X.finalize();
  return X;
}

std::vector<HomologyGroup> integral_homology(const CubeComplex& X) {
  size_t top = X.top_dim();
  std::vector<IntRankInfo> bd(top + 1);
  for (size_t q = 1; q < top; ++q) {
    std::vector<SparseCol> cols(X.count(q));
    for (size_t i = 0; i < X.count(q); ++i) cols[i] = X.boundary(q, i);
    bd[q] = integer_rank_info(std::move(cols), X.count(q - 1));
  }
  std::vector<HomologyGroup> H(top);
  for (size_t q = 0; q < top; ++q) {
    size_t r_out = q >= 1 ? bd[q].rank : 0;
    size_t r_in = q + 1 < top ? bd[q + 1].rank : 0;
    H[q].rank = X.count(q) - r_out - r_in;
    if (q + 1 < top) H[q].torsion = bd[q + 1].torsion;
  }
  while (!H.empty() && H.back().rank == 0 && H.back().torsion.empty()) H.pop_back();
  return H;
}

Barcode filtered_barcode(const CubeComplex& X, const CellValue& value) {
  size_t top = X.top_dim();
  std::vector<std::vector<uint32_t>> order(top), pos(top);
  std::vector<std::vector<int64_t>> val(top);
  for (size_t q = 0; q < top; ++q) {
    size_t m = X.count(q);
    val[q].resize(m);
    for (size_t i = 0; i < m; ++i) val[q][i] = value(q, X.cells(q)[i]);
    order[q].resize(m);
    std::iota(order[q].begin(), order[q].end(), 0);
    std::stable_sort(order[q].begin(), order[q].end(), [&](uint32_t a, uint32_t b) { return val[q][a] < val[q][b]; });
    pos[q].resize(m);
    for (uint32_t j = 0; j < m; ++j) pos[q][order[q][j]] = j;
  }
  std::vector<std::vector<SparseCol>> bd(top);
  std::vector<size_t> counts(top);
  for (size_t q = 0; q < top; ++q) {
    counts[q] = X.count(q);
    if (q == 0) continue;
    bd[q].resize(counts[q]);
    for (uint32_t j = 0; j < counts[q]; ++j) {
      uint32_t c = order[q][j];
      SparseCol col = X.boundary(q, c);
      for (auto& e : col) {
        if (val[q - 1][e.first] > val[q][c]) throw std::logic_error("filtration is not monotone on faces");
        e.first = pos[q - 1][e.first];
      }
      std::sort(col.begin(), col.end());
      bd[q][j] = std::move(col);
    }
  }
  Pairing P = reduce_filtered(bd, counts);
  Barcode B;
  B.finite.resize(top);
  B.essential.resize(top);
  B.finite_cells.resize(top);
  B.essential_cells.resize(top);
  for (size_t q = 1; q < top; ++q)
    for (auto [r, c] : P.pairs[q]) {
      uint32_t lo = order[q - 1][r], hi = order[q][c];
      B.finite[q - 1].emplace_back(val[q - 1][lo], val[q][hi]);
      B.finite_cells[q - 1].emplace_back(lo, hi);
    }
  for (size_t q = 0; q < top; ++q)
    for (uint32_t j = 0; j < counts[q]; ++j)
      if (!P.paired[q][j]) {
        B.essential[q].push_back(val[q][order[q][j]]);
        B.essential_cells[q].push_back(order[q][j]);
      }
  return B;
}

void ZUModule::normalize() {
  std::sort(towers.begin(), towers.end(), std::greater<>());
  std::sort(blocks.begin(), blocks.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
}

bool ZUModule::operator==(const ZUModule& o) const {
  ZUModule a = *this, b = o;
  a.normalize();
  b.normalize();
  return a.towers == b.towers && a.blocks == b.blocks;
}

std::string ZUModule::str() const {
  ZUModule a = *this;
  a.normalize();
  std::ostringstream out;
  bool first = true;
  auto sep = [&] {
    if (!first) out << " + ";
    first = false;
  };
  for (size_t i = 0; i < a.towers.size();) {
    size_t j = i;
    while (j < a.towers.size() && a.towers[j] == a.towers[i]) ++j;
    sep();
    out << "T^-_" << a.towers[i];
    if (j - i > 1) out << "^" << (j - i);
    i = j;
  }
  for (size_t i = 0; i < a.blocks.size();) {
    size_t j = i;
    while (j < a.blocks.size() && a.blocks[j] == a.blocks[i]) ++j;
    sep();
    out << "T_" << a.blocks[i].first << "(" << a.blocks[i].second << ")";
    if (j - i > 1) out << "^" << (j - i);
    i = j;
  }
  if (first) out << "0";
  return out.str();
}

ZUModule module_from_bars(const std::vector<std::pair<int64_t, int64_t>>& finite, const std::vector<int64_t>& essential) {
  ZUModule m;
  for (auto& [u, v] : finite)
    if (v > u) m.blocks.emplace_back(-2 * u, v - u);
  for (auto u : essential) m.towers.push_back(-2 * u);
  m.normalize();
  return m;
}

size_t GradedRoot::count_at(int64_t level) const {
  size_t c = 0;
  for (auto& n : nodes)
    if (n.level == level) ++c;
  return c;
}

std::string GradedRoot::dot() const {
  std::ostringstream out;
  out << "digraph graded_root {\n  rankdir=BT;\n";
  std::map<int64_t, std::vector<size_t>> by_level;
  for (size_t i = 0; i < nodes.size(); ++i) by_level[nodes[i].level].push_back(i);
  for (auto& [lvl, ids] : by_level) {
    out << "  { rank=same;";
    for (auto i : ids) out << " v" << i << ";";
    out << " }\n";
  }
  for (size_t i = 0; i < nodes.size(); ++i)
    out << "  v" << i << " [label=\"" << nodes[i].level << "\", level=" << nodes[i].level << "];\n";
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].parent >= 0) out << "  v" << i << " -> v" << nodes[i].parent << ";\n";
  out << "}\n";
  return out.str();
}

std::vector<std::vector<uint32_t>> components(const CubeComplex& X) {
  size_t n = X.count(0);
  std::vector<uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (size_t i = 0; i < X.count(1); ++i) {
    auto col = X.boundary(1, i);
    if (col.size() == 2) {
      uint32_t a = find(col[0].first), b = find(col[1].first);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<uint32_t, std::vector<uint32_t>> groups;
  for (uint32_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<uint32_t>> out;
  for (auto& [r, g] : groups) out.push_back(std::move(g));
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.front() < b.front(); });
  return out;
}

SublevelModel::SublevelModel(std::shared_ptr<const WeightFunction> w, IntVec c, size_t budget)
    : w_(std::move(w)), box_(std::move(c)) {
  if (box_.cube_slots() > static_cast<long double>(budget)) {
    std::ostringstream msg;
    msg << "rectangle has " << static_cast<double>(box_.cube_slots()) << " cube slots, budget is " << budget
        << "; use a reduction (bad vertex set) instead";
    throw BudgetError(msg.str());
  }
  X_ = sublevel_complex(box_, *w_, INT64_MAX);
  m_w_ = INT64_MAX;
  max_w_ = INT64_MIN;
  for (auto& c0 : X_.cells(0)) {
    m_w_ = std::min(m_w_, c0.weight);
    max_w_ = std::max(max_w_, c0.weight);
  }
}

std::vector<int64_t> SublevelModel::levels() const {
  std::vector<int64_t> out;
  for (int64_t n = m_w_; n <= max_w_; ++n) out.push_back(n);
  return out;
}

CubeComplex SublevelModel::level(int64_t n) const {
  return X_.filter([n](size_t, const Cell& c) { return c.weight <= n; });
}

std::vector<HomologyGroup> SublevelModel::homology(int64_t n) const { return integral_homology(level(n)); }

const Barcode& SublevelModel::barcode() const {
  if (!bars_) bars_ = filtered_barcode(X_, [](size_t, const Cell& c) { return c.weight; });
  return *bars_;
}

std::vector<size_t> SublevelModel::betti(int64_t n) const {
  const Barcode& B = barcode();
  std::vector<size_t> b(B.essential.size(), 0);
  for (size_t q = 0; q < b.size(); ++q) {
    for (auto u : B.essential[q])
      if (u <= n) ++b[q];
    for (auto& [u, v] : B.finite[q])
      if (u <= n && n < v) ++b[q];
  }
  while (!b.empty() && b.back() == 0) b.pop_back();
  return b;
}

size_t SublevelModel::u_rank(int64_t n, int64_t m, size_t q) const {
  const Barcode& B = barcode();
  if (q >= B.essential.size()) return 0;
  size_t r = 0;
  for (auto u : B.essential[q])
    if (u <= n) ++r;
  for (auto& [u, v] : B.finite[q])
    if (u <= n && m < v) ++r;
  return r;
}

GradedRoot SublevelModel::graded_root() const {
  GradedRoot R;
  size_t nv = X_.count(0);
  std::vector<uint32_t> vorder(nv), eorder(X_.count(1));
  std::iota(vorder.begin(), vorder.end(), 0);
  std::iota(eorder.begin(), eorder.end(), 0);
  const auto& V = X_.cells(0);
  const auto& E = X_.cells(1);
  std::stable_sort(vorder.begin(), vorder.end(), [&](uint32_t a, uint32_t b) { return V[a].weight < V[b].weight; });
  std::stable_sort(eorder.begin(), eorder.end(), [&](uint32_t a, uint32_t b) { return E[a].weight < E[b].weight; });
  std::vector<uint32_t> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<char> present(nv, 0);
  auto find = [&](uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  size_t vi = 0, ei = 0;
  std::vector<size_t> prev_nodes;
  for (int64_t L = m_w_; L <= max_w_; ++L) {
    while (vi < nv && V[vorder[vi]].weight <= L) present[vorder[vi++]] = 1;
    while (ei < E.size() && E[eorder[ei]].weight <= L) {
      auto col = X_.boundary(1, eorder[ei++]);
      uint32_t a = find(col[0].first), b = find(col[1].first);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<uint32_t, std::pair<uint64_t, size_t>> comp;  // root -> (rep point, size)
    for (uint32_t i = 0; i < nv; ++i)
      if (present[i]) {
        auto& e = comp[find(i)];
        if (e.second == 0) e.first = V[i].point;
        e.first = std::min(e.first, V[i].point);
        ++e.second;
      }
    std::map<uint32_t, size_t> node_of;
    std::vector<std::pair<uint64_t, uint32_t>> sorted;
    for (auto& [r, e] : comp) sorted.emplace_back(e.first, r);
    std::sort(sorted.begin(), sorted.end());
    std::vector<size_t> cur;
    for (auto& [rep, r] : sorted) {
      node_of[r] = R.nodes.size();
      cur.push_back(R.nodes.size());
      R.nodes.push_back({L, rep, -1, comp[r].second});
    }
    for (size_t id : prev_nodes) {
      int64_t vidx = X_.find(R.nodes[id].rep, 0);
      R.nodes[id].parent = static_cast<int64_t>(node_of[find(static_cast<uint32_t>(vidx))]);
    }
    prev_nodes = cur;
  }
  return R;
}

ZUModule SublevelModel::zu_from_root() const {
  GradedRoot R = graded_root();
  ZUModule m;
  std::vector<int64_t> birth(R.nodes.size(), INT64_MAX);
  std::vector<std::vector<size_t>> children(R.nodes.size());
  for (size_t i = 0; i < R.nodes.size(); ++i)
    if (R.nodes[i].parent >= 0) children[R.nodes[i].parent].push_back(i);
  for (size_t i = 0; i < R.nodes.size(); ++i) {
    auto& ch = children[i];
    if (ch.empty()) {
      birth[i] = R.nodes[i].level;
      continue;
    }
    size_t elder = ch[0];
    for (size_t c : ch)
      if (birth[c] < birth[elder]) elder = c;
    birth[i] = birth[elder];
    for (size_t c : ch)
      if (c != elder) m.blocks.emplace_back(-2 * birth[c], R.nodes[i].level - birth[c]);
  }
  for (size_t i = 0; i < R.nodes.size(); ++i)
    if (R.nodes[i].parent < 0) m.towers.push_back(-2 * birth[i]);
  m.normalize();
  return m;
}

std::vector<ZUModule> SublevelModel::zu_modules() const {
  const Barcode& B = barcode();
  std::vector<ZUModule> out;
  for (size_t q = 0; q < B.essential.size(); ++q) out.push_back(module_from_bars(B.finite[q], B.essential[q]));
  while (out.size() > 1 && out.back().towers.empty() && out.back().blocks.empty()) out.pop_back();
  if (!out.empty() && !(out[0] == zu_from_root())) throw std::logic_error("graded root and barcode disagree on H_0");
  return out;
}

std::map<std::pair<int64_t, size_t>, size_t> SublevelModel::hat_homology() const {
  std::map<std::pair<int64_t, size_t>, size_t> out;
  for (int64_t n = m_w_; n <= max_w_; ++n) {
    CubeComplex rel = X_.filter([n](size_t, const Cell& c) { return c.weight == n; });
    auto H = integral_homology(rel);
    for (size_t q = 0; q < H.size(); ++q)
      if (H[q].rank) out[{n, q}] = H[q].rank;
  }
  return out;
}

int64_t SublevelModel::eu_from_homology() const {
  const Barcode& B = barcode();
  int64_t eu = -m_w_;
  for (size_t q = 0; q < B.finite.size(); ++q) {
    int64_t s = 0;
    for (auto& [u, v] : B.finite[q]) s += v - u;
    eu += (q % 2 == 0) ? s : -s;
  }
  return eu;
}

int64_t SublevelModel::eu_from_cubes() const {
  int64_t s = 0;
  for (size_t q = 0; q < X_.top_dim(); ++q)
    for (auto& c : X_.cells(q)) s += (q % 2 == 0) ? -c.weight : c.weight;
  return s;
}

int64_t SublevelModel::euler_characteristic() const {
  int64_t a = eu_from_homology(), b = eu_from_cubes();
  if (a != b)
    throw std::logic_error("eu mismatch: homology gives " + std::to_string(a) + ", cube sum gives " + std::to_string(b));
  return a;
}

std::vector<std::vector<Rat>> SublevelModel::u_map(int64_t n, size_t q) const {
  CubeComplex A = level(n), B = level(n + 1);
  std::vector<std::vector<Rat>> mat;
  if (q == 0) {
    auto ca = components(A), cb = components(B);
    std::vector<int64_t> comp_b(B.count(0), -1);
    for (size_t j = 0; j < cb.size(); ++j)
      for (auto v : cb[j]) comp_b[v] = static_cast<int64_t>(j);
    mat.assign(cb.size(), std::vector<Rat>(ca.size(), Rat(0)));
    for (size_t i = 0; i < ca.size(); ++i) {
      int64_t v = B.find(A.cells(0)[ca[i].front()].point, 0);
      mat[comp_b[v]][i] = 1;
    }
    return mat;
  }
  HomologyBasis ha = homology_basis(A, q), hb = homology_basis(B, q);
  mat.assign(hb.reps.size(), std::vector<Rat>(ha.reps.size(), Rat(0)));
  for (size_t i = 0; i < ha.reps.size(); ++i) {
    auto c = homology_coords(hb, transport(A, B, q, ha.reps[i]));
    for (size_t j = 0; j < c.size(); ++j) mat[j][i] = c[j];
  }
  return mat;
}

IntVec default_rectangle(const LatticeContext& ctx) {
  IntVec c;
  for (auto& z : ctx.ZK()) c.push_back(std::max<int64_t>(0, to_i64(floor_of(z))));
  return c;
}

std::optional<IntVec> level_box(const LatticeContext& ctx, const HClass& h, int64_t n,
                                const std::vector<size_t>& coords) {
  size_t r = ctx.rank();
  RatVec k = ctx.k_h(h);
  // chi(x) = (x + k/2)^T A (x + k/2)/2 - k^T A k/8 with A = -M
  Rat kAk = -ctx.pair(k, k);
  Rat rho = Rat(2 * n) + kAk / 4;
  if (rho < 0) return std::nullopt;
  IntVec out;
  for (size_t i : coords) {
    if (i >= r) throw std::out_of_range("coordinate");
    Rat t = rho * (-ctx.M_inv()[i][i]);
    Rat half = k[i] / 2;
    auto ok = [&](int64_t x) {
      Rat y = Rat(x) + half;
      return y <= 0 || y * y <= t;
    };
    double est = std::floor(-half.get_d() + std::sqrt(std::max(0.0, t.get_d())));
    int64_t x = static_cast<int64_t>(est) + 2;
    while (ok(x)) ++x;
    while (!ok(x)) --x;
    if (x < 0) return std::nullopt;
    out.push_back(x);
  }
  return out;
}

HomologyBasis homology_basis(const CubeComplex& X, size_t q) {
  HomologyBasis H;
  std::vector<BigVec> cols(X.count(q));
  for (size_t i = 0; i < X.count(q); ++i) cols[i] = to_big(X.boundary(q, i));
  auto Z = kernel_basis(cols);
  QSubspace S;
  for (size_t i = 0; i < X.count(q + 1); ++i) {
    BigVec b = to_big(X.boundary(q + 1, i));
    if (S.insert(b)) H.boundaries.push_back(std::move(b));
  }
  for (auto& z : Z)
    if (S.insert(z)) H.reps.push_back(z);
  return H;
}

std::optional<std::vector<Rat>> solve_in_span(const std::vector<BigVec>& gens, const BigVec& y) {
  std::vector<BigVec> cols = gens;
  cols.push_back(y);
  auto K = kernel_basis(cols);
  uint32_t last = static_cast<uint32_t>(gens.size());
  for (auto& v : K)
    if (!v.empty() && v.back().first == last) {
      Rat ty(v.back().second);
      std::vector<Rat> c(gens.size(), Rat(0));
      for (auto& e : v)
        if (e.first < last) c[e.first] = -Rat(e.second) / ty;
      return c;
    }
  if (y.empty()) return std::vector<Rat>(gens.size(), Rat(0));
  return std::nullopt;
}

std::vector<Rat> homology_coords(const HomologyBasis& B, const BigVec& cycle) {
  std::vector<BigVec> gens = B.reps;
  gens.insert(gens.end(), B.boundaries.begin(), B.boundaries.end());
  auto c = solve_in_span(gens, cycle);
  if (!c) throw std::logic_error("chain is not a cycle of the target complex");
  c->resize(B.reps.size());
  return *c;
}

BigVec transport(const CubeComplex& from, const CubeComplex& to, size_t q, const BigVec& v) {
  BigVec out;
  for (auto& [i, x] : v) {
    const Cell& c = from.cells(q)[i];
    IntVec p = from.box().point(c.point);
    for (size_t d = 0; d < p.size(); ++d)
      if (p[d] > to.box().hi()[d]) throw std::logic_error("cell outside target box");
    int64_t j = to.find(to.box().index(p), c.mask);
    if (j < 0) throw std::logic_error("cell missing from target complex");
    out.emplace_back(static_cast<uint32_t>(j), x);
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace latcoh
