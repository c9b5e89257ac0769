#include "latcoh/specseq.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace latcoh {

int64_t Filtration::degree(const IntVec& l) const {
  int64_t d = 0;
  for (size_t i = 0; i < coeff.size(); ++i) d += coeff[i] * l[i];
  return d;
}

int64_t Filtration::degree(const Box& box, uint64_t point) const {
  int64_t d = 0;
  for (size_t i = 0; i < coeff.size(); ++i)
    if (coeff[i]) d += coeff[i] * box.coord(point, i);
  return d;
}

std::vector<size_t> Filtration::support() const {
  std::vector<size_t> s;
  for (size_t i = 0; i < coeff.size(); ++i)
    if (coeff[i]) s.push_back(i);
  return s;
}

Filtration build_filtration(const IntVec& s) {
  Filtration f;
  f.coeff = s;
  int64_t g = 0;
  for (auto c : s) {
    if (c < 0) throw std::invalid_argument("semigroup element is not in the Lipman cone (negative E^*-coefficient)");
    g = std::gcd(g, c);
  }
  if (g == 0) throw std::invalid_argument("semigroup element must be nonzero");
  f.e = g;
  return f;
}

int64_t SpectralRow::rank(int k, int64_t d, int64_t q) const {
  const auto& P = page(k);
  auto it = P.find({d, q});
  return it == P.end() ? 0 : it->second;
}

const std::map<Bidegree, int64_t>& SpectralRow::page(int k) const {
  if (k <= 0 || pages.empty()) return limit;
  return pages[std::min<size_t>(static_cast<size_t>(k), pages.size()) - 1];
}

SpectralSequence::SpectralSequence(std::shared_ptr<const WeightFunction> w, Filtration f, RegionFn region,
                                   size_t budget)
    : w_(std::move(w)), f_(std::move(f)), region_(std::move(region)), budget_(budget) {
  if (f_.coeff.size() != w_->rank()) throw std::invalid_argument("filtration rank does not match the model");
}

LevelData SpectralSequence::level(int64_t n) const {
  LevelData L;
  auto reg = region_(n);
  if (!reg) return L;
  Box box(*reg);
  if (static_cast<long double>(box.volume()) > static_cast<long double>(budget_))
    throw BudgetError("level region has " + std::to_string(box.volume()) + " lattice points, budget is " +
                      std::to_string(budget_));
  L.X = sublevel_complex(box, *w_, n);
  const Box& bx = L.X.box();
  L.bars = filtered_barcode(L.X, [&](size_t, const Cell& c) { return cell_value(bx, c); });
  return L;
}

namespace {

// F_p H_b ranks computed directly from images, independent of the pairing
std::map<int64_t, std::vector<std::pair<int64_t, int64_t>>> abutment_of(const CubeComplex& X,
                                                                         const std::function<int64_t(size_t, const Cell&)>& value) {
  std::map<int64_t, std::vector<std::pair<int64_t, int64_t>>> out;
  size_t top = X.top_dim();
  for (size_t b = 0; b < top; ++b) {
    size_t m = X.count(b);
    std::vector<int64_t> val(m);
    for (size_t i = 0; i < m; ++i) val[i] = value(b, X.cells(b)[i]);
    std::vector<uint32_t> order(m), pos(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t c) { return val[a] < val[c]; });
    for (uint32_t j = 0; j < m; ++j) pos[order[j]] = j;
    QSubspace img;
    for (size_t i = 0; i < X.count(b + 1); ++i) {
      BigVec v = to_big(X.boundary(b + 1, i));
      for (auto& e : v) e.first = pos[e.first];
      std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.first < y.first; });
      img.insert(std::move(v));
    }
    QSubspace bd;
    std::vector<std::pair<int64_t, int64_t>> ladder;
    size_t j = 0;
    while (j < m) {
      int64_t p = val[order[j]];
      while (j < m && val[order[j]] == p) {
        if (b > 0) bd.insert(to_big(X.boundary(b, order[j])));
        ++j;
      }
      int64_t z = static_cast<int64_t>(j) - static_cast<int64_t>(bd.dim());
      int64_t bcap = static_cast<int64_t>(img.count_pivots_below(static_cast<uint32_t>(j)));
      ladder.emplace_back(-p, z - bcap);
    }
    out[static_cast<int64_t>(b)] = ladder;
  }
  return out;
}

}  // namespace

SpectralRow SpectralSequence::row_from(const CubeComplex& X, const Barcode& B, int64_t n, bool cross_check) const {
  SpectralRow row;
  row.n = n;
  size_t top = B.essential.size();
  int64_t G = 0;
  for (size_t b = 0; b < top; ++b)
    for (auto& [u, v] : B.finite[b]) G = std::max(G, v - u);
  if (X.total() == 0) return row;
  for (int k = 1; k <= G + 1; ++k) {
    std::map<Bidegree, int64_t> P;
    for (size_t b = 0; b < top; ++b) {
      int64_t bb = static_cast<int64_t>(b);
      for (auto p : B.essential[b]) P[{-p, bb - p}] += 1;
      for (auto& [u, v] : B.finite[b])
        if (v - u >= k) {
          P[{-u, bb - u}] += 1;
          P[{-v, bb + 1 - v}] += 1;
        }
    }
    row.pages.push_back(std::move(P));
  }
  row.limit = row.pages.back();
  row.degeneration = static_cast<int>(G + 1);
  for (size_t b = 0; b < top; ++b)
    for (auto& [u, v] : B.finite[b])
      if (v > u) row.differentials[{static_cast<int>(v - u), -v, static_cast<int64_t>(b) + 1 - v}] += 1;
  for (size_t b = 0; b < top; ++b) row.betti.push_back(static_cast<int64_t>(B.essential[b].size()));
  while (!row.betti.empty() && row.betti.back() == 0) row.betti.pop_back();

  const Box& bx = X.box();
  auto value = [&](size_t, const Cell& c) { return cell_value(bx, c); };
  std::set<int64_t> pvals;
  for (size_t q = 0; q < X.top_dim(); ++q)
    for (auto& c : X.cells(q)) pvals.insert(value(q, c));
  for (int64_t p : pvals) {
    CubeComplex rel = X.filter([&](size_t q, const Cell& c) { return value(q, c) == p; });
    auto H = integral_homology(rel);
    for (size_t b = 0; b < H.size(); ++b) {
      Bidegree key{-p, static_cast<int64_t>(b) - p};
      int64_t expect = row.rank(1, key.first, key.second);
      if (static_cast<int64_t>(H[b].rank) != expect)
        throw std::logic_error("E^1 rank mismatch between relative homology and the filtered reduction");
      if (!H[b].torsion.empty()) row.e1_torsion[key] = H[b].torsion;
    }
  }
  if (cross_check) {
    row.abutment = abutment_of(X, value);
    for (auto& [b, ladder] : row.abutment) {
      int64_t prev = 0;
      for (auto& [d, r] : ladder) {
        int64_t gr = r - prev;
        prev = r;
        if (gr != row.rank(0, d, b + d))
          throw std::logic_error("E^inf does not match the graded abutment at d=" + std::to_string(d));
      }
      int64_t total = ladder.empty() ? 0 : ladder.back().second;
      int64_t bet = b < static_cast<int64_t>(row.betti.size()) ? row.betti[b] : 0;
      if (total != bet) throw std::logic_error("abutment top does not match the Betti number");
    }
  }
  return row;
}

SpectralRow SpectralSequence::row(int64_t n, bool cross_check) const {
  LevelData L = level(n);
  return row_from(L.X, L.bars, n, cross_check);
}

std::map<Bidegree, HomologyGroup> SpectralSequence::e1_page(int64_t n) const {
  std::map<Bidegree, HomologyGroup> out;
  LevelData L = level(n);
  const Box& bx = L.X.box();
  std::set<int64_t> pvals;
  for (size_t q = 0; q < L.X.top_dim(); ++q)
    for (auto& c : L.X.cells(q)) pvals.insert(cell_value(bx, c));
  for (int64_t p : pvals) {
    CubeComplex rel = L.X.filter([&](size_t, const Cell& c) { return cell_value(bx, c) == p; });
    auto H = integral_homology(rel);
    for (size_t b = 0; b < H.size(); ++b)
      if (H[b].rank || !H[b].torsion.empty()) out[{-p, static_cast<int64_t>(b) - p}] = H[b];
  }
  return out;
}

std::map<int64_t, std::vector<std::pair<int64_t, int64_t>>> SpectralSequence::abutment(int64_t n) const {
  LevelData L = level(n);
  const Box& bx = L.X.box();
  return abutment_of(L.X, [&](size_t, const Cell& c) { return cell_value(bx, c); });
}

namespace {

// Explicit subquotient description of the pages of one level.
class ExplicitPages {
 public:
  ExplicitPages(const CubeComplex& X, std::function<int64_t(const Cell&)> value) : X_(X) {
    for (size_t q = 0; q < X.top_dim(); ++q) {
      val_.emplace_back();
      for (auto& c : X.cells(q)) val_.back().push_back(value(c));
      std::vector<uint32_t> order(X.count(q));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return val_[q][a] < val_[q][b]; });
      order_.push_back(order);
      std::vector<uint32_t> pos(order.size());
      for (uint32_t j = 0; j < order.size(); ++j) pos[order[j]] = j;
      pos_.push_back(pos);
    }
  }

  int64_t val(size_t q, size_t i) const { return val_[q][i]; }

  // {x in C_b(F_p) : boundary(x) in F_{p-k}}
  std::vector<BigVec> Z(int64_t p, int64_t k, size_t b) const {
    std::vector<uint32_t> idx;
    std::vector<BigVec> cols;
    if (b >= val_.size()) return {};
    for (uint32_t i = 0; i < X_.count(b); ++i) {
      if (val_[b][i] > p) continue;
      idx.push_back(i);
      BigVec col;
      if (b > 0)
        for (auto& e : X_.boundary(b, i))
          if (val_[b - 1][e.first] > p - k) col.emplace_back(e.first, Int(e.second));
      cols.push_back(std::move(col));
    }
    auto K = kernel_basis(cols);
    for (auto& v : K) {
      for (auto& e : v) e.first = idx[e.first];
      std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.first < y.first; });
    }
    return K;
  }

  // C_b(F_p) intersected with boundary(C_{b+1}(F_{p+k}))
  std::vector<BigVec> B(int64_t p, int64_t k, size_t b) const {
    if (b >= val_.size() || b + 1 >= val_.size()) return {};
    QSubspace S;
    for (uint32_t i = 0; i < X_.count(b + 1); ++i) {
      if (val_[b + 1][i] > p + k) continue;
      BigVec v = to_big(X_.boundary(b + 1, i));
      for (auto& e : v) e.first = pos_[b][e.first];
      std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.first < y.first; });
      S.insert(std::move(v));
    }
    uint32_t bound = 0;
    while (bound < order_[b].size() && val_[b][order_[b][bound]] <= p) ++bound;
    std::vector<BigVec> out;
    for (auto& [piv, v] : S.basis()) {
      if (piv >= bound) break;
      BigVec w = v;
      for (auto& e : w) e.first = order_[b][e.first];
      std::sort(w.begin(), w.end(), [](auto& x, auto& y) { return x.first < y.first; });
      out.push_back(std::move(w));
    }
    return out;
  }

  struct Page {
    std::vector<BigVec> reps, denom;
  };

  Page page(int64_t p, int k, size_t b) const {
    Page P;
    auto D1 = Z(p - 1, k - 1, b);
    auto D2 = B(p, k - 1, b);
    QSubspace S;
    for (auto& v : D1)
      if (S.insert(v)) P.denom.push_back(v);
    for (auto& v : D2)
      if (S.insert(v)) P.denom.push_back(v);
    for (auto& z : Z(p, k, b))
      if (S.insert(z)) P.reps.push_back(z);
    return P;
  }

 private:
  const CubeComplex& X_;
  std::vector<std::vector<int64_t>> val_;
  std::vector<std::vector<uint32_t>> order_, pos_;
};

std::vector<Rat> page_coords(const ExplicitPages::Page& P, const BigVec& x) {
  std::vector<BigVec> gens = P.reps;
  gens.insert(gens.end(), P.denom.begin(), P.denom.end());
  auto c = solve_in_span(gens, x);
  if (!c) throw std::logic_error("chain does not lie in the page's cycle space");
  c->resize(P.reps.size());
  return *c;
}

using RatMat = std::vector<std::vector<Rat>>;

RatMat mat_mul(const RatMat& A, const RatMat& B, size_t rowsA, size_t colsB) {
  size_t inner = B.size();
  RatMat C(rowsA, std::vector<Rat>(colsB, Rat(0)));
  for (size_t i = 0; i < rowsA; ++i)
    for (size_t k = 0; k < inner; ++k)
      if (A[i][k] != 0)
        for (size_t j = 0; j < colsB; ++j) C[i][j] += A[i][k] * B[k][j];
  return C;
}

size_t mat_rank(const RatMat& A) {
  if (A.empty()) return 0;
  std::vector<BigVec> cols(A[0].size());
  for (size_t j = 0; j < A[0].size(); ++j) {
    Int den = 1;
    for (size_t i = 0; i < A.size(); ++i) den = lcm(den, A[i][j].get_den());
    for (size_t i = 0; i < A.size(); ++i)
      if (A[i][j] != 0) cols[j].emplace_back(static_cast<uint32_t>(i), Int(A[i][j] * den));
  }
  return exact_rank_big(cols);
}

}  // namespace

PageMap SpectralSequence::u_on_pages(int64_t n, int k) const {
  if (k < 1) throw std::invalid_argument("page index must be >= 1");
  LevelData A = level(n), Bn = level(n + 1);
  if (A.X.total() + Bn.X.total() > 6000) throw BudgetError("explicit page maps are limited to small levels");
  const Box& ba = A.X.box();
  const Box& bb = Bn.X.box();
  ExplicitPages EA(A.X, [&](const Cell& c) { return cell_value(ba, c); });
  ExplicitPages EB(Bn.X, [&](const Cell& c) { return cell_value(bb, c); });
  SpectralRow ra = row_from(A.X, A.bars, n, false), rb = row_from(Bn.X, Bn.bars, n + 1, false);
  std::set<std::pair<int64_t, size_t>> keys;  // (p, b)
  for (size_t q = 0; q < A.X.top_dim(); ++q)
    for (size_t i = 0; i < A.X.count(q); ++i) keys.insert({EA.val(q, i), q});
  for (size_t q = 0; q < Bn.X.top_dim(); ++q)
    for (size_t i = 0; i < Bn.X.count(q); ++i) keys.insert({EB.val(q, i), q});
  std::map<std::pair<int64_t, size_t>, ExplicitPages::Page> pa, pb;
  for (auto& [p, b] : keys) {
    pa[{p, b}] = EA.page(p, k, b);
    pb[{p, b}] = EB.page(p, k, b);
    Bidegree key{-p, static_cast<int64_t>(b) - p};
    if (static_cast<int64_t>(pa[{p, b}].reps.size()) != ra.rank(k, key.first, key.second) ||
        static_cast<int64_t>(pb[{p, b}].reps.size()) != rb.rank(k, key.first, key.second))
      throw std::logic_error("explicit page dimension differs from the filtered reduction");
  }
  PageMap out;
  std::map<std::pair<int64_t, size_t>, RatMat> U;
  for (auto& [p, b] : keys) {
    auto& src = pa[{p, b}];
    auto& dst = pb[{p, b}];
    RatMat M(dst.reps.size(), std::vector<Rat>(src.reps.size(), Rat(0)));
    for (size_t j = 0; j < src.reps.size(); ++j) {
      auto c = page_coords(dst, transport(A.X, Bn.X, b, src.reps[j]));
      for (size_t i = 0; i < c.size(); ++i) M[i][j] = c[i];
    }
    Bidegree key{-p, static_cast<int64_t>(b) - p};
    out.rank[key] = static_cast<int64_t>(mat_rank(M));
    out.matrix[key] = M;
    U[{p, b}] = M;
  }
  // d^k on both levels and the commutation U d = d U
  auto dk = [&](const CubeComplex& X, std::map<std::pair<int64_t, size_t>, ExplicitPages::Page>& pages, int64_t p,
                size_t b) {
    auto& src = pages[{p, b}];
    auto& dst = pages[{p - k, b - 1}];
    RatMat M(dst.reps.size(), std::vector<Rat>(src.reps.size(), Rat(0)));
    for (size_t j = 0; j < src.reps.size(); ++j) {
      BigVec y;
      for (auto& [i, x] : src.reps[j])
        for (auto& e : X.boundary(b, i)) y.emplace_back(e.first, x * e.second);
      std::sort(y.begin(), y.end(), [](auto& a, auto& c) { return a.first < c.first; });
      BigVec merged;
      for (auto& e : y) {
        if (!merged.empty() && merged.back().first == e.first)
          merged.back().second += e.second;
        else
          merged.push_back(e);
      }
      merged.erase(std::remove_if(merged.begin(), merged.end(), [](auto& e) { return e.second == 0; }), merged.end());
      auto c = page_coords(dst, merged);
      for (size_t i = 0; i < c.size(); ++i) M[i][j] = c[i];
    }
    return M;
  };
  for (auto& [p, b] : keys) {
    if (b == 0) continue;
    if (!pa.count({p - k, b - 1})) {
      pa[{p - k, b - 1}] = EA.page(p - k, k, b - 1);
      pb[{p - k, b - 1}] = EB.page(p - k, k, b - 1);
      U[{p - k, b - 1}] = RatMat(pb[{p - k, b - 1}].reps.size(), std::vector<Rat>(pa[{p - k, b - 1}].reps.size(), Rat(0)));
      auto& src = pa[{p - k, b - 1}];
      auto& dst = pb[{p - k, b - 1}];
      for (size_t j = 0; j < src.reps.size(); ++j) {
        auto c = page_coords(dst, transport(A.X, Bn.X, b - 1, src.reps[j]));
        for (size_t i = 0; i < c.size(); ++i) U[{p - k, b - 1}][i][j] = c[i];
      }
    }
    RatMat da = dk(A.X, pa, p, b), db = dk(Bn.X, pb, p, b);
    size_t rows = pb[{p - k, b - 1}].reps.size(), cols = pa[{p, b}].reps.size();
    RatMat lhs = mat_mul(U[{p - k, b - 1}], da, rows, cols);
    RatMat rhs = mat_mul(db, U[{p, b}], rows, cols);
    if (lhs != rhs) out.commutes = false;
  }
  if (!out.commutes) throw std::logic_error("U does not commute with d^k");
  return out;
}

std::map<Bidegree, ZUModule> SpectralSequence::e1_modules(int64_t nmax) const {
  std::map<Bidegree, ZUModule> out;
  LevelData L = level(nmax);
  const Box& bx = L.X.box();
  std::set<int64_t> pvals;
  for (size_t q = 0; q < L.X.top_dim(); ++q)
    for (auto& c : L.X.cells(q)) pvals.insert(cell_value(bx, c));
  for (int64_t p : pvals) {
    CubeComplex rel = L.X.filter([&](size_t, const Cell& c) { return cell_value(bx, c) == p; });
    Barcode B = filtered_barcode(rel, [](size_t, const Cell& c) { return c.weight; });
    for (size_t b = 0; b < B.essential.size(); ++b) {
      ZUModule m = module_from_bars(B.finite[b], B.essential[b]);
      if (!m.towers.empty() || !m.blocks.empty()) out[{-p, static_cast<int64_t>(b) - p}] = m;
    }
  }
  return out;
}

std::map<IntVec, std::map<int64_t, int64_t>> SpectralSequence::multigraded_e1(int64_t n) const {
  std::map<IntVec, std::map<int64_t, int64_t>> out;
  LevelData L = level(n);
  const Box& bx = L.X.box();
  auto supp = f_.support();
  auto key_of = [&](const Cell& c) {
    IntVec k;
    for (auto i : supp) k.push_back(bx.coord(c.point, i));
    return k;
  };
  std::set<IntVec> keys;
  for (size_t q = 0; q < L.X.top_dim(); ++q)
    for (auto& c : L.X.cells(q)) keys.insert(key_of(c));
  for (auto& key : keys) {
    CubeComplex rel = L.X.filter([&](size_t, const Cell& c) { return key_of(c) == key; });
    auto H = integral_homology(rel);
    for (size_t b = 0; b < H.size(); ++b)
      if (H[b].rank) out[key][static_cast<int64_t>(b)] = static_cast<int64_t>(H[b].rank);
  }
  return out;
}

std::vector<SpectralRow> SpectralSequence::root_split(int64_t n) const {
  LevelData L = level(n);
  std::vector<SpectralRow> rows;
  auto comps = components(L.X);
  std::vector<int64_t> comp_of(L.X.count(0), -1);
  for (size_t j = 0; j < comps.size(); ++j)
    for (auto v : comps[j]) comp_of[v] = static_cast<int64_t>(j);
  const Box& bx = L.X.box();
  for (size_t j = 0; j < comps.size(); ++j) {
    CubeComplex sub = L.X.filter([&](size_t, const Cell& c) {
      int64_t v = L.X.find(c.point, 0);
      return v >= 0 && comp_of[v] == static_cast<int64_t>(j);
    });
    Barcode B = filtered_barcode(sub, [&](size_t, const Cell& c) { return cell_value(bx, c); });
    rows.push_back(row_from(sub, B, n, true));
  }
  SpectralRow whole = row_from(L.X, L.bars, n, false);
  std::map<Bidegree, int64_t> sum1, suminf;
  for (auto& r : rows) {
    for (auto& [k, v] : r.page(1)) sum1[k] += v;
    for (auto& [k, v] : r.limit) suminf[k] += v;
  }
  if (!(sum1 == (whole.pages.empty() ? std::map<Bidegree, int64_t>{} : whole.pages[0])) || !(suminf == whole.limit))
    throw std::logic_error("root split does not recombine to the global row");
  return rows;
}

std::shared_ptr<SpectralSequence> full_spectral_sequence(const LatticeContext& ctx, const HClass& h, const IntVec& s,
                                                         size_t budget) {
  auto w = std::make_shared<ChiWeight>(ctx, h);
  std::vector<size_t> all(ctx.rank());
  std::iota(all.begin(), all.end(), 0);
  const LatticeContext* c = &ctx;
  auto region = [c, h, all](int64_t n) { return level_box(*c, h, n, all); };
  return std::make_shared<SpectralSequence>(w, build_filtration(s), region, budget);
}

int global_degeneration(const std::vector<SpectralRow>& rows) {
  int k = 1;
  for (auto& r : rows) k = std::max(k, r.degeneration);
  return k;
}

}  // namespace latcoh
