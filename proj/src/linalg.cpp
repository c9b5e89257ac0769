#include "latcoh/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace latcoh {

namespace {

void swap_rows(DenseInt& A, size_t i, size_t j) { std::swap(A[i], A[j]); }
void swap_cols(DenseInt& A, size_t i, size_t j) {
  for (auto& row : A) std::swap(row[i], row[j]);
}
void row_axpy(DenseInt& A, size_t dst, size_t src, const Int& q) {  // row dst -= q row src
  for (size_t k = 0; k < A[dst].size(); ++k) A[dst][k] -= q * A[src][k];
}
void col_axpy(DenseInt& A, size_t dst, size_t src, const Int& q) {
  for (auto& row : A) row[dst] -= q * row[src];
}

DenseInt identity(size_t n) {
  DenseInt I(n, std::vector<Int>(n, 0));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

SmithForm smith_impl(const DenseInt& A0, bool track) {
  SmithForm out;
  DenseInt A = A0;
  size_t m = A.size(), n = m ? A[0].size() : 0;
  if (track) {
    out.U = identity(m);
    out.V = identity(n);
  }
  size_t t = 0;
  while (t < std::min(m, n)) {
    bool have = false;
    size_t pi = 0, pj = 0;
    for (size_t i = t; i < m; ++i)
      for (size_t j = t; j < n; ++j)
        if (A[i][j] != 0 && (!have || abs(A[i][j]) < abs(A[pi][pj]))) {
          have = true;
          pi = i;
          pj = j;
        }
    if (!have) break;
    swap_rows(A, t, pi);
    if (track) swap_rows(out.U, t, pi);
    swap_cols(A, t, pj);
    if (track) swap_cols(out.V, t, pj);
    for (;;) {
      bool dirty = false;
      for (size_t i = t + 1; i < m; ++i) {
        if (A[i][t] == 0) continue;
        Int q;
        mpz_tdiv_q(q.get_mpz_t(), A[i][t].get_mpz_t(), A[t][t].get_mpz_t());
        row_axpy(A, i, t, q);
        if (track) row_axpy(out.U, i, t, q);
        if (A[i][t] != 0) {
          swap_rows(A, t, i);
          if (track) swap_rows(out.U, t, i);
          dirty = true;
        }
      }
      for (size_t j = t + 1; j < n; ++j) {
        if (A[t][j] == 0) continue;
        Int q;
        mpz_tdiv_q(q.get_mpz_t(), A[t][j].get_mpz_t(), A[t][t].get_mpz_t());
        col_axpy(A, j, t, q);
        if (track) col_axpy(out.V, j, t, q);
        if (A[t][j] != 0) {
          swap_cols(A, t, j);
          if (track) swap_cols(out.V, t, j);
          dirty = true;
        }
      }
      if (dirty) continue;
      bool fixed = false;
      for (size_t i = t + 1; i < m && !fixed; ++i)
        for (size_t j = t + 1; j < n; ++j)
          if (A[i][j] % A[t][t] != 0) {
            row_axpy(A, t, i, Int(-1));
            if (track) row_axpy(out.U, t, i, Int(-1));
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
    if (A[t][t] < 0) {
      for (auto& x : A[t]) x = -x;
      if (track)
        for (auto& x : out.U[t]) x = -x;
    }
    ++t;
  }
  for (size_t i = 0; i < std::min(m, n); ++i) out.diag.push_back(A[i][i]);
  return out;
}

template <class C>
C gcd_of(const C& a, const C& b);
template <>
int64_t gcd_of(const int64_t& a, const int64_t& b) {
  return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}
template <>
Int gcd_of(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline int64_t cmul(int64_t a, int64_t b) { return mul_ck(a, b); }
inline int64_t csub(int64_t a, int64_t b) { return sub_ck(a, b); }
inline Int cmul(const Int& a, const Int& b) { return a * b; }
inline Int csub(const Int& a, const Int& b) { return a - b; }

template <class C>
using Col = std::vector<std::pair<uint32_t, C>>;

// a*x - b*y
template <class C>
Col<C> combine(const C& a, const Col<C>& x, const C& b, const Col<C>& y) {
  Col<C> r;
  r.reserve(x.size() + y.size());
  size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      r.emplace_back(x[i].first, cmul(a, x[i].second));
      ++i;
    } else if (i == x.size() || y[j].first < x[i].first) {
      r.emplace_back(y[j].first, csub(C(0), cmul(b, y[j].second)));
      ++j;
    } else {
      C v = csub(cmul(a, x[i].second), cmul(b, y[j].second));
      if (v != 0) r.emplace_back(x[i].first, v);
      ++i;
      ++j;
    }
  }
  return r;
}

template <class C>
void primitive(Col<C>& v) {
  if (v.empty()) return;
  C g = 0;
  for (auto& e : v) {
    g = gcd_of<C>(g, e.second);
    if (g == 1) return;
  }
  if (v.back().second < 0) g = -g;
  for (auto& e : v) e.second /= g;
}

template <class C>
Pairing reduce_impl(const std::vector<std::vector<SparseCol>>& bd, const std::vector<size_t>& counts) {
  Pairing P;
  size_t top = counts.size();
  P.pairs.assign(top, {});
  P.paired.assign(top, {});
  for (size_t q = 0; q < top; ++q) P.paired[q].assign(counts[q], 0);
  for (size_t q = 1; q < top; ++q) {
    std::vector<int64_t> owner(counts[q - 1], -1);
    std::vector<Col<C>> store(counts[q]);
    for (size_t j = 0; j < counts[q]; ++j) {
      Col<C> col;
      col.reserve(bd[q][j].size());
      for (auto& e : bd[q][j]) col.emplace_back(e.first, C(e.second));
      while (!col.empty()) {
        uint32_t low = col.back().first;
        if (owner[low] < 0) break;
        const Col<C>& other = store[owner[low]];
        C a = other.back().second, b = col.back().second;
        C g = gcd_of<C>(a, b);
        a /= g;
        b /= g;
        col = combine<C>(a, col, b, other);
        primitive(col);
      }
      if (!col.empty()) {
        uint32_t low = col.back().first;
        owner[low] = static_cast<int64_t>(j);
        P.pairs[q].emplace_back(low, static_cast<uint32_t>(j));
        P.paired[q - 1][low] = 1;
        P.paired[q][j] = 1;
        store[j] = std::move(col);
      }
    }
  }
  return P;
}

template <class C>
IntRankInfo elim_impl(std::vector<Col<C>> cols, size_t nrows) {
  IntRankInfo info;
  size_t nc = cols.size();
  std::vector<std::vector<uint32_t>> rowcols(nrows);
  for (uint32_t c = 0; c < nc; ++c)
    for (auto& e : cols[c]) rowcols[e.first].push_back(c);
  std::vector<char> alive(nc, 1);
  auto entry = [&](const Col<C>& col, uint32_t r) -> const C* {
    auto it = std::lower_bound(col.begin(), col.end(), r,
                               [](const std::pair<uint32_t, C>& e, uint32_t v) { return e.first < v; });
    if (it != col.end() && it->first == r) return &it->second;
    return nullptr;
  };
  bool progress = true;
  while (progress) {
    progress = false;
    for (uint32_t c = 0; c < nc; ++c) {
      if (!alive[c] || cols[c].empty()) continue;
      int64_t best = -1;
      size_t bestcount = 0;
      for (auto& e : cols[c])
        if (e.second == 1 || e.second == -1) {
          size_t cnt = rowcols[e.first].size();
          if (best < 0 || cnt < bestcount) {
            best = e.first;
            bestcount = cnt;
          }
        }
      if (best < 0) continue;
      uint32_t r = static_cast<uint32_t>(best);
      C p = *entry(cols[c], r);
      std::vector<uint32_t> touch = rowcols[r];
      std::sort(touch.begin(), touch.end());
      touch.erase(std::unique(touch.begin(), touch.end()), touch.end());
      for (uint32_t c2 : touch) {
        if (c2 == c || !alive[c2]) continue;
        const C* a = entry(cols[c2], r);
        if (!a) continue;
        C k = cmul(*a, p);
        std::vector<uint32_t> before;
        before.reserve(cols[c2].size());
        for (auto& e : cols[c2]) before.push_back(e.first);
        cols[c2] = combine<C>(C(1), cols[c2], k, cols[c]);
        for (auto& e : cols[c2])
          if (!std::binary_search(before.begin(), before.end(), e.first)) rowcols[e.first].push_back(c2);
      }
      alive[c] = 0;
      rowcols[r].clear();
      ++info.rank;
      progress = true;
    }
  }
  std::vector<uint32_t> live;
  std::unordered_map<uint32_t, size_t> rowmap;
  for (uint32_t c = 0; c < nc; ++c)
    if (alive[c] && !cols[c].empty()) {
      live.push_back(c);
      for (auto& e : cols[c])
        if (!rowmap.count(e.first)) rowmap.emplace(e.first, rowmap.size());
    }
  if (!live.empty()) {
    DenseInt A(rowmap.size(), std::vector<Int>(live.size(), 0));
    for (size_t j = 0; j < live.size(); ++j)
      for (auto& e : cols[live[j]]) A[rowmap[e.first]][j] = Int(e.second);
    SmithForm S = smith_impl(A, false);
    for (auto& d : S.diag)
      if (d != 0) {
        ++info.rank;
        if (d != 1) info.torsion.push_back(d);
      }
  }
  std::sort(info.torsion.begin(), info.torsion.end());
  return info;
}

}  // namespace

SmithForm smith_form(const DenseInt& A) { return smith_impl(A, true); }

IntRankInfo integer_rank_info(std::vector<SparseCol> cols, size_t nrows) {
  try {
    std::vector<Col<int64_t>> c(cols.begin(), cols.end());
    return elim_impl<int64_t>(std::move(c), nrows);
  } catch (const OverflowError&) {
    std::vector<Col<Int>> c;
    for (auto& col : cols) {
      Col<Int> b;
      for (auto& e : col) b.emplace_back(e.first, Int(e.second));
      c.push_back(std::move(b));
    }
    return elim_impl<Int>(std::move(c), nrows);
  }
}

BigVec to_big(const SparseCol& c) {
  BigVec b;
  b.reserve(c.size());
  for (auto& e : c) b.emplace_back(e.first, Int(e.second));
  return b;
}

BigVec lin_comb(const Int& a, const BigVec& x, const Int& b, const BigVec& y) {
  return combine<Int>(a, x, Int(-b), y);
}

void make_primitive(BigVec& v) { primitive<Int>(v); }

BigVec QSubspace::reduce(BigVec v) const {
  while (!v.empty()) {
    auto it = basis_.find(v.back().first);
    if (it == basis_.end()) break;
    const BigVec& w = it->second;
    Int a = w.back().second, b = v.back().second;
    Int g = gcd_of<Int>(a, b);
    a /= g;
    b /= g;
    v = combine<Int>(a, v, b, w);
    primitive<Int>(v);
  }
  return v;
}

bool QSubspace::insert(BigVec v) {
  v = reduce(std::move(v));
  if (v.empty()) return false;
  primitive<Int>(v);
  uint32_t p = v.back().first;
  basis_.emplace(p, std::move(v));
  return true;
}

size_t QSubspace::count_pivots_below(uint32_t bound) const {
  return static_cast<size_t>(std::distance(basis_.begin(), basis_.lower_bound(bound)));
}

size_t exact_rank(const std::vector<SparseCol>& cols) {
  QSubspace S;
  for (auto& c : cols) S.insert(to_big(c));
  return S.dim();
}

size_t exact_rank_big(const std::vector<BigVec>& cols) {
  QSubspace S;
  for (auto& c : cols) S.insert(c);
  return S.dim();
}

std::vector<BigVec> kernel_basis(const std::vector<BigVec>& cols) {
  // reduce columns keeping track of the combination that produced them
  std::map<uint32_t, std::pair<BigVec, BigVec>> piv;
  std::vector<BigVec> ker;
  for (uint32_t j = 0; j < cols.size(); ++j) {
    BigVec v = cols[j];
    BigVec t{{j, Int(1)}};
    while (!v.empty()) {
      auto it = piv.find(v.back().first);
      if (it == piv.end()) break;
      const auto& [w, tw] = it->second;
      Int a = w.back().second, b = v.back().second;
      Int g = gcd_of<Int>(a, b);
      a /= g;
      b /= g;
      v = combine<Int>(a, v, b, w);
      t = combine<Int>(a, t, b, tw);
      Int c = 0;
      for (auto& e : v) c = gcd_of<Int>(c, e.second);
      for (auto& e : t) c = gcd_of<Int>(c, e.second);
      if (c > 1) {
        for (auto& e : v) e.second /= c;
        for (auto& e : t) e.second /= c;
      }
    }
    if (v.empty()) {
      primitive<Int>(t);
      ker.push_back(std::move(t));
    } else {
      uint32_t p = v.back().first;
      piv.emplace(p, std::make_pair(std::move(v), std::move(t)));
    }
  }
  return ker;
}

Pairing reduce_filtered(const std::vector<std::vector<SparseCol>>& bd, const std::vector<size_t>& counts) {
  try {
    return reduce_impl<int64_t>(bd, counts);
  } catch (const OverflowError&) {
    return reduce_impl<Int>(bd, counts);
  }
}

}  // namespace latcoh
