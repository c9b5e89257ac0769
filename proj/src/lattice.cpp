#include "latcoh/lattice.hpp"

#include <sstream>

#include "latcoh/linalg.hpp"

namespace latcoh {

std::string class_str(const HClass& h) {
  std::ostringstream o;
  o << '[';
  for (size_t i = 0; i < h.size(); ++i) o << (i ? "," : "") << h[i];
  o << ']';
  return o.str();
}

namespace {

std::vector<RatVec> rational_inverse(const std::vector<std::vector<Rat>>& A0) {
  size_t n = A0.size();
  std::vector<RatVec> A = A0, I(n, RatVec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (A[p][c] == 0) ++p;
    std::swap(A[p], A[c]);
    std::swap(I[p], I[c]);
    Rat inv = 1 / A[c][c];
    for (size_t j = 0; j < n; ++j) {
      A[c][j] *= inv;
      I[c][j] *= inv;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0) continue;
      Rat f = A[r][c];
      for (size_t j = 0; j < n; ++j) {
        A[r][j] -= f * A[c][j];
        I[r][j] -= f * I[c][j];
      }
    }
  }
  return I;
}

int64_t mod_pos(const Int& x, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return to_i64(r);
}

}  // namespace

LatticeContext::LatticeContext(const PlumbingGraph& g) : g_(g), n_(g.size()), M_(intersection_matrix(g)) {
  std::vector<RatVec> Mq(n_, RatVec(n_));
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j) Mq[i][j] = M_[i][j];
  Minv_ = rational_inverse(Mq);
  det_ = determinant(M_);
  ZK_.assign(n_, Rat(0));
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j) ZK_[i] += Minv_[i][j] * Rat(M_[j][j] + 2);
  for (size_t i = 0; i < n_; ++i) valency_.push_back(g.valency(i));

  DenseInt A(n_, std::vector<Int>(n_));
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j) A[i][j] = M_[i][j];
  SmithForm S = smith_form(A);
  U_ = S.U;
  for (size_t i = 0; i < S.diag.size(); ++i)
    if (S.diag[i] != 1) {
      factors_.push_back(S.diag[i]);
      factor_rows_.push_back(i);
    }
  std::vector<RatVec> Uq(n_, RatVec(n_));
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j) Uq[i][j] = Rat(U_[i][j]);
  auto Ui = rational_inverse(Uq);
  Uinv_.assign(n_, std::vector<Int>(n_));
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j) Uinv_[i][j] = Ui[i][j].get_num();
  if (factors_.size() && h_order() <= 512)
    for (auto& h : all_classes()) s_h(h);
}

size_t LatticeContext::h_order() const {
  Int o = 1;
  for (auto& f : factors_) o *= f;
  return static_cast<size_t>(to_i64(o));
}

RatVec LatticeContext::dual(size_t i) const {
  RatVec v(n_);
  for (size_t k = 0; k < n_; ++k) v[k] = -Minv_[k][i];
  return v;
}

RatVec LatticeContext::from_dual_coeffs(const IntVec& a) const {
  RatVec v(n_, Rat(0));
  for (size_t i = 0; i < n_; ++i)
    if (a[i])
      for (size_t k = 0; k < n_; ++k) v[k] -= Rat(a[i]) * Minv_[k][i];
  return v;
}

Rat LatticeContext::pair(const RatVec& x, const RatVec& y) const {
  Rat s = 0;
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j)
      if (M_[i][j]) s += x[i] * Rat(M_[i][j]) * y[j];
  return s;
}

int64_t LatticeContext::pair(const IntVec& x, const IntVec& y) const {
  int64_t s = 0;
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j)
      if (M_[i][j]) s = add_ck(s, mul_ck(mul_ck(x[i], M_[i][j]), y[j]));
  return s;
}

bool LatticeContext::in_dual_lattice(const RatVec& x) const {
  for (size_t i = 0; i < n_; ++i) {
    Rat p = 0;
    for (size_t j = 0; j < n_; ++j) p += Rat(M_[i][j]) * x[j];
    if (!is_integral(p)) return false;
  }
  return true;
}

IntVec LatticeContext::pairing_vector(const RatVec& x) const {
  IntVec out(n_);
  for (size_t i = 0; i < n_; ++i) {
    Rat p = 0;
    for (size_t j = 0; j < n_; ++j) p += Rat(M_[i][j]) * x[j];
    if (!is_integral(p)) throw std::invalid_argument("cycle is not in the dual lattice");
    out[i] = to_i64(p.get_num());
  }
  return out;
}

IntVec LatticeContext::pairing_vector(const IntVec& x) const {
  IntVec out(n_, 0);
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j) out[i] += M_[i][j] * x[j];
  return out;
}

bool LatticeContext::in_lipman_cone(const RatVec& x) const {
  for (auto p : pairing_vector(x))
    if (p > 0) return false;
  return true;
}

HClass LatticeContext::class_of(const RatVec& x) const {
  IntVec p = pairing_vector(x);
  HClass h;
  for (size_t k = 0; k < factor_rows_.size(); ++k) {
    Int c = 0;
    for (size_t j = 0; j < n_; ++j) c += U_[factor_rows_[k]][j] * Int(p[j]);
    h.push_back(mod_pos(c, factors_[k]));
  }
  return h;
}

RatVec LatticeContext::representative(const HClass& h) const {
  std::vector<Int> c(n_, 0);
  for (size_t k = 0; k < factor_rows_.size(); ++k) c[factor_rows_[k]] = h[k];
  RatVec x(n_, Rat(0));
  for (size_t i = 0; i < n_; ++i) {
    Int p = 0;
    for (size_t j = 0; j < n_; ++j) p += Uinv_[i][j] * c[j];
    for (size_t k = 0; k < n_; ++k) x[k] += Minv_[k][i] * Rat(p);
  }
  return x;
}

std::vector<HClass> LatticeContext::all_classes() const {
  std::vector<HClass> out;
  HClass h(factors_.size(), 0);
  for (;;) {
    out.push_back(h);
    size_t k = 0;
    while (k < h.size()) {
      if (++h[k] < to_i64(factors_[k])) break;
      h[k] = 0;
      ++k;
    }
    if (k == h.size()) break;
  }
  return out;
}

RatVec LatticeContext::s_h(const HClass& h) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sh_cache_.find(h);
    if (it != sh_cache_.end()) return it->second;
  }
  RatVec x = representative(h);
  for (auto& c : x) c -= Rat(floor_of(c));
  IntVec p = pairing_vector(x);
  for (;;) {
    size_t i = 0;
    while (i < n_ && p[i] <= 0) ++i;
    if (i == n_) break;
    x[i] += 1;
    for (size_t j = 0; j < n_; ++j) p[j] += M_[j][i];
  }
  std::lock_guard<std::mutex> lock(mu_);
  sh_cache_.emplace(h, x);
  return x;
}

RatVec LatticeContext::k_h(const HClass& h) const {
  RatVec s = s_h(h), k(n_);
  for (size_t i = 0; i < n_; ++i) k[i] = -ZK_[i] + 2 * s[i];
  return k;
}

IntVec LatticeContext::k_pairing(const HClass& h) const { return pairing_vector(k_h(h)); }

Rat LatticeContext::chi_prime(const RatVec& x) const {
  RatVec y(n_);
  for (size_t i = 0; i < n_; ++i) y[i] = x[i] - ZK_[i];
  return -pair(x, y) / 2;
}

Chi::Chi(const LatticeContext& ctx, const HClass& h) : M_(ctx.M()), kpair_(ctx.k_pairing(h)) {
  for (size_t i = 0; i < M_.size(); ++i) {
    int64_t t = M_[i][i] + kpair_[i];
    if (t % 2 != 0) throw std::logic_error("k_h is not characteristic");
    half_.push_back(t / 2);
  }
}

int64_t Chi::operator()(const int64_t* l) const {
  size_t n = M_.size();
  int64_t q = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!l[i]) continue;
    int64_t r = kpair_[i];
    for (size_t j = 0; j < n; ++j)
      if (M_[i][j]) r = add_ck(r, mul_ck(M_[i][j], l[j]));
    q = add_ck(q, mul_ck(l[i], r));
  }
  return -q / 2;
}

int64_t Chi::operator()(const IntVec& l) const { return (*this)(l.data()); }

}  // namespace latcoh
