#include "latcoh/series.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace latcoh {

Series::Series(std::vector<std::string> vars) : vars_(std::move(vars)), bound_(vars_.size()) {}

void Series::add(const Exponent& e, const Int& c) {
  if (c == 0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

Int Series::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Int(0) : it->second;
}

bool Series::in_window(const Exponent& e) const {
  for (size_t i = 0; i < bound_.size(); ++i)
    if (bound_[i] && e[i] > *bound_[i]) return false;
  return true;
}

Series Series::truncated(const std::vector<std::optional<Rat>>& win) const {
  Series out(vars_);
  for (size_t i = 0; i < vars_.size(); ++i) {
    out.bound_[i] = bound_[i];
    if (i < win.size() && win[i] && (!out.bound_[i] || *win[i] < *out.bound_[i])) out.bound_[i] = win[i];
  }
  for (auto& [e, c] : terms_)
    if (out.in_window(e)) out.terms_.emplace(e, c);
  return out;
}

bool Series::agrees(const Series& o, std::string* why) const {
  if (vars_ != o.vars_) {
    if (why) *why = "variable signatures differ";
    return false;
  }
  std::set<Exponent> keys;
  for (auto& [e, c] : terms_) keys.insert(e);
  for (auto& [e, c] : o.terms_) keys.insert(e);
  for (auto& e : keys) {
    if (!in_window(e) || !o.in_window(e)) continue;
    Int a = coeff(e), b = o.coeff(e);
    if (a != b) {
      if (why) {
        std::ostringstream os;
        os << "coefficient at (";
        for (size_t i = 0; i < e.size(); ++i) os << (i ? "," : "") << rat_str(e[i]);
        os << "): " << a.get_str() << " vs " << b.get_str();
        *why = os.str();
      }
      return false;
    }
  }
  return true;
}

Series Series::substitute(std::vector<std::string> vars, const std::vector<std::vector<Rat>>& A,
                          std::vector<std::optional<Rat>> bound) const {
  Series out(std::move(vars));
  out.bound_ = std::move(bound);
  out.bound_.resize(out.vars_.size());
  for (auto& [e, c] : terms_) {
    Exponent f(out.vars_.size(), Rat(0));
    for (size_t j = 0; j < f.size(); ++j)
      for (size_t i = 0; i < e.size(); ++i)
        if (A[j][i] != 0) f[j] += A[j][i] * e[i];
    out.add(f, c);
  }
  return out;
}

Series Series::operator-(const Series& o) const {
  Series out = *this;
  for (size_t i = 0; i < bound_.size(); ++i)
    if (o.bound_[i] && (!out.bound_[i] || *o.bound_[i] < *out.bound_[i])) out.bound_[i] = o.bound_[i];
  for (auto& [e, c] : o.terms_) out.add(e, -c);
  return out.truncated(out.bound_);
}

Series Series::times_one_minus(size_t var, const Rat& m) const {
  Series out = *this;
  for (auto& [e, c] : terms_) {
    Exponent f = e;
    f[var] += m;
    out.add(f, -c);
  }
  return out.truncated(bound_);
}

Int Series::value_at_one() const {
  Int s = 0;
  for (auto& [e, c] : terms_) s += c;
  return s;
}

std::string Series::text() const {
  std::ostringstream os;
  os << "window";
  for (size_t i = 0; i < vars_.size(); ++i)
    os << " " << vars_[i] << (bound_[i] ? "<=" + rat_str(*bound_[i]) : ":inf");
  os << "\n";
  for (auto& [e, c] : terms_) {
    std::string mono;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      mono += (mono.empty() ? "" : "*") + vars_[i];
      if (e[i] != 1) mono += "^" + rat_str(e[i]);
    }
    if (mono.empty()) os << c.get_str();
    else if (c == 1) os << mono;
    else if (c == -1) os << "-" << mono;
    else os << c.get_str() << "*" << mono;
    os << "\n";
  }
  return os.str();
}

std::string Series::json() const {
  nlohmann::ordered_json j;
  j["vars"] = vars_;
  nlohmann::ordered_json w = nlohmann::ordered_json::object();
  for (size_t i = 0; i < vars_.size(); ++i) w[vars_[i]] = bound_[i] ? nlohmann::ordered_json(rat_str(*bound_[i])) : nullptr;
  j["window"] = w;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (auto& [e, c] : terms_) {
    std::string k;
    for (size_t i = 0; i < e.size(); ++i) k += (i ? "," : "") + rat_str(e[i]);
    t[k] = c.get_str();
  }
  j["terms"] = t;
  return j.dump();
}

// ---------------------------------------------------------------------------

int64_t lowest_level(const SpectralSequence& S) {
  int64_t n = 0, step = 1;
  while (S.region(n)) {
    n -= step;
    step *= 2;
  }
  for (int64_t guard = 0; guard < 1000000; ++guard, ++n) {
    auto reg = S.region(n);
    if (!reg) continue;
    Box b(*reg);
    if (!b.empty() && !S.weight().scan(b, n).empty()) return n;
  }
  throw std::runtime_error("no nonempty sublevel set found");
}

std::vector<SpectralRow> spectral_rows(const SpectralSequence& S, int64_t nmax, bool cross_check, size_t jobs) {
  int64_t lo = lowest_level(S);
  if (nmax < lo) return {};
  std::vector<SpectralRow> rows(static_cast<size_t>(nmax - lo + 1));
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto work = [&] {
    for (size_t i; (i = next++) < rows.size();) {
      try {
        rows[i] = S.row(lo + static_cast<int64_t>(i), cross_check);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  jobs = std::max<size_t>(1, std::min(jobs, rows.size()));
  std::vector<std::thread> pool;
  for (size_t t = 1; t < jobs; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return rows;
}

Series pe_series(const std::vector<SpectralRow>& rows, int k) {
  Series out({"T", "Q", "h"});
  int64_t top = rows.empty() ? 0 : rows.back().n;
  for (auto& r : rows) {
    top = std::max(top, r.n);
    for (auto& [bd, rk] : r.page(k))
      if (rk) out.add({Rat(bd.first), Rat(r.n), Rat(bd.second - bd.first)}, rk);
  }
  out.set_bound(1, Rat(top));
  return out;
}

Series at_h_minus_one(const Series& pe) {
  size_t m = pe.vars().size() - 1;
  Series out(std::vector<std::string>(pe.vars().begin(), pe.vars().end() - 1));
  for (size_t i = 0; i < m; ++i) out.set_bound(i, pe.bound()[i]);
  for (auto& [e, c] : pe.terms()) {
    Exponent f(e.begin(), e.end() - 1);
    bool odd = mpz_odd_p(floor_of(e[m]).get_mpz_t());
    out.add(f, odd ? Int(-c) : c);
  }
  return out;
}

Series at_t_one(const Series& pe) {
  Series out(std::vector<std::string>(pe.vars().begin() + 1, pe.vars().end()));
  for (size_t i = 1; i < pe.vars().size(); ++i) out.set_bound(i - 1, pe.bound()[i]);
  for (auto& [e, c] : pe.terms()) out.add(Exponent(e.begin() + 1, e.end()), c);
  return out;
}

Series pe1_cube_formula(const SpectralSequence& S, int64_t nmax) {
  Series out({"T", "Q"});
  out.set_bound(1, Rat(nmax));
  LevelData L = S.level(nmax);
  const Box& bx = L.X.box();
  // acc[d][w] = sum of signs of cubes with degree d and weight w
  std::map<int64_t, std::map<int64_t, int64_t>> acc;
  for (size_t q = 0; q < L.X.top_dim(); ++q)
    for (auto& c : L.X.cells(q)) acc[S.filtration().degree(bx, c.point)][c.weight] += (q % 2 ? -1 : 1);
  for (auto& [d, byw] : acc) {
    int64_t run = 0;
    auto it = byw.begin();
    for (int64_t n = byw.begin()->first; n <= nmax; ++n) {
      while (it != byw.end() && it->first <= n) run += (it++)->second;
      if (run) out.add({Rat(d), Rat(n)}, run);
    }
  }
  return out;
}

Series pe1_multigraded(const SpectralSequence& S, int64_t nmax, const std::vector<std::string>& tvars) {
  auto supp = S.filtration().support();
  if (tvars.size() != supp.size()) throw std::invalid_argument("one T variable per support vertex expected");
  std::vector<std::string> vars = tvars;
  vars.push_back("Q");
  vars.push_back("h");
  Series out(vars);
  out.set_bound(supp.size(), Rat(nmax));
  for (int64_t n = lowest_level(S); n <= nmax; ++n) {
    for (auto& [key, byb] : S.multigraded_e1(n))
      for (auto& [b, rk] : byb) {
        Exponent e;
        for (size_t i = 0; i < supp.size(); ++i) e.push_back(Rat(S.filtration().coeff[supp[i]] * key[i]));
        e.push_back(Rat(n));
        e.push_back(Rat(b));
        out.add(e, rk);
      }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> t_vars(const LatticeContext& ctx) {
  std::vector<std::string> v;
  for (auto& x : ctx.graph().vertices) v.push_back("t_" + std::to_string(x.id));
  return v;
}

Int binom(int64_t n, int64_t k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// coefficient of x^a in (1-x)^(kappa-2)
Int zeta_factor(size_t kappa, int64_t a) {
  if (kappa == 0) return Int(a + 1);
  if (kappa == 1) return Int(1);
  int64_t m = static_cast<int64_t>(kappa) - 2;
  if (a > m) return Int(0);
  Int c = binom(m, a);
  return a % 2 ? Int(-c) : c;
}

HClass add_class(const LatticeContext& ctx, const HClass& a, const HClass& b, int64_t k = 1) {
  HClass r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t f = to_i64(ctx.h_factors()[i]);
    r[i] = ((a[i] + k * b[i]) % f + f) % f;
  }
  return r;
}

// Enumerate a >= 0 with Z-coefficient; `prune(x)` true means no extension of x is wanted,
// `visit(a, x, class, coeff)` called for every surviving a with nonzero coefficient.
void enumerate_dual(const LatticeContext& ctx, const std::function<bool(const RatVec&)>& prune,
                    const std::function<void(const IntVec&, const RatVec&, const HClass&, const Int&)>& visit) {
  size_t r = ctx.rank();
  std::vector<RatVec> dual(r);
  std::vector<HClass> cls(r);
  for (size_t j = 0; j < r; ++j) {
    dual[j] = ctx.dual(j);
    cls[j] = ctx.class_of(dual[j]);
  }
  IntVec a(r, 0);
  RatVec x(r, Rat(0));
  std::function<void(size_t, const HClass&, const Int&)> rec = [&](size_t j, const HClass& h, const Int& c) {
    if (j == r) {
      visit(a, x, h, c);
      return;
    }
    RatVec save = x;
    HClass hh = h;
    for (int64_t k = 0;; ++k) {
      if (prune(x)) break;
      if (ctx.valency(j) >= 2 && k > static_cast<int64_t>(ctx.valency(j)) - 2) break;
      Int f = zeta_factor(ctx.valency(j), k);
      if (f != 0) {
        a[j] = k;
        rec(j + 1, hh, c * f);
      }
      for (size_t i = 0; i < r; ++i) x[i] += dual[j][i];
      hh = add_class(ctx, hh, cls[j]);
    }
    a[j] = 0;
    x = save;
  };
  rec(0, ctx.zero_class(), Int(1));
}

}  // namespace

Series z_series(const LatticeContext& ctx, const std::vector<std::optional<Rat>>& bound,
                const std::vector<HClass>& classes) {
  bool any = false;
  for (auto& b : bound) any = any || b.has_value();
  if (!any) throw std::invalid_argument("z_series needs at least one bounded variable");
  Series out(t_vars(ctx));
  for (size_t i = 0; i < bound.size(); ++i) out.set_bound(i, bound[i]);
  std::set<HClass> keep(classes.begin(), classes.end());
  enumerate_dual(
      ctx,
      [&](const RatVec& x) {
        for (size_t i = 0; i < bound.size(); ++i)
          if (bound[i] && x[i] > *bound[i]) return true;
        return false;
      },
      [&](const IntVec&, const RatVec& x, const HClass& h, const Int& c) {
        if (!keep.empty() && !keep.count(h)) return;
        out.add(x, c);
      });
  return out;
}

Series z_h_component(const LatticeContext& ctx, const HClass& h, const std::vector<std::optional<Rat>>& bound) {
  return z_series(ctx, bound, {h});
}

Series z_reduced(const LatticeContext& ctx, size_t vertex, const Rat& bound, const std::vector<HClass>& classes) {
  std::vector<std::optional<Rat>> b(ctx.rank());
  b[vertex] = bound;
  Series z = z_series(ctx, b, classes);
  std::vector<std::vector<Rat>> A(1, std::vector<Rat>(ctx.rank(), Rat(0)));
  A[0][vertex] = 1;
  return z.substitute({t_vars(ctx)[vertex]}, A, {bound});
}

namespace {

// chi_h(l + E_J) for all J, then w(l, I) = max over J subset I
std::vector<int64_t> cube_weights(const Chi& chi, const IntVec& l) {
  size_t r = l.size();
  std::vector<int64_t> w(size_t(1) << r);
  IntVec p = l;
  for (uint32_t J = 0; J < w.size(); ++J) {
    for (size_t i = 0; i < r; ++i) p[i] = l[i] + ((J >> i) & 1);
    w[J] = chi(p);
  }
  for (uint32_t I = 1; I < w.size(); ++I)
    for (size_t i = 0; i < r; ++i)
      if ((I >> i) & 1) w[I] = std::max(w[I], w[I ^ (1u << i)]);
  return w;
}

template <class F>
void for_box(const IntVec& hi, F&& f) {
  Box b(hi);
  if (b.empty()) return;
  for (uint64_t idx = 0; idx < b.volume(); ++idx) f(b.point(idx));
}

}  // namespace

Series z_motivic(const LatticeContext& ctx, const HClass& h, const IntVec& box) {
  auto vars = t_vars(ctx);
  vars.push_back("q");
  Series out(vars);
  RatVec sh = ctx.s_h(h);
  for (size_t i = 0; i < box.size(); ++i) out.set_bound(i, Rat(box[i]) + sh[i]);
  Chi chi(ctx, h);
  for_box(box, [&](const IntVec& l) {
    auto w = cube_weights(chi, l);
    std::map<int64_t, int64_t> poly;
    for (uint32_t I = 0; I < w.size(); ++I) poly[w[I]] += (__builtin_popcount(I) % 2 ? -1 : 1);
    Exponent e(l.size() + 1);
    for (size_t i = 0; i < l.size(); ++i) e[i] = Rat(l[i]) + sh[i];
    int64_t run = 0;
    auto it = poly.begin();
    int64_t top = poly.rbegin()->first;
    for (int64_t n = poly.begin()->first; n <= top; ++n) {
      while (it != poly.end() && it->first <= n) run += (it++)->second;
      if (run) {
        e.back() = Rat(n);
        out.add(e, run);
      }
    }
  });
  return out;
}

Series z_from_weights(const LatticeContext& ctx, const HClass& h, const IntVec& box) {
  Series out(t_vars(ctx));
  RatVec sh = ctx.s_h(h);
  for (size_t i = 0; i < box.size(); ++i) out.set_bound(i, Rat(box[i]) + sh[i]);
  Chi chi(ctx, h);
  for_box(box, [&](const IntVec& l) {
    auto w = cube_weights(chi, l);
    int64_t c = 0;
    for (uint32_t I = 0; I < w.size(); ++I) c += (__builtin_popcount(I) % 2 ? 1 : -1) * w[I];
    Exponent e(l.size());
    for (size_t i = 0; i < l.size(); ++i) e[i] = Rat(l[i]) + sh[i];
    out.add(e, c);
  });
  return out;
}

Series motivic_limit(const Series& zm) {
  size_t m = zm.vars().size() - 1;
  Series out(std::vector<std::string>(zm.vars().begin(), zm.vars().end() - 1));
  for (size_t i = 0; i < m; ++i) out.set_bound(i, zm.bound()[i]);
  for (auto& [e, c] : zm.terms()) out.add(Exponent(e.begin(), e.end() - 1), c);
  return out;
}

Series motivic_to_pe1(const LatticeContext& ctx, const HClass& h, const Series& zm, const IntVec& s, int64_t nmax) {
  RatVec sh = ctx.s_h(h);
  std::vector<std::string> vars;
  std::vector<size_t> supp;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i]) {
      supp.push_back(i);
      vars.push_back("T_" + std::to_string(ctx.graph().vertices[i].id));
    }
  vars.push_back("Q");
  Series out(vars);
  out.set_bound(supp.size(), Rat(nmax));
  for (auto& [e, c] : zm.terms()) {
    if (e.back() > nmax) continue;
    Exponent f;
    for (auto i : supp) f.push_back(Rat(s[i]) * (e[i] - sh[i]));
    f.push_back(e.back());
    out.add(f, c);
  }
  return out;
}

// ---------------------------------------------------------------------------

TailReport tail_constants(const LatticeContext& ctx, const IntVec& s) {
  TailReport T;
  RatVec sv = ctx.from_dual_coeffs(s);
  Int N = 1;
  for (auto& x : sv) {
    Int d = x.get_den();
    mpz_lcm(N.get_mpz_t(), N.get_mpz_t(), d.get_mpz_t());
  }
  T.N = to_i64(N);
  for (auto& x : sv) T.stilde.push_back(to_i64(Int(x * N)));
  int64_t g = 0;
  for (auto c : s) g = std::gcd(g, c);
  T.e = g ? g : 1;
  int64_t ps = 0;
  for (size_t i = 0; i < s.size(); ++i) ps += s[i] * T.stilde[i];
  T.p = ps / T.e;
  return T;
}

TailReport pe_infty_tail(const LatticeContext& ctx, const HClass& h, const IntVec& s,
                         const std::vector<SpectralRow>& rows) {
  TailReport T = tail_constants(ctx, s);
  if (rows.empty()) {
    T.note = "no rows";
    return T;
  }
  int64_t lo = rows.front().n, nmax = rows.back().n;
  T.window = nmax;
  Filtration f = build_filtration(s);
  Chi chi(ctx, h);
  std::vector<size_t> all(ctx.rank());
  std::iota(all.begin(), all.end(), 0);
  auto reg = level_box(ctx, h, nmax, all);
  if (!reg) {
    T.note = "empty window";
    return T;
  }
  // best[d] = (min chi, point of least degree attaining it) over points of degree >= d
  std::map<int64_t, std::pair<int64_t, IntVec>> at;
  for_box(*reg, [&](const IntVec& l) {
    int64_t v = chi(l);
    if (v > nmax) return;
    int64_t d = f.degree(l);
    auto it = at.find(d);
    if (it == at.end() || v < it->second.first) at[d] = {v, l};
  });
  std::map<int64_t, std::pair<int64_t, IntVec>> minD;  // suffix minima
  {
    std::pair<int64_t, IntVec> cur{INT64_MAX, {}};
    int64_t dmax = at.empty() ? 0 : at.rbegin()->first;
    for (int64_t d = dmax; d >= 0; --d) {
      auto it = at.find(d);
      if (it != at.end() && it->second.first <= cur.first) cur = it->second;
      minD[d] = cur;
    }
  }
  auto mind = [&](int64_t D) -> int64_t {
    auto it = minD.find(D);
    return it == minD.end() ? INT64_MAX : it->second.first;
  };
  // PE_inf columns: D -> set of (n, hexp, rank)
  std::map<int64_t, std::set<std::tuple<int64_t, int64_t, int64_t>>> col;
  for (auto& r : rows)
    for (auto& [bd, rk] : r.limit)
      if (rk) col[bd.first].insert({r.n, bd.second - bd.first, rk});
  auto column_ok = [&](int64_t D) {
    std::set<std::tuple<int64_t, int64_t, int64_t>> want;
    if (D % T.e == 0) {
      int64_t a = mind(D), b = mind(D + T.e);
      for (int64_t n = a; n < b && n <= nmax; ++n) want.insert({n, 0, 1});
    }
    auto it = col.find(D);
    return it == col.end() ? want.empty() : it->second == want;
  };
  int64_t Dtop = std::max(col.empty() ? 0 : col.rbegin()->first, minD.empty() ? 0 : minD.rbegin()->first);
  int64_t dstart = Dtop + 1;
  for (int64_t D = Dtop; D >= 0; --D) {
    if (!column_ok(D)) break;
    dstart = D;
  }
  // periodic check on the quadratic families, from the first regime start upwards
  T.certified = false;
  for (int64_t dbar0 = ceil_div(dstart, T.e); !T.certified; ++dbar0) {
    if (T.e * dbar0 > Dtop) break;
    bool ok = true, enough = true;
    T.lq.clear();
    T.chi_lq.clear();
    for (int64_t q = 0; q < T.p && ok; ++q) {
      int64_t k0 = ceil_div(dbar0 - q, T.p);
      int64_t D0 = T.e * (k0 * T.p + q);
      if (mind(D0) > nmax) {
        enough = false;
        break;
      }
      IntVec lq = minD[D0].second;
      int64_t seen = 0;
      for (int64_t m = 0;; ++m) {
        int64_t D = T.e * ((k0 + m) * T.p + q);
        if (mind(D) > nmax) break;
        IntVec x = lq;
        for (size_t i = 0; i < x.size(); ++i) x[i] += m * T.stilde[i];
        if (chi(x) != mind(D)) {
          ok = false;
          break;
        }
        ++seen;
      }
      if (seen < 2) enough = false;
      T.lq.push_back(lq);
      T.chi_lq.push_back(chi(lq));
    }
    if (!enough) {
      T.note = "window insufficient to reach the periodic regime";
      break;
    }
    if (ok) {
      T.certified = true;
      T.d0 = T.e * dbar0;
      T.note.clear();
    }
  }
  // PE_inf(1,Q,h) -> 1/(1-Q) over the last quarter of the window
  int64_t from = nmax - (nmax - lo) / 4;
  T.tail_is_geometric = true;
  for (auto& r : rows) {
    if (r.n < from) continue;
    int64_t tot = 0;
    bool deg0 = true;
    for (auto& [bd, rk] : r.limit) {
      tot += rk;
      if (rk && bd.second != bd.first) deg0 = false;
    }
    if (tot != 1 || !deg0) T.tail_is_geometric = false;
  }
  return T;
}

// ---------------------------------------------------------------------------

SwReport euler_and_sw(const SublevelModel& m) {
  SwReport R;
  int64_t lo = m.min_weight(), hi = m.max_weight();
  int64_t W = hi + (hi - lo + 1) / 3 + 2;
  R.window = W;
  R.eu_homology = m.eu_from_homology();
  R.eu_cubes = m.eu_from_cubes();
  R.pe_inf_t1 = Series({"Q", "h"});
  R.chi_top = Series({"Q"});
  R.cube_sum = Series({"Q"});
  R.pol_sw = Series({"Q"});
  R.pe_inf_t1.set_bound(0, Rat(W));
  R.chi_top.set_bound(0, Rat(W));
  R.cube_sum.set_bound(0, Rat(W));
  R.pol_sw.set_bound(0, Rat(W));
  std::map<int64_t, int64_t> byw;
  const CubeComplex& X = m.complex();
  for (size_t q = 0; q < X.top_dim(); ++q)
    for (auto& c : X.cells(q)) byw[c.weight] += (q % 2 ? -1 : 1);
  int64_t run = 0;
  auto it = byw.begin();
  int64_t cut = W - (W - lo + 1) / 4;
  R.certified = true;
  for (int64_t n = lo; n <= W; ++n) {
    auto b = m.betti(std::min(n, hi));
    int64_t ct = 0;
    for (size_t q = 0; q < b.size(); ++q) {
      if (b[q]) R.pe_inf_t1.add({Rat(n), Rat(static_cast<int64_t>(q))}, static_cast<int64_t>(b[q]));
      ct += (q % 2 ? -1 : 1) * static_cast<int64_t>(b[q]);
    }
    R.chi_top.add({Rat(n)}, ct);
    while (it != byw.end() && it->first <= n) run += (it++)->second;
    R.cube_sum.add({Rat(n)}, run);
    int64_t p = ct - (n >= 0 ? 1 : 0);
    R.pol_sw.add({Rat(n)}, p);
    if (n > cut && p != 0) R.certified = false;
  }
  R.pol_sw_at_one = R.pol_sw.value_at_one();
  for (auto& [k, rk] : m.hat_homology()) R.hat_euler += (k.second % 2 ? -1 : 1) * static_cast<int64_t>(rk);
  return R;
}

// ---------------------------------------------------------------------------

ThetaReport theta_decomposition_check(const LatticeContext& ctx, const IntVec& s, int64_t delta, int64_t nmax,
                                      const std::map<HClass, Series>& lhs) {
  ThetaReport R;
  R.delta = delta;
  R.window = nmax;
  size_t r = ctx.rank();
  const IntMat& M = ctx.M();
  IntVec zkp = ctx.pairing_vector(ctx.ZK());
  // chi(E_J) = -((E_J,E_J) - (E_J,Z_K))/2
  std::vector<int64_t> chiE(size_t(1) << r);
  for (uint32_t J = 0; J < chiE.size(); ++J) {
    int64_t ee = 0, ez = 0;
    for (size_t i = 0; i < r; ++i) {
      if (!((J >> i) & 1)) continue;
      ez += zkp[i];
      for (size_t j = 0; j < r; ++j)
        if ((J >> j) & 1) ee += M[i][j];
    }
    chiE[J] = -(ee - ez) / 2;
  }
  std::vector<size_t> all(r);
  std::iota(all.begin(), all.end(), 0);
  std::set<std::pair<uint32_t, IntVec>> blocks;
  for (auto& h : ctx.all_classes()) {
    RatVec sh = ctx.s_h(h);
    Rat chish = ctx.chi_prime(sh);
    Rat dsh = 0;
    for (size_t i = 0; i < r; ++i) dsh += Rat(s[i]) * sh[i];
    Series rhs({"T", "Q"});
    rhs.set_bound(1, chish + nmax);
    auto reg = level_box(ctx, h, nmax, all);
    // sum over cubes before the 1/(1-Q) factor
    std::map<std::pair<Rat, Rat>, int64_t> raw;
    if (reg) {
      for_box(*reg, [&](const IntVec& l) {
        RatVec lp(r);
        for (size_t i = 0; i < r; ++i) lp[i] = Rat(l[i]) + sh[i];
        IntVec pv = ctx.pairing_vector(lp);
        IntVec a(r);
        bool inS = true;
        for (size_t i = 0; i < r; ++i) {
          a[i] = -pv[i];
          if (a[i] < 0) inS = false;
        }
        Rat chil = ctx.chi_prime(lp);
        auto delta_of = [&](const IntVec& aa, uint32_t J) {
          int64_t d = chiE[J];
          for (size_t i = 0; i < r; ++i)
            if ((J >> i) & 1) d += aa[i];
          return d;
        };
        if (!inS) {
          // the cube sum at a point outside S' vanishes as a polynomial
          std::map<int64_t, int64_t> poly;
          for (uint32_t I = 0; I < chiE.size(); ++I) {
            int64_t best = INT64_MIN;
            for (uint32_t J = I;; J = (J - 1) & I) {
              best = std::max(best, delta_of(a, J));
              if (!J) break;
            }
            poly[best] += (__builtin_popcount(I) % 2 ? -1 : 1);
          }
          for (auto& [w, c] : poly)
            if (c && R.failures.size() < 20) {
              R.identity_holds = false;
              R.failures.push_back("nonzero cube sum outside S' at l'=" + [&] {
                std::string t;
                for (size_t i = 0; i < r; ++i) t += (i ? "," : "") + rat_str(lp[i]);
                return t;
              }());
              break;
            }
          return;
        }
        uint32_t K = 0;
        IntVec ar(r), key;
        for (size_t i = 0; i < r; ++i) {
          if (a[i] >= delta) {
            K |= 1u << i;
            ar[i] = delta;
          } else {
            ar[i] = a[i];
            key.push_back(a[i]);
          }
        }
        blocks.insert({K, key});
        Rat dl = 0;
        for (size_t i = 0; i < r; ++i) dl += Rat(s[i]) * lp[i];
        for (uint32_t I = 0; I < chiE.size(); ++I) {
          int64_t best = INT64_MIN;
          for (uint32_t J = I;; J = (J - 1) & I) {
            best = std::max(best, delta_of(a, J));
            if (!J) break;
          }
          // uniform choice at the root of the block
          uint32_t need = K & I, Jstar = need;
          int64_t rb = INT64_MIN;
          for (uint32_t J = I;; J = (J - 1) & I) {
            if ((J & need) == need) {
              int64_t v = delta_of(ar, J);
              if (v > rb || (v == rb && J < Jstar)) {
                rb = v;
                Jstar = J;
              }
            }
            if (!J) break;
          }
          ++R.cubes;
          int64_t at = delta_of(a, Jstar);
          if (at != best) {
            ++R.nonuniform;
            if (R.failures.size() < 20) R.failures.push_back("maximizer not uniform in block K=" + std::to_string(K));
          }
          raw[{dl, chil + at}] += (__builtin_popcount(I) % 2 ? -1 : 1);
        }
      });
    }
    // multiply by 1/(1-Q) inside the window
    Rat top = chish + nmax;
    for (auto& [e, c] : raw)
      for (Rat q = e.second; q <= top; q += 1) rhs.add({e.first, q}, c);
    auto it = lhs.find(h);
    if (it == lhs.end()) continue;
    Series left = it->second.substitute({"T", "Q"}, {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}, {std::nullopt, chish + nmax});
    Series shifted({"T", "Q"});
    shifted.set_bound(1, chish + Rat(std::min<int64_t>(nmax, to_i64(floor_of(*left.bound()[1] - chish)))));
    for (auto& [e, c] : left.terms()) shifted.add({e[0] + dsh, e[1] + chish}, c);
    std::string why;
    if (!shifted.agrees(rhs, &why)) {
      R.identity_holds = false;
      R.failures.push_back("class " + class_str(h) + ": " + why);
    }
  }
  R.blocks = blocks.size();
  if (R.nonuniform) R.identity_holds = false;
  return R;
}

// ---------------------------------------------------------------------------

Int zeta_sum_not_above(const LatticeContext& ctx, const HClass& h, const IntVec& l) {
  RatVec sh = ctx.s_h(h);
  size_t r = ctx.rank();
  RatVec U(r);
  for (size_t i = 0; i < r; ++i) U[i] = Rat(l[i]) + sh[i];
  Int total = 0;
  enumerate_dual(
      ctx,
      [&](const RatVec& x) {
        for (size_t i = 0; i < r; ++i)
          if (x[i] < U[i]) return false;
        return true;
      },
      [&](const IntVec&, const RatVec& x, const HClass& c, const Int& z) {
        if (c != h) return;
        for (size_t i = 0; i < r; ++i)
          if (x[i] < U[i]) {
            total += z;
            return;
          }
      });
  return total;
}

std::vector<IntVec> euh_samples(const LatticeContext& ctx, const HClass& h, size_t count) {
  size_t r = ctx.rank();
  RatVec sh = ctx.s_h(h);
  RatVec diff(r);
  for (size_t i = 0; i < r; ++i) diff[i] = sh[i] - ctx.ZK()[i];
  HClass hp = ctx.class_of(diff);
  RatVec base = ctx.s_h(hp);
  int64_t ord = static_cast<int64_t>(ctx.h_order());
  std::vector<IntVec> out;
  for (size_t k = 0; k < count; ++k) {
    RatVec y = base;
    if (k > 0) {
      size_t j = (k - 1) % r;
      int64_t m = static_cast<int64_t>((k - 1) / r + 1);
      RatVec d = ctx.dual(j);
      for (size_t i = 0; i < r; ++i) y[i] += Rat(m * ord) * d[i];
    }
    IntVec l(r);
    for (size_t i = 0; i < r; ++i) {
      Rat v = y[i] - sh[i] + ctx.ZK()[i];
      if (!is_integral(v)) throw std::logic_error("sample point is not integral");
      l[i] = to_i64(v.get_num());
    }
    out.push_back(l);
  }
  return out;
}

// ---------------------------------------------------------------------------

ArReport ar_series(const ReducedContext& rc, int64_t lwindow, int64_t nmax) {
  if (rc.bad().size() != 1) throw std::invalid_argument("AR series need exactly one bad vertex");
  ArReport R;
  const LatticeContext& ctx = rc.lattice();
  size_t v0 = rc.bad()[0];
  for (int64_t l = 0; l <= lwindow + 1; ++l) R.wbar.push_back(rc.wbar({l}));

  R.pe1_formula = Series({"T", "Q"});
  R.pe1_formula.set_bound(0, Rat(lwindow));
  R.pe1_formula.set_bound(1, Rat(nmax));
  for (int64_t l = 0; l <= lwindow; ++l)
    for (int64_t n = R.wbar[l]; n < R.wbar[l + 1] && n <= nmax; ++n) R.pe1_formula.add({Rat(l), Rat(n)}, 1);

  R.z00 = z_reduced(ctx, v0, Rat(lwindow), {ctx.zero_class()});
  std::string var = R.z00.vars()[0];
  R.z_minus = Series({var});
  R.z_minus.set_bound(0, Rat(lwindow));
  for (int64_t l = 0; l <= lwindow; ++l) R.z_minus.add({Rat(l)}, R.wbar[l + 1] - R.wbar[l]);
  R.z_plus = R.z00 - R.z_minus;
  R.z_plus_at_one = R.z_plus.value_at_one();
  R.z_plus_certified = true;
  for (auto& [e, c] : R.z_plus.terms())
    if (e[0] > Rat(3 * lwindow, 4)) R.z_plus_certified = false;
  R.tau_lemma_holds = true;
  for (int64_t l = 0; l <= lwindow; ++l)
    if (R.z00.coeff({Rat(l)}) != std::max<int64_t>(0, R.wbar[l + 1] - R.wbar[l])) R.tau_lemma_holds = false;

  R.rational = is_rational(ctx.graph()).rational;
  RatVec d0 = ctx.dual(v0);
  R.m_phi = -ctx.pair(d0, d0);
  HClass c0 = ctx.class_of(d0), cur = ctx.zero_class();
  do {
    R.pc_classes.push_back(cur);
    cur = add_class(ctx, cur, c0);
  } while (cur != ctx.zero_class());
  R.zrel = z_reduced(ctx, v0, Rat(lwindow), R.pc_classes);
  if (R.rational) {
    R.pc = R.zrel.times_one_minus(0, R.m_phi);
    R.pc_zero_one = true;
    std::set<Rat> S;
    for (auto& [e, c] : R.pc.terms()) {
      if (c != 1) R.pc_zero_one = false;
      S.insert(e[0]);
    }
    R.pc_semigroup = S.count(Rat(0)) > 0;
    for (auto& a : S)
      for (auto& b : S)
        if (a + b <= Rat(lwindow) && !S.count(a + b)) R.pc_semigroup = false;
    int64_t acc = 0;
    for (int64_t l = 0; l <= lwindow + 1; ++l) {
      R.wbar_recovered.push_back(acc);
      acc += to_i64(R.z00.coeff({Rat(l)}));
    }
  }
  return R;
}

}  // namespace latcoh
