#include "latcoh/reduction.hpp"

#include <iomanip>
#include <numeric>
#include <sstream>

namespace latcoh {

namespace {

int64_t chi_of_cycle(const IntMat& M, const IntVec& z) {
  int64_t zz = 0, zk = 0;
  for (size_t i = 0; i < z.size(); ++i) {
    for (size_t j = 0; j < z.size(); ++j) zz += z[i] * M[i][j] * z[j];
    zk += z[i] * (M[i][i] + 2);
  }
  return -(zz - zk) / 2;
}

}  // namespace

RationalityCertificate is_rational(const PlumbingGraph& g) {
  IntMat M = intersection_matrix(g);
  size_t r = M.size();
  RationalityCertificate c;
  c.zmin.assign(r, 1);
  IntVec p(r, 0);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) p[i] += M[i][j];
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < r; ++i)
      if (p[i] > 0) {
        c.zmin[i] += 1;
        for (size_t j = 0; j < r; ++j) p[j] += M[j][i];
        c.steps.push_back(i);
        changed = true;
        break;
      }
  }
  c.chi = chi_of_cycle(M, c.zmin);
  c.rational = c.chi == 1;
  return c;
}

SrVerdict check_sr_set(const PlumbingGraph& g, const std::vector<size_t>& bad, int delta_max) {
  for (auto i : bad)
    if (i >= g.size()) throw std::invalid_argument("bad vertex index out of range");
  for (int d = 1; d <= delta_max; ++d) {
    PlumbingGraph t = g;
    for (auto i : bad) t.vertices[i].euler -= d;
    if (is_rational(t).rational) return {true, d};
  }
  return {false, 0};
}

ReducedContext::ReducedContext(const LatticeContext& ctx, HClass h, std::vector<size_t> bad)
    : ctx_(ctx), h_(std::move(h)), bad_(std::move(bad)), chi_(ctx, h_) {
  is_bad_.assign(ctx.rank(), false);
  for (auto i : bad_) {
    if (i >= ctx.rank()) throw std::invalid_argument("bad vertex index out of range");
    if (is_bad_[i]) throw std::invalid_argument("repeated bad vertex");
    is_bad_[i] = true;
  }
  if (bad_.empty()) throw std::invalid_argument("bad vertex set must be nonempty");
  sp_ = ctx.pairing_vector(ctx.s_h(h_));
}

IntVec ReducedContext::ascend(IntVec x, IntVec px) const {
  const IntMat& M = ctx_.M();
  size_t r = x.size();
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < r; ++i) {
      if (is_bad_[i]) continue;
      while (px[i] + sp_[i] > 0) {
        x[i] += 1;
        for (size_t j = 0; j < r; ++j) px[j] += M[j][i];
        changed = true;
      }
    }
  }
  return x;
}

IntVec ReducedContext::universal_cycle(const IntVec& lbar) const {
  if (lbar.size() != bad_.size()) throw std::invalid_argument("reduced point has wrong rank");
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(lbar);
    if (it != cache_.end()) return it->second;
  }
  size_t r = ctx_.rank();
  IntVec x(r, 0);
  // warm start from a cached smaller neighbour
  {
    std::lock_guard<std::mutex> lk(mu_);
    for (size_t k = 0; k < bad_.size(); ++k) {
      if (lbar[k] == 0) continue;
      IntVec prev = lbar;
      prev[k] -= 1;
      auto it = cache_.find(prev);
      if (it != cache_.end()) {
        x = it->second;
        x[bad_[k]] += 1;
        break;
      }
    }
  }
  for (size_t k = 0; k < bad_.size(); ++k) {
    if (lbar[k] < 0) throw std::invalid_argument("reduced point must be nonnegative");
    x[bad_[k]] = lbar[k];
  }
  IntVec px(r, 0);
  const IntMat& M = ctx_.M();
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) px[i] += M[i][j] * x[j];
  x = ascend(std::move(x), std::move(px));
  std::lock_guard<std::mutex> lk(mu_);
  cache_.emplace(lbar, x);
  return x;
}

int64_t ReducedContext::wbar(const IntVec& lbar) const { return chi_(universal_cycle(lbar)); }

IntVec ReducedContext::default_rect() const {
  IntVec full = default_rectangle(ctx_);
  IntVec out;
  for (auto i : bad_) out.push_back(full[i]);
  return out;
}

SublevelModel reduced_model(std::shared_ptr<const ReducedContext> rc, const IntVec& rect, size_t budget) {
  return SublevelModel(std::make_shared<ReducedWeight>(std::move(rc)), rect, budget);
}

Filtration reduced_filtration(const ReducedContext& rc, const IntVec& s) {
  Filtration full = build_filtration(s);
  if (s.size() != rc.lattice().rank()) throw std::invalid_argument("semigroup element has wrong rank");
  std::vector<bool> in(s.size(), false);
  for (auto i : rc.bad()) in[i] = true;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] != 0 && !in[i])
      throw std::invalid_argument("the E^*-support of s must lie inside the bad vertex set (vertex id " +
                                  std::to_string(rc.lattice().graph().vertices[i].id) +
                                  " is outside); use the full-rank model instead");
  Filtration f;
  for (auto i : rc.bad()) f.coeff.push_back(s[i]);
  f.e = full.e;
  return f;
}

std::shared_ptr<SpectralSequence> reduced_spectral_sequence(std::shared_ptr<const ReducedContext> rc, const IntVec& s,
                                                            size_t budget) {
  Filtration f = reduced_filtration(*rc, s);
  auto w = std::make_shared<ReducedWeight>(rc);
  const ReducedContext* c = rc.get();
  auto region = [c, keep = rc](int64_t n) { return level_box(c->lattice(), c->h(), n, c->bad()); };
  return std::make_shared<SpectralSequence>(w, f, region, budget);
}

std::string wbar_grid(const ReducedContext& rc, const IntVec& rect) {
  std::ostringstream os;
  if (rc.rank() == 1) {
    for (int64_t i = 0; i <= rect[0]; ++i) os << (i ? " " : "") << std::setw(3) << rc.wbar({i});
    os << "\n";
  } else if (rc.rank() == 2) {
    for (int64_t j = rect[1]; j >= 0; --j) {
      for (int64_t i = 0; i <= rect[0]; ++i) os << (i ? " " : "") << std::setw(3) << rc.wbar({i, j});
      os << "\n";
    }
  } else {
    throw std::invalid_argument("text grids are available for reduced rank 1 and 2 only");
  }
  return os.str();
}

}  // namespace latcoh
