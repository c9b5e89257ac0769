#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "latcoh/complex.hpp"
#include "latcoh/specseq.hpp"

namespace latcoh {

struct RationalityCertificate {
  IntVec zmin;                   // fundamental cycle
  std::vector<size_t> steps;     // vertices added during the ascent, in order
  int64_t chi = 0;
  bool rational = false;
};
RationalityCertificate is_rational(const PlumbingGraph& g);

struct SrVerdict {
  bool confirmed = false;  // false means inconclusive, never "not SR"
  int delta = 0;           // first decrement that gave a rational graph
};
SrVerdict check_sr_set(const PlumbingGraph& g, const std::vector<size_t>& bad, int delta_max = 10);

// Universal cycles and reduced weights for a bad vertex set.
class ReducedContext {
 public:
  ReducedContext(const LatticeContext& ctx, HClass h, std::vector<size_t> bad);
  const LatticeContext& lattice() const { return ctx_; }
  const HClass& h() const { return h_; }
  const std::vector<size_t>& bad() const { return bad_; }
  size_t rank() const { return bad_.size(); }

  // minimal x in L with x_i = lbar_i on bad vertices and (x + s_h, E_j) <= 0 elsewhere
  IntVec universal_cycle(const IntVec& lbar) const;
  int64_t wbar(const IntVec& lbar) const;
  // default reduced rectangle: max(floor(Z_K), 0) on the bad coordinates
  IntVec default_rect() const;

 private:
  IntVec ascend(IntVec x, IntVec px) const;
  const LatticeContext& ctx_;
  HClass h_;
  std::vector<size_t> bad_;
  std::vector<bool> is_bad_;
  IntVec sp_;  // (s_h, E_j)
  Chi chi_;
  mutable std::mutex mu_;
  mutable std::map<IntVec, IntVec> cache_;
};

class ReducedWeight : public WeightFunction {
 public:
  explicit ReducedWeight(std::shared_ptr<const ReducedContext> rc) : rc_(std::move(rc)) {}
  size_t rank() const override { return rc_->rank(); }
  int64_t operator()(const IntVec& l) const override { return rc_->wbar(l); }
  const ReducedContext& context() const { return *rc_; }

 private:
  std::shared_ptr<const ReducedContext> rc_;
};

SublevelModel reduced_model(std::shared_ptr<const ReducedContext> rc, const IntVec& rect,
                            size_t budget = default_budget());

// Filtration on the reduced lattice; throws std::invalid_argument unless Supp(s) is inside the bad set.
Filtration reduced_filtration(const ReducedContext& rc, const IntVec& s);

std::shared_ptr<SpectralSequence> reduced_spectral_sequence(std::shared_ptr<const ReducedContext> rc, const IntVec& s,
                                                            size_t budget = default_budget());

// w-bar on the box 0..rect as a text grid (rank 1: one row, rank 2: rows from the top j down)
std::string wbar_grid(const ReducedContext& rc, const IntVec& rect);

}  // namespace latcoh
