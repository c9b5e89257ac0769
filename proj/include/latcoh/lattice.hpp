#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "latcoh/arith.hpp"
#include "latcoh/graph.hpp"

namespace latcoh {

// Element of H = L'/L in invariant-factor coordinates (only factors > 1).
using HClass = std::vector<int64_t>;

std::string class_str(const HClass& h);

class LatticeContext {
 public:
  explicit LatticeContext(const PlumbingGraph& g);

  const PlumbingGraph& graph() const { return g_; }
  size_t rank() const { return n_; }
  const IntMat& M() const { return M_; }
  const std::vector<RatVec>& M_inv() const { return Minv_; }
  const Int& det() const { return det_; }
  const std::vector<Int>& h_factors() const { return factors_; }
  size_t h_order() const;
  const RatVec& ZK() const { return ZK_; }
  size_t valency(size_t i) const { return valency_[i]; }

  RatVec dual(size_t i) const;                      // E_i^* in E-coordinates
  RatVec from_dual_coeffs(const IntVec& a) const;   // sum a_i E_i^*
  Rat pair(const RatVec& x, const RatVec& y) const;
  int64_t pair(const IntVec& x, const IntVec& y) const;
  IntVec pairing_vector(const RatVec& x) const;     // ((x,E_i))_i; throws if x not in L'
  IntVec pairing_vector(const IntVec& x) const;
  bool in_dual_lattice(const RatVec& x) const;
  bool in_lipman_cone(const RatVec& x) const;

  HClass class_of(const RatVec& x) const;
  HClass zero_class() const { return HClass(factors_.size(), 0); }
  RatVec representative(const HClass& h) const;
  std::vector<HClass> all_classes() const;
  HClass class_from_dual_coeffs(const IntVec& a) const { return class_of(from_dual_coeffs(a)); }

  RatVec s_h(const HClass& h) const;
  RatVec k_h(const HClass& h) const;
  IntVec k_pairing(const HClass& h) const;  // ((k_h, E_i))_i

  // chi(l') = -(l', l' - Z_K)/2 on L'
  Rat chi_prime(const RatVec& x) const;

 private:
  PlumbingGraph g_;
  size_t n_;
  IntMat M_;
  std::vector<RatVec> Minv_;
  Int det_;
  RatVec ZK_;
  std::vector<size_t> valency_;
  std::vector<Int> factors_;
  std::vector<size_t> factor_rows_;
  std::vector<std::vector<Int>> U_, Uinv_;
  mutable std::mutex mu_;
  mutable std::map<HClass, RatVec> sh_cache_;
};

// chi_h on integral cycles with machine integers
class Chi {
 public:
  Chi(const LatticeContext& ctx, const HClass& h);
  int64_t operator()(const IntVec& l) const;
  int64_t operator()(const int64_t* l) const;
  // chi(l + E_i) - chi(l) given the pairing vector (l, E_j)_j
  int64_t step(const IntVec& lpair, size_t i) const { return -lpair[i] - half_[i]; }
  const IntMat& M() const { return M_; }
  const IntVec& kpair() const { return kpair_; }

 private:
  IntMat M_;
  IntVec kpair_;
  IntVec half_;  // (e_i + (k_h,E_i))/2
};

}  // namespace latcoh
