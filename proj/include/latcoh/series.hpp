#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latcoh/complex.hpp"
#include "latcoh/reduction.hpp"
#include "latcoh/specseq.hpp"

namespace latcoh {

using Exponent = std::vector<Rat>;

// Truncated multivariable series with exact rational exponents.
// bound[i] is the inclusive upper bound of variable i inside which the
// coefficients are known to be complete; nullopt means unbounded.
class Series {
 public:
  Series() = default;
  explicit Series(std::vector<std::string> vars);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<Exponent, Int>& terms() const { return terms_; }
  const std::vector<std::optional<Rat>>& bound() const { return bound_; }
  void set_bound(size_t var, std::optional<Rat> b) { bound_[var] = std::move(b); }

  void add(const Exponent& e, const Int& c);
  Int coeff(const Exponent& e) const;
  bool empty() const { return terms_.empty(); }
  bool in_window(const Exponent& e) const;

  // drop terms outside the window and tighten bounds
  Series truncated(const std::vector<std::optional<Rat>>& win) const;
  // equality of coefficients inside the intersection of both windows
  bool agrees(const Series& o, std::string* why = nullptr) const;
  // map exponents through a linear substitution: new_e[j] = sum_i A[j][i] e[i]
  Series substitute(std::vector<std::string> vars, const std::vector<std::vector<Rat>>& A,
                    std::vector<std::optional<Rat>> bound) const;
  Series operator-(const Series& o) const;
  // multiply by (1 - x_var^m)
  Series times_one_minus(size_t var, const Rat& m) const;
  Int value_at_one() const;  // sum of coefficients

  std::string text() const;
  std::string json() const;

 private:
  std::vector<std::string> vars_;
  std::map<Exponent, Int> terms_;
  std::vector<std::optional<Rat>> bound_;
};

// lowest level n with S_n nonempty
int64_t lowest_level(const SpectralSequence& S);

// rows for n in [lowest_level, nmax]
std::vector<SpectralRow> spectral_rows(const SpectralSequence& S, int64_t nmax, bool cross_check = true,
                                       size_t jobs = 1);

// sum rank(E^k_{-d,q})_n T^d Q^n h^{-d+q}; k <= 0 means E^inf. Vars (T, Q, h).
Series pe_series(const std::vector<SpectralRow>& rows, int k);
// h -> -1; vars (T, Q)
Series at_h_minus_one(const Series& pe);
// set T -> 1 in a (T,Q,...) series
Series at_t_one(const Series& pe);

// (1/(1-Q)) sum over cubes (-1)^|I| T^d(l) Q^w(l,I), window Q <= nmax. Vars (T, Q).
Series pe1_cube_formula(const SpectralSequence& S, int64_t nmax);
// multigraded PE_1 from the multigraded E^1; vars (T_<i> for the support, Q, h)
Series pe1_multigraded(const SpectralSequence& S, int64_t nmax, const std::vector<std::string>& tvars);

// Taylor expansion of prod (1 - t^{E_i^*})^{kappa_i - 2}; vars t_<id>.
// Only l' with l'_i <= bound_i (where given) and class in `classes` (all if empty).
Series z_series(const LatticeContext& ctx, const std::vector<std::optional<Rat>>& bound,
                const std::vector<HClass>& classes = {});
Series z_h_component(const LatticeContext& ctx, const HClass& h, const std::vector<std::optional<Rat>>& bound);
// Z reduced to the variable of one vertex (others set to 1), restricted to the given classes
Series z_reduced(const LatticeContext& ctx, size_t vertex, const Rat& bound, const std::vector<HClass>& classes);

// (1/(1-q)) sum_l sum_I (-1)^|I| q^{w_h(l,I)} t^{l+s_h} over 0 <= l <= box; vars (t_<id>..., q).
// Each t-monomial has a finite q-polynomial, so only t is windowed.
Series z_motivic(const LatticeContext& ctx, const HClass& h, const IntVec& box);
// sum_l (sum_I (-1)^{|I|+1} w_h(l,I)) t^{l+s_h}
Series z_from_weights(const LatticeContext& ctx, const HClass& h, const IntVec& box);
// q -> 1 limit, termwise
Series motivic_limit(const Series& zm);
// Z^m_h t^{-s_h} with t_i -> T_i^{n_i} on Supp(s), t_i -> 1 elsewhere, q -> Q; truncated to Q <= nmax
Series motivic_to_pe1(const LatticeContext& ctx, const HClass& h, const Series& zm, const IntVec& s, int64_t nmax);

struct TailReport {
  int64_t N = 0, e = 1, p = 0;
  IntVec stilde;  // N s in E-coordinates
  bool certified = false;
  int64_t d0 = -1;                 // first certified start of the periodic regime
  std::vector<IntVec> lq;          // minimizers
  std::vector<int64_t> chi_lq;
  bool tail_is_geometric = false;  // PE_inf(1,Q,h) is 1/(1-Q) near the window end
  int64_t window = 0;
  std::string note;
};
// N, s~, e, p only
TailReport tail_constants(const LatticeContext& ctx, const IntVec& s);
TailReport pe_infty_tail(const LatticeContext& ctx, const HClass& h, const IntVec& s,
                         const std::vector<SpectralRow>& rows);

struct SwReport {
  int64_t eu_homology = 0, eu_cubes = 0;
  Series pe_inf_t1;     // (Q, h): sum_n sum_b rank H_b(S_n) h^b Q^n
  Series chi_top;       // (Q): sum chi_top(S_n) Q^n
  Series cube_sum;      // (Q): (1/(1-Q)) sum (-1)^q Q^w
  Series pol_sw;        // chi_top - 1/(1-Q)
  Int pol_sw_at_one = 0;
  bool certified = false;
  int64_t hat_euler = 0;
  int64_t window = 0;
};
SwReport euler_and_sw(const SublevelModel& m);

struct ThetaReport {
  int64_t delta = 0;
  size_t blocks = 0, cubes = 0, nonuniform = 0;
  bool identity_holds = true;
  std::vector<std::string> failures;
  int64_t window = 0;
};
// lhs[h] = PE_{h,1}(T,Q,-1) with Q-window nmax (from the spectral sequence)
ThetaReport theta_decomposition_check(const LatticeContext& ctx, const IntVec& s, int64_t delta, int64_t nmax,
                                      const std::map<HClass, Series>& lhs);

// sum_{x in L, x not >= l} zeta(x + s_h)
Int zeta_sum_not_above(const LatticeContext& ctx, const HClass& h, const IntVec& l);
// sample points l with l + s_h in Z_K + S'
std::vector<IntVec> euh_samples(const LatticeContext& ctx, const HClass& h, size_t count);

struct ArReport {
  std::vector<int64_t> wbar;  // 0 .. window+1
  Series pe1_formula;         // (T, Q)
  Series z00;                 // class-0 part reduced to t_0
  Series z_minus, z_plus;
  Int z_plus_at_one = 0;
  bool z_plus_certified = false;
  bool tau_lemma_holds = false;
  bool rational = false;
  Rat m_phi;
  std::vector<HClass> pc_classes;  // classes generated by [E_0^*]
  Series zrel;                     // Z reduced over pc_classes
  Series pc;                       // zrel (1 - t^{m_phi}) when rational
  bool pc_zero_one = false, pc_semigroup = false;
  std::vector<int64_t> wbar_recovered;  // rational case, from z00
};
// bad vertex set must be a single vertex; window bounds l-bar and Q
ArReport ar_series(const ReducedContext& rc, int64_t lwindow, int64_t nmax);

}  // namespace latcoh
