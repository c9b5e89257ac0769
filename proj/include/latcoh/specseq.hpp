#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include "latcoh/complex.hpp"

namespace latcoh {

// Degree d(l) = -(s, l) = sum_i coeff_i l_i over the model coordinates.
struct Filtration {
  IntVec coeff;
  int64_t e = 1;
  int64_t degree(const IntVec& l) const;
  int64_t degree(const Box& box, uint64_t point) const;
  std::vector<size_t> support() const;
};

// s given by E^*-coefficients on the full lattice
Filtration build_filtration(const IntVec& s);

using Bidegree = std::pair<int64_t, int64_t>;  // (d, q) with homological degree b = -d + q

struct SpectralRow {
  int64_t n = 0;
  std::vector<std::map<Bidegree, int64_t>> pages;  // pages[k-1] = E^k, last one equals E^inf
  std::map<Bidegree, int64_t> limit;
  std::map<std::tuple<int, int64_t, int64_t>, int64_t> differentials;  // (k, d, q) of the source
  std::map<Bidegree, std::vector<Int>> e1_torsion;
  int degeneration = 1;
  std::vector<int64_t> betti;
  // b -> (d, rank F_{-d} H_b), d decreasing
  std::map<int64_t, std::vector<std::pair<int64_t, int64_t>>> abutment;
  int64_t rank(int k, int64_t d, int64_t q) const;  // k <= 0 means the limit page
  const std::map<Bidegree, int64_t>& page(int k) const;
  bool empty() const { return pages.empty() || pages[0].empty(); }
};

struct PageMap {
  // per bidegree of the source: rank and matrix (rows: target basis)
  std::map<Bidegree, int64_t> rank;
  std::map<Bidegree, std::vector<std::vector<Rat>>> matrix;
  bool commutes = true;
};

struct LevelData {
  CubeComplex X;
  Barcode bars;  // filtered by p = -d
};

class SpectralSequence {
 public:
  using RegionFn = std::function<std::optional<IntVec>(int64_t n)>;
  SpectralSequence(std::shared_ptr<const WeightFunction> w, Filtration f, RegionFn region,
                   size_t budget = default_budget());

  const Filtration& filtration() const { return f_; }
  const WeightFunction& weight() const { return *w_; }
  std::optional<IntVec> region(int64_t n) const { return region_(n); }

  LevelData level(int64_t n) const;
  SpectralRow row(int64_t n, bool cross_check = true) const;
  std::map<Bidegree, HomologyGroup> e1_page(int64_t n) const;
  std::map<int64_t, std::vector<std::pair<int64_t, int64_t>>> abutment(int64_t n) const;
  PageMap u_on_pages(int64_t n, int k) const;
  // E^1 pieces as Z[U]-modules from the weight filtration of each graded piece
  // inside S_nmax; towers mark bars still open at nmax
  std::map<Bidegree, ZUModule> e1_modules(int64_t nmax) const;
  // (E^1_{-l,q})_n indexed by the support coordinates of l
  std::map<IntVec, std::map<int64_t, int64_t>> multigraded_e1(int64_t n) const;
  std::vector<SpectralRow> root_split(int64_t n) const;

  int64_t cell_value(const Box& box, const Cell& c) const { return -f_.degree(box, c.point); }

 private:
  SpectralRow row_from(const CubeComplex& X, const Barcode& B, int64_t n, bool cross_check) const;
  std::shared_ptr<const WeightFunction> w_;
  Filtration f_;
  RegionFn region_;
  size_t budget_;
};

std::shared_ptr<SpectralSequence> full_spectral_sequence(const LatticeContext& ctx, const HClass& h, const IntVec& s,
                                                         size_t budget = default_budget());

// global degeneration index over n in [lo, hi]
int global_degeneration(const std::vector<SpectralRow>& rows);

}  // namespace latcoh
