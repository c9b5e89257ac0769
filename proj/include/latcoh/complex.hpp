#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "latcoh/arith.hpp"
#include "latcoh/lattice.hpp"
#include "latcoh/linalg.hpp"

namespace latcoh {

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// default cube-slot budget, overridden by LATCOH_BUDGET
size_t default_budget();

// Lattice points 0 <= l <= hi.
class Box {
 public:
  Box() = default;
  explicit Box(IntVec hi);
  size_t rank() const { return hi_.size(); }
  const IntVec& hi() const { return hi_; }
  uint64_t volume() const { return volume_; }
  uint64_t stride(size_t i) const { return stride_[i]; }
  uint64_t index(const int64_t* p) const;
  uint64_t index(const IntVec& p) const { return index(p.data()); }
  IntVec point(uint64_t idx) const;
  int64_t coord(uint64_t idx, size_t i) const { return static_cast<int64_t>((idx / stride_[i]) % (hi_[i] + 1)); }
  bool empty() const { return empty_; }
  // number of cubes of all dimensions
  long double cube_slots() const;

 private:
  IntVec hi_;
  std::vector<uint64_t> stride_;
  uint64_t volume_ = 0;
  bool empty_ = true;
};

class WeightFunction {
 public:
  virtual ~WeightFunction() = default;
  virtual size_t rank() const = 0;
  virtual int64_t operator()(const IntVec& l) const = 0;
  // all points of the box with weight <= cap, sorted by index
  virtual std::vector<std::pair<uint64_t, int64_t>> scan(const Box& box, int64_t cap) const;
};

class ChiWeight : public WeightFunction {
 public:
  ChiWeight(const LatticeContext& ctx, const HClass& h) : chi_(ctx, h) {}
  size_t rank() const override { return chi_.M().size(); }
  int64_t operator()(const IntVec& l) const override { return chi_(l); }
  std::vector<std::pair<uint64_t, int64_t>> scan(const Box& box, int64_t cap) const override;
  const Chi& chi() const { return chi_; }

 private:
  Chi chi_;
};

// A q-cube (l, I): base point index in the box and direction mask.
struct Cell {
  uint64_t point;
  uint32_t mask;
  int64_t weight;
};

// A finite set of cubes closed enough to form a (relative) chain complex:
// faces not in the set are dropped from boundaries.
class CubeComplex {
 public:
  CubeComplex() = default;
  explicit CubeComplex(Box box) : box_(std::move(box)) {}
  const Box& box() const { return box_; }
  size_t top_dim() const { return cells_.size(); }
  const std::vector<Cell>& cells(size_t q) const;
  size_t count(size_t q) const { return q < cells_.size() ? cells_[q].size() : 0; }
  void add(const Cell& c);
  void finalize();  // sort and index
  int64_t find(uint64_t point, uint32_t mask) const;
  // faces of cell i of dimension q present in the set, with signs
  SparseCol boundary(size_t q, size_t i) const;
  CubeComplex filter(const std::function<bool(size_t q, const Cell&)>& keep) const;
  IntVec base(const Cell& c) const { return box_.point(c.point); }
  size_t total() const;

 private:
  uint64_t key(uint64_t point, uint32_t mask) const { return (point << box_.rank()) | mask; }
  Box box_;
  std::vector<std::vector<Cell>> cells_;
  std::unordered_map<uint64_t, uint32_t> index_;
};

// all cubes of the box whose vertices have weight <= cap
CubeComplex sublevel_complex(const Box& box, const WeightFunction& w, int64_t cap);

struct HomologyGroup {
  size_t rank = 0;
  std::vector<Int> torsion;
};
std::vector<HomologyGroup> integral_homology(const CubeComplex& X);

// Persistence of a filtration given by a value per cell (faces must not exceed cofaces).
struct Barcode {
  std::vector<std::vector<std::pair<int64_t, int64_t>>> finite;  // finite[q]: (value of q-cell, value of (q+1)-cell)
  std::vector<std::vector<int64_t>> essential;                    // essential[q]
  // witness cells of each pair, indices into X.cells(q) and X.cells(q+1)
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> finite_cells;
  std::vector<std::vector<uint32_t>> essential_cells;
};
using CellValue = std::function<int64_t(size_t q, const Cell&)>;
Barcode filtered_barcode(const CubeComplex& X, const CellValue& value);

// Graded Z[U]-modules built from towers T^-_a and blocks T_b(m).
struct ZUModule {
  std::vector<int64_t> towers;                         // a of T^-_a
  std::vector<std::pair<int64_t, int64_t>> blocks;     // (b, m) of T_b(m)
  bool certified = true;
  std::vector<Int> torsion_seen;  // integral torsion observed in some level
  std::string str() const;
  bool operator==(const ZUModule& o) const;
  void normalize();
};
ZUModule module_from_bars(const std::vector<std::pair<int64_t, int64_t>>& finite, const std::vector<int64_t>& essential);

struct RootNode {
  int64_t level;
  uint64_t rep;    // smallest lattice point index of the component
  int64_t parent;  // node index at level+1, -1 at the top
  size_t size;     // number of lattice points
};
struct GradedRoot {
  std::vector<RootNode> nodes;  // sorted by (level, rep)
  size_t count_at(int64_t level) const;
  std::string dot() const;
};

class SublevelModel {
 public:
  SublevelModel(std::shared_ptr<const WeightFunction> w, IntVec c, size_t budget = default_budget());
  const Box& box() const { return box_; }
  const CubeComplex& complex() const { return X_; }
  const WeightFunction& weight() const { return *w_; }
  int64_t min_weight() const { return m_w_; }
  int64_t max_weight() const { return max_w_; }
  std::vector<int64_t> levels() const;  // m_w .. max weight

  CubeComplex level(int64_t n) const;
  std::vector<HomologyGroup> homology(int64_t n) const;
  std::vector<size_t> betti(int64_t n) const;  // from the weight barcode
  const Barcode& barcode() const;
  GradedRoot graded_root() const;
  // rank of H_q(S_n) -> H_q(S_m), n <= m
  size_t u_rank(int64_t n, int64_t m, size_t q) const;
  // matrix of H_q(S_n) -> H_q(S_{n+1}) in rational homology bases
  std::vector<std::vector<Rat>> u_map(int64_t n, size_t q) const;
  std::vector<ZUModule> zu_modules() const;
  ZUModule zu_from_root() const;
  std::map<std::pair<int64_t, size_t>, size_t> hat_homology() const;
  int64_t eu_from_homology() const;
  int64_t eu_from_cubes() const;
  int64_t euler_characteristic() const;  // throws on mismatch

 private:
  std::shared_ptr<const WeightFunction> w_;
  Box box_;
  CubeComplex X_;
  int64_t m_w_ = 0, max_w_ = 0;
  mutable std::optional<Barcode> bars_;
};

// rectangle bound max(floor(Z_K), 0)
IntVec default_rectangle(const LatticeContext& ctx);

// Box containing every l >= 0 with chi_h(l) <= n (exact ellipsoid bound),
// restricted to the given coordinates. Empty optional if no such point exists.
std::optional<IntVec> level_box(const LatticeContext& ctx, const HClass& h, int64_t n,
                                const std::vector<size_t>& coords);

// rational homology basis and coordinates, used for U-maps
struct HomologyBasis {
  std::vector<BigVec> reps;  // cycles over X.cells(q)
  std::vector<BigVec> boundaries;
};
HomologyBasis homology_basis(const CubeComplex& X, size_t q);
// coordinates of a cycle in the basis modulo boundaries
std::vector<Rat> homology_coords(const HomologyBasis& B, const BigVec& cycle);
// express y as a combination of gens; nullopt if not in the span
std::optional<std::vector<Rat>> solve_in_span(const std::vector<BigVec>& gens, const BigVec& y);
// transport a chain from one complex to another by matching cubes
BigVec transport(const CubeComplex& from, const CubeComplex& to, size_t q, const BigVec& v);

std::vector<std::vector<uint32_t>> components(const CubeComplex& X);  // vertex index lists

}  // namespace latcoh
