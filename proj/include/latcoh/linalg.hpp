#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "latcoh/arith.hpp"

namespace latcoh {

using DenseInt = std::vector<std::vector<Int>>;

// U * A * V = diag(d_0, d_1, ...), U and V unimodular.
struct SmithForm {
  std::vector<Int> diag;
  DenseInt U, V;
};
SmithForm smith_form(const DenseInt& A);

// Sparse integer column: (row, value) sorted by row, no zeros.
using SparseCol = std::vector<std::pair<uint32_t, int64_t>>;

struct IntRankInfo {
  size_t rank = 0;
  std::vector<Int> torsion;  // invariant factors > 1
};
// Rank and torsion coefficients of an integer matrix given by columns.
IntRankInfo integer_rank_info(std::vector<SparseCol> cols, size_t nrows);

// Sparse vector with big integer entries, sorted by index.
using BigVec = std::vector<std::pair<uint32_t, Int>>;
BigVec to_big(const SparseCol& c);

// Subspace of Q^N in echelon form; the pivot of a vector is its largest index.
class QSubspace {
 public:
  bool insert(BigVec v);
  BigVec reduce(BigVec v) const;
  bool contains(const BigVec& v) const { return reduce(v).empty(); }
  size_t dim() const { return basis_.size(); }
  // number of basis vectors whose pivot index is < bound
  size_t count_pivots_below(uint32_t bound) const;
  const std::map<uint32_t, BigVec>& basis() const { return basis_; }

 private:
  std::map<uint32_t, BigVec> basis_;
};

// rank over Q of the matrix with the given columns
size_t exact_rank(const std::vector<SparseCol>& cols);
size_t exact_rank_big(const std::vector<BigVec>& cols);

// basis of the kernel of the matrix with given columns (vectors indexed by column)
std::vector<BigVec> kernel_basis(const std::vector<BigVec>& cols);

// helpers for fraction free sparse arithmetic
BigVec lin_comb(const Int& a, const BigVec& x, const Int& b, const BigVec& y);  // a x + b y
void make_primitive(BigVec& v);

// Column reduction of a filtered boundary: cells of each dimension are given
// in filtration order, columns of bd[q] are the boundaries of q-cells in terms
// of (q-1)-cells. Returns the pairing (row index, column index) for each q.
struct Pairing {
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> pairs;  // pairs[q]: ((q-1)-cell, q-cell)
  std::vector<std::vector<char>> paired;                           // paired[q][i]
};
Pairing reduce_filtered(const std::vector<std::vector<SparseCol>>& bd, const std::vector<size_t>& counts);

}  // namespace latcoh
