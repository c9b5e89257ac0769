#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latcoh/arith.hpp"

namespace latcoh {

struct Vertex {
  int64_t id;
  int64_t euler;
};

struct Arrow {
  size_t vertex;  // internal index of the supporting vertex
  int64_t decoration = 0;
};

class GraphError : public std::runtime_error {
 public:
  enum Kind { Syntax, Validation };
  GraphError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

// Plumbing tree. Internal index = declaration order.
struct PlumbingGraph {
  std::vector<Vertex> vertices;
  std::vector<std::pair<size_t, size_t>> edges;
  std::vector<Arrow> arrows;

  size_t size() const { return vertices.size(); }
  size_t index_of(int64_t id) const;
  std::vector<size_t> neighbors(size_t i) const;
  size_t valency(size_t i) const { return neighbors(i).size(); }
  int64_t max_id() const;
};

PlumbingGraph parse_graph(const std::string& text);
std::string serialize_graph(const PlumbingGraph& g);
void validate_graph(const PlumbingGraph& g);  // throws GraphError(Validation)

IntMat intersection_matrix(const PlumbingGraph& g);
Int determinant(const IntMat& M);
bool is_negative_definite(const IntMat& M);

struct BlowUpCenter {
  enum Kind { AtVertex, AtEdge, AtArrow };
  Kind kind = AtVertex;
  int64_t a = 0, b = 0;  // vertex ids
  size_t arrow = 0;      // arrow index for AtArrow

  static BlowUpCenter vertex(int64_t id) { return {AtVertex, id, 0, 0}; }
  static BlowUpCenter edge(int64_t x, int64_t y) { return {AtEdge, x, y, 0}; }
  static BlowUpCenter at_arrow(size_t k) { return {AtArrow, 0, 0, k}; }
};

// psi^* on cycles: column i is psi^*(E_i) of the old graph in the new E-basis.
// On L' this is the same linear map applied to rational coordinates.
struct PullbackMap {
  IntMat matrix;  // new_rank x old_rank
  RatVec apply(const RatVec& x) const;
  IntVec apply(const IntVec& x) const;
  PullbackMap then(const PullbackMap& next) const;  // next o this
};

struct BlowUp {
  PlumbingGraph graph;
  PullbackMap pullback;
  size_t new_vertex = 0;
  bool base_point = false;
  size_t moved_arrow = 0;
};

BlowUp blow_up(const PlumbingGraph& g, const BlowUpCenter& c);

// Semigroup element given by E^*-coefficients. Returns the element of the new
// graph: psi^* s for ordinary centers, psi^* s + E_new for base points.
IntVec transport_semigroup(const BlowUp& b, const PlumbingGraph& old, const IntVec& s);

struct Decorated {
  PlumbingGraph graph;
  IntVec s;  // E^*-coefficients n_i
};
Decorated apply_decorations(const PlumbingGraph& g);

// E^*-coefficients of the sum of the E^* of the arrow supports.
IntVec arrow_divisor(const PlumbingGraph& g);

}  // namespace latcoh
