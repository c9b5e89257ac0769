#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latcoh/export.hpp"

namespace py = pybind11;
using namespace latcoh;

namespace {

struct Setup {
  Decorated dec;
  std::unique_ptr<LatticeContext> ctx;
  HClass h;

  Setup(const std::string& text, const IntVec& cls) {
    dec = apply_decorations(parse_graph(text));
    ctx = std::make_unique<LatticeContext>(dec.graph);
    IntVec a = cls.empty() ? IntVec(ctx->rank(), 0) : cls;
    if (a.size() != ctx->rank()) throw std::invalid_argument("class needs one coefficient per vertex");
    h = ctx->class_from_dual_coeffs(a);
  }

  IntVec s_or_default(const IntVec& s) const {
    if (!s.empty()) {
      if (s.size() != ctx->rank()) throw std::invalid_argument("s needs one coefficient per vertex");
      return s;
    }
    for (auto x : dec.s)
      if (x) return dec.s;
    return IntVec(ctx->rank(), 1);
  }

  std::vector<size_t> indices(const IntVec& ids) const {
    std::vector<size_t> out;
    for (auto id : ids) out.push_back(dec.graph.index_of(id));
    return out;
  }
};

std::string invariants(const std::string& text, const IntVec& cls) {
  Setup S(text, cls);
  return invariants_json(*S.ctx, S.h).dump();
}

std::string homology(const std::string& text, const IntVec& cls, const IntVec& rect, const IntVec& bad) {
  Setup S(text, cls);
  if (bad.empty()) {
    SublevelModel m(std::make_shared<ChiWeight>(*S.ctx, S.h), rect.empty() ? default_rectangle(*S.ctx) : rect);
    return homology_json(m).dump();
  }
  auto rc = std::make_shared<ReducedContext>(*S.ctx, S.h, S.indices(bad));
  SublevelModel m = reduced_model(rc, rect.empty() ? rc->default_rect() : rect);
  return homology_json(m).dump();
}

std::vector<SpectralRow> rows_for(const Setup& S, const IntVec& s, int64_t nmax, const IntVec& bad, size_t jobs) {
  if (bad.empty()) return spectral_rows(*full_spectral_sequence(*S.ctx, S.h, s), nmax, true, jobs);
  auto rc = std::make_shared<ReducedContext>(*S.ctx, S.h, S.indices(bad));
  return spectral_rows(*reduced_spectral_sequence(rc, s), nmax, true, jobs);
}

std::string specseq(const std::string& text, const IntVec& s, int64_t nmax, const IntVec& cls, int page,
                    const IntVec& bad, size_t jobs) {
  Setup S(text, cls);
  auto rows = rows_for(S, S.s_or_default(s), nmax, bad, jobs);
  Json j;
  j["rows"] = rows_json(rows, page);
  j["global_degeneration"] = global_degeneration(rows);
  return j.dump();
}

std::string pe(const std::string& text, const IntVec& s, int64_t nmax, int k, const IntVec& cls, const IntVec& bad) {
  Setup S(text, cls);
  return pe_series(rows_for(S, S.s_or_default(s), nmax, bad, 1), k).json();
}

std::string grid(const std::string& text, const IntVec& bad, const IntVec& rect, const IntVec& cls) {
  Setup S(text, cls);
  ReducedContext rc(*S.ctx, S.h, S.indices(bad));
  return wbar_grid(rc, rect.empty() ? rc.default_rect() : rect);
}

std::string verify(const std::string& text, const IntVec& s, int64_t nmax, const IntVec& cls) {
  Setup S(text, cls);
  VerifyOptions opt;
  opt.nmax = nmax;
  return verify_json(verify_identities(*S.ctx, S.h, S.s_or_default(s), opt)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<GraphError>(m, "GraphError", PyExc_ValueError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  m.def("canonical", [](const std::string& t) { return serialize_graph(parse_graph(t)); }, py::arg("text"));
  m.def("invariants", &invariants, py::arg("text"), py::arg("cls") = IntVec{});
  m.def("homology", &homology, py::arg("text"), py::arg("cls") = IntVec{}, py::arg("rect") = IntVec{},
        py::arg("bad") = IntVec{});
  m.def("specseq", &specseq, py::arg("text"), py::arg("s") = IntVec{}, py::arg("nmax") = 10, py::arg("cls") = IntVec{},
        py::arg("page") = 0, py::arg("bad") = IntVec{}, py::arg("jobs") = 1);
  m.def("pe_series", &pe, py::arg("text"), py::arg("s") = IntVec{}, py::arg("nmax") = 20, py::arg("k") = 0,
        py::arg("cls") = IntVec{}, py::arg("bad") = IntVec{});
  m.def("wbar_grid", &grid, py::arg("text"), py::arg("bad"), py::arg("rect") = IntVec{}, py::arg("cls") = IntVec{});
  m.def("verify", &verify, py::arg("text"), py::arg("s") = IntVec{}, py::arg("nmax") = 6, py::arg("cls") = IntVec{});
}
