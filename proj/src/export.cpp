#include "latcoh/export.hpp"

#include <sstream>

namespace latcoh {

Json rat_vec_json(const RatVec& v) {
  Json a = Json::array();
  for (auto& x : v) a.push_back(rat_str(x));
  return a;
}

Json int_vec_json(const IntVec& v) {
  Json a = Json::array();
  for (auto x : v) a.push_back(x);
  return a;
}

Json invariants_json(const LatticeContext& ctx, const HClass& h) {
  Json j;
  j["rank"] = ctx.rank();
  Json M = Json::array();
  for (auto& row : ctx.M()) M.push_back(int_vec_json(row));
  j["intersection_matrix"] = M;
  j["det"] = ctx.det().get_str();
  Json f = Json::array();
  for (auto& x : ctx.h_factors()) f.push_back(x.get_str());
  j["h_factors"] = f;
  j["h_order"] = ctx.h_order();
  j["ZK"] = rat_vec_json(ctx.ZK());
  j["class"] = class_str(h);
  j["s_h"] = rat_vec_json(ctx.s_h(h));
  j["k_h"] = rat_vec_json(ctx.k_h(h));
  Json ids = Json::array();
  for (auto& v : ctx.graph().vertices) ids.push_back(v.id);
  j["vertex_ids"] = ids;
  return j;
}

Json module_json(const ZUModule& m) {
  ZUModule a = m;
  a.normalize();
  Json j;
  j["towers"] = int_vec_json(a.towers);
  Json b = Json::array();
  for (auto& [x, y] : a.blocks) b.push_back({x, y});
  j["blocks"] = b;
  j["certified"] = a.certified;
  j["text"] = a.str();
  return j;
}

Json root_json(const GradedRoot& r) {
  Json a = Json::array();
  for (auto& n : r.nodes) a.push_back({{"level", n.level}, {"rep", n.rep}, {"parent", n.parent}, {"size", n.size}});
  return a;
}

Json homology_json(const SublevelModel& m) {
  Json j;
  j["rectangle"] = int_vec_json(m.box().hi());
  j["min_weight"] = m.min_weight();
  j["max_weight"] = m.max_weight();
  Json lv = Json::array();
  for (int64_t n : m.levels()) {
    CubeComplex X = m.level(n);
    auto H = integral_homology(X);
    Json e;
    e["n"] = n;
    e["components"] = components(X).size();
    Json hb = Json::array();
    for (auto& g : H) {
      Json t = Json::array();
      for (auto& x : g.torsion) t.push_back(x.get_str());
      hb.push_back({{"rank", g.rank}, {"torsion", t}});
    }
    e["homology"] = hb;
    lv.push_back(e);
  }
  j["levels"] = lv;
  Json mods = Json::array();
  for (auto& z : m.zu_modules()) mods.push_back(module_json(z));
  j["modules"] = mods;
  j["eu"] = m.euler_characteristic();
  Json hat = Json::array();
  for (auto& [k, rk] : m.hat_homology()) hat.push_back({{"n", k.first}, {"q", k.second}, {"rank", rk}});
  j["hat_homology"] = hat;
  return j;
}

namespace {

Json page_json(const std::map<Bidegree, int64_t>& P) {
  Json a = Json::array();
  for (auto& [bd, rk] : P)
    if (rk) a.push_back({{"d", bd.first}, {"q", bd.second}, {"b", bd.second - bd.first}, {"rank", rk}});
  return a;
}

std::string page_str(const std::map<Bidegree, int64_t>& P) {
  std::ostringstream os;
  bool first = true;
  for (auto it = P.rbegin(); it != P.rend(); ++it) {
    auto& [bd, rk] = *it;
    if (!rk) continue;
    os << (first ? "" : " + ");
    first = false;
    if (rk != 1) os << rk << "*";
    os << "T^" << bd.first;
    int64_t b = bd.second - bd.first;
    if (b) os << "*h" << (b != 1 ? "^" + std::to_string(b) : "");
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace

Json row_json(const SpectralRow& r, int page) {
  Json j;
  j["n"] = r.n;
  j["degeneration"] = r.degeneration;
  j["betti"] = int_vec_json(r.betti);
  Json pages = Json::array();
  for (size_t k = 1; k <= r.pages.size(); ++k)
    if (page == 0 || static_cast<int>(k) == page) pages.push_back({{"k", k}, {"entries", page_json(r.pages[k - 1])}});
  if (page > static_cast<int>(r.pages.size()))
    pages.push_back({{"k", page}, {"entries", page_json(r.limit)}});
  j["pages"] = pages;
  j["limit"] = page_json(r.limit);
  Json d = Json::array();
  for (auto& [key, rk] : r.differentials) {
    auto [k, dd, q] = key;
    d.push_back({{"k", k}, {"d", dd}, {"q", q}, {"rank", rk}});
  }
  j["differentials"] = d;
  Json tor = Json::array();
  for (auto& [bd, t] : r.e1_torsion) {
    if (t.empty()) continue;
    Json tt = Json::array();
    for (auto& x : t) tt.push_back(x.get_str());
    tor.push_back({{"d", bd.first}, {"q", bd.second}, {"torsion", tt}});
  }
  j["e1_torsion"] = tor;
  Json ab = Json::array();
  for (auto& [b, ladder] : r.abutment) {
    Json l = Json::array();
    for (auto& [d, rk] : ladder) l.push_back({d, rk});
    ab.push_back({{"b", b}, {"ladder", l}});
  }
  j["abutment"] = ab;
  return j;
}

Json rows_json(const std::vector<SpectralRow>& rows, int page) {
  Json a = Json::array();
  for (auto& r : rows) a.push_back(row_json(r, page));
  return a;
}

std::string row_text(const SpectralRow& r, int page) {
  std::ostringstream os;
  for (size_t k = 1; k <= r.pages.size(); ++k)
    if (page == 0 || static_cast<int>(k) == page) os << "n=" << r.n << " E" << k << ": " << page_str(r.pages[k - 1]) << "\n";
  os << "n=" << r.n << " Einf: " << page_str(r.limit) << "  (degenerates at " << r.degeneration << ")\n";
  for (auto& [key, rk] : r.differentials) {
    auto [k, d, q] = key;
    os << "n=" << r.n << " d" << k << " from (" << d << "," << q << ") rank " << rk << "\n";
  }
  return os.str();
}

Json series_json(const Series& s) { return Json::parse(s.json()); }

Json tail_json(const TailReport& t) {
  Json j;
  j["N"] = t.N;
  j["e"] = t.e;
  j["p"] = t.p;
  j["stilde"] = int_vec_json(t.stilde);
  j["certified"] = t.certified;
  j["d0"] = t.d0;
  Json l = Json::array();
  for (size_t i = 0; i < t.lq.size(); ++i) l.push_back({{"l", int_vec_json(t.lq[i])}, {"chi", t.chi_lq[i]}});
  j["minimizers"] = l;
  j["tail_is_geometric"] = t.tail_is_geometric;
  j["window"] = t.window;
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Json sw_json(const SwReport& r) {
  Json j;
  j["eu_homology"] = r.eu_homology;
  j["eu_cubes"] = r.eu_cubes;
  j["pol_sw"] = series_json(r.pol_sw);
  j["pol_sw_at_one"] = r.pol_sw_at_one.get_str();
  j["certified"] = r.certified;
  j["chi_top"] = series_json(r.chi_top);
  j["hat_euler"] = r.hat_euler;
  j["window"] = r.window;
  return j;
}

Json ar_json(const ArReport& r) {
  Json j;
  j["wbar"] = int_vec_json(r.wbar);
  j["pe1"] = series_json(r.pe1_formula);
  j["z00"] = series_json(r.z00);
  j["z_minus"] = series_json(r.z_minus);
  j["z_plus"] = series_json(r.z_plus);
  j["z_plus_at_one"] = r.z_plus_at_one.get_str();
  j["z_plus_certified"] = r.z_plus_certified;
  j["z00_matches_increments"] = r.tau_lemma_holds;
  j["rational"] = r.rational;
  if (r.rational) {
    j["m_phi"] = rat_str(r.m_phi);
    Json c = Json::array();
    for (auto& h : r.pc_classes) c.push_back(class_str(h));
    j["pc_classes"] = c;
    j["pc"] = series_json(r.pc);
    j["pc_zero_one"] = r.pc_zero_one;
    j["pc_semigroup"] = r.pc_semigroup;
    j["wbar_recovered"] = int_vec_json(r.wbar_recovered);
  }
  return j;
}

Json wbar_json(const ReducedContext& rc, const IntVec& rect) {
  Json pts = Json::array();
  Box b(rect);
  for (uint64_t i = 0; i < b.volume(); ++i) {
    IntVec p = b.point(i);
    pts.push_back({{"l", int_vec_json(p)}, {"wbar", rc.wbar(p)}, {"cycle", int_vec_json(rc.universal_cycle(p))}});
  }
  return pts;
}

Json verify_json(const VerifyReport& r) {
  Json j;
  j["class"] = r.h;
  j["s"] = r.s;
  Json c = Json::array();
  for (auto& x : r.checks) c.push_back({{"name", x.name}, {"ok", x.ok}, {"detail", x.detail}, {"window", x.window}});
  j["checks"] = c;
  j["ok"] = r.ok();
  return j;
}

}  // namespace latcoh
