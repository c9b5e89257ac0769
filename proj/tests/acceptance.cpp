// One PASS/FAIL line per acceptance criterion.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "latcoh/series.hpp"
#include "latcoh/verify.hpp"

using namespace latcoh;

namespace {

std::string data_path(const std::string& name) { return std::string(LATCOH_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

PlumbingGraph load(const std::string& name) { return parse_graph(slurp(data_path(name))); }

size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Crit {
  std::vector<std::string> fails;
  void expect(bool ok, const std::string& what) {
    if (!ok) fails.push_back(what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ZUModule module(std::vector<int64_t> towers, std::vector<std::pair<int64_t, int64_t>> blocks) {
  ZUModule m;
  m.towers = std::move(towers);
  m.blocks = std::move(blocks);
  return m;
}

std::string page_str(const std::map<Bidegree, int64_t>& P) {
  std::string t;
  for (auto& [bd, r] : P)
    if (r) t += "(" + std::to_string(bd.first) + "," + std::to_string(bd.second) + "):" + std::to_string(r) + " ";
  return t;
}

std::map<Bidegree, int64_t> nonzero(const std::map<Bidegree, int64_t>& P) {
  std::map<Bidegree, int64_t> out;
  for (auto& [bd, r] : P)
    if (r) out[bd] = r;
  return out;
}

const SpectralRow& row_at(const std::vector<SpectralRow>& rows, int64_t n) {
  for (auto& r : rows)
    if (r.n == n) return r;
  throw std::runtime_error("row " + std::to_string(n) + " not computed");
}

// T^d Q^n for lo <= n < hi, n <= qmax
void add_run(Series& s, int64_t d, int64_t lo, int64_t hi, int64_t hexp, int64_t qmax) {
  for (int64_t n = lo; n < hi && n <= qmax; ++n) s.add({Rat(d), Rat(n), Rat(hexp)}, 1);
}

Series tqh(int64_t tmax, int64_t qmax) {
  Series s({"T", "Q", "h"});
  if (tmax >= 0) s.set_bound(0, Rat(tmax));
  s.set_bound(1, Rat(qmax));
  return s;
}

// ---------------------------------------------------------------- 1
void crit1(Crit& c) {
  PlumbingGraph g = load("latnv1.graph");
  LatticeContext ctx(g);
  HClass h = ctx.zero_class();
  auto rc = std::make_shared<ReducedContext>(ctx, h, std::vector<size_t>{1, 5});
  SublevelModel red = reduced_model(rc, rc->default_rect());
  auto mods = red.zu_modules();
  c.expect(mods.size() >= 2, "reduced model has no H_1 entry");
  if (mods.size() >= 2) {
    c.expect(mods[0] == module({2}, {{2, 1}, {0, 1}, {0, 1}}), "H_0 = " + mods[0].str());
    c.expect(mods[1] == module({}, {{0, 1}}), "H_1 = " + mods[1].str());
    for (size_t q = 2; q < mods.size(); ++q) c.expect(mods[q] == ZUModule{}, "H_" + std::to_string(q) + " nonzero");
  }
  // the levels themselves on the full lattice
  auto S = full_spectral_sequence(ctx, h, IntVec(ctx.rank(), 1));
  CubeComplex Xm = S->level(-1).X, X0 = S->level(0).X;
  c.expect(components(Xm).size() == 2, "S_-1 components " + std::to_string(components(Xm).size()));
  c.expect(components(X0).size() == 3, "S_0 components " + std::to_string(components(X0).size()));
  auto H0 = integral_homology(X0);
  c.expect(H0.size() >= 2 && H0[1].rank == 1 && H0[1].torsion.empty(), "H_1(S_0) is not Z");
  for (size_t q = 2; q < H0.size(); ++q) c.expect(H0[q].rank == 0 && H0[q].torsion.empty(), "H_q(S_0) nonzero");
  auto Hm = integral_homology(Xm);
  for (size_t q = 1; q < Hm.size(); ++q) c.expect(Hm[q].rank == 0, "H_q(S_-1) nonzero");
}

// ---------------------------------------------------------------- 2
void crit2(Crit& c) {
  PlumbingGraph g = load("latnv1.graph");
  LatticeContext ctx(g);
  HClass h = ctx.zero_class();
  auto S = full_spectral_sequence(ctx, h, IntVec(ctx.rank(), 1));
  SpectralRow r0 = S->row(0);
  c.expect(r0.degeneration == 5, "case 1 k(0) = " + std::to_string(r0.degeneration));

  auto rc = std::make_shared<ReducedContext>(ctx, h, std::vector<size_t>{1, 5});
  IntVec s(ctx.rank(), 0);
  s[1] = s[5] = 1;
  auto R = reduced_spectral_sequence(rc, s);
  SpectralRow r = R->row(0);
  c.expect(r.rank(1, 26, 26) == 2, "E^1 at (26,26) rank " + std::to_string(r.rank(1, 26, 26)));
  c.expect(!r.e1_torsion.count({26, 26}) || r.e1_torsion.at({26, 26}).empty(), "E^1 at (26,26) has torsion");
  c.expect(r.rank(2, 26, 26) == 2, "E^2 at (26,26) rank " + std::to_string(r.rank(2, 26, 26)));
  for (int k = 3; k <= std::max<int>(r.degeneration, 3) + 1; ++k)
    c.expect(r.rank(k, 26, 26) == 1, "E^" + std::to_string(k) + " at (26,26) rank " + std::to_string(r.rank(k, 26, 26)));
  c.expect(r.rank(0, 26, 26) == 1, "E^inf at (26,26)");
}

// ---------------------------------------------------------------- 3
void crit3(Crit& c) {
  PlumbingGraph g = load("twonodes.graph");
  LatticeContext ctx(g);
  HClass h = ctx.zero_class();
  auto rc = std::make_shared<ReducedContext>(ctx, h, std::vector<size_t>{1, 6});

  std::istringstream gold(slurp(data_path("twonodes_wbar.txt")));
  std::istringstream got(wbar_grid(*rc, {19, 19}));
  std::string gl, ol;
  size_t compared = 0;
  for (int line = 0; std::getline(gold, gl); ++line) {
    if (!std::getline(got, ol)) {
      c.expect(false, "grid too short");
      break;
    }
    std::istringstream a(gl), b(ol);
    std::string x, y;
    for (int col = 0; a >> x; ++col) {
      b >> y;
      if (x == ".") continue;
      ++compared;
      c.expect(x == y, "grid row " + std::to_string(line) + " col " + std::to_string(col) + ": " + y + " vs " + x);
    }
  }
  c.expect(compared == 396, "compared " + std::to_string(compared) + " grid entries");

  SublevelModel red = reduced_model(rc, rc->default_rect());
  auto mods = red.zu_modules();
  c.expect(mods.size() >= 2, "no H_1");
  if (mods.size() >= 2) {
    c.expect(mods[0] == module({2}, {{2, 1}, {2, 1}, {2, 1}, {0, 1}, {0, 1}}), "H_0 = " + mods[0].str());
    c.expect(mods[1] == module({}, {{0, 1}}), "H_1 = " + mods[1].str());
  }

  IntVec s(ctx.rank(), 0);
  s[1] = s[6] = 1;
  auto R = reduced_spectral_sequence(rc, s);
  SpectralRow r = R->row(0);
  std::map<Bidegree, int64_t> einf{{{36, 36}, 1}, {{30, 30}, 1}, {{12, 13}, 1}, {{0, 0}, 1}};
  c.expect(nonzero(r.limit) == einf, "E^inf n=0: " + page_str(r.limit));
  std::map<Bidegree, int64_t> e1{{{36, 36}, 1}, {{30, 30}, 2}, {{24, 25}, 1}, {{24, 24}, 2},
                                 {{18, 19}, 2}, {{12, 13}, 1}, {{0, 0}, 1}};
  c.expect(nonzero(r.page(1)) == e1, "E^1 n=0: " + page_str(r.page(1)));
  int first = 0;
  for (auto& [key, rk] : r.differentials)
    if (rk && (first == 0 || std::get<0>(key) < first)) first = std::get<0>(key);
  c.expect(first == 6, "first nonzero differential on page " + std::to_string(first));
  auto dr = [&](int k, int64_t d, int64_t q) {
    auto it = r.differentials.find({k, d, q});
    return it == r.differentials.end() ? int64_t(0) : it->second;
  };
  c.expect(dr(6, 24, 25) == 1, "d^6 from (24,25) rank " + std::to_string(dr(6, 24, 25)));
  c.expect(dr(6, 18, 19) == 2, "d^6 from (18,19) rank " + std::to_string(dr(6, 18, 19)));
  c.expect(r.rank(6, 24, 25) == 1 && r.rank(6, 30, 30) == 2, "d^6 Z -> Z^2 source/target ranks");
  c.expect(r.rank(6, 18, 19) == 2 && r.rank(6, 24, 24) == 2, "d^6 Z^2 -> Z^2 source/target ranks");
}

// ---------------------------------------------------------------- 4
int64_t a2_chi(int64_t a, int64_t b) { return a * a + b * b - a * b; }

void crit4(Crit& c) {
  PlumbingGraph g = load("a2.graph");
  LatticeContext ctx(g);
  HClass h = ctx.zero_class();

  // case I: s = E_1^*
  {
    auto S = full_spectral_sequence(ctx, h, {1, 0});
    auto rows = spectral_rows(*S, 300, false, jobs());
    auto minf = [](int64_t l) { return (3 * l * l + (l % 2)) / 4; };
    for (int64_t l = 0; l <= 21; ++l) {
      int64_t brute = INT64_MAX;
      for (int64_t y = -60; y <= 60; ++y) brute = std::min(brute, a2_chi(l, y));
      c.expect(brute == minf(l), "min(" + std::to_string(l) + ") oracle " + std::to_string(brute));
    }
    for (auto& r : rows) {
      for (auto& [bd, rk] : r.page(1)) {
        if (!rk) continue;
        int64_t d = bd.first;
        bool ok = bd.second == d && rk == 1 && minf(d) <= r.n && r.n < minf(d + 1);
        c.expect(ok, "case I E^1 at n=" + std::to_string(r.n) + " (" + std::to_string(d) + "," +
                         std::to_string(bd.second) + ")");
      }
      c.expect(r.degeneration == 1, "case I degenerates late at n=" + std::to_string(r.n));
    }
    for (int64_t d = 0; d <= 20; ++d) {
      int64_t first = -1;
      for (auto& r : rows)
        if (r.rank(1, d, d) > 0) {
          first = r.n;
          break;
        }
      c.expect(first == minf(d), "case I first n at d=" + std::to_string(d) + " is " + std::to_string(first));
    }
  }

  // case II: s = E_1^* + E_2^*
  const int64_t Q = 60, T = 15;
  auto S = full_spectral_sequence(ctx, h, {1, 1});
  auto rows = spectral_rows(*S, Q, true, jobs());
  Series inf = tqh(T, Q);
  for (int64_t l = 0; 2 * l <= T; ++l) {
    add_run(inf, 2 * l, l * l, l * l + l + 1, 0, Q);
    if (2 * l + 1 <= T) add_run(inf, 2 * l + 1, l * l + l + 1, (l + 1) * (l + 1), 0, Q);
  }
  std::string why;
  c.expect(pe_series(rows, 0).agrees(inf, &why), "PE_inf: " + why);

  Series one = tqh(T, Q);
  for (int64_t a = 0; a <= T; ++a)
    for (int64_t b = 0; a + b <= T; ++b) {
      if (-2 * a + b > 0 || a - 2 * b > 0) continue;
      int64_t A = a2_chi(a, b), B = a2_chi(a + 1, b), C = a2_chi(a, b + 1), D = a2_chi(a + 1, b + 1);
      add_run(one, a + b, A, std::min(B, C), 0, Q);
      add_run(one, a + b, std::max(B, C), D, 1, Q);
    }
  c.expect(pe_series(rows, 1).agrees(one, &why), "PE_1: " + why);

  std::map<Bidegree, int64_t> col48{{{13, 13}, 2}, {{12, 12}, 2}, {{12, 13}, 1}, {{11, 12}, 2}};
  c.expect(nonzero(row_at(rows, 48).page(1)) == col48, "n=48 E^1: " + page_str(row_at(rows, 48).page(1)));
  int kg = global_degeneration(rows);
  c.expect(kg == 2, "global degeneration " + std::to_string(kg));

  auto tail = pe_infty_tail(ctx, h, {1, 1}, rows);
  c.expect(tail.p == 2 && tail.certified, "tail s=E1*+E2*: p=" + std::to_string(tail.p) + " " + tail.note);
  auto S1 = full_spectral_sequence(ctx, h, {1, 0});
  auto tail1 = pe_infty_tail(ctx, h, {1, 0}, spectral_rows(*S1, Q, false, jobs()));
  c.expect(tail1.p == 2 && tail1.certified, "tail s=E1*: p=" + std::to_string(tail1.p) + " " + tail1.note);
}

// ---------------------------------------------------------------- 5
int64_t ceil_div_pos(int64_t a, int64_t b) { return (a + b - 1) / b; }

void crit5(Crit& c) {
  PlumbingGraph g = load("sigma237.graph");
  LatticeContext ctx(g);
  HClass h = ctx.zero_class();
  auto rc = std::make_shared<ReducedContext>(ctx, h, std::vector<size_t>{0});

  // w(l+1) - w(l) = 1 + l - ceil(l/2) - ceil(l/3) - ceil(l/7)
  std::vector<int64_t> w{0};
  for (int64_t j = 0; j <= 40; ++j)
    w.push_back(w.back() + 1 + j - ceil_div_pos(j, 2) - ceil_div_pos(j, 3) - ceil_div_pos(j, 7));
  std::vector<int64_t> first9{0, 1, 0, 0, 0, 0, 0, 1, 1};
  for (int64_t l = 0; l <= 8; ++l) {
    c.expect(w[l] == first9[l], "oracle w(" + std::to_string(l) + ")");
    c.expect(rc->wbar({l}) == first9[l], "wbar(" + std::to_string(l) + ") = " + std::to_string(rc->wbar({l})));
  }
  for (int64_t l = 9; l <= 31; ++l) c.expect(rc->wbar({l}) == w[l], "wbar(" + std::to_string(l) + ")");

  SublevelModel red = reduced_model(rc, {30});
  auto mods = red.zu_modules();
  c.expect(!mods.empty() && mods[0] == module({0}, {{0, 1}}), "reduced H_0 = " + (mods.empty() ? "" : mods[0].str()));
  for (size_t q = 1; q < mods.size(); ++q) c.expect(mods[q] == ZUModule{}, "reduced H_q nonzero");
  SublevelModel full(std::make_shared<ChiWeight>(ctx, h), default_rectangle(ctx));
  auto fm = full.zu_modules();
  c.expect(!fm.empty() && fm[0] == module({0}, {{0, 1}}), "full H_0 = " + (fm.empty() ? "" : fm[0].str()));
  c.expect(full.euler_characteristic() == 1, "eu = " + std::to_string(full.euler_characteristic()));

  const int64_t L = 30, Q = w[L + 1];
  IntVec s(ctx.rank(), 0);
  s[0] = 1;
  auto R = reduced_spectral_sequence(rc, s);
  auto rows = spectral_rows(*R, Q, true, jobs());
  auto maxd = [&](int64_t n) {
    int64_t best = -1;
    for (auto& [d, rk] : row_at(rows, n).abutment.at(0))
      if (rk > 0) best = std::max(best, d);
    return best;
  };
  c.expect(maxd(0) == 6, "max d at n=0: " + std::to_string(maxd(0)));
  c.expect(maxd(1) == 12, "max d at n=1: " + std::to_string(maxd(1)));
  c.expect(maxd(2) == 14, "max d at n=2: " + std::to_string(maxd(2)));

  Series ref = tqh(L, Q);
  for (int64_t l = 0; l <= L; ++l) add_run(ref, l, w[l], w[l + 1], 0, Q);
  std::string why;
  c.expect(pe_series(rows, 0).agrees(ref, &why), "PE_inf: " + why);
}

// ---------------------------------------------------------------- 6
void crit6(Crit& c) {
  const int64_t Q = 60;
  for (int64_t p : {1, 2, 3, 5}) {
    PlumbingGraph g = parse_graph("vertex 1 -" + std::to_string(p) + "\n");
    LatticeContext ctx(g);
    std::set<int64_t> seen;
    for (auto& h : ctx.all_classes()) {
      Rat ap = ctx.s_h(h)[0] * p;
      c.expect(is_integral(ap), "s_h not in (1/p)Z");
      int64_t a = to_i64(ap.get_num());
      seen.insert(a);
      auto w = [&](int64_t l) { return l * (l - 1) * p / 2 + l * (1 + a); };
      std::string tag = "p=" + std::to_string(p) + " a=" + std::to_string(a) + ": ";
      auto S = full_spectral_sequence(ctx, h, {1});
      auto rows = spectral_rows(*S, Q, true, jobs());
      Series ref = tqh(-1, Q);
      for (int64_t l = 0; w(l) <= Q; ++l) add_run(ref, l, w(l), w(l + 1), 0, Q);
      std::string why;
      c.expect(pe_series(rows, 1).agrees(ref, &why), tag + "PE_1 " + why);
      c.expect(pe_series(rows, 0).agrees(ref, &why), tag + "PE_inf " + why);

      auto mods = S->e1_modules(Q);
      std::map<Bidegree, ZUModule> want;
      for (int64_t l = 0; w(l) <= Q; ++l)
        want[{l, l}] = w(l + 1) <= Q ? module({}, {{-2 * w(l), w(l + 1) - w(l)}}) : module({-2 * w(l)}, {});
      for (auto& [bd, m] : want) {
        auto it = mods.find(bd);
        c.expect(it != mods.end() && it->second == m,
                 tag + "E^1 module at d=" + std::to_string(bd.first) + (it == mods.end() ? " missing" : " " + it->second.str()));
      }
      for (auto& [bd, m] : mods)
        if (!want.count(bd)) c.expect(m == ZUModule{}, tag + "extra E^1 module at d=" + std::to_string(bd.first));
    }
    c.expect(static_cast<int64_t>(seen.size()) == p, "p=" + std::to_string(p) + " classes seen " + std::to_string(seen.size()));
  }
}

// ---------------------------------------------------------------- 7
void crit7(Crit& c) {
  PlumbingGraph g = load("p2.graph");
  Decorated dec = apply_decorations(g);
  LatticeContext ctx(dec.graph);
  HClass h = ctx.zero_class();
  const int64_t Q = 40;
  auto S = full_spectral_sequence(ctx, h, dec.s);
  auto rows = spectral_rows(*S, Q, true, jobs());

  BlowUp B = blow_up(dec.graph, BlowUpCenter::vertex(dec.graph.vertices[0].id));
  c.expect(!B.base_point, "generic center reported as base point");
  LatticeContext bctx(B.graph);
  IntVec bs = transport_semigroup(B, dec.graph, dec.s);
  auto BS = full_spectral_sequence(bctx, bctx.zero_class(), bs);
  auto brows = spectral_rows(*BS, Q, true, jobs());
  c.expect(rows.size() == brows.size() && rows.front().n == brows.front().n, "row ranges differ");
  for (size_t i = 0; i < std::min(rows.size(), brows.size()); ++i) {
    auto& a = rows[i];
    auto& b = brows[i];
    size_t K = std::max(a.pages.size(), b.pages.size());
    for (size_t k = 1; k <= K + 1; ++k)
      c.expect(nonzero(a.page(static_cast<int>(k))) == nonzero(b.page(static_cast<int>(k))),
               "n=" + std::to_string(a.n) + " E^" + std::to_string(k) + " differs");
    c.expect(nonzero(a.limit) == nonzero(b.limit), "n=" + std::to_string(a.n) + " E^inf differs");
  }

  auto first_n = [](const std::vector<SpectralRow>& rs, int64_t d) {
    for (auto& r : rs)
      for (auto& [bd, rk] : r.limit)
        if (rk && bd.first == d) return r.n;
    return int64_t(-1);
  };
  for (int64_t d = 0; d < 7; ++d)
    c.expect(first_n(rows, d) == d * d, "original E^inf starts d=" + std::to_string(d) + " at " + std::to_string(first_n(rows, d)));

  BlowUp P = blow_up(dec.graph, BlowUpCenter::at_arrow(0));
  c.expect(P.base_point, "arrow center not a base point");
  LatticeContext pctx(P.graph);
  IntVec ps = transport_semigroup(P, dec.graph, dec.s);
  auto PS = full_spectral_sequence(pctx, pctx.zero_class(), ps);
  auto prows = spectral_rows(*PS, Q, true, jobs());
  std::vector<int64_t> want{0, 1, 2, 4, 7, 10, 14};
  for (int64_t d = 0; d < 7; ++d)
    c.expect(first_n(prows, d) == want[d], "blown-up E^inf starts d=" + std::to_string(d) + " at " + std::to_string(first_n(prows, d)));
}

// ---------------------------------------------------------------- 8
PlumbingGraph random_tree(std::mt19937& rng, size_t n) {
  PlumbingGraph g;
  std::uniform_int_distribution<int64_t> eu(-5, -1);
  for (size_t i = 0; i < n; ++i) g.vertices.push_back({static_cast<int64_t>(i + 1), eu(rng)});
  for (size_t i = 1; i < n; ++i) g.edges.push_back({std::uniform_int_distribution<size_t>(0, i - 1)(rng), i});
  return g;
}

void crit8(Crit& c) {
  std::mt19937 rng(20240607);
  std::vector<PlumbingGraph> corpus;
  std::map<size_t, size_t> by_rank;
  for (size_t tries = 0; corpus.size() < 12 && tries < 20000; ++tries) {
    size_t n = 1 + corpus.size() % 4;
    PlumbingGraph g = random_tree(rng, n);
    if (!is_negative_definite(intersection_matrix(g))) continue;
    LatticeContext ctx(g);
    if (ctx.h_order() < 2 || ctx.h_order() > 40) continue;
    // keep the battery quick: skip big rectangles
    long double vol = 1;
    for (auto x : default_rectangle(ctx)) vol *= x + 1;
    if (vol > 400) continue;
    corpus.push_back(g);
    ++by_rank[n];
  }
  c.expect(corpus.size() >= 10, "corpus has " + std::to_string(corpus.size()) + " graphs");
  c.expect(by_rank.size() == 4, "not every rank 1..4 represented");
  size_t runs = 0;
  for (auto& g : corpus) {
    LatticeContext ctx(g);
    auto classes = ctx.all_classes();
    std::vector<HClass> hs{classes[0], classes[1 + rng() % (classes.size() - 1)]};
    IntVec s1(ctx.rank(), 1), s2(ctx.rank(), 0);
    s2[rng() % ctx.rank()] = 1 + rng() % 2;
    for (auto& h : hs)
      for (auto& s : {s1, s2}) {
        VerifyOptions opt;
        opt.nmax = 6;
        opt.samples = 5;
        opt.jobs = jobs();
        VerifyReport R = verify_identities(ctx, h, s, opt);
        ++runs;
        for (auto& ch : R.checks)
          c.expect(ch.ok, serialize_graph(g) + " class " + R.h + " s " + R.s + ": " + ch.name + " " + ch.detail);
        c.expect(R.checks.size() >= 14, "battery incomplete");
      }
  }
  c.expect(runs >= 40, "only " + std::to_string(runs) + " runs");
}

// ---------------------------------------------------------------- 9
void compare_paths(Crit& c, const LatticeContext& ctx, const HClass& h, const std::vector<size_t>& bad, const std::string& tag) {
  SublevelModel full(std::make_shared<ChiWeight>(ctx, h), default_rectangle(ctx));
  auto rc = std::make_shared<ReducedContext>(ctx, h, bad);
  SublevelModel red = reduced_model(rc, rc->default_rect());
  c.expect(full.min_weight() == red.min_weight(), tag + "min weight");
  int64_t top = std::max(full.max_weight(), red.max_weight()) + 1;
  for (int64_t n = full.min_weight(); n <= top; ++n) {
    auto a = full.betti(std::min(n, full.max_weight())), b = red.betti(std::min(n, red.max_weight()));
    while (!a.empty() && a.back() == 0) a.pop_back();
    while (!b.empty() && b.back() == 0) b.pop_back();
    c.expect(a == b, tag + "betti at n=" + std::to_string(n));
  }
  auto fm = full.zu_modules(), rm = red.zu_modules();
  while (!fm.empty() && fm.back() == ZUModule{}) fm.pop_back();
  while (!rm.empty() && rm.back() == ZUModule{}) rm.pop_back();
  c.expect(fm == rm, tag + "Z[U]-modules");
  auto fr = full.graded_root(), rr = red.graded_root();
  c.expect(full.zu_from_root() == red.zu_from_root(), tag + "graded root modules");
  for (int64_t n = full.min_weight(); n <= std::min(full.max_weight(), red.max_weight()); ++n)
    c.expect(fr.count_at(n) == rr.count_at(n), tag + "root vertices at n=" + std::to_string(n));

  IntVec s(ctx.rank(), 0);
  for (auto i : bad) s[i] = 1;
  const int64_t Q = 12;
  auto FS = full_spectral_sequence(ctx, h, s);
  auto RS = reduced_spectral_sequence(rc, s);
  auto frows = spectral_rows(*FS, Q, true, jobs()), rrows = spectral_rows(*RS, Q, true, jobs());
  c.expect(frows.size() == rrows.size(), tag + "row ranges");
  for (size_t i = 0; i < std::min(frows.size(), rrows.size()); ++i) {
    size_t K = std::max(frows[i].pages.size(), rrows[i].pages.size());
    for (size_t k = 1; k <= K; ++k)
      c.expect(nonzero(frows[i].page(static_cast<int>(k))) == nonzero(rrows[i].page(static_cast<int>(k))),
               tag + "n=" + std::to_string(frows[i].n) + " E^" + std::to_string(k));
    c.expect(nonzero(frows[i].limit) == nonzero(rrows[i].limit), tag + "n=" + std::to_string(frows[i].n) + " E^inf");
  }
}

void crit9(Crit& c) {
  size_t cases = 0;
  {
    PlumbingGraph g = load("sigma237.graph");
    LatticeContext ctx(g);
    compare_paths(c, ctx, ctx.zero_class(), {0}, "sigma237 ");
    ++cases;
  }
  {
    PlumbingGraph g = load("a2.graph");
    LatticeContext ctx(g);
    for (auto& h : ctx.all_classes()) {
      compare_paths(c, ctx, h, {0}, "a2 " + class_str(h) + " ");
      ++cases;
    }
  }
  // star graphs whose center is an SR set
  std::mt19937 rng(7);
  size_t stars = 0;
  for (size_t tries = 0; stars < 4 && tries < 5000; ++tries) {
    PlumbingGraph g;
    g.vertices.push_back({1, std::uniform_int_distribution<int64_t>(-3, -1)(rng)});
    for (int64_t i = 2; i <= 4; ++i) {
      g.vertices.push_back({i, std::uniform_int_distribution<int64_t>(-7, -2)(rng)});
      g.edges.push_back({0, static_cast<size_t>(i - 1)});
    }
    if (!is_negative_definite(intersection_matrix(g))) continue;
    if (!check_sr_set(g, {0}).confirmed) continue;
    LatticeContext ctx(g);
    long double vol = 1;
    for (auto x : default_rectangle(ctx)) vol *= x + 1;
    if (vol > 3000) continue;
    auto classes = ctx.all_classes();
    for (size_t k = 0; k < std::min<size_t>(2, classes.size()); ++k) {
      compare_paths(c, ctx, classes[k], {0}, serialize_graph(g) + class_str(classes[k]) + " ");
      ++cases;
    }
    ++stars;
  }
  c.expect(stars == 4, "found " + std::to_string(stars) + " star graphs");
  c.expect(cases >= 8, "only " + std::to_string(cases) + " cases");
}

// ---------------------------------------------------------------- 10
void crit10(Crit& c) {
  PlumbingGraph g = load("p2.graph");
  Decorated dec = apply_decorations(g);
  BlowUp P = blow_up(dec.graph, BlowUpCenter::at_arrow(0));
  LatticeContext ctx(P.graph);
  auto rc = std::make_shared<ReducedContext>(ctx, ctx.zero_class(), std::vector<size_t>{P.new_vertex});
  ArReport ar = ar_series(*rc, 40, 40);
  c.expect(ar.rational, "graph not rational");
  c.expect(!ar.pc.empty(), "empty series");
  std::set<Rat> ex;
  for (auto& [e, coef] : ar.pc.terms()) {
    if (e[0] > 40) continue;
    c.expect(coef == 0 || coef == 1, "coefficient " + coef.get_str() + " at t^" + rat_str(e[0]));
    if (coef != 0) ex.insert(e[0]);
  }
  c.expect(ex.count(Rat(0)) == 1, "constant term missing");
  c.expect(ex.size() > 5, "too few exponents");
  for (auto& a : ex)
    for (auto& b : ex)
      if (a + b <= 40) c.expect(ex.count(a + b) == 1, "not closed: " + rat_str(a) + "+" + rat_str(b));
  c.expect(ar.pc_zero_one && ar.pc_semigroup, "library flags disagree");
}

}  // namespace

int main() {
  struct Entry {
    int id;
    std::string name;
    std::function<void(Crit&)> fn;
    double limit;  // seconds, 0 = none
  };
  std::vector<Entry> all{
      {1, "two-node example homology", crit1, 600},
      {2, "two-node example degeneration", crit2, 0},
      {3, "two-node reduced model", crit3, 0},
      {4, "A_2 filtrations", crit4, 5},
      {5, "Sigma(2,3,7)", crit5, 2},
      {6, "single vertex family", crit6, 0},
      {7, "blow-up stability", crit7, 0},
      {8, "identity battery", crit8, 120},
      {9, "reduction equivalence", crit9, 0},
      {10, "curve semigroup recovery", crit10, 0},
  };
  int failed = 0;
  for (auto& e : all) {
    Crit c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(c);
    } catch (const std::exception& ex) {
      c.fails.push_back(std::string("exception: ") + ex.what());
    }
    double t = seconds_since(t0);
    if (e.limit > 0 && t > e.limit) c.fails.push_back("runtime " + std::to_string(t) + "s over " + std::to_string(e.limit) + "s");
    bool ok = c.fails.empty();
    failed += !ok;
    std::printf("%s %d %s (%.2fs)\n", ok ? "PASS" : "FAIL", e.id, e.name.c_str(), t);
    for (size_t i = 0; i < c.fails.size() && i < 20; ++i) std::printf("    %s\n", c.fails[i].c_str());
    if (c.fails.size() > 20) std::printf("    ... %zu more\n", c.fails.size() - 20);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
