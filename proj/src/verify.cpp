#include "latcoh/verify.hpp"

#include <numeric>
#include <sstream>

namespace latcoh {

bool VerifyReport::ok() const { return failures() == 0; }

size_t VerifyReport::failures() const {
  size_t n = 0;
  for (auto& c : checks) n += !c.ok;
  return n;
}

namespace {

std::string vec_str(const IntVec& v) {
  std::string t;
  for (size_t i = 0; i < v.size(); ++i) t += (i ? "," : "") + std::to_string(v[i]);
  return t;
}

// T_i -> T for all T variables, keeping the rest
Series collapse_t(const Series& x, size_t nt, std::vector<std::string> rest) {
  size_t m = x.vars().size();
  std::vector<std::string> vars{"T"};
  vars.insert(vars.end(), rest.begin(), rest.end());
  std::vector<std::vector<Rat>> A(vars.size(), std::vector<Rat>(m, Rat(0)));
  for (size_t i = 0; i < nt; ++i) A[0][i] = 1;
  for (size_t j = nt; j < m; ++j) A[1 + j - nt][j] = 1;
  std::vector<std::optional<Rat>> b{std::nullopt};
  for (size_t j = nt; j < m; ++j) b.push_back(x.bound()[j]);
  return x.substitute(vars, A, b);
}

}  // namespace

VerifyReport verify_identities(const LatticeContext& ctx, const HClass& h, const IntVec& s, const VerifyOptions& opt) {
  VerifyReport R;
  R.h = class_str(h);
  R.s = vec_str(s);
  std::string qwin = "Q<=" + std::to_string(opt.nmax);
  auto add = [&](std::string name, bool ok, std::string detail, std::string win) {
    R.checks.push_back({std::move(name), ok, std::move(detail), std::move(win)});
  };
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const BudgetError&) {
      throw;
    } catch (const std::exception& e) {
      add(name, false, std::string("exception: ") + e.what(), "");
    }
  };

  SublevelModel model(std::make_shared<ChiWeight>(ctx, h), default_rectangle(ctx), opt.budget);
  int64_t eu = 0;
  guarded("eu", [&] {
    int64_t a = model.eu_from_homology(), b = model.eu_from_cubes();
    eu = a;
    add("eu", a == b, "homology " + std::to_string(a) + ", cubes " + std::to_string(b), "rectangle");
  });
  SwReport sw;
  guarded("hat-eu", [&] {
    sw = euler_and_sw(model);
    add("hat-eu", sw.hat_euler == 1, "alternating sum " + std::to_string(sw.hat_euler), "rectangle");
  });
  guarded("sw", [&] {
    std::string why;
    bool a = sw.chi_top.agrees(sw.cube_sum, &why);
    bool b = sw.pol_sw_at_one == eu;
    add("sw", a && b && sw.certified,
        (a ? "" : why + "; ") + "Pol_SW(1)=" + sw.pol_sw_at_one.get_str() + " eu=" + std::to_string(eu) +
            (sw.certified ? "" : "; tail not certified"),
        "Q<=" + std::to_string(sw.window));
  });

  auto S = full_spectral_sequence(ctx, h, s, opt.budget);
  std::vector<SpectralRow> rows = spectral_rows(*S, opt.nmax, true, opt.jobs);
  int kg = global_degeneration(rows);

  guarded("pages-euler", [&] {
    Series ref = at_t_one(at_h_minus_one(pe_series(rows, 1)));
    bool ok = true;
    std::string why;
    for (int k = 2; k <= kg + 1 && ok; ++k) ok = at_t_one(at_h_minus_one(pe_series(rows, k))).agrees(ref, &why);
    if (ok) ok = at_t_one(at_h_minus_one(pe_series(rows, 0))).agrees(ref, &why);
    add("pages-euler", ok, ok ? "pages 1.." + std::to_string(kg) + " and limit agree" : why, qwin);
  });

  guarded("pages-nonneg", [&] {
    bool ok = true;
    std::string why;
    for (int k = 1; k <= kg && ok; ++k) {
      Series a = at_t_one(pe_series(rows, k)), b = at_t_one(pe_series(rows, k + 1));
      // (PE_k - PE_{k+1})|_{T=1} = (h+1) R with R >= 0
      std::map<std::pair<Rat, Rat>, Int> diff;
      for (auto& [e, c] : a.terms()) diff[{e[0], e[1]}] += c;
      for (auto& [e, c] : b.terms()) diff[{e[0], e[1]}] -= c;
      std::map<Rat, std::map<Rat, Int>> byq;
      for (auto& [e, c] : diff)
        if (c != 0) byq[e.first][e.second] = c;
      for (auto& [q, poly] : byq) {
        // P = (1+h) R: r_d = c_d - r_{d-1}, and r_top must vanish
        Int run = 0;
        Rat lo = poly.begin()->first, top = poly.rbegin()->first;
        for (Rat d = lo; d <= top; d += 1) {
          run = (poly.count(d) ? poly[d] : Int(0)) - run;
          if (d < top && run < 0) {
            ok = false;
            why = "negative quotient for page " + std::to_string(k) + " at Q^" + rat_str(q);
          }
        }
        if (run != 0) {
          ok = false;
          why = "page " + std::to_string(k) + " difference not divisible by (h+1) at Q^" + rat_str(q);
        }
      }
      Series pk = pe_series(rows, k);
      for (auto& [e, c] : pk.terms())
        if (c < 0) ok = false;
    }
    add("pages-nonneg", ok, ok ? "coefficients nonnegative, differences divisible by (h+1)" : why, qwin);
  });

  Series pe1m = at_h_minus_one(pe_series(rows, 1));
  guarded("cube-formula", [&] {
    std::string why;
    bool ok = pe1_cube_formula(*S, opt.nmax).agrees(pe1m, &why);
    add("cube-formula", ok, ok ? "cube sum equals PE_1 at h=-1" : why, qwin);
  });

  std::vector<size_t> all(ctx.rank());
  std::iota(all.begin(), all.end(), 0);
  auto box = level_box(ctx, h, opt.nmax, all);
  guarded("motivic", [&] {
    if (!box) {
      add("motivic", true, "empty window", qwin);
      return;
    }
    Series zm = z_motivic(ctx, h, *box);
    Filtration f = build_filtration(s);
    std::vector<std::string> tv;
    for (auto i : f.support()) tv.push_back("T_" + std::to_string(ctx.graph().vertices[i].id));
    Series mg = pe1_multigraded(*S, opt.nmax, tv);
    Series sub = motivic_to_pe1(ctx, h, zm, s, opt.nmax);
    std::string why;
    bool ep = sub.agrees(at_h_minus_one(mg), &why);
    add("multigraded-substitution", ep, ep ? "substituted motivic series equals multigraded PE_1 at h=-1" : why, qwin);
    bool sp = collapse_t(mg, tv.size(), {"Q", "h"}).agrees(pe_series(rows, 1), &why);
    add("multigraded-specialization", sp, sp ? "T_i -> T gives PE_1" : why, qwin);
    bool three = collapse_t(sub, tv.size(), {"Q"}).agrees(pe1m, &why);
    add("three-way", three, three ? "motivic, cube and spectral PE_1 agree" : why, qwin);
    RatVec sh = ctx.s_h(h);
    std::vector<std::optional<Rat>> b;
    for (size_t i = 0; i < ctx.rank(); ++i) b.push_back(Rat((*box)[i]) + sh[i]);
    Series zh = z_h_component(ctx, h, b);
    bool lim = motivic_limit(zm).agrees(zh, &why);
    add("motivic-limit", lim, lim ? "q->1 gives Z_h" : why, "t<=box+s_h");
    bool zw = z_from_weights(ctx, h, *box).agrees(zh, &why);
    add("z-from-weights", zw, zw ? "weighted cube sums give Z_h" : why, "t<=box+s_h");
  });

  guarded("limit-homology", [&] {
    Series spec = at_t_one(pe_series(rows, 0));
    std::string why;
    bool ok = spec.agrees(sw.pe_inf_t1, &why);
    add("limit-homology", ok, ok ? "PE_inf(1,Q,h) equals the Poincare series of the levels" : why, qwin);
  });

  guarded("zeta-sum", [&] {
    Chi chi(ctx, h);
    bool ok = true;
    std::string det;
    for (auto& l : euh_samples(ctx, h, opt.samples)) {
      Int lhs = zeta_sum_not_above(ctx, h, l);
      int64_t rhs = chi(l) + eu;
      if (lhs != rhs) {
        ok = false;
        det += "l=(" + vec_str(l) + "): " + lhs.get_str() + " vs " + std::to_string(rhs) + "; ";
      }
    }
    add("zeta-sum", ok, ok ? std::to_string(opt.samples) + " samples" : det, "exact");
  });

  guarded("uniform-maximizer", [&] {
    int64_t delta = 1;
    for (size_t i = 0; i < ctx.rank(); ++i) delta = std::max<int64_t>(delta, static_cast<int64_t>(ctx.valency(i)) - 1);
    std::map<HClass, Series> lhs;
    lhs[h] = pe1m;
    ThetaReport th = theta_decomposition_check(ctx, s, delta, opt.nmax, lhs);
    std::ostringstream os;
    os << th.blocks << " blocks, " << th.cubes << " cubes, " << th.nonuniform << " non-uniform";
    for (auto& f : th.failures) os << "; " << f;
    add("uniform-maximizer", th.identity_holds, os.str(), qwin);
  });
  return R;
}

}  // namespace latcoh
