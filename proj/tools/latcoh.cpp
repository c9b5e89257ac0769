#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "latcoh/export.hpp"

using namespace latcoh;

namespace {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string input;
  std::string cls, s, rect, bad, format, center;
  int margin = 0;
  int64_t nmax = 0;
  bool nmax_set = false;
  int page = 0;
  size_t jobs = 1;
  size_t budget = 0;
  bool split = false;
};

IntVec parse_list(const std::string& text, const char* what) {
  IntVec v;
  if (text.empty()) return v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      long long x = std::stoll(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      v.push_back(x);
    } catch (const std::exception&) {
      throw ParseError(std::string("cannot parse ") + what + " entry '" + tok + "'");
    }
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Everything resolved from the flags, validated before any computation.
struct Resolved {
  Config cfg;
  PlumbingGraph input_graph;
  Decorated dec;
  std::unique_ptr<LatticeContext> ctx;
  HClass h;
  IntVec class_coeffs;
  IntVec s;
  IntVec rect;  // empty: default
  std::vector<size_t> bad;
  std::string format;

  Json config_json() const {
    Json j;
    j["input"] = cfg.input;
    j["class"] = int_vec_json(class_coeffs);
    j["class_label"] = class_str(h);
    j["s"] = int_vec_json(s);
    j["rect"] = rect.empty() ? Json(nullptr) : int_vec_json(rect);
    j["margin"] = cfg.margin;
    j["nmax"] = cfg.nmax;
    j["page"] = cfg.page;
    Json b = Json::array();
    for (auto i : bad) b.push_back(dec.graph.vertices[i].id);
    j["bad"] = b;
    j["format"] = format;
    j["jobs"] = cfg.jobs;
    j["budget"] = cfg.budget;
    if (!cfg.center.empty()) j["center"] = cfg.center;
    return j;
  }
};

Resolved resolve(const Config& cfg, const std::string& default_format, int64_t default_nmax) {
  Resolved r;
  r.cfg = cfg;
  r.format = cfg.format.empty() ? default_format : cfg.format;
  if (r.format != "json" && r.format != "text" && r.format != "dot") throw ParseError("unknown format " + r.format);
  if (!cfg.nmax_set) r.cfg.nmax = default_nmax;
  if (cfg.jobs == 0) r.cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  if (cfg.budget == 0) r.cfg.budget = default_budget();
  if (cfg.margin < 0) throw ValidationError("margin must be nonnegative");
  r.input_graph = parse_graph(read_file(cfg.input));
  r.dec = apply_decorations(r.input_graph);
  r.ctx = std::make_unique<LatticeContext>(r.dec.graph);
  size_t n = r.dec.graph.size();
  r.class_coeffs = parse_list(cfg.cls, "--class");
  if (r.class_coeffs.empty()) r.class_coeffs.assign(n, 0);
  if (r.class_coeffs.size() != n) throw ValidationError("--class needs one coefficient per vertex");
  r.h = r.ctx->class_from_dual_coeffs(r.class_coeffs);
  r.s = parse_list(cfg.s, "--s");
  if (r.s.empty()) {
    bool any = false;
    for (auto x : r.dec.s) any = any || x != 0;
    r.s = any ? r.dec.s : IntVec(n, 1);
  }
  if (r.s.size() != n) throw ValidationError("--s needs one coefficient per vertex");
  for (auto x : r.s)
    if (x < 0) throw ValidationError("--s coefficients must be nonnegative (s in the Lipman cone)");
  if (std::all_of(r.s.begin(), r.s.end(), [](int64_t x) { return x == 0; }))
    throw ValidationError("--s must be nonzero");
  r.rect = parse_list(cfg.rect, "--rect");
  for (auto x : r.rect)
    if (x < 0) throw ValidationError("--rect entries must be nonnegative");
  for (auto id : parse_list(cfg.bad, "--bad")) {
    try {
      r.bad.push_back(r.dec.graph.index_of(id));
    } catch (const std::exception&) {
      throw ValidationError("--bad refers to unknown vertex " + std::to_string(id));
    }
  }
  size_t want = r.bad.empty() ? n : r.bad.size();
  if (!r.rect.empty() && r.rect.size() != want) throw ValidationError("--rect has the wrong length");
  return r;
}

IntVec rectangle_for(const Resolved& r, const IntVec& dflt) {
  IntVec c = r.rect.empty() ? dflt : r.rect;
  for (auto& x : c) x += r.cfg.margin;
  return c;
}

std::shared_ptr<ReducedContext> reduced_ctx(const Resolved& r) {
  return std::make_shared<ReducedContext>(*r.ctx, r.h, r.bad);
}

SublevelModel model_for(const Resolved& r) {
  if (r.bad.empty())
    return SublevelModel(std::make_shared<ChiWeight>(*r.ctx, r.h), rectangle_for(r, default_rectangle(*r.ctx)),
                         r.cfg.budget);
  auto rc = reduced_ctx(r);
  return reduced_model(rc, rectangle_for(r, rc->default_rect()), r.cfg.budget);
}

std::shared_ptr<SpectralSequence> sequence_for(const Resolved& r) {
  if (r.bad.empty()) return full_spectral_sequence(*r.ctx, r.h, r.s, r.cfg.budget);
  return reduced_spectral_sequence(reduced_ctx(r), r.s, r.cfg.budget);
}

void emit(const Resolved& r, const std::string& command, const Json& result) {
  Json out;
  out["schema"] = kSchema;
  out["command"] = command;
  out["config"] = r.config_json();
  out["result"] = result;
  std::cout << out.dump(2) << "\n";
}

std::string vec_text(const RatVec& v) {
  std::string t = "(";
  for (size_t i = 0; i < v.size(); ++i) t += (i ? "," : "") + rat_str(v[i]);
  return t + ")";
}

int cmd_invariants(const Resolved& r) {
  const LatticeContext& ctx = *r.ctx;
  Json j = invariants_json(ctx, r.h);
  auto rat = is_rational(ctx.graph());
  j["rational"] = rat.rational;
  j["fundamental_cycle"] = int_vec_json(rat.zmin);
  j["negative_definite"] = is_negative_definite(ctx.M());
  if (!r.bad.empty()) {
    auto v = check_sr_set(ctx.graph(), r.bad);
    j["sr_set"] = {{"confirmed", v.confirmed}, {"delta", v.delta}};
  }
  if (r.format == "json") {
    emit(r, "invariants", j);
    return 0;
  }
  std::cout << "rank " << ctx.rank() << "\n";
  std::cout << "det " << ctx.det().get_str() << "\n";
  std::cout << "H ";
  if (ctx.h_factors().empty()) std::cout << "trivial";
  for (size_t i = 0; i < ctx.h_factors().size(); ++i) std::cout << (i ? " + " : "") << "Z/" << ctx.h_factors()[i].get_str();
  std::cout << "\nM\n";
  for (auto& row : ctx.M()) {
    for (size_t i = 0; i < row.size(); ++i) std::cout << (i ? " " : "") << row[i];
    std::cout << "\n";
  }
  std::cout << "Z_K " << vec_text(ctx.ZK()) << "\n";
  std::cout << "class " << class_str(r.h) << "\n";
  std::cout << "s_h " << vec_text(ctx.s_h(r.h)) << "\n";
  std::cout << "k_h " << vec_text(ctx.k_h(r.h)) << "\n";
  std::cout << "rational " << (rat.rational ? "yes" : "no") << "\n";
  if (j.contains("sr_set")) std::cout << "sr_set " << (j["sr_set"]["confirmed"].get<bool>() ? "confirmed" : "not confirmed") << "\n";
  return 0;
}

int cmd_homology(const Resolved& r) {
  SublevelModel m = model_for(r);
  Json j = homology_json(m);
  if (r.format == "json") {
    emit(r, "homology", j);
    return 0;
  }
  std::cout << "rectangle " << j["rectangle"].dump() << "\n";
  for (auto& lv : j["levels"]) {
    std::cout << "n=" << lv["n"].get<int64_t>() << " components " << lv["components"].get<size_t>() << " homology";
    for (auto& g : lv["homology"]) {
      std::cout << " " << g["rank"].get<size_t>();
      for (auto& t : g["torsion"]) std::cout << "+Z/" << t.get<std::string>();
    }
    std::cout << "\n";
  }
  size_t q = 0;
  for (auto& mod : j["modules"]) std::cout << "H_" << q++ << " = " << mod["text"].get<std::string>() << "\n";
  std::cout << "eu " << j["eu"].get<int64_t>() << "\n";
  return 0;
}

int cmd_root(const Resolved& r) {
  SublevelModel m = model_for(r);
  GradedRoot g = m.graded_root();
  if (r.format == "dot") {
    std::cout << g.dot();
    return 0;
  }
  if (r.format == "json") {
    emit(r, "root", {{"nodes", root_json(g)}});
    return 0;
  }
  std::map<int64_t, size_t> per;
  for (auto& n : g.nodes) ++per[n.level];
  for (auto& [lvl, c] : per) std::cout << "level " << lvl << ": " << c << " vertices\n";
  return 0;
}

int cmd_specseq(const Resolved& r) {
  auto S = sequence_for(r);
  auto rows = spectral_rows(*S, r.cfg.nmax, true, r.cfg.jobs);
  int kg = global_degeneration(rows);
  if (r.format == "json") {
    Json j;
    j["lowest_level"] = rows.empty() ? Json(nullptr) : Json(rows.front().n);
    j["global_degeneration"] = kg;
    j["rows"] = rows_json(rows, r.cfg.page);
    if (r.cfg.split) {
      Json sp = Json::array();
      for (auto& row : rows) sp.push_back({{"n", row.n}, {"parts", rows_json(S->root_split(row.n), r.cfg.page)}});
      j["root_split"] = sp;
    }
    emit(r, "specseq", j);
    return 0;
  }
  for (auto& row : rows) std::cout << row_text(row, r.cfg.page);
  std::cout << "global degeneration " << kg << "\n";
  return 0;
}

int cmd_series(const Resolved& r) {
  auto S = sequence_for(r);
  auto rows = spectral_rows(*S, r.cfg.nmax, true, r.cfg.jobs);
  int kg = global_degeneration(rows);
  Json j;
  Json pe = Json::object();
  for (int k = 1; k <= kg; ++k) pe[std::to_string(k)] = series_json(pe_series(rows, k));
  pe["inf"] = series_json(pe_series(rows, 0));
  j["pe"] = pe;
  Series cube = pe1_cube_formula(*S, r.cfg.nmax);
  j["pe1_cube_formula"] = series_json(cube);
  j["pe1_cube_matches"] = cube.agrees(at_h_minus_one(pe_series(rows, 1)));
  SublevelModel m = model_for(r);
  j["sw"] = sw_json(euler_and_sw(m));
  if (r.bad.empty()) {
    j["tail"] = tail_json(pe_infty_tail(*r.ctx, r.h, r.s, rows));
    std::vector<size_t> all(r.ctx->rank());
    std::iota(all.begin(), all.end(), 0);
    if (auto box = level_box(*r.ctx, r.h, r.cfg.nmax, all)) {
      RatVec sh = r.ctx->s_h(r.h);
      std::vector<std::optional<Rat>> b;
      for (size_t i = 0; i < sh.size(); ++i) b.push_back(Rat((*box)[i]) + sh[i]);
      j["z_h"] = series_json(z_h_component(*r.ctx, r.h, b));
    }
  } else if (r.bad.size() == 1) {
    auto rc = reduced_ctx(r);
    int64_t lw = rc->default_rect()[0] + std::max<int64_t>(r.cfg.nmax, 10);
    j["ar"] = ar_json(ar_series(*rc, lw, r.cfg.nmax));
  }
  if (r.format == "json") {
    emit(r, "series", j);
    return 0;
  }
  for (int k = 1; k <= kg; ++k) std::cout << "PE_" << k << "\n" << pe_series(rows, k).text();
  std::cout << "PE_inf\n" << pe_series(rows, 0).text();
  std::cout << "Pol_SW(1) " << j["sw"]["pol_sw_at_one"].get<std::string>() << "\n";
  if (j.contains("tail")) std::cout << "period p " << j["tail"]["p"].get<int64_t>() << "\n";
  return 0;
}

int cmd_reduce(const Resolved& r) {
  if (r.bad.empty()) throw ValidationError("reduce needs --bad");
  auto rc = reduced_ctx(r);
  auto v = check_sr_set(r.ctx->graph(), r.bad);
  IntVec rect = rectangle_for(r, rc->default_rect());
  SublevelModel m = reduced_model(rc, rect, r.cfg.budget);
  if (r.format == "json") {
    Json j;
    j["sr_set"] = {{"confirmed", v.confirmed}, {"delta", v.delta}};
    j["rectangle"] = int_vec_json(rect);
    j["wbar"] = wbar_json(*rc, rect);
    Json mods = Json::array();
    for (auto& z : m.zu_modules()) mods.push_back(module_json(z));
    j["modules"] = mods;
    j["eu"] = m.euler_characteristic();
    emit(r, "reduce", j);
    return 0;
  }
  std::cout << (rc->rank() <= 2 ? wbar_grid(*rc, rect) : std::string("(grid available for reduced rank <= 2)\n"));
  return 0;
}

BlowUpCenter parse_center(const std::string& c) {
  auto colon = c.find(':');
  if (colon == std::string::npos) throw ParseError("--center must be vertex:ID, edge:A:B or arrow:K");
  std::string kind = c.substr(0, colon), rest = c.substr(colon + 1);
  std::replace(rest.begin(), rest.end(), ':', ',');
  IntVec v = parse_list(rest, "--center");
  if (kind == "vertex" && v.size() == 1) return BlowUpCenter::vertex(v[0]);
  if (kind == "edge" && v.size() == 2) return BlowUpCenter::edge(v[0], v[1]);
  if (kind == "arrow" && v.size() == 1 && v[0] >= 0) return BlowUpCenter::at_arrow(static_cast<size_t>(v[0]));
  throw ParseError("--center must be vertex:ID, edge:A:B or arrow:K");
}

int cmd_blowup(const Resolved& r) {
  if (r.cfg.center.empty()) throw ValidationError("blowup needs --center");
  // blow up the graph as given (decorations untouched), s refers to that graph
  const PlumbingGraph& g = r.input_graph;
  BlowUp B;
  try {
    B = blow_up(g, parse_center(r.cfg.center));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  IntVec s = parse_list(r.cfg.s, "--s");
  if (s.empty()) s = arrow_divisor(g);
  if (s.size() != g.size()) throw ValidationError("--s needs one coefficient per vertex of the input graph");
  IntVec s2 = transport_semigroup(B, g, s);
  if (r.format == "json") {
    Json j;
    j["graph"] = serialize_graph(B.graph);
    j["new_vertex"] = B.graph.vertices[B.new_vertex].id;
    j["base_point"] = B.base_point;
    Json M = Json::array();
    for (auto& row : B.pullback.matrix) M.push_back(int_vec_json(row));
    j["pullback"] = M;
    j["s"] = int_vec_json(s2);
    emit(r, "blowup", j);
    return 0;
  }
  std::cout << serialize_graph(B.graph);
  std::cout << "# new vertex " << B.graph.vertices[B.new_vertex].id << (B.base_point ? " (base point)" : "") << "\n";
  std::cout << "# s";
  for (auto x : s2) std::cout << " " << x;
  std::cout << "\n";
  return 0;
}

int cmd_verify(const Resolved& r) {
  const LatticeContext& ctx = *r.ctx;
  std::vector<HClass> classes;
  if (r.cfg.cls.empty())
    classes = ctx.all_classes();
  else
    classes.push_back(r.h);
  std::vector<IntVec> ss;
  if (!r.cfg.s.empty() || std::any_of(r.dec.s.begin(), r.dec.s.end(), [](int64_t x) { return x != 0; })) {
    ss.push_back(r.s);
  } else {
    ss.push_back(IntVec(ctx.rank(), 1));
    IntVec e(ctx.rank(), 0);
    e[0] = 1;
    if (ctx.rank() > 1) ss.push_back(e);
  }
  VerifyOptions o;
  o.nmax = r.cfg.nmax;
  o.jobs = r.cfg.jobs;
  o.budget = r.cfg.budget;
  Json all = Json::array();
  size_t failures = 0;
  std::ostringstream txt;
  for (auto& h : classes)
    for (auto& s : ss) {
      VerifyReport rep = verify_identities(ctx, h, s, o);
      failures += rep.failures();
      all.push_back(verify_json(rep));
      for (auto& c : rep.checks)
        txt << (c.ok ? "PASS " : "FAIL ") << "class " << rep.h << " s " << rep.s << " " << c.name << " [" << c.window
            << "] " << c.detail << "\n";
    }
  if (r.format == "json")
    emit(r, "verify", {{"reports", all}, {"failures", failures}});
  else
    std::cout << txt.str() << (failures ? "FAILED " + std::to_string(failures) + " checks\n" : "all checks passed\n");
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice homology, its spectral sequence and Poincare series"};
  app.require_subcommand(1);
  Config cfg;
  struct Cmd {
    const char* name;
    const char* help;
    std::string fmt;
    int64_t nmax;
    int (*run)(const Resolved&);
  };
  std::vector<Cmd> cmds = {
      {"invariants", "intersection form, H, Z_K, s_h, k_h", "text", 0, cmd_invariants},
      {"homology", "lattice homology of the weighted cubes", "text", 0, cmd_homology},
      {"root", "graded root", "dot", 0, cmd_root},
      {"specseq", "spectral sequence pages for n <= nmax", "json", 10, cmd_specseq},
      {"series", "Poincare series, tail and SW reports", "json", 20, cmd_series},
      {"reduce", "reduced weights over a bad vertex set", "text", 0, cmd_reduce},
      {"blowup", "blow up a vertex, edge or arrow", "text", 0, cmd_blowup},
      {"verify", "identity battery", "text", 6, cmd_verify},
  };
  std::vector<CLI::App*> subs;
  for (auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("graph", cfg.input, "graph file")->required();
    sub->add_option("--class", cfg.cls, "class h as E^*-coefficients, comma separated");
    sub->add_option("--s", cfg.s, "semigroup element as E^*-coefficients");
    sub->add_option("--rect", cfg.rect, "rectangle bound");
    sub->add_option("--margin", cfg.margin, "extra rectangle margin");
    sub->add_option("--nmax", cfg.nmax, "top level n")->each([&](const std::string&) { cfg.nmax_set = true; });
    sub->add_option("--page", cfg.page, "only this page (0 = all)");
    sub->add_option("--bad", cfg.bad, "bad vertex ids, comma separated");
    sub->add_option("--format", cfg.format, "json | text | dot");
    sub->add_option("--jobs", cfg.jobs, "worker threads (0 = all cores)");
    sub->add_option("--budget", cfg.budget, "cube slot budget (default LATCOH_BUDGET or built-in)");
    if (std::string(c.name) == "blowup") sub->add_option("--center", cfg.center, "vertex:ID | edge:A:B | arrow:K");
    if (std::string(c.name) == "specseq") sub->add_flag("--split", cfg.split, "split rows by components of S_n");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    for (size_t i = 0; i < cmds.size(); ++i)
      if (subs[i]->parsed()) {
        Resolved r = resolve(cfg, cmds[i].fmt, cmds[i].nmax);
        return cmds[i].run(r);
      }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind == GraphError::Syntax ? 2 : 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
