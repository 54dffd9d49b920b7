#include "weakiso/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "weakiso/analytic.hpp"
#include "weakiso/serialize.hpp"

namespace weakiso {

namespace {

Int parse_int(const std::string& s) { return decode_int(Json(s)); }

std::optional<Int> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_int(s);
}

Json opt_json(const std::string& s) { return s.empty() ? Json(nullptr) : Json(s); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << data;
  if (!out) throw std::invalid_argument("cannot write " + path);
}

// the run document: manifest (command, effective config, seed, version, input
// and output digests) plus the result itself
void emit(std::ostream& out, bool pretty, const std::string& command, std::uint64_t seed,
          const Json& config, const Json& inputs, Json outputs, const Json& result) {
  outputs["result"] = sha256_hex(result.dump());
  Json doc{{"manifest", Json{{"command", command},
                             {"config", config},
                             {"inputs", inputs},
                             {"outputs", std::move(outputs)},
                             {"seed", seed},
                             {"version", kToolVersion}}},
           {"result", result},
           {"schema", kRunSchema}};
  out << (pretty ? doc.dump(2) : doc.dump()) << "\n";
}

QuadInteger parse_alpha(const std::string& s, const Discriminant& d) {
  std::size_t comma = s.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("element format is x,y");
  return QuadInteger(parse_int(s.substr(0, comma)), parse_int(s.substr(comma + 1)), d);
}

SymPosDefIntMatrix corner_diag(long g, const Int& corner) {
  IntMatrix a(static_cast<std::size_t>(g), static_cast<std::size_t>(g));
  for (long i = 0; i < g; ++i) a.at(i, i) = 1;
  a.at(static_cast<std::size_t>(g - 1), static_cast<std::size_t>(g - 1)) = corner;
  return SymPosDefIntMatrix(std::move(a));
}

SymPosDefIntMatrix random_spd(Rng& rng, std::size_t g, long spread) {
  while (true) {
    IntMatrix b(g, g);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) b.at(i, j) = rng.range(-spread, spread);
    IntMatrix a = b.mul(b.transpose());
    for (std::size_t i = 0; i < g; ++i) a.at(i, i) += 1;
    bool small = true;
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j)
        if (abs(a.at(i, j)) > 900) small = false;
    if (!small) continue;
    auto made = SymPosDefIntMatrix::try_make(std::move(a));
    if (made) return *made;
  }
}

// determinant-1 map with lower left divisible by N, via the extended gcd
FractionalLinearMap random_gamma0(Rng& rng, const Int& N) {
  while (true) {
    Int c = N * Int(rng.range(-2, 2));
    if (abs(c) > 900) c = 0;
    Int a = rng.range(-9, 9);
    if (c == 0) {
      if (a != 1 && a != -1) continue;
      return {a, Int(rng.range(-9, 9)), Int(0), a};
    }
    Xgcd e = xgcd(a, c);
    if (e.g != 1) continue;
    FractionalLinearMap out{a, -e.v, c, e.u};
    if (abs(out.b) > 900 || abs(out.d) > 900) continue;
    return out;
  }
}

int run_find_field(std::ostream& out, bool pretty, const std::string& split,
                   const std::string& inert, const std::string& bound) {
  auto p = parse_opt(split), ell = parse_opt(inert);
  if (p && !is_prime(*p)) throw std::invalid_argument("split constraint must be prime");
  if (ell && !is_prime(*ell)) throw std::invalid_argument("inert constraint must be prime");
  Discriminant d = find_field(p, ell, parse_int(bound));
  Json config{{"bound", bound}, {"inert", opt_json(inert)}, {"split", opt_json(split)}};
  emit(out, pretty, "find-field", 0, config, Json::object(), Json::object(),
       Json{{"d", encode(d.value())}});
  return 0;
}

int run_find_primes(std::ostream& out, bool pretty, const std::string& ds, const std::string& gs,
                    const std::string& alphas, const std::string& counts,
                    const std::string& bound) {
  Discriminant d(parse_int(ds));
  QuadInteger alpha = parse_alpha(alphas, d);
  std::vector<Int> qs = find_q(d, parse_int(gs), alpha, parse_int(counts), parse_int(bound));
  Json primes = Json::array();
  for (const Int& q : qs) primes.push_back(encode(q));
  Json config{{"alpha", alphas}, {"bound", bound}, {"count", counts}, {"d", ds}, {"g", gs}};
  emit(out, pretty, "find-primes", 0, config, Json::object(), Json::object(),
       Json{{"primes", std::move(primes)}});
  return 0;
}

int run_gen_pairs(std::ostream& out, bool pretty, long g, long depth, const std::string& ells,
                  const std::string& ps, std::uint64_t seed, const std::string& field_bound,
                  const std::string& prime_bound, const std::string& out_path) {
  GenConfig cfg;
  cfg.g = g;
  cfg.depth = depth;
  cfg.p = parse_opt(ps);
  if (ells != "auto") cfg.ell = parse_int(ells);
  cfg.field_bound = parse_int(field_bound);
  cfg.prime_bound = parse_int(prime_bound);
  cfg.seed = seed;

  PairFamily fam = setup(cfg);
  SymPosDefIntMatrix A = corner_diag(g, fam.ell);
  SymPosDefIntMatrix Ap = corner_diag(g, fam.ell * fam.ell);
  for (long i = 0; i <= depth; ++i) fam.xs.push_back(build_x(fam, i, A));
  for (long i = 1; i <= depth; ++i) fam.partners[i] = partners(fam, i, A, Ap);

  Json doc = encode(make_bundle(fam, A, Ap));
  Json outputs{{"bundle", doc.at("digest")}};
  if (!out_path.empty()) write_file(out_path, (pretty ? doc.dump(2) : doc.dump()) + "\n");
  Json config{{"depth", depth},
              {"ell", ells},
              {"field_bound", field_bound},
              {"g", g},
              {"out", opt_json(out_path)},
              {"p", opt_json(ps)},
              {"prime_bound", prime_bound},
              {"seed", seed}};
  emit(out, pretty, "gen-pairs", seed, config, Json::object(), std::move(outputs), doc);
  return 0;
}

int run_check(std::ostream& out, std::ostream& err, bool pretty, int jobs,
              const std::string& path) {
  std::string raw = read_file(path);
  Json config{{"file", path}};
  Json inputs{{"bundle", sha256_hex(raw)}};
  Json doc;
  try {
    doc = Json::parse(raw);
  } catch (const Json::parse_error& e) {
    err << "integrity failure: bundle is not JSON: " << e.what() << "\n";
    return 3;
  }
  VerifyReport rep = verify_bundle(doc, jobs);
  Json result{{"certificates", rep.certificates}, {"failure", rep.failure}, {"valid", rep.valid}};
  emit(out, pretty, "check-weakiso", 0, config, inputs, Json::object(), result);
  if (!rep.valid) {
    err << "integrity failure: " << rep.failure << "\n";
    return 3;
  }
  return 0;
}

int run_snf(std::ostream& out, bool pretty, const std::string& path) {
  std::string raw = read_file(path);
  SymPosDefIntMatrix A = decode_matrix_doc(Json::parse(raw));
  SNFResult r = smith_normal_form(A);
  Json divisors = Json::array();
  for (const Int& v : r.divisors()) divisors.push_back(encode(v));
  Json result{{"A", encode(A)},
              {"D", encode(r.D)},
              {"U", encode(r.U)},
              {"V", encode(r.V)},
              {"divisors", std::move(divisors)}};
  emit(out, pretty, "snf", 0, Json{{"file", path}}, Json{{"matrix", sha256_hex(raw)}},
       Json::object(), result);
  return 0;
}

int run_pullback(std::ostream& out, bool pretty, const std::string& fpath,
                 const std::string& apath) {
  std::string fraw = read_file(fpath), araw = read_file(apath);
  FormalQExpansion f = decode_qexp(Json::parse(fraw));
  SymPosDefIntMatrix A = decode_matrix_doc(Json::parse(araw));
  PullbackSeries series = pullback(f, A);
  Json terms = Json::array();
  for (const auto& [n, c] : series.terms) terms.push_back(Json{{"c", encode(c)}, {"n", encode(n)}});
  Json result{{"characteristic", encode(series.characteristic)}, {"terms", std::move(terms)}};
  emit(out, pretty, "qexp-pullback", 0, Json{{"expansion", fpath}, {"matrix", apath}},
       Json{{"expansion", sha256_hex(fraw)}, {"matrix", sha256_hex(araw)}}, Json::object(), result);
  return 0;
}

int run_witness(std::ostream& out, bool pretty, const std::string& fpath, const std::string& ells,
                std::uint64_t seed) {
  std::string fraw = read_file(fpath);
  FormalQExpansion f = decode_qexp(Json::parse(fraw));
  Int ell = parse_int(ells);
  NonvanishingWitness w = nonvanishing_witness(f, ell, seed);
  if (pullback(f, w.A).at(w.n) != w.c0)
    throw integrity_error("witness coefficient does not survive into the pullback");
  Json result{{"A", encode(w.A)}, {"c0", encode(w.c0)}, {"n", encode(w.n)}};
  emit(out, pretty, "qexp-witness", seed, Json{{"ell", ells}, {"expansion", fpath}, {"seed", seed}},
       Json{{"expansion", sha256_hex(fraw)}}, Json::object(), result);
  return 0;
}

int run_analytic(std::ostream& out, std::ostream& err, bool pretty, int jobs, long trials, long g,
                 std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("at least one trial");
  if (g < 1 || g > 6) throw std::invalid_argument("degree must be between 1 and 6");
  std::vector<double> eq(trials), rf(trials);
  std::vector<char> ok(trials);
  Rng base(seed);
  parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t i) {
    Rng rng = base.fork(i + 1);
    SymPosDefIntMatrix A = random_spd(rng, static_cast<std::size_t>(g), 3);
    FractionalLinearMap sigma = random_gamma0(rng, A.det());
    Complex tau(rng.range(-8, 8) / 4.0, 0.6 + rng.range(0, 24) / 10.0);
    CheckReport e = equivariance_check(sigma, tau, A);
    CheckReport r = riemann_form_check(tau, A);
    eq[i] = e.max_residual;
    rf[i] = r.max_residual;
    ok[i] = e.pass && r.pass;
  });
  double eq_worst = 0, rf_worst = 0;
  bool pass = true;
  for (long i = 0; i < trials; ++i) {
    eq_worst = std::max(eq_worst, eq[static_cast<std::size_t>(i)]);
    rf_worst = std::max(rf_worst, rf[static_cast<std::size_t>(i)]);
    pass = pass && ok[static_cast<std::size_t>(i)];
  }
  Json result{{"equivariance_worst", eq_worst}, {"g", g},          {"pass", pass},
              {"riemann_worst", rf_worst},      {"tolerance", 1e-9}, {"trials", trials}};
  emit(out, pretty, "analytic-check", seed, Json{{"g", g}, {"seed", seed}, {"trials", trials}},
       Json::object(), Json::object(), result);
  if (!pass) {
    err << "integrity failure: an analytic identity check failed\n";
    return 3;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"products of CM elliptic curves: construction, decision, certification"};
  app.require_subcommand(1);
  app.fallthrough();
  bool pretty = false;
  int jobs = 1;
  app.add_flag("--pretty", pretty, "indent JSON output");
  app.add_option("--jobs", jobs, "worker threads; never changes any output")
      ->check(CLI::PositiveNumber);

  auto* ff = app.add_subcommand("find-field", "smallest usable field with the given splitting");
  std::string ff_split, ff_inert, ff_bound = "200";
  ff->add_option("--split", ff_split, "prime that must split");
  ff->add_option("--inert", ff_inert, "prime that must stay inert");
  ff->add_option("--bound", ff_bound, "bound on |d|")->envname("WEAKISO_FIELD_BOUND");

  auto* fp = app.add_subcommand("find-primes", "inert primes passing the root-solvability test");
  std::string fp_d, fp_g, fp_alpha, fp_count = "1", fp_bound = "5000";
  fp->add_option("--d", fp_d, "fundamental discriminant")->required();
  fp->add_option("--g", fp_g, "factor count")->required();
  fp->add_option("--alpha", fp_alpha, "generator as x,y")->required();
  fp->add_option("--count", fp_count, "how many primes");
  fp->add_option("--bound", fp_bound, "search bound")->envname("WEAKISO_PRIME_BOUND");

  auto* gp = app.add_subcommand("gen-pairs", "generate a certified family of partner points");
  long gp_g = 2, gp_depth = 1;
  std::string gp_ell = "auto", gp_p, gp_field_bound = "200", gp_prime_bound = "5000", gp_out;
  std::uint64_t gp_seed = 1;
  gp->add_option("--g", gp_g, "factor count");
  gp->add_option("--depth", gp_depth, "largest point index");
  gp->add_option("--ell", gp_ell, "chain prime, or auto");
  gp->add_option("--p", gp_p, "prime that must split in the field");
  gp->add_option("--seed", gp_seed, "recorded for replay");
  gp->add_option("--field-bound", gp_field_bound, "field search bound")
      ->envname("WEAKISO_FIELD_BOUND");
  gp->add_option("--prime-bound", gp_prime_bound, "prime search bound")
      ->envname("WEAKISO_PRIME_BOUND");
  gp->add_option("--out", gp_out, "also write the bundle to this file");

  auto* cw = app.add_subcommand("check-weakiso", "re-verify a bundle with the oracle only");
  std::string cw_file;
  cw->add_option("file", cw_file, "bundle path")->required();

  auto* sn = app.add_subcommand("snf", "factor a positive definite matrix as U D V");
  std::string sn_file;
  sn->add_option("file", sn_file, "matrix document path")->required();

  auto* qp = app.add_subcommand("qexp-pullback", "restrict an expansion along a matrix");
  std::string qp_f, qp_a;
  qp->add_option("expansion", qp_f, "expansion document path")->required();
  qp->add_option("matrix", qp_a, "matrix document path")->required();

  auto* qw = app.add_subcommand("qexp-witness", "nonvanishing restriction witness");
  std::string qw_f, qw_ell;
  std::uint64_t qw_seed = 1;
  qw->add_option("expansion", qw_f, "expansion document path")->required();
  qw->add_option("--ell", qw_ell, "determinant prime")->required();
  qw->add_option("--seed", qw_seed, "sampling seed");

  auto* ac = app.add_subcommand("analytic-check", "randomized floating-point identity checks");
  long ac_trials = 20, ac_g = 2;
  std::uint64_t ac_seed = 1;
  ac->add_option("--trials", ac_trials, "instance count");
  ac->add_option("--g", ac_g, "matrix size");
  ac->add_option("--seed", ac_seed, "instance generator seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*ff) return run_find_field(out, pretty, ff_split, ff_inert, ff_bound);
    if (*fp) return run_find_primes(out, pretty, fp_d, fp_g, fp_alpha, fp_count, fp_bound);
    if (*gp)
      return run_gen_pairs(out, pretty, gp_g, gp_depth, gp_ell, gp_p, gp_seed, gp_field_bound,
                           gp_prime_bound, gp_out);
    if (*cw) return run_check(out, err, pretty, jobs, cw_file);
    if (*sn) return run_snf(out, pretty, sn_file);
    if (*qp) return run_pullback(out, pretty, qp_f, qp_a);
    if (*qw) return run_witness(out, pretty, qw_f, qw_ell, qw_seed);
    if (*ac) return run_analytic(out, err, pretty, jobs, ac_trials, ac_g, ac_seed);
    err << "usage error: no subcommand\n";
    return 1;
  } catch (const search_error& e) {
    err << "search failure: " << e.what() << "\n";
    return 2;
  } catch (const integrity_error& e) {
    err << "integrity failure: " << e.what() << "\n";
    return 3;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace weakiso
