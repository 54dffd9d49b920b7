#include "weakiso/serialize.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "weakiso/psi_map.hpp"

namespace weakiso {

namespace {

bool decimal_shape(const std::string& s) {
  std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return false;
  if (s[i] == '0') return s.size() == i + 1;  // a lone zero, never a leading one
  return std::all_of(s.begin() + static_cast<long>(i), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

Int det_power_check(const Int& det, const Int& ell) {
  Int d = det;
  while (d != 1) {
    if (mod_floor(d, ell) != 0) bad("determinant is not a power of the chain prime");
    d /= ell;
  }
  return det;
}

bool hex_digest_shape(const std::string& s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

}  // namespace

Json encode(const Int& n) { return Json(n.get_str()); }

Int decode_int(const Json& j) {
  if (!j.is_string()) bad("integer literals are decimal strings");
  const std::string& s = j.get_ref<const std::string&>();
  if (!decimal_shape(s) || s == "-0") bad("malformed integer literal: " + s);
  return Int(s);
}

Json encode(const Rat& r) { return Json(r.get_str()); }

Rat decode_rat(const Json& j) {
  if (!j.is_string()) bad("rational literals are decimal strings");
  const std::string& s = j.get_ref<const std::string&>();
  std::size_t slash = s.find('/');
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!decimal_shape(num) || num == "-0" || !decimal_shape(den)) bad("malformed rational: " + s);
  Int top(num), bot(den);
  Rat r(top, bot);
  if (r.get_den() == 0) bad("zero denominator: " + s);
  r.canonicalize();
  if (r.get_str() != s) bad("rational is not in lowest terms: " + s);
  return r;
}

long decode_long(const Json& j) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) bad("expected an integer");
  auto v = j.get<std::int64_t>();
  if (v != static_cast<long>(v)) bad("integer out of range");
  return static_cast<long>(v);
}

std::uint64_t decode_u64(const Json& j) {
  if (!j.is_number_unsigned()) bad("expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

bool decode_bool(const Json& j) {
  if (!j.is_boolean()) bad("expected a boolean");
  return j.get<bool>();
}

std::string decode_string(const Json& j) {
  if (!j.is_string()) bad("expected a string");
  return j.get<std::string>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad("expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing key: ") + key);
  return *it;
}

void require_keys(const Json& j, const std::vector<std::string>& keys) {
  if (!j.is_object()) bad("expected an object");
  if (j.size() != keys.size()) bad("unexpected key count");
  for (const auto& k : keys)
    if (!j.contains(k)) bad("missing key: " + k);
}

Json encode(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(encode(m.at(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

IntMatrix decode_int_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) bad("matrix must be a nonempty array of rows");
  std::size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) bad("matrix rows must be nonempty arrays");
    if (cols == 0) cols = row.size();
    if (row.size() != cols) bad("matrix rows have unequal lengths");
  }
  IntMatrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i)
    for (std::size_t k = 0; k < cols; ++k) m.at(i, k) = decode_int(j[i][k]);
  return m;
}

Json encode(const SymPosDefIntMatrix& a) { return encode(a.entries()); }

SymPosDefIntMatrix decode_spd_matrix(const Json& j) { return SymPosDefIntMatrix(decode_int_matrix(j)); }

Json encode(const QuadInteger& a) { return Json{{"x", encode(a.x)}, {"y", encode(a.y)}}; }

QuadInteger decode_quad_integer(const Json& j, const Discriminant& d) {
  require_keys(j, {"x", "y"});
  return QuadInteger(decode_int(field(j, "x")), decode_int(field(j, "y")), d);
}

Json encode(const TorsorElement& t) {
  return Json{{"d", encode(t.d)}, {"q", encode(t.q)}, {"x", encode(t.x)}, {"y", encode(t.y)}};
}

TorsorElement decode_torsor_element(const Json& j) {
  require_keys(j, {"d", "q", "x", "y"});
  TorsorElement t{decode_int(field(j, "x")), decode_int(field(j, "y")), decode_int(field(j, "q")),
                  decode_int(field(j, "d"))};
  Discriminant d(t.d);  // validates fundamental
  if (!is_prime(t.q) || kronecker_symbol(t.d, t.q) != -1) bad("coordinate prime must be inert");
  bool canonical = (t.y == 1 && t.x >= 0 && t.x < t.q) || (t.y == 0 && t.x == 1);
  if (!canonical) bad("coordinate is not a canonical representative");
  return t;
}

Json encode(const Lattice& L) {
  return Json{{"a", encode(L.a())},     {"b", encode(L.b())}, {"c", encode(L.c())},
              {"d", encode(L.disc().value())}, {"den", encode(L.den())}};
}

Lattice decode_lattice(const Json& j) {
  require_keys(j, {"a", "b", "c", "d", "den"});
  Discriminant d(decode_int(field(j, "d")));
  Int den = decode_int(field(j, "den")), a = decode_int(field(j, "a"));
  Int b = decode_int(field(j, "b")), c = decode_int(field(j, "c"));
  if (den <= 0 || a <= 0 || c <= 0) bad("lattice entries out of range");
  Lattice L(d, den, {{a, Int(0)}, {b, c}});
  if (L.den() != den || L.a() != a || L.b() != b || L.c() != c)
    bad("lattice is not in canonical form");
  return L;
}

Json encode(const CMCurve& E) {
  Json prov = Json::array();
  for (const auto& [q, t] : E.provenance) prov.push_back(Json::array({encode(q), encode(t)}));
  return Json{{"lattice", encode(E.lattice)}, {"provenance", std::move(prov)}};
}

CMCurve decode_curve(const Json& j) {
  require_keys(j, {"lattice", "provenance"});
  Lattice L = decode_lattice(field(j, "lattice"));
  const Json& pj = field(j, "provenance");
  if (!pj.is_array()) bad("provenance must be an array");
  std::vector<std::pair<Int, TorsorElement>> prov;
  for (const auto& e : pj) {
    if (!e.is_array() || e.size() != 2) bad("provenance entries are [prime, coordinate] pairs");
    Int q = decode_int(e[0]);
    TorsorElement t = decode_torsor_element(e[1]);
    if (t.q != q || t.d != L.disc().value()) bad("provenance coordinate belongs to another group");
    prov.emplace_back(q, t);
  }
  return CMCurve::from_lattice(L, std::move(prov));
}

Json encode(const MarkedSubgroup& C) {
  Json coords = Json::array();
  for (const auto& [q, t] : C.coords) coords.push_back(Json::array({encode(q), encode(t)}));
  return Json{{"coords", std::move(coords)},
              {"modulus", encode(C.modulus)},
              {"parent", encode(C.parent)},
              {"witness", encode(C.witness)}};
}

MarkedSubgroup decode_marked_subgroup(const Json& j) {
  require_keys(j, {"coords", "modulus", "parent", "witness"});
  CMCurve parent = decode_curve(field(j, "parent"));
  Int modulus = decode_int(field(j, "modulus"));
  Lattice witness = decode_lattice(field(j, "witness"));
  if (modulus < 1) bad("subgroup order must be positive");
  if (witness.disc() != parent.disc()) bad("witness lives in another field");
  if (!witness.contains_lattice(parent.lattice) || parent.lattice.index_in(witness) != modulus)
    bad("witness does not contain the parent with the claimed index");
  const Json& cj = field(j, "coords");
  if (!cj.is_array()) bad("coords must be an array");
  std::vector<std::pair<Int, TorsorElement>> coords;
  std::set<Int> seen;
  for (const auto& e : cj) {
    if (!e.is_array() || e.size() != 2) bad("coords entries are [prime, coordinate] pairs");
    Int q = decode_int(e[0]);
    TorsorElement t = decode_torsor_element(e[1]);
    if (t.q != q || t.d != parent.disc().value()) bad("coordinate belongs to another group");
    if (mod_floor(modulus, q) != 0) bad("coordinate prime does not divide the order");
    if (!seen.insert(q).second) bad("repeated coordinate prime");
    coords.emplace_back(q, t);
  }
  return MarkedSubgroup{std::move(parent), std::move(modulus), std::move(coords), std::move(witness)};
}

Json encode(const WeakIsoCertificate& cert) {
  Json primes = Json::array();
  for (const Int& q : cert.fast_path.primes) primes.push_back(encode(q));
  return Json{{"fast_path", Json{{"applicable", cert.fast_path.applicable},
                                 {"note", cert.fast_path.note},
                                 {"primes", std::move(primes)},
                                 {"verdict", cert.fast_path.verdict}}},
              {"inputs_digest", cert.inputs_digest},
              {"oracle_path", Json{{"verdict", cert.oracle_path.verdict}}},
              {"verdict", cert.verdict}};
}

WeakIsoCertificate decode_certificate(const Json& j) {
  require_keys(j, {"fast_path", "inputs_digest", "oracle_path", "verdict"});
  WeakIsoCertificate cert;
  cert.verdict = decode_bool(field(j, "verdict"));
  const Json& fj = field(j, "fast_path");
  require_keys(fj, {"applicable", "note", "primes", "verdict"});
  cert.fast_path.applicable = decode_bool(field(fj, "applicable"));
  cert.fast_path.verdict = decode_bool(field(fj, "verdict"));
  cert.fast_path.note = decode_string(field(fj, "note"));
  const Json& pj = field(fj, "primes");
  if (!pj.is_array()) bad("prime list must be an array");
  for (const auto& e : pj) cert.fast_path.primes.push_back(decode_int(e));
  const Json& oj = field(j, "oracle_path");
  require_keys(oj, {"verdict"});
  cert.oracle_path.verdict = decode_bool(field(oj, "verdict"));
  cert.inputs_digest = decode_string(field(j, "inputs_digest"));
  if (!hex_digest_shape(cert.inputs_digest)) bad("inputs digest is not a sha256 hex string");
  return cert;
}

Json encode_qexp(const FormalQExpansion& f) {
  Json terms = Json::array();
  for (const auto& [q, c] : f.coeffs())
    terms.push_back(Json{{"c", encode(c)}, {"twice", encode(q.twice())}});
  return Json{{"characteristic", encode(f.characteristic())},
              {"schema", kQexpSchema},
              {"terms", std::move(terms)}};
}

FormalQExpansion decode_qexp(const Json& j) {
  require_keys(j, {"characteristic", "schema", "terms"});
  if (decode_string(field(j, "schema")) != kQexpSchema) bad("unknown expansion schema");
  FormalQExpansion f(decode_int(field(j, "characteristic")));
  const Json& tj = field(j, "terms");
  if (!tj.is_array()) bad("terms must be an array");
  std::set<std::string> seen;
  for (const auto& e : tj) {
    require_keys(e, {"c", "twice"});
    HalfIntegralMatrix Q(decode_int_matrix(field(e, "twice")));
    Rat c = decode_rat(field(e, "c"));
    if (c == 0) bad("zero coefficients are never stored");
    if (!seen.insert(Q.str()).second) bad("repeated term index");
    f.add_term(Q, c);
  }
  return f;
}

Json encode_matrix_doc(const SymPosDefIntMatrix& a) {
  return Json{{"matrix", encode(a)}, {"schema", kMatrixSchema}};
}

SymPosDefIntMatrix decode_matrix_doc(const Json& j) {
  require_keys(j, {"matrix", "schema"});
  if (decode_string(field(j, "schema")) != kMatrixSchema) bad("unknown matrix schema");
  return decode_spd_matrix(field(j, "matrix"));
}

PairBundle make_bundle(const PairFamily& fam, const SymPosDefIntMatrix& A,
                       const SymPosDefIntMatrix& Aprime) {
  std::vector<BundleEntry> entries;
  for (const auto& [i, list] : fam.partners) {
    const MarkedSubgroup& x = fam.xs.at(static_cast<std::size_t>(i));
    ProductVariety left = psi_general(x.parent, x, A);
    BundleEntry entry{i, left.factors, {}};
    for (const auto& pt : list) {
      ProductVariety right = psi_general(pt.point.parent, pt.point, Aprime);
      if (sha256_hex(canonical_dump(left, right)) != pt.certificate.inputs_digest)
        throw integrity_error("stored certificate does not match the recomputed images");
      entry.partners.push_back(BundlePartner{pt.kernel, pt.point, right.factors, pt.certificate});
    }
    entries.push_back(std::move(entry));
  }
  return PairBundle{fam.cfg, fam.field, fam.ell, fam.alpha, fam.qs, A, Aprime, fam.xs,
                    std::move(entries)};
}

Json encode(const PairBundle& b) {
  Json cfg{{"depth", b.cfg.depth},
           {"ell", b.cfg.ell ? encode(*b.cfg.ell) : Json(nullptr)},
           {"field_bound", encode(b.cfg.field_bound)},
           {"g", b.cfg.g},
           {"p", b.cfg.p ? encode(*b.cfg.p) : Json(nullptr)},
           {"prime_bound", encode(b.cfg.prime_bound)},
           {"seed", b.cfg.seed}};
  Json qs = Json::array();
  for (const Int& q : b.qs) qs.push_back(encode(q));
  Json xs = Json::array();
  for (const auto& x : b.xs) xs.push_back(encode(x));
  Json counts = Json::array();
  Json entries = Json::array();
  for (const auto& entry : b.entries) {
    counts.push_back(entry.partners.size());
    Json left = Json::array();
    for (const auto& E : entry.left) left.push_back(encode(E));
    Json partners = Json::array();
    for (const auto& pt : entry.partners) {
      Json right = Json::array();
      for (const auto& E : pt.right) right.push_back(encode(E));
      partners.push_back(Json{{"certificate", encode(pt.certificate)},
                              {"kernel", encode(pt.kernel)},
                              {"point", encode(pt.point)},
                              {"right", std::move(right)}});
    }
    entries.push_back(
        Json{{"index", entry.index}, {"left", std::move(left)}, {"partners", std::move(partners)}});
  }
  Json content{{"A", encode(b.A)},
               {"Aprime", encode(b.Aprime)},
               {"alpha", encode(b.alpha)},
               {"config", std::move(cfg)},
               {"counts", std::move(counts)},
               {"ell", encode(b.ell)},
               {"entries", std::move(entries)},
               {"field", encode(b.field.value())},
               {"qs", std::move(qs)},
               {"xs", std::move(xs)}};
  std::string digest = sha256_hex(content.dump());
  return Json{{"content", std::move(content)}, {"digest", digest}, {"schema", kBundleSchema}};
}

PairBundle decode_bundle(const Json& doc) {
  require_keys(doc, {"content", "digest", "schema"});
  if (decode_string(field(doc, "schema")) != kBundleSchema) bad("unknown bundle schema");
  const Json& content = field(doc, "content");
  if (decode_string(field(doc, "digest")) != sha256_hex(content.dump()))
    bad("content digest mismatch, the bundle was altered");
  require_keys(content, {"A", "Aprime", "alpha", "config", "counts", "ell", "entries", "field",
                         "qs", "xs"});

  const Json& cj = field(content, "config");
  require_keys(cj, {"depth", "ell", "field_bound", "g", "p", "prime_bound", "seed"});
  GenConfig cfg;
  cfg.g = decode_long(field(cj, "g"));
  cfg.depth = decode_long(field(cj, "depth"));
  if (!field(cj, "p").is_null()) cfg.p = decode_int(field(cj, "p"));
  if (!field(cj, "ell").is_null()) cfg.ell = decode_int(field(cj, "ell"));
  cfg.field_bound = decode_int(field(cj, "field_bound"));
  cfg.prime_bound = decode_int(field(cj, "prime_bound"));
  cfg.seed = decode_u64(field(cj, "seed"));
  if (cfg.g < 2 || cfg.depth < 0 || cfg.field_bound < 1 || cfg.prime_bound < 1)
    bad("configuration out of range");
  if ((cfg.p && !is_prime(*cfg.p)) || (cfg.ell && !is_prime(*cfg.ell)))
    bad("configured primes are not prime");

  Discriminant d(decode_int(field(content, "field")));
  if (d.has_extra_units()) bad("bundle field has extra units");
  Int ell = decode_int(field(content, "ell"));
  QuadInteger alpha = decode_quad_integer(field(content, "alpha"), d);
  if (!is_prime(ell) || kronecker_symbol(d.value(), ell) != 1) bad("chain prime must be split");
  if (alpha.norm() != ell || alpha.y <= 0) bad("chain witness does not realize the chain prime");
  if (cfg.ell && *cfg.ell != ell) bad("resolved chain prime contradicts the configuration");

  const Json& qj = field(content, "qs");
  if (!qj.is_array() || static_cast<long>(qj.size()) != cfg.depth) bad("wrong inert prime count");
  std::vector<Int> qs;
  std::set<Int> distinct;
  for (const auto& e : qj) {
    Int q = decode_int(e);
    if (!is_prime(q) || kronecker_symbol(d.value(), q) != -1) bad("family primes must be inert");
    if (q == ell || (cfg.p && q == *cfg.p)) bad("family prime collides with a split one");
    if (mod_floor(q + 1, Int(cfg.g)) != 0) bad("family prime is not -1 mod the factor count");
    if (!distinct.insert(q).second) bad("repeated family prime");
    qs.push_back(std::move(q));
  }

  SymPosDefIntMatrix A = decode_spd_matrix(field(content, "A"));
  SymPosDefIntMatrix Ap = decode_spd_matrix(field(content, "Aprime"));
  if (static_cast<long>(A.g()) != cfg.g || static_cast<long>(Ap.g()) != cfg.g)
    bad("matrix rank must match the factor count");
  det_power_check(A.det(), ell);
  det_power_check(Ap.det(), ell);

  const Json& xj = field(content, "xs");
  if (!xj.is_array() || static_cast<long>(xj.size()) != cfg.depth + 1) bad("wrong point count");
  std::vector<MarkedSubgroup> xs;
  Int conductor = 1;
  for (std::size_t i = 0; i < xj.size(); ++i) {
    MarkedSubgroup x = decode_marked_subgroup(xj[i]);
    if (x.parent.disc() != d) bad("point lives in another field");
    if (x.parent.order.conductor != conductor) bad("point conductor breaks the ladder");
    if (x.modulus != A.det()) bad("point marker order must equal det A");
    if (i < qs.size()) conductor *= qs[i];
    xs.push_back(std::move(x));
  }

  const Json& ej = field(content, "entries");
  const Json& countj = field(content, "counts");
  if (!ej.is_array() || static_cast<long>(ej.size()) != cfg.depth) bad("wrong entry count");
  if (!countj.is_array() || countj.size() != ej.size()) bad("wrong count list length");
  std::vector<BundleEntry> entries;
  Int expected = 1;
  conductor = 1;
  for (std::size_t i = 0; i < ej.size(); ++i) {
    expected *= cfg.g;
    conductor *= qs[i];
    require_keys(ej[i], {"index", "left", "partners"});
    BundleEntry entry;
    entry.index = decode_long(field(ej[i], "index"));
    if (entry.index != static_cast<long>(i) + 1) bad("entry indices must be 1..depth in order");
    const Json& lj = field(ej[i], "left");
    if (!lj.is_array() || static_cast<long>(lj.size()) != cfg.g) bad("wrong left factor count");
    for (const auto& e : lj) entry.left.push_back(decode_curve(e));
    const Json& pj = field(ej[i], "partners");
    if (!pj.is_array() || Int(pj.size()) != expected) bad("partner count is not g^i");
    if (decode_long(countj[i]) != static_cast<long>(pj.size())) bad("count list disagrees");
    for (const auto& e : pj) {
      require_keys(e, {"certificate", "kernel", "point", "right"});
      MarkedSubgroup kernel = decode_marked_subgroup(field(e, "kernel"));
      MarkedSubgroup point = decode_marked_subgroup(field(e, "point"));
      if (kernel.modulus != conductor) bad("kernel order breaks the ladder");
      if (point.modulus != Ap.det()) bad("partner marker order must equal det A'");
      if (point.parent.order.conductor != conductor) bad("partner conductor breaks the ladder");
      std::vector<CMCurve> right;
      const Json& rj = field(e, "right");
      if (!rj.is_array() || static_cast<long>(rj.size()) != cfg.g) bad("wrong right factor count");
      for (const auto& r : rj) right.push_back(decode_curve(r));
      WeakIsoCertificate cert = decode_certificate(field(e, "certificate"));
      entry.partners.push_back(
          BundlePartner{std::move(kernel), std::move(point), std::move(right), std::move(cert)});
    }
    entries.push_back(std::move(entry));
  }
  return PairBundle{cfg, d, ell, alpha, std::move(qs), A, Ap, std::move(xs), std::move(entries)};
}

VerifyReport verify_bundle(const Json& doc, int jobs) {
  VerifyReport rep;
  std::vector<BundleEntry> entries;
  try {
    entries = decode_bundle(doc).entries;
  } catch (const std::exception& e) {
    rep.failure = e.what();
    return rep;
  }

  struct Task {
    const BundleEntry* entry;
    std::size_t k;
  };
  std::vector<Task> tasks;
  for (const auto& entry : entries) {
    for (std::size_t k = 0; k < entry.partners.size(); ++k) tasks.push_back(Task{&entry, k});
    for (std::size_t a = 0; a < entry.partners.size(); ++a)
      for (std::size_t b = a + 1; b < entry.partners.size(); ++b)
        if (entry.partners[a].kernel.witness == entry.partners[b].kernel.witness) {
          rep.failure = "partners collide within one entry";
          rep.certificates = 0;
          return rep;
        }
  }
  rep.certificates = tasks.size();

  // one slot per certificate; the verdict is a fold over slots, so the thread
  // split never changes the report
  std::vector<std::string> failures(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const BundleEntry& entry = *tasks[t].entry;
    const BundlePartner& pt = entry.partners[tasks[t].k];
    try {
      ProductVariety left(entry.left), right(pt.right);
      if (sha256_hex(canonical_dump(left, right)) != pt.certificate.inputs_digest)
        throw integrity_error("certificate digest does not match its products");
      if (!pt.certificate.verdict || !pt.certificate.oracle_path.verdict)
        throw integrity_error("certificate does not claim a weak isomorphism");
      bool oracle = oracle_slow(left, right);
      if (!oracle) throw integrity_error("oracle rejects the claimed weak isomorphism");
      if (pt.certificate.fast_path.applicable && !pt.certificate.fast_path.verdict)
        throw integrity_error("fast path verdict contradicts the oracle");
    } catch (const std::exception& e) {
      failures[t] = e.what();
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) {
      rep.failure = f;
      return rep;
    }
  rep.valid = true;
  return rep;
}

}  // namespace weakiso
