#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "weakiso/pair_generator.hpp"
#include "weakiso/qexp.hpp"

namespace weakiso {

using Json = nlohmann::json;

// schema tags pin the file layouts; decoding rejects anything else
inline constexpr const char* kBundleSchema = "weakiso-bundle/v1";
inline constexpr const char* kMatrixSchema = "weakiso-matrix/v1";
inline constexpr const char* kQexpSchema = "weakiso-qexp/v1";
inline constexpr const char* kRunSchema = "weakiso-run/v1";

// Scalar codecs. Integers and rationals travel as decimal strings so no JSON
// number-width limit applies; decoding is strict, rejecting any spelling the
// encoder would not produce. Structural counts stay native JSON integers.
Json encode(const Int& n);
Int decode_int(const Json& j);
Json encode(const Rat& r);
Rat decode_rat(const Json& j);

long decode_long(const Json& j);
std::uint64_t decode_u64(const Json& j);
bool decode_bool(const Json& j);
std::string decode_string(const Json& j);

// object field access that insists on exactly the expected key set
const Json& field(const Json& j, const char* key);
void require_keys(const Json& j, const std::vector<std::string>& keys);

Json encode(const IntMatrix& m);
IntMatrix decode_int_matrix(const Json& j);
Json encode(const SymPosDefIntMatrix& a);
SymPosDefIntMatrix decode_spd_matrix(const Json& j);

Json encode(const QuadInteger& a);
QuadInteger decode_quad_integer(const Json& j, const Discriminant& d);
Json encode(const TorsorElement& t);
TorsorElement decode_torsor_element(const Json& j);

// lattices are stored in canonical form and decoding re-canonicalizes and
// compares, so no two distinct spellings of the same lattice parse
Json encode(const Lattice& L);
Lattice decode_lattice(const Json& j);

// curves carry lattice and provenance only; ring and class are recomputed
Json encode(const CMCurve& E);
CMCurve decode_curve(const Json& j);

Json encode(const MarkedSubgroup& C);
MarkedSubgroup decode_marked_subgroup(const Json& j);

Json encode(const WeakIsoCertificate& cert);
WeakIsoCertificate decode_certificate(const Json& j);

// expansion file: schema wrapper, characteristic, term list in support order
Json encode_qexp(const FormalQExpansion& f);
FormalQExpansion decode_qexp(const Json& j);

// matrix file: schema wrapper around one symmetric positive definite matrix
Json encode_matrix_doc(const SymPosDefIntMatrix& a);
SymPosDefIntMatrix decode_matrix_doc(const Json& j);

// One constructed companion point plus the two product tuples its certificate
// binds: left is the image of the anchor, right the image of the point.
struct BundlePartner {
  MarkedSubgroup kernel;
  MarkedSubgroup point;
  std::vector<CMCurve> right;
  WeakIsoCertificate certificate;
};

struct BundleEntry {
  long index = 0;
  std::vector<CMCurve> left;
  std::vector<BundlePartner> partners;
};

// Self-contained certified artifact of one generation run. The document holds a
// digest of its content subtree, so any single-field edit is detectable before
// the mathematical re-verification even starts.
struct PairBundle {
  GenConfig cfg;
  Discriminant field;
  Int ell;
  QuadInteger alpha;
  std::vector<Int> qs;
  SymPosDefIntMatrix A, Aprime;
  std::vector<MarkedSubgroup> xs;
  std::vector<BundleEntry> entries;
};

// assemble the bundle from a generated family, recomputing both product images
// and cross-checking them against each stored certificate digest
PairBundle make_bundle(const PairFamily& fam, const SymPosDefIntMatrix& A,
                       const SymPosDefIntMatrix& Aprime);

Json encode(const PairBundle& b);
PairBundle decode_bundle(const Json& doc);

struct VerifyReport {
  std::size_t certificates = 0;
  bool valid = false;
  std::string failure;  // empty when valid
};

// full re-verification: content digest, strict decode, then for every partner
// the certificate digest and a fresh run of the module-theoretic oracle. The
// fast criterion is never consulted here. Work is split across jobs threads;
// the report is independent of the split.
VerifyReport verify_bundle(const Json& doc, int jobs);

}  // namespace weakiso
