#include "holant3/json_io.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace holant3 {

namespace {

json cnum(const cplx& z) { return json::array({z.real(), z.imag()}); }

cplx num_from(const json& j, const char* what) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && (j.size() == 1 || j.size() == 2) && j[0].is_number() &&
      (j.size() == 1 || j[1].is_number()))
    return cplx(j[0].get<double>(), j.size() == 2 ? j[1].get<double>() : 0.0);
  fail(Err::ParseError, std::string(what) + ": expected a number or [re, im]");
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(Err::ParseError, std::string("missing field: ") + key);
  return j[key];
}

std::string idx_string(const Counts& c) {
  std::string s;
  s.append(static_cast<std::size_t>(c.i), 'B');
  s.append(static_cast<std::size_t>(c.j), 'G');
  s.append(static_cast<std::size_t>(c.k), 'R');
  return s;
}

}  // namespace

SymSig sig_from_json(const json& j) {
  if (!j.is_object()) fail(Err::ParseError, "signature: expected an object");
  if (j.contains("kind") && j["kind"] != "symmetric")
    fail(Err::ParseError, "signature: kind must be \"symmetric\"");
  if (j.contains("domain") && j["domain"] != 3)
    fail(Err::ParseError, "signature: domain must be 3");
  const json& ja = field(j, "arity");
  if (!ja.is_number_integer() || ja.get<int>() < 0)
    fail(Err::ParseError, "signature: arity must be a non-negative integer");
  SymSig f;
  f.arity = ja.get<int>();
  f.v.assign(SymSig::table_size(f.arity), cplx(0));
  if (!j.contains("values")) return f;
  if (!j["values"].is_array())
    fail(Err::ParseError, "signature: values must be an array");
  std::set<std::size_t> seen;
  for (const json& e : j["values"]) {
    if (!e.is_object()) fail(Err::ParseError, "signature: bad values entry");
    std::string idx = field(e, "idx").get<std::string>();
    if (static_cast<int>(idx.size()) != f.arity)
      fail(Err::ParseError, "signature: idx length must equal arity: " + idx);
    Counts c{0, 0, 0};
    for (char ch : idx) {
      if (ch == 'B')
        ++c.i;
      else if (ch == 'G')
        ++c.j;
      else if (ch == 'R')
        ++c.k;
      else
        fail(Err::ParseError, "signature: idx letters must be B, G, R: " + idx);
    }
    std::size_t flat = SymSig::index_of(c);
    if (!seen.insert(flat).second)
      fail(Err::ParseError, "signature: duplicate idx: " + idx);
    double re = e.contains("re") ? field(e, "re").get<double>() : 0.0;
    double im = e.contains("im") ? e["im"].get<double>() : 0.0;
    f.v[flat] = cplx(re, im);
  }
  return f;
}

json sig_to_json(const SymSig& f) {
  json values = json::array();
  for_each_pattern(f.arity, [&](const Counts& c, std::size_t idx) {
    const cplx& z = f.v[idx];
    if (z == cplx(0)) return;
    json e = {{"idx", idx_string(c)}, {"re", z.real()}};
    if (z.imag() != 0.0) e["im"] = z.imag();
    values.push_back(e);
  });
  return json{{"kind", "symmetric"},
              {"domain", 3},
              {"arity", f.arity},
              {"values", values}};
}

BoolSig boolsig_from_json(const json& j) {
  if (!j.is_object()) fail(Err::ParseError, "bool signature: expected an object");
  if (j.contains("kind") && j["kind"] != "bool-symmetric")
    fail(Err::ParseError, "bool signature: kind must be \"bool-symmetric\"");
  const json& jv = field(j, "values");
  if (!jv.is_array() || jv.empty())
    fail(Err::ParseError, "bool signature: values must be a non-empty array");
  BoolSig f;
  for (const json& e : jv) f.f.push_back(num_from(e, "bool signature value"));
  return f;
}

json boolsig_to_json(const BoolSig& f) {
  json values = json::array();
  for (const cplx& z : f.f) values.push_back(cnum(z));
  return json{{"kind", "bool-symmetric"}, {"values", values}};
}

json mat3_to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    json row = json::array();
    for (int c = 0; c < 3; ++c) row.push_back(cnum(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

namespace {

Mat3 mat3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3)
    fail(Err::ParseError, "matrix: expected three rows");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    if (!j[static_cast<std::size_t>(r)].is_array() ||
        j[static_cast<std::size_t>(r)].size() != 3)
      fail(Err::ParseError, "matrix: each row needs three entries");
    for (int c = 0; c < 3; ++c)
      m(r, c) = num_from(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                         "matrix entry");
  }
  return m;
}

}  // namespace

GridSignature gridsig_from_json(const json& j) {
  if (!j.is_object()) fail(Err::ParseError, "grid signature: expected an object");
  std::string kind =
      j.contains("kind") ? j["kind"].get<std::string>() : "symmetric";
  if (kind == "symmetric") return GridSignature::symmetric(sig_from_json(j));
  if (kind == "matrix") {
    if (j.contains("domain") && j["domain"] != 3)
      fail(Err::ParseError, "grid signature: domain must be 3");
    return GridSignature::matrix(mat3_from_json(field(j, "values")));
  }
  fail(Err::ParseError, "grid signature: kind must be symmetric or matrix");
}

json gridsig_to_json(const GridSignature& s) {
  if (s.kind == GridSignature::Kind::Symmetric) return sig_to_json(s.sym);
  return json{{"kind", "matrix"}, {"domain", 3}, {"values", mat3_to_json(s.mat)}};
}

namespace {

PortRef portref_from_json(const SignatureGrid& g, const json& j,
                          const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() ||
      !j[1].is_number_integer())
    fail(Err::ParseError, std::string(what) + ": expected [vertex-id, port]");
  int v = g.vertex_index(j[0].get<std::string>());
  if (v < 0)
    fail(Err::ParseError,
         std::string(what) + ": unknown vertex id: " + j[0].get<std::string>());
  return PortRef{v, j[1].get<int>()};
}

json portref_to_json(const SignatureGrid& g, const PortRef& p) {
  return json::array(
      {g.vertices[static_cast<std::size_t>(p.vertex)].id, p.port});
}

}  // namespace

SignatureGrid grid_from_json(const json& j) {
  if (!j.is_object()) fail(Err::ParseError, "grid: expected an object");
  SignatureGrid g;
  const json& sigs = field(j, "signatures");
  if (!sigs.is_object()) fail(Err::ParseError, "grid: signatures must map names");
  for (auto it = sigs.begin(); it != sigs.end(); ++it)
    g.signatures[it.key()] = gridsig_from_json(it.value());
  const json& verts = field(j, "vertices");
  if (!verts.is_array()) fail(Err::ParseError, "grid: vertices must be an array");
  for (const json& v : verts) {
    std::string id = field(v, "id").get<std::string>();
    std::string sig = field(v, "sig").get<std::string>();
    if (g.vertex_index(id) >= 0)
      fail(Err::ParseError, "grid: duplicate vertex id: " + id);
    if (!g.signatures.count(sig))
      fail(Err::ParseError, "grid: unknown signature name: " + sig);
    g.vertices.push_back(Vertex{id, sig});
  }
  if (j.contains("edges")) {
    if (!j["edges"].is_array())
      fail(Err::ParseError, "grid: edges must be an array");
    for (const json& e : j["edges"])
      g.edges.push_back(Edge{portref_from_json(g, field(e, "a"), "edge"),
                             portref_from_json(g, field(e, "b"), "edge")});
  }
  if (j.contains("externals")) {
    if (!j["externals"].is_array())
      fail(Err::ParseError, "grid: externals must be an array");
    for (const json& x : j["externals"])
      g.externals.push_back(portref_from_json(g, x, "external"));
  }
  return g;
}

json grid_to_json(const SignatureGrid& g) {
  json sigs = json::object();
  for (const auto& [name, s] : g.signatures) sigs[name] = gridsig_to_json(s);
  json verts = json::array();
  for (const auto& v : g.vertices)
    verts.push_back(json{{"id", v.id}, {"sig", v.sig}});
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back(json{{"a", portref_to_json(g, e.a)},
                         {"b", portref_to_json(g, e.b)}});
  json externals = json::array();
  for (const auto& x : g.externals) externals.push_back(portref_to_json(g, x));
  return json{{"signatures", sigs},
              {"vertices", verts},
              {"edges", edges},
              {"externals", externals}};
}

namespace {

const char* decomp_kind_name(DecompKind k) {
  switch (k) {
    case DecompKind::DegenerateRank1: return "degenerate-rank1";
    case DecompKind::RealOrthogonal: return "real-orthogonal";
    case DecompKind::ConjPair: return "conj-pair";
  }
  return "?";
}

json terms_to_json(const std::vector<DecompTerm>& terms) {
  json out = json::array();
  for (const auto& t : terms) {
    json vec = json::array();
    for (const cplx& z : t.vec) vec.push_back(cnum(z));
    out.push_back(json{{"coeff", cnum(t.coeff)}, {"vector", vec}});
  }
  return out;
}

}  // namespace

json decomposition_to_json(const Decomposition& d) {
  return json{{"kind", decomp_kind_name(d.kind)},
              {"terms", terms_to_json(d.terms)},
              {"residual", d.residual}};
}

json canonical_to_json(const CanonicalResult& c) {
  return json{{"kind", decomp_kind_name(c.kind)},
              {"T", mat3_to_json(c.T)},
              {"terms", terms_to_json(c.canonical_terms)},
              {"residual", c.residual}};
}

json verdict_to_json(const Verdict& v) {
  json out;
  out["status"] = v.status == Verdict::Status::Tractable ? "tractable" : "hard";
  out["class"] = v.cls ? json(tract_class_name(*v.cls)) : json(nullptr);
  out["witness_T"] = v.witness_T ? mat3_to_json(*v.witness_T) : json(nullptr);
  out["evidence"] = v.evidence;
  if (v.hard) {
    out["hard_evidence"] = json{{"rule", v.hard->rule},
                                {"cite", v.hard->cite},
                                {"signatures", v.hard->signatures}};
  } else {
    out["hard_evidence"] = json(nullptr);
  }
  out["warnings"] = v.warnings;
  return out;
}

json eval_report_to_json(const cplx& value, const std::string& method,
                         int components) {
  return json{{"value", cnum(value)},
              {"method", method},
              {"components", components},
              {"stats", json{{"components", components}}}};
}

bool grid_roundtrip_ok(const SignatureGrid& g) {
  try {
    json j1 = grid_to_json(g);
    SignatureGrid g2 = grid_from_json(j1);
    json j2 = grid_to_json(g2);
    return j1 == j2;
  } catch (const HolantError&) {
    return false;
  }
}

}  // namespace holant3
