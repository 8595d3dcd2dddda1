#pragma once
// JSON serialization for signatures, grids, decompositions, verdicts and
// evaluation reports.

#include <string>

#include <json.hpp>

#include "holant3/boolhol.hpp"
#include "holant3/classifier.hpp"
#include "holant3/grid.hpp"
#include "holant3/sig.hpp"
#include "holant3/tensorlab.hpp"

namespace holant3 {

using json = nlohmann::json;

SymSig sig_from_json(const json& j);
json sig_to_json(const SymSig& f);

BoolSig boolsig_from_json(const json& j);
json boolsig_to_json(const BoolSig& f);

GridSignature gridsig_from_json(const json& j);
json gridsig_to_json(const GridSignature& s);

SignatureGrid grid_from_json(const json& j);
json grid_to_json(const SignatureGrid& g);

json decomposition_to_json(const Decomposition& d);
json canonical_to_json(const CanonicalResult& c);
json verdict_to_json(const Verdict& v);
json mat3_to_json(const Mat3& m);

json eval_report_to_json(const cplx& value, const std::string& method,
                         int components);

// Round-trip helpers used by the self test.
bool grid_roundtrip_ok(const SignatureGrid& g);

}  // namespace holant3
