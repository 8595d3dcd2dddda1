#pragma once
// Classification of finite sets of real symmetric domain-3 signatures into
// the tractable families (under a shared orthogonal change of basis) or Hard.

#include <optional>
#include <string>
#include <vector>

#include "holant3/boolhol.hpp"
#include "holant3/mat3.hpp"
#include "holant3/sig.hpp"
#include "holant3/tensorlab.hpp"

namespace holant3 {

enum class TractClass { A, B, C, D, E };
const char* tract_class_name(TractClass c);

struct HardEvidence {
  std::string rule;  // machine label, e.g. "single-signature-obstruction"
  std::string cite;  // short internal rule description
  std::vector<std::string> signatures;
};

struct Verdict {
  enum class Status { Tractable, Hard } status = Status::Hard;
  std::optional<TractClass> cls;
  std::optional<Mat3> witness_T;
  std::vector<std::string> evidence;
  std::optional<HardEvidence> hard;
  std::vector<std::string> warnings;
};

struct NamedSig {
  std::string name;
  SymSig sig;
};

// True when f has flattening rank <= 1 (a scaled power, or zero).
bool sig_is_degenerate(const SymSig& f, double tol = kStructuralTol);

// Orbit of the ternary members under the binary members acting on every
// argument; breadth-first with projective deduplication and a hard cap.
struct Orbit {
  std::vector<SymSig> members;
  bool truncated = false;
};
Orbit compute_orbit(const std::vector<SymSig>& ternaries,
                    const std::vector<Mat3>& binaries, std::size_t cap = 512);

// Candidate orthogonal frames for the witness search.
std::vector<Mat3> candidate_frames(const std::vector<NamedSig>& sigs,
                                   const Orbit& orbit);

// Closure of a set of signed permutation matrices under products.
std::vector<Mat3> perm_closure(const std::vector<Mat3>& gens);

Verdict classify_set(const std::vector<NamedSig>& sigs);
Verdict classify_single(const SymSig& f);

// Frame-specific condition checks, exposed for tests. `tf` holds the
// transformed members (same order as `sigs`).
bool check_class_b(const std::vector<SymSig>& tf);
bool check_class_c(const std::vector<SymSig>& tf);
bool check_class_d(const std::vector<SymSig>& tf);
bool check_class_e(const std::vector<SymSig>& tf);

}  // namespace holant3
