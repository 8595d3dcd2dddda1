#pragma once
// Tensor operations on symmetric domain-3 signatures: transformation by a
// matrix on every argument, unary contraction, decomposition into at most
// three tensor powers with an orthogonal structure, and canonicalization.

#include <optional>
#include <vector>

#include "holant3/mat3.hpp"
#include "holant3/sig.hpp"

namespace holant3 {

// m^(x)n f: every argument of f is hit with m.
SymSig apply_binary(const Mat3& m, const SymSig& f);

// <f, u>: contract one argument with the unary u; arity drops by one.
SymSig contract_unary(const SymSig& f, const Vec3& u);

// A ternary contracted once, as a symmetric 3x3 matrix.
Mat3 ternary_slice(const SymSig& f3, const Vec3& u);

// Full contraction <f, g> over all arguments (g same arity), with the
// multiset weights that make it the tuple-wise sum.
cplx full_contract(const SymSig& f, const SymSig& g);

enum class DecompKind { DegenerateRank1, RealOrthogonal, ConjPair };

struct DecompTerm {
  cplx coeff;
  Vec3 vec;
};

// f = sum of coeff * vec^(x)n, with vectors as documented per kind:
//  DegenerateRank1: one real unit vector.
//  RealOrthogonal:  two or three real orthonormal vectors.
//  ConjPair:        (c, w), (conj c, conj w) [, (lambda, a)] where a is a real
//                   unit vector, w = (p + iq)/sqrt(2)-normalized with p,q real
//                   orthonormal and both orthogonal to a.
struct Decomposition {
  DecompKind kind = DecompKind::DegenerateRank1;
  std::vector<DecompTerm> terms;
  double residual = 0.0;  // reconstruction error relative to maxabs
};

SymSig reconstruct(const Decomposition& d, int arity);

std::optional<Decomposition> try_decompose(const SymSig& f, Rng* rng = nullptr);
Decomposition decompose(const SymSig& f, Rng* rng = nullptr);

// Canonical frame presentation: T real orthogonal with T^(x)n f equal to the
// reconstruction of canonical_terms.
//  DegenerateRank1 / RealOrthogonal: terms (c_i, e_i) with |c_1|>=|c_2|>=|c_3|
//   (absent terms omitted); rows of T signed so each row's first nonzero
//   entry is positive.
//  ConjPair: terms (c, b0), (conj c, conj b0) [, (lambda, e3)] with
//   b0 = (1, i, 0)/sqrt(2), c real positive, lambda real; row 3 of T signed
//   first-nonzero-positive.
struct CanonicalResult {
  DecompKind kind = DecompKind::DegenerateRank1;
  Mat3 T;
  std::vector<DecompTerm> canonical_terms;
  double residual = 0.0;
};

CanonicalResult canonicalize(const SymSig& f, Rng* rng = nullptr);

// Seeded RNG default: kDefaultSeed unless the HOLANT3_SEED environment
// variable overrides it.
std::uint64_t global_seed();

}  // namespace holant3
