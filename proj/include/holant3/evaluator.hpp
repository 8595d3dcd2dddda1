#pragma once
// Holant evaluation on closed grids: brute force and the class-specific
// polynomial algorithms, plus the shared degenerate-vertex factoring pass.

#include <cstddef>
#include <string>

#include "holant3/classifier.hpp"
#include "holant3/grid.hpp"

namespace holant3 {

struct EvalOptions {
  std::size_t brute_cap_edges = 16;
  int workers = 1;
};

struct EvalStats {
  std::string method;
  int components = 0;
  std::size_t assignments = 0;  // brute force only
};

// Deterministic brute force: sum over all 3^|E| edge colourings, organised
// as 3^min(|E|,6) blocks whose partial sums are combined in block order so
// the result is bit-identical for any worker count.
cplx eval_brute(const SignatureGrid& grid, const EvalOptions& opt = {},
                EvalStats* stats = nullptr);

// Polynomial evaluation according to a Tractable verdict for the signature
// set used by the grid. Throws VerdictMismatch when the grid's signatures do
// not fit the verdict's class in the verdict's frame.
cplx eval_tractable(const SignatureGrid& grid, const Verdict& verdict,
                    EvalStats* stats = nullptr);

// If f = c * v^(tensor n) within tolerance, report (c, v) with |v| = 1.
struct RankOne {
  cplx coeff;
  Vec3 vec;
};
bool extract_rank_one(const SymSig& f, RankOne& out, double tol = kResidualTol);

}  // namespace holant3
