#pragma once
// Boolean-domain symmetric signatures: recurrence types, decomposition into
// two tensor powers, the tractability classes, and polynomial evaluation of
// closed Boolean grids.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "holant3/grid.hpp"

namespace holant3 {

// One vertex signature on the Boolean domain: symmetric list [f_0..f_n] or an
// oriented 2x2 matrix (port 0 = row, port 1 = column).
struct BoolAtom {
  enum class Kind { Symmetric, Matrix } kind = Kind::Symmetric;
  BoolSig sym;
  Mat2 mat;

  int arity() const { return kind == Kind::Symmetric ? sym.arity() : 2; }
  cplx value(const std::vector<int>& letters) const;
  double maxabs() const;

  static BoolAtom symmetric(BoolSig s) {
    BoolAtom a;
    a.kind = Kind::Symmetric;
    a.sym = std::move(s);
    return a;
  }
  static BoolAtom matrix(const Mat2& m) {
    BoolAtom a;
    a.kind = Kind::Matrix;
    a.mat = m;
    return a;
  }
};

struct BoolGrid {
  std::vector<BoolAtom> vsigs;  // one per vertex
  std::vector<Edge> edges;      // closed grid: every port used exactly once
};

// Recurrence structure. A pair (a, b) (not both zero) is admitted when
// a f_k + b f_{k+1} = a f_{k+2} holds for all k; the second-kind condition is
// f_k = -f_{k+2} for all k.
std::vector<std::array<double, 2>> first_kind_space(const BoolSig& f,
                                                    double tol = kStructuralTol);
bool is_second_kind(const BoolSig& f, double tol = kStructuralTol);
bool bool_is_degenerate(const BoolSig& f, double tol = kStructuralTol);

// Normalizes so max(|a|,|b|) = 1 with the first nonzero component positive.
std::array<double, 2> normalize_ab(double a, double b);

struct BoolDecomp {
  enum class Kind { Zero, Degenerate, TwoReal, ConjPair } kind = Kind::Zero;
  // Zero:       no terms.
  // Degenerate: terms = {(c, v)}                      f = c v^(x)n
  // TwoReal:    terms = {(c, v1), (d, v2)}            v1 _|_ v2, unit, real
  // ConjPair:   terms = {(c, w), (conj c, conj w)}    w = (p + i q)/|..|,
  //             p,q real with |p| = |q|, p _|_ q, |w| Hermitian-unit.
  struct Term {
    cplx coeff;
    std::array<cplx, 2> vec;
  };
  std::vector<Term> terms;
  double residual = 0.0;  // reconstruction error relative to maxabs
};

BoolSig bool_from_terms(const std::vector<BoolDecomp::Term>& terms, int arity);
std::optional<BoolDecomp> try_bool_decompose(const BoolSig& f,
                                             double tol = kResidualTol);
BoolDecomp bool_decompose(const BoolSig& f, double tol = kResidualTol);

// M^(x)n f for a 2x2 matrix acting on every argument.
BoolSig bool_apply_binary(const Mat2& m, const BoolSig& f);
Mat2 bool_binary_to_mat(const BoolSig& g);

// Tractability classes for a finite set of Boolean atoms.
struct BoolVerdict {
  enum class Status { Tractable, Hard } status = Status::Hard;
  enum class Class { AllBinary, FirstKind, SecondKind } cls = Class::AllBinary;
  std::array<double, 2> ab{0.0, 0.0};  // shared pair for FirstKind
  std::string hard_rule;               // set when status == Hard
  std::vector<std::string> warnings;
};

BoolVerdict classify_bool_set(const std::vector<BoolAtom>& members,
                              double tol = kStructuralTol);

// Evaluation. eval_bool dispatches on the verdict's class and runs in
// polynomial time; eval_bool_brute enumerates all 2^|E| assignments.
cplx eval_bool(const BoolGrid& g, const BoolVerdict& verdict);
cplx eval_bool_brute(const BoolGrid& g, int max_edges = 24);

}  // namespace holant3
