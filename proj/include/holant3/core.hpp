#pragma once
// Core scalar types, tolerances, deterministic accumulation, seeded RNG.

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace holant3 {

using cplx = std::complex<double>;

// Pinned tolerances. Structural tolerances decide zero/shape questions and are
// relative to the largest entry modulus of the object under test. Residual
// tolerances govern decomposition acceptance and projective matching.
constexpr double kStructuralTol = 1e-9;
constexpr double kResidualTol = 1e-7;
constexpr double kOrthoTol = 1e-9;
constexpr std::uint64_t kDefaultSeed = 0xA11CE;

enum class Err {
  BadIndex,
  ArityTooSmall,
  ArityMismatch,
  NotOrthogonal,
  NotLowRank,
  Degenerate,
  NotRank2,
  TooLarge,
  VerdictMismatch,
  FormMismatch,
  Singular,
  ZeroVectorTerm,
  UnknownSignature,
  PortReused,
  PortMissing,
  ParseError,
  Validation,
};

const char* err_name(Err e);

struct HolantError : std::runtime_error {
  Err code;
  HolantError(Err c, const std::string& msg)
      : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& msg) {
  throw HolantError(c, msg);
}

// Deterministic pairwise summation: a binary-counter merge keeps the addition
// tree independent of chunking, so parallel splits can reproduce it exactly.
struct PairwiseSum {
  std::vector<std::pair<cplx, std::uint64_t>> st;  // (partial, leaf count)
  void push(cplx x) {
    std::uint64_t sz = 1;
    while (!st.empty() && st.back().second == sz) {
      x += st.back().first;
      sz <<= 1;
      st.pop_back();
    }
    st.emplace_back(x, sz);
  }
  cplx total() const {
    cplx s = 0;
    for (auto it = st.rbegin(); it != st.rend(); ++it) s += it->first;
    return s;
  }
};

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed = kDefaultSeed) : eng(seed) {}
  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(eng);
  }
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int uniform_int(int a, int b) {  // inclusive
    return std::uniform_int_distribution<int>(a, b)(eng);
  }
};

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool nearz(const cplx& z, double tol) { return std::abs(z) <= tol; }

// Normalize a table projectively: divide by the largest-modulus entry
// (ties broken by lowest index), making that entry exactly 1.
std::vector<cplx> projective_normal_form(const std::vector<cplx>& v);

// Projective equality of two tables within a relative tolerance.
bool projectively_equal(const std::vector<cplx>& u, const std::vector<cplx>& v,
                        double tol = kResidualTol);

}  // namespace holant3
