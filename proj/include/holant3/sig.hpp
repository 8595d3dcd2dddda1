#pragma once
// Symmetric signatures over the domain {B, G, R}, Boolean-domain signatures,
// index arithmetic and support structure.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "holant3/core.hpp"

namespace holant3 {

enum Letter : int { B = 0, G = 1, R = 2 };

inline char letter_char(int l) { return l == B ? 'B' : (l == G ? 'G' : 'R'); }
std::optional<int> letter_from_char(char c);

// The three Boolean restriction planes with their 0/1 identification:
// BG: B->0, G->1;  BR: B->0, R->1;  GR: G->0, R->1.
enum class Plane : int { BG = 0, BR = 1, GR = 2 };

inline Letter plane_lo(Plane p) { return p == Plane::GR ? G : B; }
inline Letter plane_hi(Plane p) { return p == Plane::BG ? G : R; }
inline Letter plane_axis(Plane p) {
  return p == Plane::BG ? R : (p == Plane::BR ? G : B);
}
inline Plane plane_of_axis(Letter ax) {
  return ax == R ? Plane::BG : (ax == G ? Plane::BR : Plane::GR);
}
const char* plane_name(Plane p);
constexpr std::array<Plane, 3> kPlanes{Plane::BG, Plane::BR, Plane::GR};

using Vec3 = std::array<cplx, 3>;
using RVec3 = std::array<double, 3>;

cplx dot(const Vec3& a, const Vec3& b);  // bilinear, no conjugation
double rdot(const RVec3& a, const RVec3& b);
RVec3 rcross(const RVec3& a, const RVec3& b);
double rnorm(const RVec3& a);
Vec3 conj(const Vec3& a);
Vec3 to_vec3(const RVec3& a);
bool vec_is_real(const Vec3& a, double tol);
RVec3 real_part(const Vec3& a);
RVec3 imag_part(const Vec3& a);

// Exact multiset counts (i = #B, j = #G, k = #R).
struct Counts {
  int i = 0, j = 0, k = 0;
  int arity() const { return i + j + k; }
  bool operator==(const Counts&) const = default;
};

std::string counts_to_string(const Counts& c);

// Dense symmetric signature table; one entry per multiset, ordered by the
// lexicographic order of the nondecreasing index strings over B < G < R.
struct SymSig {
  int arity = 0;
  std::vector<cplx> v;

  static std::size_t table_size(int n) {
    return static_cast<std::size_t>(n + 1) * (n + 2) / 2;
  }
  static SymSig zero(int n);

  static std::size_t index_of(const Counts& c) {
    int d = c.j + c.k;
    return static_cast<std::size_t>(d) * (d + 1) / 2 + c.k;
  }
  cplx& at(const Counts& c) { return v[index_of(c)]; }
  const cplx& at(const Counts& c) const { return v[index_of(c)]; }
  cplx& at(int i, int j, int k) { return at(Counts{i, j, k}); }
  const cplx& at(int i, int j, int k) const { return at(Counts{i, j, k}); }

  double maxabs() const;
  bool is_real(double tol) const;
};

// Enumerates (counts, flat index) in table order.
template <typename Fn>
void for_each_pattern(int n, Fn&& fn) {
  std::size_t idx = 0;
  for (int d = 0; d <= n; ++d)
    for (int k = 0; k <= d; ++k) fn(Counts{n - d, d - k, k}, idx++);
}

double multinomial(int n, int i, int j, int k);

// Value lookup by an index string in any letter order, e.g. "GBR".
cplx sig_value(const SymSig& f, const std::string& idx);

// Sum of coeff * vec^(x)arity terms.
struct Term {
  cplx coeff;
  Vec3 vec;
};
SymSig sig_from_terms(const std::vector<Term>& terms, int arity);

// Boolean-domain symmetric signature [f_0, ..., f_n].
struct BoolSig {
  std::vector<cplx> f;
  int arity() const { return static_cast<int>(f.size()) - 1; }
  double maxabs() const;
};

BoolSig restrict_signature(const SymSig& f, Plane p);

struct SupportFlags {
  bool is_geneq = false;
  std::optional<Plane> ebd_plane;  // first matching plane in order BG, BR, GR
  bool sep_bg_r = false;
  bool sep_br_g = false;
  bool sep_gr_b = false;
  bool in_eset = false;
  bool is_zero = false;
  bool separated(Plane p) const {
    return p == Plane::BG ? sep_bg_r : (p == Plane::BR ? sep_br_g : sep_gr_b);
  }
};

bool supported_on_plane(const SymSig& f, Plane p, double tol);
SupportFlags support_flags(const SymSig& f, double tol = kStructuralTol);

}  // namespace holant3
