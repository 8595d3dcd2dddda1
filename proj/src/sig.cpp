#include "holant3/sig.hpp"

#include <algorithm>
#include <cmath>

namespace holant3 {

const char* err_name(Err e) {
  switch (e) {
    case Err::BadIndex: return "BadIndex";
    case Err::ArityTooSmall: return "ArityTooSmall";
    case Err::ArityMismatch: return "ArityMismatch";
    case Err::NotOrthogonal: return "NotOrthogonal";
    case Err::NotLowRank: return "NotLowRank";
    case Err::Degenerate: return "Degenerate";
    case Err::NotRank2: return "NotRank2";
    case Err::TooLarge: return "TooLarge";
    case Err::VerdictMismatch: return "VerdictMismatch";
    case Err::FormMismatch: return "FormMismatch";
    case Err::Singular: return "Singular";
    case Err::ZeroVectorTerm: return "ZeroVectorTerm";
    case Err::UnknownSignature: return "UnknownSignature";
    case Err::PortReused: return "PortReused";
    case Err::PortMissing: return "PortMissing";
    case Err::ParseError: return "ParseError";
    case Err::Validation: return "Validation";
  }
  return "Unknown";
}

std::vector<cplx> projective_normal_form(const std::vector<cplx>& v) {
  std::size_t best = 0;
  double bm = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]);
    if (a > bm) {
      bm = a;
      best = i;
    }
  }
  std::vector<cplx> out(v.size(), cplx(0));
  if (bm <= 0.0) return out;
  cplx pivot = v[best];
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / pivot;
  return out;
}

bool projectively_equal(const std::vector<cplx>& u, const std::vector<cplx>& v,
                        double tol) {
  if (u.size() != v.size()) return false;
  // Shared pivot: several entries may tie in modulus, so normalizing each
  // table against its own largest entry is unstable under rounding noise.
  std::size_t p = 0;
  double um = -1.0, vm = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double a = std::abs(u[i]);
    if (a > um) {
      um = a;
      p = i;
    }
    vm = std::max(vm, std::abs(v[i]));
  }
  if (um <= 0.0) return vm <= 0.0;
  if (std::abs(v[p]) <= tol * vm) return false;
  cplx pu = u[p], pv = v[p];
  for (std::size_t i = 0; i < u.size(); ++i)
    if (std::abs(u[i] / pu - v[i] / pv) > tol) return false;
  return true;
}

std::optional<int> letter_from_char(char c) {
  switch (c) {
    case 'B': case 'b': return B;
    case 'G': case 'g': return G;
    case 'R': case 'r': return R;
  }
  return std::nullopt;
}

const char* plane_name(Plane p) {
  switch (p) {
    case Plane::BG: return "BG";
    case Plane::BR: return "BR";
    case Plane::GR: return "GR";
  }
  return "?";
}

cplx dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double rdot(const RVec3& a, const RVec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

RVec3 rcross(const RVec3& a, const RVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double rnorm(const RVec3& a) { return std::sqrt(rdot(a, a)); }

Vec3 conj(const Vec3& a) {
  return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])};
}

Vec3 to_vec3(const RVec3& a) { return {cplx(a[0]), cplx(a[1]), cplx(a[2])}; }

bool vec_is_real(const Vec3& a, double tol) {
  double m = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2]), 1e-300});
  for (auto& z : a)
    if (std::abs(z.imag()) > tol * m) return false;
  return true;
}

RVec3 real_part(const Vec3& a) { return {a[0].real(), a[1].real(), a[2].real()}; }
RVec3 imag_part(const Vec3& a) { return {a[0].imag(), a[1].imag(), a[2].imag()}; }

std::string counts_to_string(const Counts& c) {
  std::string s;
  s.append(c.i, 'B');
  s.append(c.j, 'G');
  s.append(c.k, 'R');
  return s;
}

SymSig SymSig::zero(int n) {
  SymSig f;
  f.arity = n;
  f.v.assign(table_size(n), cplx(0));
  return f;
}

double SymSig::maxabs() const {
  double m = 0.0;
  for (auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

bool SymSig::is_real(double tol) const {
  double m = std::max(maxabs(), 1e-300);
  for (auto& z : v)
    if (std::abs(z.imag()) > tol * m) return false;
  return true;
}

double multinomial(int n, int i, int j, int k) {
  if (i < 0 || j < 0 || k < 0 || i + j + k != n) fail(Err::BadIndex, "multinomial");
  auto binom = [](int nn, int kk) {
    double r = 1.0;
    for (int t = 1; t <= kk; ++t) r = r * (nn - kk + t) / t;
    return r;
  };
  return binom(n, i) * binom(n - i, j);
}

cplx sig_value(const SymSig& f, const std::string& idx) {
  if (static_cast<int>(idx.size()) != f.arity)
    fail(Err::BadIndex, "index length " + std::to_string(idx.size()) +
                            " does not match arity " + std::to_string(f.arity));
  Counts c;
  for (char ch : idx) {
    auto l = letter_from_char(ch);
    if (!l) fail(Err::BadIndex, std::string("bad letter '") + ch + "'");
    if (*l == B) ++c.i;
    else if (*l == G) ++c.j;
    else ++c.k;
  }
  return f.at(c);
}

SymSig sig_from_terms(const std::vector<Term>& terms, int arity) {
  SymSig f = SymSig::zero(arity);
  for (const auto& t : terms) {
    for_each_pattern(arity, [&](const Counts& c, std::size_t idx) {
      cplx p = t.coeff;
      for (int a = 0; a < c.i; ++a) p *= t.vec[0];
      for (int a = 0; a < c.j; ++a) p *= t.vec[1];
      for (int a = 0; a < c.k; ++a) p *= t.vec[2];
      f.v[idx] += p;
    });
  }
  return f;
}

double BoolSig::maxabs() const {
  double m = 0.0;
  for (auto& z : f) m = std::max(m, std::abs(z));
  return m;
}

BoolSig restrict_signature(const SymSig& f, Plane p) {
  int n = f.arity;
  BoolSig b;
  b.f.resize(n + 1);
  for (int w = 0; w <= n; ++w) {
    Counts c;
    switch (p) {
      case Plane::BG: c = {n - w, w, 0}; break;
      case Plane::BR: c = {n - w, 0, w}; break;
      case Plane::GR: c = {0, n - w, w}; break;
    }
    b.f[w] = f.at(c);
  }
  return b;
}

bool supported_on_plane(const SymSig& f, Plane p, double tol) {
  double cut = tol * std::max(f.maxabs(), 1e-300);
  Letter ax = plane_axis(p);
  bool ok = true;
  for_each_pattern(f.arity, [&](const Counts& c, std::size_t idx) {
    int axcount = ax == B ? c.i : (ax == G ? c.j : c.k);
    if (axcount > 0 && std::abs(f.v[idx]) > cut) ok = false;
  });
  return ok;
}

SupportFlags support_flags(const SymSig& f, double tol) {
  SupportFlags out;
  int n = f.arity;
  double cut = tol * std::max(f.maxabs(), 1e-300);
  std::vector<Counts> supp;
  for_each_pattern(n, [&](const Counts& c, std::size_t idx) {
    if (std::abs(f.v[idx]) > cut) supp.push_back(c);
  });
  out.is_zero = supp.empty();

  auto axcount = [](const Counts& c, Letter ax) {
    return ax == B ? c.i : (ax == G ? c.j : c.k);
  };

  out.is_geneq = true;
  for (const auto& c : supp)
    if (c.i != n && c.j != n && c.k != n) out.is_geneq = false;

  for (Plane p : kPlanes) {
    Letter ax = plane_axis(p);
    bool plane_ok = true, sep_ok = true;
    for (const auto& c : supp) {
      int a = axcount(c, ax);
      if (a > 0) plane_ok = false;
      if (a > 0 && a < n) sep_ok = false;
    }
    if (plane_ok && !out.ebd_plane) out.ebd_plane = p;
    if (p == Plane::BG) out.sep_bg_r = sep_ok;
    if (p == Plane::BR) out.sep_br_g = sep_ok;
    if (p == Plane::GR) out.sep_gr_b = sep_ok;
  }

  // Membership in the three-tuple class. The support of a symmetric
  // signature contains every arrangement of each support multiset, so the
  // test is: at most three support tuples in total, and any two of them
  // disagree at every position. (A partial list of tuples with pairwise
  // all-position disagreement always completes to a full triple whose
  // columns each contain all three letters.)
  double ntuples = 0;
  for (const auto& c : supp) ntuples += multinomial(n, c.i, c.j, c.k);
  if (ntuples <= 3.5) {
    std::vector<std::string> tuples;
    for (const auto& c : supp) {
      std::string s = counts_to_string(c);
      do tuples.push_back(s);
      while (std::next_permutation(s.begin(), s.end()));
    }
    out.in_eset = true;
    for (std::size_t a = 0; a + 1 < tuples.size(); ++a)
      for (std::size_t b = a + 1; b < tuples.size(); ++b)
        for (int pos = 0; pos < n; ++pos)
          if (tuples[a][pos] == tuples[b][pos]) out.in_eset = false;
  }
  return out;
}

}  // namespace holant3
