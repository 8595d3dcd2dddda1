#include "holant3/tensorlab.hpp"

#include "holant3/boolhol.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace holant3 {

SymSig apply_binary(const Mat3& m, const SymSig& f) {
  int n = f.arity;
  // Polynomial view: q = sum multinomial(c) f_c x^i y^j z^k; applying m on
  // every argument substitutes each variable with the matching column form.
  auto powtab = [&](cplx alpha, cplx beta, cplx gamma) {
    std::vector<std::vector<cplx>> p(n + 1);
    p[0] = {cplx(1)};
    for (int j = 1; j <= n; ++j) {
      p[j].assign(SymSig::table_size(j), cplx(0));
      for_each_pattern(j - 1, [&](const Counts& c, std::size_t idx) {
        cplx val = p[j - 1][idx];
        if (val == cplx(0)) return;
        p[j][SymSig::index_of({c.i + 1, c.j, c.k})] += val * alpha;
        p[j][SymSig::index_of({c.i, c.j + 1, c.k})] += val * beta;
        p[j][SymSig::index_of({c.i, c.j, c.k + 1})] += val * gamma;
      });
    }
    return p;
  };
  auto pb = powtab(m(0, 0), m(1, 0), m(2, 0));
  auto pg = powtab(m(0, 1), m(1, 1), m(2, 1));
  auto pr = powtab(m(0, 2), m(1, 2), m(2, 2));

  std::vector<cplx> r(SymSig::table_size(n), cplx(0));
  for_each_pattern(n, [&](const Counts& c, std::size_t idx) {
    cplx q = multinomial(n, c.i, c.j, c.k) * f.v[idx];
    if (q == cplx(0)) return;
    // tmp = pb[c.i] * pg[c.j], then fold pr[c.k] into r with weight q.
    std::vector<cplx> tmp(SymSig::table_size(c.i + c.j), cplx(0));
    for_each_pattern(c.i, [&](const Counts& ca, std::size_t ia) {
      if (pb[c.i][ia] == cplx(0)) return;
      for_each_pattern(c.j, [&](const Counts& cb, std::size_t ib) {
        if (pg[c.j][ib] == cplx(0)) return;
        tmp[SymSig::index_of({ca.i + cb.i, ca.j + cb.j, ca.k + cb.k})] +=
            pb[c.i][ia] * pg[c.j][ib];
      });
    });
    for_each_pattern(c.i + c.j, [&](const Counts& ca, std::size_t ia) {
      if (tmp[ia] == cplx(0)) return;
      for_each_pattern(c.k, [&](const Counts& cb, std::size_t ib) {
        if (pr[c.k][ib] == cplx(0)) return;
        r[SymSig::index_of({ca.i + cb.i, ca.j + cb.j, ca.k + cb.k})] +=
            q * tmp[ia] * pr[c.k][ib];
      });
    });
  });

  SymSig out = SymSig::zero(n);
  for_each_pattern(n, [&](const Counts& c, std::size_t idx) {
    out.v[idx] = r[idx] / multinomial(n, c.i, c.j, c.k);
  });
  return out;
}

SymSig contract_unary(const SymSig& f, const Vec3& u) {
  int n = f.arity;
  if (n < 1) fail(Err::ArityTooSmall, "contract_unary wants arity >= 1");
  SymSig out = SymSig::zero(n - 1);
  for_each_pattern(n - 1, [&](const Counts& c, std::size_t idx) {
    out.v[idx] = f.at(c.i + 1, c.j, c.k) * u[0] +
                 f.at(c.i, c.j + 1, c.k) * u[1] + f.at(c.i, c.j, c.k + 1) * u[2];
  });
  return out;
}

Mat3 ternary_slice(const SymSig& f3, const Vec3& u) {
  if (f3.arity != 3) fail(Err::ArityMismatch, "ternary_slice wants arity 3");
  return binary_to_mat(contract_unary(f3, u));
}

cplx full_contract(const SymSig& f, const SymSig& g) {
  if (f.arity != g.arity) fail(Err::ArityMismatch, "full_contract arity mismatch");
  cplx s = 0;
  for_each_pattern(f.arity, [&](const Counts& c, std::size_t idx) {
    s += multinomial(f.arity, c.i, c.j, c.k) * f.v[idx] * g.v[idx];
  });
  return s;
}

SymSig reconstruct(const Decomposition& d, int arity) {
  std::vector<Term> ts;
  for (const auto& t : d.terms) ts.push_back(Term{t.coeff, t.vec});
  return sig_from_terms(ts, arity);
}

std::uint64_t global_seed() {
  static const std::uint64_t seed = [] {
    if (const char* env = std::getenv("HOLANT3_SEED")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 0);
      if (end && *end == '\0') return static_cast<std::uint64_t>(v);
    }
    return kDefaultSeed;
  }();
  return seed;
}

namespace {

Vec3 random_unit(Rng& rng) {
  for (;;) {
    RVec3 v{rng.gauss(), rng.gauss(), rng.gauss()};
    double nrm = rnorm(v);
    if (nrm > 1e-3) return {v[0] / nrm, v[1] / nrm, v[2] / nrm};
  }
}

double residual_against(const SymSig& f, const std::vector<DecompTerm>& terms) {
  std::vector<Term> ts;
  for (const auto& t : terms) ts.push_back(Term{t.coeff, t.vec});
  SymSig rec = sig_from_terms(ts, f.arity);
  double r = 0.0;
  for (std::size_t k = 0; k < f.v.size(); ++k)
    r = std::max(r, std::abs(f.v[k] - rec.v[k]));
  return r / std::max(f.maxabs(), 1e-300);
}

// Counts the axis letters of a pattern.
int axis_count(const Counts& c, Letter ax) {
  return ax == B ? c.i : (ax == G ? c.j : c.k);
}

std::optional<Decomposition> detect_in_frame(const SymSig& f, const Mat3& t) {
  int n = f.arity;
  SymSig fp = apply_binary(t, f);
  double cut = kStructuralTol * std::max(fp.maxabs(), 1e-300);

  // Corners-only: a sum of axis powers in this frame.
  bool corners = true;
  for_each_pattern(n, [&](const Counts& c, std::size_t idx) {
    if (c.i != n && c.j != n && c.k != n && std::abs(fp.v[idx]) > cut)
      corners = false;
  });
  if (corners) {
    Decomposition d;
    std::array<cplx, 3> coef{fp.at(n, 0, 0), fp.at(0, n, 0), fp.at(0, 0, n)};
    for (int i = 0; i < 3; ++i) {
      if (std::abs(coef[i]) <= cut) continue;
      Vec3 row{t(i, 0), t(i, 1), t(i, 2)};
      d.terms.push_back(DecompTerm{coef[i].real(), row});
    }
    if (d.terms.empty()) return std::nullopt;
    d.kind = d.terms.size() == 1 ? DecompKind::DegenerateRank1
                                 : DecompKind::RealOrthogonal;
    d.residual = residual_against(f, d.terms);
    if (d.residual <= kResidualTol) return d;
    return std::nullopt;
  }

  // Conjugate pair against one axis: the axis is separated and the plane
  // restriction obeys the second-kind recurrence.
  for (Letter ax : {R, G, B}) {
    bool separated = true;
    for_each_pattern(n, [&](const Counts& c, std::size_t idx) {
      int a = axis_count(c, ax);
      if (a > 0 && a < n && std::abs(fp.v[idx]) > cut) separated = false;
    });
    if (!separated) continue;
    Plane pl = plane_of_axis(ax);
    BoolSig r = restrict_signature(fp, pl);
    if (r.maxabs() <= cut) continue;  // pure axis power: corners would match
    if (!is_second_kind(r)) continue;

    double s = std::pow(2.0, n / 2.0);
    cplx cpair = s * (r.f[0] - cplx(0, 1) * r.f[1]) / 2.0;
    Counts axn;
    (ax == B ? axn.i : ax == G ? axn.j : axn.k) = n;
    cplx lambda = fp.at(axn);

    Letter lo = plane_lo(pl), hi = plane_hi(pl);
    Vec3 w{0, 0, 0};
    w[lo] = cplx(1) / std::sqrt(2.0);
    w[hi] = cplx(0, 1) / std::sqrt(2.0);
    // Original-frame vectors: transpose rows back.
    auto unrotate = [&](const Vec3& v) {
      Vec3 r0{0, 0, 0};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r0[i] += t(j, i) * v[j];
      return r0;
    };
    Decomposition d;
    d.kind = DecompKind::ConjPair;
    d.terms.push_back(DecompTerm{cpair, unrotate(w)});
    d.terms.push_back(DecompTerm{std::conj(cpair), unrotate(conj(w))});
    if (std::abs(lambda) > cut) {
      Vec3 axv{0, 0, 0};
      axv[ax] = 1;
      d.terms.push_back(DecompTerm{lambda.real(), unrotate(axv)});
    }
    d.residual = residual_against(f, d.terms);
    if (d.residual <= kResidualTol) return d;
  }
  return std::nullopt;
}

Mat3 frame_from_eigen(const Mat3& s) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = 0.5 * (s(i, j) + s(j, i)).real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  Mat3 t;
  for (int r = 0; r < 3; ++r) {
    Eigen::Vector3d v = es.eigenvectors().col(r);
    // Deterministic sign: first coordinate of clear magnitude is positive.
    double lead = 0.0;
    for (int i = 0; i < 3 && lead == 0.0; ++i)
      if (std::abs(v(i)) > 1e-9) lead = v(i);
    if (lead < 0) v = -v;
    for (int c = 0; c < 3; ++c) t(r, c) = v(c);
  }
  return t;
}

}  // namespace

std::optional<Decomposition> try_decompose(const SymSig& f, Rng* rng) {
  int n = f.arity;
  if (n < 3) fail(Err::ArityTooSmall, "decompose wants arity >= 3");
  if (!f.is_real(kStructuralTol))
    fail(Err::Validation, "decompose wants a real signature");
  double maxa = f.maxabs();
  if (maxa <= 0.0) fail(Err::Degenerate, "zero signature");

  Rng local(global_seed());
  Rng& r = rng ? *rng : local;

  for (int attempt = 0; attempt < 9; ++attempt) {
    SymSig f3 = f;
    bool bad = false;
    for (int t = 0; t < n - 3; ++t) {
      f3 = contract_unary(f3, random_unit(r));
      if (f3.maxabs() <= kStructuralTol * maxa) {
        bad = true;
        break;
      }
    }
    if (bad) continue;
    Mat3 s = ternary_slice(f3, random_unit(r));
    Mat3 t = frame_from_eigen(s);
    if (auto d = detect_in_frame(f, t)) return d;
  }
  return std::nullopt;
}

Decomposition decompose(const SymSig& f, Rng* rng) {
  auto d = try_decompose(f, rng);
  if (!d)
    fail(Err::NotLowRank,
         "no orthogonal power structure found (arity " + std::to_string(f.arity) +
             ")");
  return *d;
}

namespace {

RVec3 unitize(RVec3 v) {
  double nrm = rnorm(v);
  return {v[0] / nrm, v[1] / nrm, v[2] / nrm};
}

RVec3 some_orthogonal(const RVec3& v) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) < std::abs(v[k])) k = i;
  RVec3 e{0, 0, 0};
  e[k] = 1;
  return unitize(rcross(v, e));
}

// Sign convention for frame rows: first entry of clear magnitude positive.
// Returns true when the row was flipped.
bool sign_fix(RVec3& v) {
  double lead = 0.0;
  for (int i = 0; i < 3 && lead == 0.0; ++i)
    if (std::abs(v[i]) > 1e-9) lead = v[i];
  if (lead < 0) {
    v = {-v[0], -v[1], -v[2]};
    return true;
  }
  return false;
}

}  // namespace

CanonicalResult canonicalize(const SymSig& f, Rng* rng) {
  Decomposition d = decompose(f, rng);
  int n = f.arity;
  CanonicalResult out;
  out.kind = d.kind;

  if (d.kind != DecompKind::ConjPair) {
    struct Row {
      cplx coeff;
      RVec3 v;
    };
    std::vector<Row> rows;
    for (const auto& t : d.terms) rows.push_back({t.coeff, real_part(t.vec)});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return std::abs(a.coeff) > std::abs(b.coeff);
    });
    while (rows.size() < 3) {
      if (rows.size() == 1)
        rows.push_back({0.0, some_orthogonal(rows[0].v)});
      else
        rows.push_back({0.0, unitize(rcross(rows[0].v, rows[1].v))});
    }
    for (int i = 0; i < 3; ++i) {
      bool flipped = sign_fix(rows[i].v);
      if (flipped && n % 2 == 1) rows[i].coeff = -rows[i].coeff;
      for (int c = 0; c < 3; ++c) out.T(i, c) = rows[i].v[c];
    }
    for (int i = 0; i < 3; ++i) {
      if (rows[i].coeff == cplx(0)) continue;
      Vec3 e{0, 0, 0};
      e[i] = 1;
      out.canonical_terms.push_back(DecompTerm{rows[i].coeff, e});
    }
  } else {
    // Terms: (c, w), (conj c, conj w) [, (lambda, a)].
    const DecompTerm* pair = &d.terms[0];
    const DecompTerm* axis = d.terms.size() > 2 ? &d.terms[2] : nullptr;
    RVec3 p = real_part(pair->vec), q = imag_part(pair->vec);
    p = {p[0] * std::sqrt(2.0), p[1] * std::sqrt(2.0), p[2] * std::sqrt(2.0)};
    q = {q[0] * std::sqrt(2.0), q[1] * std::sqrt(2.0), q[2] * std::sqrt(2.0)};
    RVec3 a = axis ? real_part(axis->vec) : unitize(rcross(p, q));
    cplx lambda = axis ? axis->coeff : cplx(0);
    if (sign_fix(a) && n % 2 == 1) lambda = -lambda;

    // Rotate within the pair plane so the pair coefficient is real positive.
    cplx c = pair->coeff;
    double phi = std::arg(c);
    double theta = -phi / n;
    RVec3 p2{0, 0, 0}, q2{0, 0, 0};
    for (int i = 0; i < 3; ++i) {
      p2[i] = std::cos(theta) * p[i] + std::sin(theta) * q[i];
      q2[i] = -std::sin(theta) * p[i] + std::cos(theta) * q[i];
    }
    for (int cix = 0; cix < 3; ++cix) {
      out.T(0, cix) = p2[cix];
      out.T(1, cix) = q2[cix];
      out.T(2, cix) = a[cix];
    }
    double mag = std::abs(c);
    Vec3 b0{cplx(1) / std::sqrt(2.0), cplx(0, 1) / std::sqrt(2.0), 0};
    out.canonical_terms.push_back(DecompTerm{mag, b0});
    out.canonical_terms.push_back(DecompTerm{mag, conj(b0)});
    if (lambda != cplx(0)) {
      Vec3 e3{0, 0, 1};
      out.canonical_terms.push_back(DecompTerm{lambda.real(), e3});
    }
  }

  SymSig fp = apply_binary(out.T, f);
  std::vector<Term> ts;
  for (const auto& t : out.canonical_terms) ts.push_back(Term{t.coeff, t.vec});
  SymSig rec = sig_from_terms(ts, n);
  double resid = 0.0;
  for (std::size_t k = 0; k < fp.v.size(); ++k)
    resid = std::max(resid, std::abs(fp.v[k] - rec.v[k]));
  out.residual = resid / std::max(f.maxabs(), 1e-300);
  return out;
}

}  // namespace holant3
