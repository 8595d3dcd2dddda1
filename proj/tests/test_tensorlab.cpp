// Tensor operations and decomposition: transformation functoriality, unary
// contraction, the two decomposition families, canonical frame conventions.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "holant3/tensorlab.hpp"

using namespace holant3;

namespace {

const double kRt2 = std::sqrt(2.0);

SymSig random_sig(Rng& rng, int arity) {
  SymSig f;
  f.arity = arity;
  f.v.resize(SymSig::table_size(arity));
  for (auto& z : f.v) z = rng.uniform(-2.0, 2.0);
  return f;
}

Mat3 random_orthogonal(Rng& rng) {
  for (;;) {
    std::array<std::array<double, 3>, 3> r{};
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      std::array<double, 3> v{rng.gauss(), rng.gauss(), rng.gauss()};
      for (int j = 0; j < i; ++j) {
        double d = v[0] * r[j][0] + v[1] * r[j][1] + v[2] * r[j][2];
        for (int l = 0; l < 3; ++l) v[l] -= d * r[j][l];
      }
      double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      if (n < 0.2) ok = false;
      else {
        for (double& x : v) x /= n;
        r[i] = v;
      }
    }
    if (!ok) continue;
    Mat3 q;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) q(a, b) = r[a][b];
    return q;
  }
}

double table_dist(const SymSig& a, const SymSig& b) {
  REQUIRE(a.arity == b.arity);
  double d = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i)
    d = std::max(d, std::abs(a.v[i] - b.v[i]));
  return d;
}

}  // namespace

TEST_CASE("apply_binary: identity, rank-one covariance, functoriality") {
  Rng rng(2024);
  SymSig f = random_sig(rng, 3);
  CHECK(table_dist(apply_binary(Mat3::identity(), f), f) == doctest::Approx(0));

  // M^(x)n (c v^n) = c (M v)^n.
  Vec3 v{1, -2, 0.5};
  Mat3 m = random_orthogonal(rng);
  SymSig pow = sig_from_terms({{3.0, v}}, 4);
  SymSig lhs = apply_binary(m, pow);
  SymSig rhs = sig_from_terms({{3.0, m * v}}, 4);
  CHECK(table_dist(lhs, rhs) <= 1e-12 * lhs.maxabs());

  // (PQ)^(x)n = P^(x)n Q^(x)n.
  for (int arity = 2; arity <= 5; ++arity) {
    SymSig g = random_sig(rng, arity);
    Mat3 p = random_orthogonal(rng);
    Mat3 q = random_orthogonal(rng);
    SymSig once = apply_binary(p * q, g);
    SymSig twice = apply_binary(p, apply_binary(q, g));
    CHECK(table_dist(once, twice) <= 1e-10 * once.maxabs());
  }
}

TEST_CASE("contract_unary on split powers") {
  SymSig f = sig_from_terms({{2.0, Vec3{1, 0, 0}}, {-1.0, Vec3{0, 1, 0}}}, 3);
  SymSig c = contract_unary(f, Vec3{3, 5, 0});
  REQUIRE(c.arity == 2);
  CHECK(sig_value(c, "BB") == cplx(6));    // 2 * <e1,u> = 6 on e1^2
  CHECK(sig_value(c, "GG") == cplx(-5));   // -1 * <e2,u> = -5 on e2^2
  CHECK(sig_value(c, "BG") == cplx(0));
  CHECK(sig_value(c, "RR") == cplx(0));

  SymSig unary = contract_unary(c, Vec3{1, 1, 1});
  CHECK(unary.arity == 1);
  CHECK(unary.v[0] == cplx(6));
  CHECK(unary.v[1] == cplx(-5));
}

TEST_CASE("ternary_slice and full_contract") {
  SymSig f = sig_from_terms({{1.0, Vec3{1, 0, 0}}}, 3);
  Mat3 s = ternary_slice(f, Vec3{1, 0, 0});
  CHECK(std::abs(s(0, 0) - cplx(1)) <= 1e-12);
  double off = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (r || c) off = std::max(off, std::abs(s(r, c)));
  CHECK(off <= 1e-12);

  // Tuple-wise inner product: equality-of-two contracts to term count.
  SymSig eq = sig_from_terms({{1.0, Vec3{1, 0, 0}}, {1.0, Vec3{0, 1, 0}}}, 3);
  CHECK(std::abs(full_contract(eq, eq) - cplx(2)) <= 1e-12);

  // A single off-diagonal entry contributes once per arrangement.
  SymSig one;
  one.arity = 3;
  one.v.assign(SymSig::table_size(3), cplx(0));
  one.v[SymSig::index_of(Counts{2, 1, 0})] = 2.0;  // BBG
  CHECK(std::abs(full_contract(one, one) - cplx(12)) <= 1e-12);  // 3 * 2^2
}

TEST_CASE("decompose: degenerate rank one") {
  Vec3 v{0.6, 0.8, 0};
  SymSig f = sig_from_terms({{5.0, v}}, 4);
  Decomposition d = decompose(f);
  CHECK(d.kind == DecompKind::DegenerateRank1);
  REQUIRE(d.terms.size() == 1);
  CHECK(d.residual <= kResidualTol);
  SymSig back = reconstruct(d, 4);
  CHECK(table_dist(back, f) <= 1e-9 * f.maxabs());
}

TEST_CASE("decompose: real orthogonal family, arities 3 to 6") {
  Rng rng(77);
  for (int arity = 3; arity <= 6; ++arity) {
    Mat3 q = random_orthogonal(rng);
    std::vector<Term> terms;
    int nterm = 2 + (arity % 2);
    for (int t = 0; t < nterm; ++t) {
      Vec3 row{q(t, 0), q(t, 1), q(t, 2)};
      terms.push_back({rng.uniform(0.3, 2.0) * (t % 2 ? -1.0 : 1.0), row});
    }
    SymSig f = sig_from_terms(terms, arity);
    Decomposition d = decompose(f);
    CHECK(d.kind == DecompKind::RealOrthogonal);
    CHECK(static_cast<int>(d.terms.size()) == nterm);
    CHECK(d.residual <= kResidualTol);
    CHECK(table_dist(reconstruct(d, arity), f) <= 1e-7 * f.maxabs());
    // Recovered directions are real unit vectors, pairwise orthogonal.
    for (std::size_t a = 0; a < d.terms.size(); ++a) {
      CHECK(vec_is_real(d.terms[a].vec, 1e-7));
      CHECK(std::abs(dot(d.terms[a].vec, d.terms[a].vec) - cplx(1)) <= 1e-7);
      for (std::size_t b = a + 1; b < d.terms.size(); ++b)
        CHECK(std::abs(dot(d.terms[a].vec, d.terms[b].vec)) <= 1e-7);
    }
  }
}

TEST_CASE("decompose: conjugate pair family") {
  Rng rng(78);
  for (int arity = 3; arity <= 6; ++arity) {
    Mat3 q = random_orthogonal(rng);
    Vec3 p{q(0, 0), q(0, 1), q(0, 2)};
    Vec3 r{q(1, 0), q(1, 1), q(1, 2)};
    Vec3 w;
    for (int i = 0; i < 3; ++i)
      w[static_cast<std::size_t>(i)] =
          (p[static_cast<std::size_t>(i)] +
           cplx(0, 1) * r[static_cast<std::size_t>(i)]) / kRt2;
    cplx c(rng.uniform(0.3, 1.5), rng.uniform(-1.0, 1.0));
    std::vector<Term> terms = {{c, w}, {std::conj(c), holant3::conj(w)}};
    double lam = rng.uniform(0.4, 2.0);
    terms.push_back({lam, Vec3{q(2, 0), q(2, 1), q(2, 2)}});
    SymSig f = sig_from_terms(terms, arity);
    REQUIRE(f.is_real(1e-9 * f.maxabs()));

    Decomposition d = decompose(f);
    CHECK(d.kind == DecompKind::ConjPair);
    CHECK(d.residual <= kResidualTol);
    CHECK(table_dist(reconstruct(d, arity), f) <= 1e-7 * f.maxabs());
    REQUIRE(d.terms.size() == 3);
    // First two terms are a conjugate pair, third is the real axis term.
    CHECK(std::abs(d.terms[0].coeff - std::conj(d.terms[1].coeff)) <= 1e-7);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(d.terms[0].vec[static_cast<std::size_t>(i)] -
                     std::conj(d.terms[1].vec[static_cast<std::size_t>(i)])) <=
            1e-7);
    CHECK(vec_is_real(d.terms[2].vec, 1e-7));
  }
}

TEST_CASE("try_decompose rejects full-rank generic tables") {
  Rng rng(79);
  int rejected = 0;
  for (int i = 0; i < 5; ++i)
    if (!try_decompose(random_sig(rng, 3), &rng)) ++rejected;
  CHECK(rejected == 5);
}

TEST_CASE("canonicalize: real orthogonal conventions") {
  Rng rng(80);
  Mat3 q = random_orthogonal(rng);
  std::vector<Term> terms;
  double coeffs[3] = {-0.7, 2.5, 1.1};
  for (int t = 0; t < 3; ++t)
    terms.push_back({coeffs[t], Vec3{q(t, 0), q(t, 1), q(t, 2)}});
  SymSig f = sig_from_terms(terms, 3);

  CanonicalResult cr = canonicalize(f);
  CHECK(cr.kind == DecompKind::RealOrthogonal);
  CHECK(cr.residual <= kResidualTol);
  CHECK(is_orthogonal(cr.T, kOrthoTol));
  REQUIRE(cr.canonical_terms.size() == 3);
  // Coefficient moduli are nonincreasing and directions are axes.
  double prev = 1e300;
  for (std::size_t t = 0; t < 3; ++t) {
    double mag = std::abs(cr.canonical_terms[t].coeff);
    CHECK(mag <= prev + 1e-12);
    prev = mag;
    int nz = 0;
    for (int i = 0; i < 3; ++i)
      if (std::abs(cr.canonical_terms[t].vec[static_cast<std::size_t>(i)]) >
          1e-9)
        ++nz;
    CHECK(nz == 1);
  }
  // T^(x)n f equals the canonical reconstruction exactly.
  Decomposition d;
  d.kind = cr.kind;
  d.terms = cr.canonical_terms;
  CHECK(table_dist(apply_binary(cr.T, f), reconstruct(d, 3)) <=
        1e-7 * f.maxabs());
}

TEST_CASE("canonicalize: conjugate pair conventions") {
  Rng rng(81);
  Mat3 q = random_orthogonal(rng);
  Vec3 w;
  for (int i = 0; i < 3; ++i)
    w[static_cast<std::size_t>(i)] =
        (q(0, i) + cplx(0, 1) * q(1, i)) / kRt2;
  cplx c(0.9, -1.3);
  SymSig f = sig_from_terms(
      {{c, w}, {std::conj(c), holant3::conj(w)}, {1.7, Vec3{q(2, 0), q(2, 1), q(2, 2)}}},
      5);

  CanonicalResult cr = canonicalize(f);
  CHECK(cr.kind == DecompKind::ConjPair);
  CHECK(is_orthogonal(cr.T, kOrthoTol));
  REQUIRE(cr.canonical_terms.size() == 3);
  const auto& lead = cr.canonical_terms[0];
  CHECK(std::abs(lead.coeff.imag()) <= 1e-7);
  CHECK(lead.coeff.real() > 0);
  // Leading direction is (1, i, 0)/sqrt(2).
  CHECK(std::abs(lead.vec[0] - cplx(1 / kRt2)) <= 1e-7);
  CHECK(std::abs(lead.vec[1] - cplx(0, 1 / kRt2)) <= 1e-7);
  CHECK(std::abs(lead.vec[2]) <= 1e-7);
  // Axis coefficient stays real.
  CHECK(std::abs(cr.canonical_terms[2].coeff.imag()) <= 1e-7);

  Decomposition d;
  d.kind = cr.kind;
  d.terms = cr.canonical_terms;
  CHECK(table_dist(apply_binary(cr.T, f), reconstruct(d, 5)) <=
        1e-7 * f.maxabs());
}

TEST_CASE("global_seed is read once and then stays fixed") {
  // The seed is sampled from HOLANT3_SEED at first use and cached, so every
  // randomised routine in one process agrees on it.
  const char* pre = std::getenv("HOLANT3_SEED");
  std::uint64_t expect = kDefaultSeed;
  if (pre) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(pre, &end, 0);
    if (end && *end == '\0') expect = v;
  }
  CHECK(global_seed() == expect);
  setenv("HOLANT3_SEED", "12345", 1);
  CHECK(global_seed() == expect);  // later changes are deliberately ignored
  CHECK(global_seed() == global_seed());
  if (pre)
    setenv("HOLANT3_SEED", pre, 1);
  else
    unsetenv("HOLANT3_SEED");
}
