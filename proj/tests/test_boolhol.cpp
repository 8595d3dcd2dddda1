// Boolean-domain signatures: recurrence spaces, decomposition, the
// tractability rules, and polynomial vs brute-force evaluation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "holant3/boolhol.hpp"

using namespace holant3;

namespace {

BoolSig bs(std::initializer_list<double> vals) {
  BoolSig f;
  for (double v : vals) f.f.push_back(v);
  return f;
}

}  // namespace

TEST_CASE("first_kind_space solves the recurrence") {
  // Equality-of-three admits exactly (a, b) = (0, 1).
  auto sp = first_kind_space(bs({1, 0, 0, 1}));
  REQUIRE(sp.size() == 1);
  CHECK(sp[0][0] == doctest::Approx(0));
  CHECK(std::abs(sp[0][1]) == doctest::Approx(1));

  // Constant table: geometric with ratio 1, pair (1, 0).
  auto sc = first_kind_space(bs({1, 1, 1, 1}));
  REQUIRE(sc.size() == 1);
  CHECK(sc[0][0] == doctest::Approx(1));
  CHECK(sc[0][1] == doctest::Approx(0));

  // Geometric ratio r satisfies a + b r = a r^2.
  double r = 2.0;
  auto sg = first_kind_space(bs({1, r, r * r, r * r * r}));
  REQUIRE(sg.size() == 1);
  double a = sg[0][0], b = sg[0][1];
  CHECK(a + b * r == doctest::Approx(a * r * r));

  // Binary [x, 0, x]: both recurrence coefficients vanish, dimension 2.
  CHECK(first_kind_space(bs({3, 0, 3})).size() == 2);

  // Not-all-equal has no recurrence pair.
  CHECK(first_kind_space(bs({0, 1, 1, 0})).empty());
}

TEST_CASE("second kind and degeneracy predicates") {
  CHECK(is_second_kind(bs({1, 2, -1, -2})));
  CHECK(is_second_kind(bs({2, 0, -2})));
  CHECK_FALSE(is_second_kind(bs({1, 0, 0, 1})));
  CHECK_FALSE(is_second_kind(bs({0, 1, 1, 0})));

  CHECK(bool_is_degenerate(bs({1, 2, 4})));
  CHECK(bool_is_degenerate(bs({0, 0, 0, 5})));
  CHECK_FALSE(bool_is_degenerate(bs({1, 0, 1})));
}

TEST_CASE("normalize_ab fixes scale and sign") {
  auto n1 = normalize_ab(0, -3);
  CHECK(n1[0] == doctest::Approx(0));
  CHECK(n1[1] == doctest::Approx(1));
  auto n2 = normalize_ab(-2, 1);
  CHECK(n2[0] == doctest::Approx(1));
  CHECK(n2[1] == doctest::Approx(-0.5));
}

TEST_CASE("bool_decompose recovers the two families") {
  // Two real orthogonal directions.
  BoolDecomp d = bool_decompose(bs({1, 0, 0, 1}));
  CHECK(d.kind == BoolDecomp::Kind::TwoReal);
  REQUIRE(d.terms.size() == 2);
  CHECK(d.residual <= kResidualTol);
  cplx ip = d.terms[0].vec[0] * d.terms[1].vec[0] +
            d.terms[0].vec[1] * d.terms[1].vec[1];
  CHECK(std::abs(ip) <= 1e-9);

  // Conjugate pair: (1,i)^3 + (1,-i)^3 = [2, 0, -2, 0].
  BoolDecomp c = bool_decompose(bs({2, 0, -2, 0}));
  CHECK(c.kind == BoolDecomp::Kind::ConjPair);
  REQUIRE(c.terms.size() == 2);
  CHECK(std::abs(c.terms[0].coeff - std::conj(c.terms[1].coeff)) <= 1e-9);
  BoolSig back = bool_from_terms(c.terms, 3);
  for (int k = 0; k <= 3; ++k)
    CHECK(std::abs(back.f[static_cast<std::size_t>(k)] -
                   bs({2, 0, -2, 0}).f[static_cast<std::size_t>(k)]) <= 1e-9);

  CHECK(bool_decompose(bs({1, 2, 4, 8})).kind == BoolDecomp::Kind::Degenerate);
  CHECK_FALSE(try_bool_decompose(bs({0, 1, 1, 0})).has_value());
}

TEST_CASE("bool_apply_binary transforms every argument") {
  Mat2 h;
  h(0, 0) = 1; h(0, 1) = 1;
  h(1, 0) = 1; h(1, 1) = -1;
  BoolSig out = bool_apply_binary(h, bs({1, 0, 0, 1}));
  // rows (1,1) and (1,-1): (1,1)^3 + (1,-1)^3 = [2, 0, 2, 0].
  CHECK(std::abs(out.f[0] - cplx(2)) <= 1e-12);
  CHECK(std::abs(out.f[1]) <= 1e-12);
  CHECK(std::abs(out.f[2] - cplx(2)) <= 1e-12);
  CHECK(std::abs(out.f[3]) <= 1e-12);
}

TEST_CASE("classify_bool_set: checklist fixtures") {
  BoolVerdict v1 = classify_bool_set({BoolAtom::symmetric(bs({1, 0, 0, 1}))});
  CHECK(v1.status == BoolVerdict::Status::Tractable);
  CHECK(v1.cls == BoolVerdict::Class::FirstKind);
  CHECK(v1.ab[0] == doctest::Approx(0));
  CHECK(std::abs(v1.ab[1]) == doctest::Approx(1));

  BoolVerdict v2 = classify_bool_set({BoolAtom::symmetric(bs({1, 2, -1, -2}))});
  CHECK(v2.status == BoolVerdict::Status::Tractable);
  CHECK(v2.cls == BoolVerdict::Class::SecondKind);

  BoolVerdict v3 = classify_bool_set({BoolAtom::symmetric(bs({1, 0, 0, 1})),
                                      BoolAtom::symmetric(bs({0, 1, 0}))});
  CHECK(v3.status == BoolVerdict::Status::Tractable);

  BoolVerdict v4 = classify_bool_set({BoolAtom::symmetric(bs({1, 0, 0, 1})),
                                      BoolAtom::symmetric(bs({0, 1, 1, 0}))});
  CHECK(v4.status == BoolVerdict::Status::Hard);
  CHECK_FALSE(v4.hard_rule.empty());
}

TEST_CASE("classify_bool_set: binary compatibility rules") {
  BoolAtom alt = BoolAtom::symmetric(bs({1, 2, -1, -2}));
  // [x, y, -x] and [x, 0, x] go with second-kind signatures...
  CHECK(classify_bool_set({alt, BoolAtom::symmetric(bs({3, 1, -3}))}).status ==
        BoolVerdict::Status::Tractable);
  CHECK(classify_bool_set({alt, BoolAtom::symmetric(bs({2, 0, 2}))}).status ==
        BoolVerdict::Status::Tractable);
  // ...as does any degenerate binary, which factors into unaries...
  CHECK(classify_bool_set({alt, BoolAtom::symmetric(bs({1, 1, 1}))}).status ==
        BoolVerdict::Status::Tractable);
  // ...but a generic non-degenerate binary breaks the set.
  CHECK(classify_bool_set({alt, BoolAtom::symmetric(bs({1, 1, -2}))}).status ==
        BoolVerdict::Status::Hard);

  // All binaries: always tractable regardless of shape.
  CHECK(classify_bool_set({BoolAtom::symmetric(bs({1, 1, 1})),
                           BoolAtom::symmetric(bs({0.5, 2}))})
            .status == BoolVerdict::Status::Tractable);
}

TEST_CASE("eval_bool matches brute force on hand-built grids") {
  BoolAtom eq3 = BoolAtom::symmetric(bs({1, 0, 0, 1}));
  BoolAtom flip = BoolAtom::symmetric(bs({0, 1, 0}));

  // Two equality-of-three vertices joined by three edges: value 2.
  BoolGrid theta;
  theta.vsigs = {eq3, eq3};
  theta.edges = {Edge{{0, 0}, {1, 0}}, Edge{{0, 1}, {1, 1}},
                 Edge{{0, 2}, {1, 2}}};
  BoolVerdict v = classify_bool_set(theta.vsigs);
  REQUIRE(v.status == BoolVerdict::Status::Tractable);
  CHECK(std::abs(eval_bool(theta, v) - cplx(2)) <= 1e-9);
  CHECK(std::abs(eval_bool_brute(theta) - cplx(2)) <= 1e-12);

  // Insert a flip on one strand: all-equal on both sides is impossible.
  BoolGrid twisted;
  twisted.vsigs = {eq3, eq3, flip};
  twisted.edges = {Edge{{0, 0}, {2, 0}}, Edge{{2, 1}, {1, 0}},
                   Edge{{0, 1}, {1, 1}}, Edge{{0, 2}, {1, 2}}};
  BoolVerdict vt = classify_bool_set(twisted.vsigs);
  REQUIRE(vt.status == BoolVerdict::Status::Tractable);
  CHECK(std::abs(eval_bool(twisted, vt)) <= 1e-9);
  CHECK(std::abs(eval_bool_brute(twisted)) <= 1e-12);

  // A symmetric binary self-loop traces to f_0 + f_2.
  BoolGrid loop;
  loop.vsigs = {BoolAtom::symmetric(bs({4, 9, -1}))};
  loop.edges = {Edge{{0, 0}, {0, 1}}};
  BoolVerdict vl = classify_bool_set(loop.vsigs);
  CHECK(std::abs(eval_bool(loop, vl) - cplx(3)) <= 1e-9);
  CHECK(std::abs(eval_bool_brute(loop) - cplx(3)) <= 1e-12);

  // A matrix atom self-loop traces the matrix.
  Mat2 m;
  m(0, 0) = 2; m(0, 1) = 7; m(1, 0) = -5; m(1, 1) = 3;
  BoolGrid mloop;
  mloop.vsigs = {BoolAtom::matrix(m)};
  mloop.edges = {Edge{{0, 0}, {0, 1}}};
  CHECK(std::abs(eval_bool_brute(mloop) - cplx(5)) <= 1e-12);
}

TEST_CASE("matrix atoms carry orientation") {
  // Unary u -- M -- unary w computes u^T M w; M is not symmetric, so the two
  // orientations differ and brute force must respect port roles.
  Mat2 m;
  m(0, 0) = 0; m(0, 1) = 1; m(1, 0) = 3; m(1, 1) = 0;
  BoolGrid g;
  g.vsigs = {BoolAtom::symmetric(bs({1, 2})), BoolAtom::matrix(m),
             BoolAtom::symmetric(bs({5, 7}))};
  g.edges = {Edge{{0, 0}, {1, 0}}, Edge{{1, 1}, {2, 0}}};
  // u^T M w = sum u_a M(a,b) w_b = 1*1*7 + 2*3*5 = 37.
  CHECK(std::abs(eval_bool_brute(g) - cplx(37)) <= 1e-12);

  BoolGrid r;
  r.vsigs = g.vsigs;
  r.edges = {Edge{{0, 0}, {1, 1}}, Edge{{1, 0}, {2, 0}}};
  // Reversed roles: w^T M u = 5*1*2 + 7*3*1 = 31.
  CHECK(std::abs(eval_bool_brute(r) - cplx(31)) <= 1e-12);
}

TEST_CASE("eval_bool equals brute force on seeded random grids") {
  std::vector<std::vector<BoolAtom>> pools = {
      {BoolAtom::symmetric(bs({1, 0, 0, 1})), BoolAtom::symmetric(bs({0, 1, 0}))},
      {BoolAtom::symmetric(bs({1, 2, -1, -2})),
       BoolAtom::symmetric(bs({3, 1, -3}))},
      {BoolAtom::symmetric(bs({0.5, 2})), BoolAtom::symmetric(bs({3, -1})),
       BoolAtom::symmetric(bs({2, 0, 1}))}};
  Rng rng(4242);
  for (const auto& pool : pools) {
    BoolVerdict v = classify_bool_set(pool);
    REQUIRE(v.status == BoolVerdict::Status::Tractable);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<BoolAtom> atoms;
      int ports = 0;
      do {
        atoms.clear();
        ports = 0;
        int n = rng.uniform_int(1, 4);
        for (int i = 0; i < n; ++i) {
          const BoolAtom& pick = pool[static_cast<std::size_t>(
              rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
          atoms.push_back(pick);
          ports += pick.arity();
        }
      } while (ports % 2 != 0);
      // Random perfect matching over ports.
      BoolGrid g;
      g.vsigs = atoms;
      std::vector<PortRef> slots;
      for (int vx = 0; vx < static_cast<int>(atoms.size()); ++vx)
        for (int p = 0; p < atoms[static_cast<std::size_t>(vx)].arity(); ++p)
          slots.push_back(PortRef{vx, p});
      for (int i = static_cast<int>(slots.size()) - 1; i > 0; --i)
        std::swap(slots[static_cast<std::size_t>(i)],
                  slots[static_cast<std::size_t>(rng.uniform_int(0, i))]);
      for (std::size_t i = 0; i + 1 < slots.size(); i += 2)
        g.edges.push_back(Edge{slots[i], slots[i + 1]});

      cplx fast = eval_bool(g, v);
      cplx ref = eval_bool_brute(g);
      CHECK(std::abs(fast - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
    }
  }
}
