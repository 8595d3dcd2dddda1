// Gadget construction: open-grid signatures, the realization primitives,
// plane restriction of whole grids, and the local holographic rewrite.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "holant3/evaluator.hpp"
#include "holant3/gadgetlab.hpp"

using namespace holant3;

namespace {

const double kRt2 = std::sqrt(2.0);

SymSig feq2() {
  SymSig f = SymSig::zero(3);
  f.at(3, 0, 0) = 1;  // BBB
  f.at(0, 3, 0) = 1;  // GGG
  return f;
}

SymSig feq3() {
  SymSig f = feq2();
  f.at(0, 0, 3) = 1;  // RRR
  return f;
}

// Two copies of f joined on ports 1 and 2; ports 0 stay open (or close too).
SignatureGrid theta_grid(const SymSig& f, bool closed) {
  SignatureGrid g;
  g.signatures["F"] = GridSignature::symmetric(f);
  int a = g.add_vertex("a", "F");
  int b = g.add_vertex("b", "F");
  g.add_edge(a, 1, b, 1);
  g.add_edge(a, 2, b, 2);
  if (closed) {
    g.add_edge(a, 0, b, 0);
  } else {
    g.add_external(a, 0);
    g.add_external(b, 0);
  }
  return g;
}

}  // namespace

TEST_CASE("gadget_signature of the open two-strand join") {
  GadgetResult r = gadget_signature(theta_grid(feq2(), false));
  REQUIRE(r.sig.arity == 2);
  CHECK(r.asym_error <= 1e-12);
  // sum_{s,t} F(x,s,t) F(y,s,t) keeps only matching colours in {B, G}.
  CHECK(std::abs(r.sig.at(2, 0, 0) - cplx(1)) <= 1e-12);
  CHECK(std::abs(r.sig.at(0, 2, 0) - cplx(1)) <= 1e-12);
  CHECK(std::abs(r.sig.at(1, 1, 0)) <= 1e-12);
  CHECK(std::abs(r.sig.at(0, 0, 2)) <= 1e-12);
  CHECK(std::abs(r.sig.at(1, 0, 1)) <= 1e-12);
  CHECK(std::abs(r.sig.at(0, 1, 1)) <= 1e-12);
}

TEST_CASE("a closed gadget reports its Holant as an arity-0 table") {
  GadgetResult r = gadget_signature(theta_grid(feq2(), true));
  REQUIRE(r.sig.arity == 0);
  REQUIRE(r.sig.v.size() == 1);
  CHECK(std::abs(r.sig.v[0] - cplx(2)) <= 1e-12);
}

TEST_CASE("gadget caps: external ports and internal assignments") {
  // Seven externals on one vertex: rejected before any work happens.
  SignatureGrid wide;
  SymSig f7 = SymSig::zero(7);
  f7.v[0] = 1;
  wide.signatures["F"] = GridSignature::symmetric(f7);
  int v = wide.add_vertex("v", "F");
  for (int p = 0; p < 7; ++p) wide.add_external(v, p);
  CHECK_THROWS_AS(gadget_signature(wide), HolantError);
  try {
    gadget_signature(wide);
  } catch (const HolantError& e) {
    CHECK(e.code == Err::TooLarge);
  }

  // A 14-edge closed cycle exceeds the 3^13-sized default assignment cap.
  SignatureGrid ring;
  SymSig b = SymSig::zero(2);
  b.at(2, 0, 0) = b.at(0, 2, 0) = b.at(0, 0, 2) = 1;
  ring.signatures["b"] = GridSignature::symmetric(b);
  int n = 14;
  std::vector<int> vs;
  for (int i = 0; i < n; ++i)
    vs.push_back(ring.add_vertex("v" + std::to_string(i), "b"));
  for (int i = 0; i < n; ++i)
    ring.add_edge(vs[static_cast<std::size_t>(i)], 1,
                  vs[static_cast<std::size_t>((i + 1) % n)], 0);
  CHECK_THROWS_AS(gadget_signature(ring), HolantError);

  // The cap boundary is exact: closed theta has 3 internal edges, so 27
  // assignments squeak under a cap of 27 and burst a cap of 26.
  SignatureGrid th = theta_grid(feq2(), true);
  CHECK_THROWS_AS(gadget_signature(th, 26), HolantError);
  GadgetResult ok = gadget_signature(th, 27);
  CHECK(std::abs(ok.sig.v[0] - cplx(2)) <= 1e-12);
}

TEST_CASE("realize_plane_equality produces the plane projector") {
  PlaneEqRealization pe = realize_plane_equality(feq2());
  Mat3 want = Mat3::diag(1, 1, 0);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(pe.result(r, c) - want(r, c)) <= 1e-9);
  // The recorded grid really computes that binary.
  REQUIRE(pe.grid.externals.size() == 2);
  GadgetResult g = gadget_signature(pe.grid);
  REQUIRE(g.sig.arity == 2);
  Mat3 m = binary_to_mat(g.sig);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(m(r, c) - pe.result(r, c)) <= 1e-9);
}

TEST_CASE("realize_z_arity4 carries the axis weight to lambda cubed") {
  Vec3 b0{1.0 / kRt2, cplx(0, 1.0 / kRt2), 0};
  Vec3 b0c{1.0 / kRt2, cplx(0, -1.0 / kRt2), 0};
  for (double lam : {0.0, 1.0, 2.0}) {
    std::vector<Term> terms{{1, b0}, {1, b0c}};
    if (lam != 0.0) terms.push_back({lam, Vec3{0, 0, 1}});
    SymSig f = sig_from_terms(terms, 3);
    REQUIRE(f.is_real(1e-12));
    Z4Realization z = realize_z_arity4(f);
    REQUIRE(z.result.arity == 4);
    CHECK(std::abs(z.result.at(0, 0, 4) - cplx(lam * lam * lam)) <= 1e-9);
    // The rest is c w^4 + conj(c) w~^4 for some c, which forces these
    // identities on the BG block and bans any pattern mixing BG with R.
    CHECK(std::abs(z.result.at(4, 0, 0) - z.result.at(0, 4, 0)) <= 1e-9);
    CHECK(std::abs(z.result.at(4, 0, 0) + z.result.at(2, 2, 0)) <= 1e-9);
    CHECK(std::abs(z.result.at(3, 1, 0) + z.result.at(1, 3, 0)) <= 1e-9);
    for (int r = 1; r <= 3; ++r)
      for (int b = 0; b + r <= 4; ++b)
        CHECK(std::abs(z.result.at(4 - r - b, b, r)) <= 1e-9);
    GadgetResult g = gadget_signature(z.grid);
    REQUIRE(g.sig.arity == 4);
    for (std::size_t i = 0; i < g.sig.v.size(); ++i)
      CHECK(std::abs(g.sig.v[i] - z.result.v[i]) <= 1e-9);
  }
}

TEST_CASE("realize_coeff_geneq hits requested diagonal coefficients") {
  // Targets pair up with the terms of f's decomposition, in that order.
  std::array<cplx, 3> target{2.0, 3.0, 4.0};
  SymSig f = feq3();
  Decomposition d = decompose(f);
  REQUIRE(d.terms.size() == 3);
  GeneqRealization gr = realize_coeff_geneq(f, target);
  REQUIRE(gr.result.arity == 3);
  SymSig want = sig_from_terms({{target[0], d.terms[0].vec},
                                {target[1], d.terms[1].vec},
                                {target[2], d.terms[2].vec}},
                               3);
  for (std::size_t i = 0; i < want.v.size(); ++i)
    CHECK(std::abs(gr.result.v[i] - want.v[i]) <= 1e-9);
  // The three axis weights are exactly the multiset {2, 3, 4}.
  std::vector<double> diag{gr.result.at(3, 0, 0).real(),
                           gr.result.at(0, 3, 0).real(),
                           gr.result.at(0, 0, 3).real()};
  std::sort(diag.begin(), diag.end());
  CHECK(std::abs(diag[0] - 2.0) <= 1e-9);
  CHECK(std::abs(diag[1] - 3.0) <= 1e-9);
  CHECK(std::abs(diag[2] - 4.0) <= 1e-9);
  // And the grid is faithful to the reported table.
  GadgetResult g = gadget_signature(gr.grid);
  REQUIRE(g.sig.arity == 3);
  for (std::size_t i = 0; i < g.sig.v.size(); ++i)
    CHECK(std::abs(g.sig.v[i] - gr.result.v[i]) <= 1e-9);
}

TEST_CASE("grid_to_boolean restricts a closed grid to a plane") {
  SignatureGrid g = theta_grid(feq2(), true);
  BoolGrid bg = grid_to_boolean(g, Plane::BG);
  REQUIRE(bg.vsigs.size() == 2);
  REQUIRE(bg.edges.size() == 3);
  CHECK(std::abs(eval_bool_brute(bg) - cplx(2)) <= 1e-12);

  // Signatures with weight outside the plane are refused outright.
  CHECK_THROWS_AS(grid_to_boolean(g, Plane::BR), HolantError);

  // A BR-supported grid restricts to the BR plane instead.
  SymSig fbr = SymSig::zero(3);
  fbr.at(3, 0, 0) = 1;
  fbr.at(0, 0, 3) = 1;
  BoolGrid br = grid_to_boolean(theta_grid(fbr, true), Plane::BR);
  CHECK(std::abs(eval_bool_brute(br) - cplx(2)) <= 1e-12);
}

TEST_CASE("local_holographic preserves the closed-grid value") {
  SignatureGrid g = theta_grid(feq2(), true);
  cplx before = eval_brute(g);
  REQUIRE(std::abs(before - cplx(2)) <= 1e-12);

  Mat3 m = Mat3::identity();
  m(0, 1) = 1;   // shear
  m(2, 2) = 2;   // stretch
  SignatureGrid g2 = local_holographic(g, "a", m);
  CHECK(g2.vertices.size() > g.vertices.size());
  g2.validate();
  cplx after = eval_brute(g2);
  CHECK(std::abs(after - before) <= 1e-9 * std::abs(before));

  // Rewriting with an orthogonal m keeps the value as well.
  Mat3 q = Mat3::zero();
  q(0, 1) = 1;
  q(1, 0) = -1;
  q(2, 2) = 1;
  SignatureGrid g3 = local_holographic(g, "b", q);
  cplx rot = eval_brute(g3);
  CHECK(std::abs(rot - before) <= 1e-9 * std::abs(before));

  // Unknown vertex ids are rejected.
  CHECK_THROWS_AS(local_holographic(g, "nope", m), HolantError);
}
