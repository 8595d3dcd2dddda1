// Set classification: the worked example sets, hardness witnesses, frame
// invariance, degenerate handling, and the signed-permutation machinery.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "holant3/classifier.hpp"

using namespace holant3;

namespace {

const double kRt2 = std::sqrt(2.0);

SymSig make_sig(int arity,
                std::initializer_list<std::pair<const char*, double>> vals) {
  SymSig f;
  f.arity = arity;
  f.v.assign(SymSig::table_size(arity), cplx(0));
  for (const auto& [idx, val] : vals) {
    Counts c{0, 0, 0};
    for (const char* p = idx; *p; ++p) {
      if (*p == 'B') ++c.i;
      if (*p == 'G') ++c.j;
      if (*p == 'R') ++c.k;
    }
    f.v[SymSig::index_of(c)] = val;
  }
  return f;
}

std::vector<NamedSig> example1() {
  return {
      {"F1", make_sig(3, {{"BBB", 2}, {"BBG", 2}, {"BBR", -1}, {"BGG", 2},
                          {"BGR", -1}, {"BRR", 5}, {"GGG", 2}, {"GGR", -1},
                          {"GRR", 5}, {"RRR", -7}})},
      {"G1", make_sig(3, {{"BBB", -7}, {"BBG", 5}, {"BBR", -1}, {"BGG", 5},
                          {"BGR", 5}, {"BRR", 2}, {"GGG", -7}, {"GGR", -1},
                          {"GRR", 2}, {"RRR", 2}})},
      {"H1", make_sig(3, {{"BBB", -2}, {"BBG", 1}, {"BBR", 1}, {"BGG", 1},
                          {"BGR", -2}, {"BRR", 1}, {"GGG", -2}, {"GGR", 1},
                          {"GRR", 1}, {"RRR", -2}})},
      {"B1", make_sig(2, {{"BB", 3 + 2 * kRt2}, {"BG", -3 + 2 * kRt2},
                          {"BR", -kRt2}, {"GG", 3 + 2 * kRt2}, {"GR", -kRt2},
                          {"RR", -4 * kRt2}})}};
}

std::vector<NamedSig> example2() {
  return {
      {"F2", make_sig(3, {{"BBB", -3}, {"BBG", 1}, {"BBR", -5}, {"BGG", -3},
                          {"BGR", -5}, {"BRR", 2}, {"GGG", 1}, {"GGR", -5},
                          {"GRR", 2}, {"RRR", 10}})},
      {"G2", make_sig(3, {{"BBB", 5}, {"BBG", 11}, {"BBR", 4}, {"BGG", 5},
                          {"BGR", 4}, {"BRR", 2}, {"GGG", 11}, {"GGR", 4},
                          {"GRR", 2}, {"RRR", 1}})},
      {"H2", make_sig(2, {{"BB", 4 + 2 * kRt2}, {"BG", -2 + 2 * kRt2},
                          {"BR", -4 + kRt2}, {"GG", 4 + 2 * kRt2},
                          {"GR", -4 + kRt2}, {"RR", -2 - 4 * kRt2}})},
      {"B2", make_sig(2, {{"BB", 2 - 2 * kRt2}, {"BG", 0}, {"BR", 2 + kRt2},
                          {"GG", -2 + 2 * kRt2}, {"GR", -2 - kRt2},
                          {"RR", 0}})}};
}

Mat3 rotation(double c1, double s1) {
  // Rotation in the BG plane.
  Mat3 q = Mat3::identity();
  q(0, 0) = c1; q(0, 1) = s1;
  q(1, 0) = -s1; q(1, 1) = c1;
  return q;
}

}  // namespace

TEST_CASE("worked example sets classify to their families") {
  Verdict v1 = classify_set(example1());
  REQUIRE(v1.status == Verdict::Status::Tractable);
  REQUIRE(v1.cls.has_value());
  CHECK(*v1.cls == TractClass::E);
  REQUIRE(v1.witness_T.has_value());
  CHECK(is_orthogonal(*v1.witness_T, kOrthoTol));
  CHECK(v1.warnings.empty());

  Verdict v2 = classify_set(example2());
  REQUIRE(v2.status == Verdict::Status::Tractable);
  REQUIRE(v2.cls.has_value());
  CHECK(*v2.cls == TractClass::D);
  REQUIRE(v2.witness_T.has_value());
  // In the witness frame the ternaries must separate across BG | R.
  for (const auto& ns : example2()) {
    if (ns.sig.arity != 3) continue;
    SymSig t = apply_binary(*v2.witness_T, ns.sig);
    CHECK(support_flags(t).separated(Plane::BG));
  }
}

TEST_CASE("single-signature classifications") {
  // A pure split power pair lies in the tuple-set family as given.
  Verdict v = classify_single(make_sig(3, {{"BBB", 1}, {"GGG", 1}}));
  REQUIRE(v.status == Verdict::Status::Tractable);
  CHECK(*v.cls == TractClass::B);

  // A binary alone is always tractable with no transform needed.
  Verdict vb = classify_single(make_sig(2, {{"BB", 1}, {"BG", 7}, {"RR", 2}}));
  REQUIRE(vb.status == Verdict::Status::Tractable);
  CHECK(*vb.cls == TractClass::A);

  // Non-orthogonal real split: e1^3 + (1,1,0)^3 normalized is hard.
  SymSig bad = make_sig(3, {{"BBB", 1}});
  SymSig cube = sig_from_terms({{1.0, Vec3{1, 1, 0}}}, 3);
  for (std::size_t i = 0; i < bad.v.size(); ++i) bad.v[i] += cube.v[i];
  Verdict vh = classify_single(bad);
  CHECK(vh.status == Verdict::Status::Hard);
  REQUIRE(vh.hard.has_value());
  CHECK_FALSE(vh.hard->rule.empty());
}

TEST_CASE("classification is invariant under a global orthogonal change") {
  Rng rng(31337);
  std::vector<NamedSig> base = example2();
  for (int trial = 0; trial < 3; ++trial) {
    double ang = rng.uniform(0.1, 1.4);
    Mat3 q = rotation(std::cos(ang), std::sin(ang));
    // Mix in a second rotation axis for a generic frame.
    Mat3 q2 = Mat3::identity();
    double bng = rng.uniform(0.2, 1.2);
    q2(1, 1) = std::cos(bng); q2(1, 2) = std::sin(bng);
    q2(2, 1) = -std::sin(bng); q2(2, 2) = std::cos(bng);
    Mat3 frame = q * q2;
    std::vector<NamedSig> moved;
    for (const auto& ns : base)
      moved.push_back({ns.name, apply_binary(frame, ns.sig)});
    Verdict v = classify_set(moved);
    REQUIRE(v.status == Verdict::Status::Tractable);
    CHECK(*v.cls == TractClass::D);
  }
}

TEST_CASE("degenerate, zero, and unary members are dropped with warnings") {
  std::vector<NamedSig> sigs = example1();
  sigs.push_back({"deg", sig_from_terms({{2.0, Vec3{1, 2, 3}}}, 3)});
  Verdict v = classify_set(sigs);
  REQUIRE(v.status == Verdict::Status::Tractable);
  CHECK(*v.cls == TractClass::E);
  REQUIRE(v.warnings.size() == 1);
  CHECK(v.warnings[0].find("deg") != std::string::npos);

  std::vector<NamedSig> with_zero = {{"z", SymSig::zero(3)},
                                     {"b", make_sig(2, {{"BB", 1}, {"GG", 1}})}};
  Verdict vz = classify_set(with_zero);
  REQUIRE(vz.status == Verdict::Status::Tractable);
  CHECK(vz.warnings.size() == 1);

  std::vector<NamedSig> with_unary = example2();
  SymSig u;
  u.arity = 1;
  u.v = {1.0, -2.0, 0.5};
  with_unary.push_back({"u", u});
  Verdict vu = classify_set(with_unary);
  REQUIRE(vu.status == Verdict::Status::Tractable);
  CHECK(*vu.cls == TractClass::D);
  CHECK(vu.warnings.size() == 1);
}

TEST_CASE("class order: earlier families win") {
  // A split-power pair with an aligned block binary is already a tuple set,
  // so it lands in the second family even though later checks would pass too.
  std::vector<NamedSig> sigs = {
      {"F", make_sig(3, {{"BBB", 1}, {"GGG", 2}, {"RRR", 3}})},
      {"D", make_sig(2, {{"BB", 1}, {"GG", 2}, {"RR", 5}})}};
  Verdict v = classify_set(sigs);
  REQUIRE(v.status == Verdict::Status::Tractable);
  CHECK(*v.cls == TractClass::B);
}

TEST_CASE("rule-table spot checks") {
  SymSig feq2 = make_sig(3, {{"BBB", 1}, {"GGG", 1}});
  SymSig fz3 = make_sig(3, {{"BBB", 1}, {"BGG", -1}, {"RRR", 1}});

  // Reflection-shaped binary against the rank-2 equality: tractable.
  SymSig refl = make_sig(2, {{"BB", 1}, {"BG", 1}, {"BR", -kRt2},
                             {"GG", 1}, {"GR", kRt2}});
  Verdict vr = classify_set({{"F", feq2}, {"G", refl}});
  CHECK(vr.status == Verdict::Status::Tractable);

  // Perturbing the block structure of a compatible binary turns it hard.
  SymSig pert = make_sig(2, {{"BB", 1}, {"BG", 1}, {"BR", 0.5},
                             {"GG", 1}, {"RR", 1}});
  CHECK(classify_set({{"F", feq2}, {"G", pert}}).status ==
        Verdict::Status::Hard);

  // Exchange binary with the plane pair form: hard once the axis term is in.
  SymSig exch = make_sig(2, {{"BB", 1}, {"GR", 1}});
  SymSig fz2 = make_sig(3, {{"BBB", 1}, {"BGG", -1}});
  CHECK(classify_set({{"F", fz2}, {"G", exch}}).status ==
        Verdict::Status::Tractable);
  CHECK(classify_set({{"F", fz3}, {"G", exch}}).status ==
        Verdict::Status::Hard);

  // Swap binary stays fine for the three-term form.
  SymSig swap = make_sig(2, {{"BR", 1}, {"GR", 1}});
  CHECK(classify_set({{"F", fz3}, {"G", swap}}).status ==
        Verdict::Status::Tractable);
}

TEST_CASE("perm_closure generates the expected groups") {
  Mat3 swap_bg = Mat3::zero();
  swap_bg(0, 1) = 1; swap_bg(1, 0) = 1; swap_bg(2, 2) = 1;
  CHECK(perm_closure({swap_bg}).size() == 2);

  Mat3 swap_gr = Mat3::zero();
  swap_gr(0, 0) = 1; swap_gr(1, 2) = 1; swap_gr(2, 1) = 1;
  CHECK(perm_closure({swap_bg, swap_gr}).size() == 6);

  Mat3 neg = Mat3::diag(-1, -1, -1);
  CHECK(perm_closure({neg}).size() == 2);
  CHECK(perm_closure({}).size() == 1);  // identity only
}

TEST_CASE("orbit computation dedupes projectively") {
  SymSig f = make_sig(3, {{"BBB", 1}, {"GGG", 1}});
  Orbit o1 = compute_orbit({f}, {});
  CHECK(o1.members.size() == 1);
  CHECK_FALSE(o1.truncated);

  // Scaled identity action adds nothing new.
  Orbit o2 = compute_orbit({f}, {Mat3::diag(2, 2, 2)});
  CHECK(o2.members.size() == 1);

  Mat3 swap_bg = Mat3::zero();
  swap_bg(0, 1) = 1; swap_bg(1, 0) = 1; swap_bg(2, 2) = 1;
  // The swap fixes this symmetric pair projectively.
  Orbit o3 = compute_orbit({f}, {swap_bg});
  CHECK(o3.members.size() == 1);
}

TEST_CASE("orbit grows under contraction with a generic binary") {
  // Acting on the equality pair with a generic invertible binary leaves the
  // split-power family, so the orbit must pick up new members.
  SymSig f = make_sig(3, {{"BBB", 1}, {"GGG", 1}, {"RRR", 1}});
  Mat3 g = Mat3::identity();
  g(0, 1) = 0.5;
  g(1, 0) = 0.5;
  Orbit o = compute_orbit({f}, {g});
  CHECK(o.members.size() > 1);
}
