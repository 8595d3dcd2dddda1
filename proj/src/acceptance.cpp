#include "holant3/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "holant3/boolhol.hpp"
#include "holant3/classifier.hpp"
#include "holant3/evaluator.hpp"
#include "holant3/gadgetlab.hpp"
#include "holant3/grid.hpp"
#include "holant3/json_io.hpp"
#include "holant3/tensorlab.hpp"

namespace holant3 {

namespace {

const double kRt2 = std::sqrt(2.0);
const double kRt3 = std::sqrt(3.0);
const double kRt6 = std::sqrt(6.0);

SymSig make_sig(int arity,
                std::initializer_list<std::pair<const char*, double>> entries) {
  SymSig f;
  f.arity = arity;
  f.v.assign(SymSig::table_size(arity), cplx(0));
  for (const auto& [idx, val] : entries) {
    Counts c{0, 0, 0};
    for (const char* p = idx; *p; ++p) {
      if (*p == 'B') ++c.i;
      if (*p == 'G') ++c.j;
      if (*p == 'R') ++c.k;
    }
    f.at(c) = val;
  }
  return f;
}

Mat3 make_mat(std::initializer_list<double> rowmajor) {
  Mat3 m;
  auto it = rowmajor.begin();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = *it++;
  return m;
}

// --- Worked-example fixtures -------------------------------------------------

SymSig fix_f1() {
  return make_sig(3, {{"BBB", 2}, {"BBG", 2}, {"BBR", -1}, {"BGG", 2},
                      {"BGR", -1}, {"BRR", 5}, {"GGG", 2}, {"GGR", -1},
                      {"GRR", 5}, {"RRR", -7}});
}
SymSig fix_g1() {
  return make_sig(3, {{"BBB", -7}, {"BBG", 5}, {"BBR", -1}, {"BGG", 5},
                      {"BGR", 5}, {"BRR", 2}, {"GGG", -7}, {"GGR", -1},
                      {"GRR", 2}, {"RRR", 2}});
}
SymSig fix_h1() {
  return make_sig(3, {{"BBB", -2}, {"BBG", 1}, {"BBR", 1}, {"BGG", 1},
                      {"BGR", -2}, {"BRR", 1}, {"GGG", -2}, {"GGR", 1},
                      {"GRR", 1}, {"RRR", -2}});
}
SymSig fix_b1() {
  return make_sig(2, {{"BB", 3 + 2 * kRt2}, {"BG", -3 + 2 * kRt2},
                      {"BR", -kRt2}, {"GG", 3 + 2 * kRt2}, {"GR", -kRt2},
                      {"RR", -4 * kRt2}});
}
Mat3 fix_t1() {
  return (1.0 / kRt6) *
         make_mat({kRt2, kRt2, kRt2, 1, 1, -2, kRt3, -kRt3, 0});
}

SymSig fix_f2() {
  return make_sig(3, {{"BBB", -3}, {"BBG", 1}, {"BBR", -5}, {"BGG", -3},
                      {"BGR", -5}, {"BRR", 2}, {"GGG", 1}, {"GGR", -5},
                      {"GRR", 2}, {"RRR", 10}});
}
SymSig fix_g2() {
  return make_sig(3, {{"BBB", 5}, {"BBG", 11}, {"BBR", 4}, {"BGG", 5},
                      {"BGR", 4}, {"BRR", 2}, {"GGG", 11}, {"GGR", 4},
                      {"GRR", 2}, {"RRR", 1}});
}
SymSig fix_h2() {
  return make_sig(2, {{"BB", 4 + 2 * kRt2}, {"BG", -2 + 2 * kRt2},
                      {"BR", -4 + kRt2}, {"GG", 4 + 2 * kRt2},
                      {"GR", -4 + kRt2}, {"RR", -2 - 4 * kRt2}});
}
SymSig fix_b2() {
  return make_sig(2, {{"BB", 2 - 2 * kRt2}, {"BG", 0}, {"BR", 2 + kRt2},
                      {"GG", -2 + 2 * kRt2}, {"GR", -2 - kRt2}, {"RR", 0}});
}
Mat3 fix_t2() {
  return (1.0 / kRt6) *
         make_mat({kRt2, kRt2, -kRt2, 1, 1, 2, -kRt3, kRt3, 0});
}

// Parity signature on a plane pair: value a when the low letter of the plane
// appears an even number of times (and no off-plane letter occurs), b when
// odd, 0 otherwise.
SymSig parity_sig(int arity, Plane p, double a, double b) {
  SymSig f;
  f.arity = arity;
  f.v.assign(SymSig::table_size(arity), cplx(0));
  for_each_pattern(arity, [&](const Counts& c, std::size_t idx) {
    int axis_count = p == Plane::BG ? c.k : (p == Plane::BR ? c.j : c.i);
    if (axis_count != 0) return;
    int lo_count = p == Plane::BG ? c.i : (p == Plane::BR ? c.i : c.j);
    f.v[idx] = (lo_count % 2 == 0) ? a : b;
  });
  return f;
}

SymSig neq_binary(Plane p) {
  Mat3 m = Mat3::zero();
  int lo = static_cast<int>(plane_lo(p));
  int hi = static_cast<int>(plane_hi(p));
  int ax = static_cast<int>(plane_axis(p));
  m(lo, hi) = 1;
  m(hi, lo) = 1;
  m(ax, ax) = 1;
  return mat_to_binary(m);
}

// --- Random helpers ----------------------------------------------------------

// Random real orthonormal triple via Gram-Schmidt.
std::array<RVec3, 3> random_frame_rows(Rng& rng) {
  for (;;) {
    std::array<RVec3, 3> r;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      RVec3 v{rng.gauss(), rng.gauss(), rng.gauss()};
      for (int j = 0; j < i; ++j) {
        double d = v[0] * r[j][0] + v[1] * r[j][1] + v[2] * r[j][2];
        for (int l = 0; l < 3; ++l) v[l] -= d * r[j][l];
      }
      double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      if (n < 0.2) {
        ok = false;
        break;
      }
      for (double& x : v) x /= n;
      r[i] = v;
    }
    if (ok) return r;
  }
}

Mat3 random_orthogonal(Rng& rng) {
  auto rows = random_frame_rows(rng);
  Mat3 q;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) q(r, c) = rows[r][c];
  return q;
}

SymSig random_real_sig(Rng& rng, int arity) {
  SymSig f;
  f.arity = arity;
  f.v.resize(SymSig::table_size(arity));
  for (auto& z : f.v) z = rng.uniform(-2.0, 2.0);
  return f;
}

// Random closed grid over a pool of named signatures plus fresh unaries.
SignatureGrid random_pool_grid(Rng& rng,
                               const std::vector<std::pair<std::string, SymSig>>& pool,
                               int max_vertices, int max_edges) {
  for (;;) {
    SignatureGrid g;
    for (const auto& [name, sig] : pool)
      g.signatures[name] = GridSignature::symmetric(sig);
    int nbig = rng.uniform_int(1, 3);
    int ports = 0;
    for (int i = 0; i < nbig; ++i) {
      const auto& pick = pool[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
      int v = g.add_vertex("v" + std::to_string(i), pick.first);
      ports += g.arity_of(v);
    }
    int nu = rng.uniform_int(0, 2);
    if ((ports + nu) % 2 != 0) ++nu;
    for (int i = 0; i < nu; ++i) {
      SymSig u;
      u.arity = 1;
      u.v = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
             rng.uniform(-2.0, 2.0)};
      std::string un = "u" + std::to_string(i);
      g.signatures[un] = GridSignature::symmetric(u);
      g.add_vertex("uv" + std::to_string(i), un);
      ++ports;
    }
    if (ports / 2 > max_edges ||
        static_cast<int>(g.vertices.size()) > max_vertices)
      continue;
    // Random perfect matching over all ports.
    std::vector<PortRef> slots;
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
      for (int p = 0; p < g.arity_of(v); ++p) slots.push_back(PortRef{v, p});
    for (int i = static_cast<int>(slots.size()) - 1; i > 0; --i)
      std::swap(slots[static_cast<std::size_t>(i)],
                slots[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    for (std::size_t i = 0; i + 1 < slots.size(); i += 2)
      g.edges.push_back(Edge{slots[i], slots[i + 1]});
    g.validate();
    return g;
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

struct Checker {
  std::vector<CheckResult> results;
  std::string filter;

  void run(const std::string& id, const std::function<std::string()>& body) {
    if (!filter.empty() && id.find(filter) == std::string::npos) return;
    CheckResult r;
    r.id = id;
    try {
      r.detail = body();
      r.pass = true;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  }
};

[[noreturn]] void check_fail(const std::string& msg) {
  throw std::runtime_error(msg);
}

void expect(bool ok, const std::string& msg) {
  if (!ok) check_fail(msg);
}

double table_proj_dist(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return 1e99;
  std::size_t p = 0;
  double am = -1.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) > am) {
      am = std::abs(a[i]);
      p = i;
    }
  if (am <= 0.0) return 1e99;
  if (std::abs(b[p]) <= 0.0) return 1e99;
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] / a[p] - b[i] / b[p]));
  return d;
}

std::vector<cplx> mat_table(const Mat3& m) {
  std::vector<cplx> t;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) t.push_back(m(r, c));
  return t;
}

// --- Criterion bodies --------------------------------------------------------

std::string crit_example1() {
  auto t0 = std::chrono::steady_clock::now();
  Verdict v = classify_set({{"F1", fix_f1()},
                            {"G1", fix_g1()},
                            {"H1", fix_h1()},
                            {"B1", fix_b1()}});
  auto t1 = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  expect(v.status == Verdict::Status::Tractable, "expected tractable");
  expect(v.cls && *v.cls == TractClass::E,
         std::string("expected class E, got ") +
             (v.cls ? tract_class_name(*v.cls) : "none"));
  expect(ms < 1000.0, "classification took " + fmt(ms) + " ms");

  Mat3 t = fix_t1();
  SymSig f1p = apply_binary(t, fix_f1());
  SymSig g1p = apply_binary(t, fix_g1());
  SymSig h1p = apply_binary(t, fix_h1());
  Mat3 b1p = t * binary_to_mat(fix_b1()) * t.transpose();
  expect(supported_on_plane(f1p, Plane::BG, 1e-7), "F1' leaves {B,G}*");
  expect(supported_on_plane(g1p, Plane::BR, 1e-7), "G1' leaves {B,R}*");
  expect(supported_on_plane(h1p, Plane::GR, 1e-7), "H1' leaves {G,R}*");

  SymSig f1e = sig_from_terms({{3 * kRt3, Vec3{1, 0, 0}},
                               {6 * kRt6, Vec3{0, 1, 0}}}, 3);
  SymSig g1e = sig_from_terms({{1, Vec3{1, 0, cplx(0, 1)}},
                               {1, Vec3{1, 0, cplx(0, -1)}}}, 3);
  SymSig h1e = sig_from_terms({{1, Vec3{0, 1, cplx(0, 1)}},
                               {1, Vec3{0, 1, cplx(0, -1)}}}, 3);
  Mat3 b1e = make_mat({0, 1, 0, 1, 0, 0, 0, 0, 1});
  double d = table_proj_dist(f1p.v, f1e.v);
  d = std::max(d, table_proj_dist(g1p.v, g1e.v));
  d = std::max(d, table_proj_dist(h1p.v, h1e.v));
  d = std::max(d, table_proj_dist(mat_table(b1p), mat_table(b1e)));
  expect(d <= 1e-7, "projective mismatch " + fmt(d));
  return "class E, transform match " + fmt(d) + ", " + fmt(ms) + " ms";
}

std::string crit_example2() {
  Verdict v = classify_set({{"F2", fix_f2()},
                            {"G2", fix_g2()},
                            {"H2", fix_h2()},
                            {"B2", fix_b2()}});
  expect(v.status == Verdict::Status::Tractable, "expected tractable");
  expect(v.cls && *v.cls == TractClass::D,
         std::string("expected class D, got ") +
             (v.cls ? tract_class_name(*v.cls) : "none"));
  SymSig f2p = apply_binary(fix_t2(), fix_f2());
  SymSig f2e = sig_from_terms({{3 * kRt3, Vec3{1, cplx(0, 1), 0}},
                               {3 * kRt3, Vec3{1, cplx(0, -1), 0}},
                               {4 * kRt2, Vec3{0, 0, 1}}}, 3);
  double d = table_proj_dist(f2p.v, f2e.v);
  expect(d <= 1e-7, "projective mismatch " + fmt(d));
  return "class D, transform match " + fmt(d);
}

std::string crit_parity_family() {
  std::vector<NamedSig> sigs;
  int n = 0;
  for (int arity : {3, 4})
    for (Plane p : {Plane::BG, Plane::BR, Plane::GR})
      for (auto [a, b] : {std::pair<double, double>{1, 1}, {2, -1}})
        sigs.push_back({"par" + std::to_string(n++),
                        parity_sig(arity, p, a, b)});
  sigs.push_back({"neq_bg_r", neq_binary(Plane::BG)});
  sigs.push_back({"neq_br_g", neq_binary(Plane::BR)});
  sigs.push_back({"neq_gr_b", neq_binary(Plane::GR)});
  Verdict v = classify_set(sigs);
  expect(v.status == Verdict::Status::Tractable, "expected tractable");
  expect(v.cls && *v.cls == TractClass::E,
         std::string("expected class E, got ") +
             (v.cls ? tract_class_name(*v.cls) : "none"));
  return "class E over " + std::to_string(sigs.size()) + " signatures";
}

std::string crit_hardness() {
  SymSig h1 = sig_from_terms({{1, Vec3{1, 0, 0}}, {1, Vec3{1, 1, 0}}}, 3);
  Verdict v1 = classify_single(h1);
  expect(v1.status == Verdict::Status::Hard,
         "real pair with non-orthogonal directions should be hard");
  SymSig h2 = sig_from_terms({{1, Vec3{cplx(1, 1), cplx(0, 1), 0}},
                              {1, Vec3{cplx(1, -1), cplx(0, -1), 0}}}, 3);
  expect(h2.is_real(1e-12), "conjugate pair fixture should be real");
  Verdict v2 = classify_single(h2);
  expect(v2.status == Verdict::Status::Hard,
         "conjugate pair with <beta,beta> != 0 should be hard");
  return "both single-signature obstructions reported hard";
}

struct PoolCase {
  std::string label;
  TractClass expect_class;
  std::vector<std::pair<std::string, SymSig>> pool;
};

std::vector<PoolCase> oracle_pools() {
  std::vector<PoolCase> cases;
  {
    Mat3 q = make_mat({0.8, 0.6, 0, -0.6, 0.8, 0, 0, 0, 1}) *
             make_mat({1, 0, 0, 0, 0.28, 0.96, 0, -0.96, 0.28});
    SymSig fb = apply_binary(q, sig_from_terms({{2, Vec3{1, 0, 0}},
                                                {-1, Vec3{0, 1, 0}},
                                                {0.5, Vec3{0, 0, 1}}}, 3));
    cases.push_back({"B", TractClass::B, {{"FB", fb}}});
  }
  {
    SymSig t3 = make_sig(3, {{"BBB", 3}, {"BBG", 1}, {"BGG", 3}, {"GGG", 1}});
    SymSig gd = make_sig(2, {{"BB", 1}, {"BG", 2}, {"BR", 1}, {"GG", 4},
                             {"GR", 2}, {"RR", 5}});
    cases.push_back({"C", TractClass::C, {{"T3", t3}, {"GD", gd}}});
  }
  {
    SymSig fd = make_sig(3, {{"BBB", 1}, {"BBG", 2}, {"BGG", 1}, {"GGG", 2},
                             {"RRR", 4}});
    SymSig sw = make_sig(2, {{"BR", 1}, {"GR", 2}});
    SymSig bd = make_sig(2, {{"BB", 2}, {"GG", -2}, {"RR", 3}});
    cases.push_back({"D", TractClass::D,
                     {{"FD", fd}, {"SW", sw}, {"BD", bd}}});
  }
  cases.push_back({"E", TractClass::E,
                   {{"F1", fix_f1()}, {"G1", fix_g1()},
                    {"H1", fix_h1()}, {"B1", fix_b1()}}});
  return cases;
}

std::string crit_oracle_equivalence() {
  Rng rng(global_seed() + 5);
  double max_err = 0, max_fast_ms = 0, max_brute_ms = 0;
  for (const auto& pc : oracle_pools()) {
    std::vector<NamedSig> named;
    for (const auto& [name, sig] : pc.pool) named.push_back({name, sig});
    Verdict v = classify_set(named);
    expect(v.status == Verdict::Status::Tractable,
           "pool " + pc.label + " should be tractable");
    expect(v.cls && *v.cls == pc.expect_class,
           "pool " + pc.label + " expected class " +
               tract_class_name(pc.expect_class) + ", got " +
               (v.cls ? tract_class_name(*v.cls) : "none"));
    for (int i = 0; i < 50; ++i) {
      SignatureGrid g = random_pool_grid(rng, pc.pool, 6, 8);
      auto t0 = std::chrono::steady_clock::now();
      cplx fast = eval_tractable(g, v);
      auto t1 = std::chrono::steady_clock::now();
      cplx ref = eval_brute(g);
      auto t2 = std::chrono::steady_clock::now();
      double fast_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      double brute_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
      double err = std::abs(fast - ref) / std::max(1.0, std::abs(ref));
      max_err = std::max(max_err, err);
      max_fast_ms = std::max(max_fast_ms, fast_ms);
      max_brute_ms = std::max(max_brute_ms, brute_ms);
      expect(err <= 1e-6, "pool " + pc.label + " grid " + std::to_string(i) +
                              " relative error " + fmt(err));
      expect(fast_ms < 10.0, "tractable evaluation took " + fmt(fast_ms) + " ms");
      expect(brute_ms < 1000.0, "brute evaluation took " + fmt(brute_ms) + " ms");
    }
  }
  return "4x50 grids, max rel err " + fmt(max_err) + ", max fast " +
         fmt(max_fast_ms) + " ms, max brute " + fmt(max_brute_ms) + " ms";
}

std::string crit_invariance() {
  Rng rng(global_seed() + 6);
  double max_err = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::pair<std::string, SymSig>> pool;
    int npool = rng.uniform_int(1, 2);
    for (int k = 0; k < npool; ++k)
      pool.emplace_back("s" + std::to_string(k),
                        random_real_sig(rng, rng.uniform_int(2, 3)));
    SignatureGrid g = random_pool_grid(rng, pool, 5, 6);
    Mat3 q = random_orthogonal(rng);
    SignatureGrid g2 = g;
    for (auto& [name, gs] : g2.signatures)
      gs = GridSignature::symmetric(apply_binary(q, gs.sym));
    cplx a = eval_brute(g);
    cplx b = eval_brute(g2);
    double err = std::abs(a - b) / std::max(1.0, std::abs(a));
    max_err = std::max(max_err, err);
    expect(err <= 1e-6,
           "pair " + std::to_string(i) + " relative drift " + fmt(err));
  }
  return "100 orthogonal-transform pairs, max rel drift " + fmt(max_err);
}

std::string crit_decompositions() {
  Rng rng(global_seed() + 7);
  double max_resid = 0, max_proj = 0, max_orth = 0;
  for (int i = 0; i < 1000; ++i) {
    int arity = 3 + (i % 4);
    bool typeb = (i / 4) % 2 == 1;
    auto rows = random_frame_rows(rng);
    auto rvec = [&](int r) {
      return Vec3{rows[static_cast<std::size_t>(r)][0],
                  rows[static_cast<std::size_t>(r)][1],
                  rows[static_cast<std::size_t>(r)][2]};
    };
    SymSig f;
    if (!typeb) {
      int nterms = 1 + rng.uniform_int(0, 2);
      std::vector<Term> terms;
      for (int k = 0; k < nterms; ++k) {
        double c = 0;
        while (std::abs(c) < 0.1) c = rng.gauss();
        terms.push_back({c, rvec(k)});
      }
      f = sig_from_terms(terms, arity);
    } else {
      cplx c = 0;
      while (std::abs(c) < 0.1) c = cplx(rng.gauss(), rng.gauss());
      Vec3 p = rvec(0), q = rvec(1), a = rvec(2);
      Vec3 w, wb;
      for (int l = 0; l < 3; ++l) {
        w[static_cast<std::size_t>(l)] =
            (p[static_cast<std::size_t>(l)] +
             cplx(0, 1) * q[static_cast<std::size_t>(l)]) / kRt2;
        wb[static_cast<std::size_t>(l)] =
            std::conj(w[static_cast<std::size_t>(l)]);
      }
      std::vector<Term> terms{{c, w}, {std::conj(c), wb}};
      double lam = rng.gauss();
      if (std::abs(lam) > 0.05) terms.push_back({lam, a});
      f = sig_from_terms(terms, arity);
    }
    Decomposition d = decompose(f, &rng);
    max_resid = std::max(max_resid, d.residual);
    expect(d.residual <= 1e-7,
           "instance " + std::to_string(i) + " residual " + fmt(d.residual));
    CanonicalResult cr = canonicalize(f, &rng);
    expect(is_orthogonal(cr.T, 1e-9),
           "instance " + std::to_string(i) + " frame not orthogonal");
    double orth = 0;
    Mat3 tt = cr.T * cr.T.transpose();
    for (int r = 0; r < 3; ++r)
      for (int c2 = 0; c2 < 3; ++c2)
        orth = std::max(orth,
                        std::abs(tt(r, c2) - (r == c2 ? cplx(1) : cplx(0))));
    max_orth = std::max(max_orth, orth);
    std::vector<Term> cterms;
    for (const auto& t : cr.canonical_terms) cterms.push_back({t.coeff, t.vec});
    SymSig recon = sig_from_terms(cterms, arity);
    SymSig tf = apply_binary(cr.T, f);
    double dproj = table_proj_dist(recon.v, tf.v);
    max_proj = std::max(max_proj, dproj);
    expect(dproj <= 1e-7,
           "instance " + std::to_string(i) + " canonical mismatch " + fmt(dproj));
  }
  return "1000 instances, max residual " + fmt(max_resid) + ", max canonical " +
         fmt(max_proj) + ", max orth " + fmt(max_orth);
}

BoolGrid random_bool_grid(Rng& rng, const std::vector<BoolSig>& pool,
                          int max_edges) {
  for (;;) {
    BoolGrid g;
    int nbig = rng.uniform_int(1, 3);
    int ports = 0;
    for (int i = 0; i < nbig; ++i) {
      const BoolSig& pick = pool[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
      g.vsigs.push_back(BoolAtom::symmetric(pick));
      ports += pick.arity();
    }
    int nu = rng.uniform_int(0, 2);
    if ((ports + nu) % 2 != 0) ++nu;
    for (int i = 0; i < nu; ++i) {
      BoolSig u;
      u.f = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      g.vsigs.push_back(BoolAtom::symmetric(u));
      ++ports;
    }
    if (ports / 2 > max_edges) continue;
    std::vector<PortRef> slots;
    for (int v = 0; v < static_cast<int>(g.vsigs.size()); ++v)
      for (int p = 0; p < g.vsigs[static_cast<std::size_t>(v)].arity(); ++p)
        slots.push_back(PortRef{v, p});
    for (int i = static_cast<int>(slots.size()) - 1; i > 0; --i)
      std::swap(slots[static_cast<std::size_t>(i)],
                slots[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    for (std::size_t i = 0; i + 1 < slots.size(); i += 2)
      g.edges.push_back(Edge{slots[i], slots[i + 1]});
    return g;
  }
}

std::string crit_boolean() {
  BoolSig eq3;
  eq3.f = {1, 0, 0, 1};
  BoolSig alt;
  alt.f = {1, 2, -1, -2};
  BoolSig flip;
  flip.f = {0, 1, 0};
  BoolSig neq3;
  neq3.f = {0, 1, 1, 0};

  BoolVerdict v1 = classify_bool_set({BoolAtom::symmetric(eq3)});
  expect(v1.status == BoolVerdict::Status::Tractable &&
             v1.cls == BoolVerdict::Class::FirstKind,
         "[1,0,0,1] should be first-kind");
  expect(std::abs(v1.ab[0]) <= 1e-12 && std::abs(v1.ab[1] - 1.0) <= 1e-12,
         "[1,0,0,1] admitted pair should normalize to (0,1)");
  BoolVerdict v2 = classify_bool_set({BoolAtom::symmetric(alt)});
  expect(v2.status == BoolVerdict::Status::Tractable &&
             v2.cls == BoolVerdict::Class::SecondKind,
         "[1,2,-1,-2] should be second-kind");
  BoolVerdict v3 =
      classify_bool_set({BoolAtom::symmetric(eq3), BoolAtom::symmetric(flip)});
  expect(v3.status == BoolVerdict::Status::Tractable,
         "{[1,0,0,1],[0,1,0]} should be tractable");
  BoolVerdict v4 =
      classify_bool_set({BoolAtom::symmetric(eq3), BoolAtom::symmetric(neq3)});
  expect(v4.status == BoolVerdict::Status::Hard,
         "{[1,0,0,1],[0,1,1,0]} should be hard");

  Rng rng(global_seed() + 8);
  double max_err = 0;
  std::vector<std::vector<BoolSig>> pools;
  pools.push_back({eq3, flip});
  pools.push_back({alt});
  {
    BoolSig b1, b2, b3;
    b1.f = {0.5, 2};
    b2.f = {3, -1};
    b3.f = {2, 0, 1};
    pools.push_back({b1, b2, b3});
  }
  for (const auto& pool : pools) {
    std::vector<BoolAtom> members;
    for (const auto& s : pool) members.push_back(BoolAtom::symmetric(s));
    BoolVerdict bv = classify_bool_set(members);
    expect(bv.status == BoolVerdict::Status::Tractable,
           "random-grid pool should be tractable");
    for (int i = 0; i < 25; ++i) {
      BoolGrid g = random_bool_grid(rng, pool, 12);
      cplx fast = eval_bool(g, bv);
      cplx ref = eval_bool_brute(g);
      double err = std::abs(fast - ref) / std::max(1.0, std::abs(ref));
      max_err = std::max(max_err, err);
      expect(err <= 1e-6, "boolean grid relative error " + fmt(err));
    }
  }
  return "fixtures match, 75 random grids max rel err " + fmt(max_err);
}

std::string crit_gadgets() {
  SymSig geq = sig_from_terms({{1, Vec3{1, 0, 0}}, {1, Vec3{0, 1, 0}}}, 3);
  PlaneEqRealization pe = realize_plane_equality(geq);
  double d = 0;
  Mat3 want = Mat3::diag(1, 1, 0);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      d = std::max(d, std::abs(pe.result(r, c) - want(r, c)));
  expect(d <= 1e-9, "plane projector off by " + fmt(d));

  Vec3 b0{1.0 / kRt2, cplx(0, 1.0 / kRt2), 0};
  Vec3 b0c{1.0 / kRt2, cplx(0, -1.0 / kRt2), 0};
  double max_axis_err = 0;
  for (double lam : {0.0, 1.0, 2.0}) {
    std::vector<Term> terms{{1, b0}, {1, b0c}};
    if (lam != 0.0) terms.push_back({lam, Vec3{0, 0, 1}});
    SymSig f = sig_from_terms(terms, 3);
    Z4Realization z = realize_z_arity4(f);
    double got = std::abs(z.result.at(0, 0, 4) - cplx(lam * lam * lam));
    max_axis_err = std::max(max_axis_err, got);
    expect(got <= 1e-9, "axis weight for lambda=" + fmt(lam) + " off by " +
                            fmt(got));
  }

  Rng rng(global_seed() + 9);
  double max_err = 0;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::pair<std::string, SymSig>> pool;
    int npool = rng.uniform_int(1, 2);
    for (int k = 0; k < npool; ++k)
      pool.emplace_back("s" + std::to_string(k),
                        random_real_sig(rng, rng.uniform_int(2, 3)));
    SignatureGrid g = random_pool_grid(rng, pool, 5, 6);
    Mat3 m = random_orthogonal(rng) *
             Mat3::diag(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0),
                        rng.uniform(0.5, 2.0)) *
             random_orthogonal(rng);
    int vid = rng.uniform_int(0, static_cast<int>(g.vertices.size()) - 1);
    SignatureGrid g2 =
        local_holographic(g, g.vertices[static_cast<std::size_t>(vid)].id, m);
    cplx a = eval_brute(g);
    cplx b = eval_brute(g2);
    double err = std::abs(a - b) / std::max(1.0, std::abs(a));
    max_err = std::max(max_err, err);
    expect(err <= 1e-9,
           "rewrite " + std::to_string(i) + " drifted by " + fmt(err));
  }
  return "projector exact to " + fmt(d) + ", axis weights to " +
         fmt(max_axis_err) + ", 50 rewrites max drift " + fmt(max_err);
}

std::string crit_lemma_table(const std::string& fixture_dir) {
  std::ifstream in(fixture_dir + "/lemma_table.json");
  expect(in.good(), "cannot open " + fixture_dir + "/lemma_table.json");
  json doc = json::parse(in, nullptr, false);
  expect(!doc.is_discarded(), "lemma_table.json does not parse");
  expect(doc.is_array() && doc.size() >= 20,
         "lemma table needs at least 20 instances");
  int checked = 0;
  for (const json& inst : doc) {
    std::string name = inst.at("name").get<std::string>();
    std::vector<NamedSig> sigs;
    const json& set = inst.at("set");
    for (auto it = set.begin(); it != set.end(); ++it)
      sigs.push_back({it.key(), sig_from_json(it.value())});
    std::string expected = inst.at("expected").get<std::string>();
    Verdict v = classify_set(sigs);
    bool tract = v.status == Verdict::Status::Tractable;
    expect(tract == (expected == "tractable"),
           "instance " + name + ": expected " + expected + ", got " +
               (tract ? "tractable" : "hard"));
    ++checked;
  }
  return std::to_string(checked) + " instances match their assignments";
}

}  // namespace

std::vector<CheckResult> run_acceptance(const std::string& fixture_dir,
                                        const std::string& filter) {
  Checker ck;
  ck.filter = filter;
  ck.run("A1-example1", crit_example1);
  ck.run("A2-example2", crit_example2);
  ck.run("A3-parity-family", crit_parity_family);
  ck.run("A4-hardness", crit_hardness);
  ck.run("A5-oracle-equivalence", crit_oracle_equivalence);
  ck.run("A6-orthogonal-invariance", crit_invariance);
  ck.run("A7-decompositions", crit_decompositions);
  ck.run("A8-boolean-dichotomy", crit_boolean);
  ck.run("A9-gadget-realizations", crit_gadgets);
  ck.run("A10-lemma-table", [&] { return crit_lemma_table(fixture_dir); });
  return ck.results;
}

std::vector<CheckResult> run_selftest(const std::string& filter) {
  Checker ck;
  ck.filter = filter;
  ck.run("json-roundtrip", [] {
    SignatureGrid g;
    g.signatures["f"] = GridSignature::symmetric(fix_f1());
    g.signatures["m"] =
        GridSignature::matrix(make_mat({0, 1, 0, 1, 0, 0, 0, 0, 1}));
    int a = g.add_vertex("a", "f");
    int b = g.add_vertex("b", "f");
    int k = g.add_vertex("k", "m");
    g.add_edge(a, 0, k, 0);
    g.add_edge(k, 1, b, 0);
    g.add_edge(a, 1, b, 1);
    g.add_edge(a, 2, b, 2);
    expect(grid_roundtrip_ok(g), "grid JSON round trip changed the grid");
    return std::string("grid with symmetric and matrix signatures survives");
  });
  ck.run("brute-selfloop", [] {
    SignatureGrid g;
    g.signatures["b"] = GridSignature::symmetric(
        make_sig(2, {{"BB", 2}, {"GG", 3}, {"RR", 4}, {"BG", 7}}));
    int v = g.add_vertex("v", "b");
    g.add_edge(v, 0, v, 1);
    cplx val = eval_brute(g);
    expect(std::abs(val - cplx(9)) <= 1e-12, "self-loop should trace to 9");
    return std::string("binary self-loop traces correctly");
  });
  ck.run("decompose-smoke", [] {
    SymSig f = sig_from_terms({{1, Vec3{1, 0, 0}}, {1, Vec3{0, 1, 0}}}, 3);
    Decomposition d = decompose(f);
    expect(d.kind == DecompKind::RealOrthogonal && d.terms.size() == 2,
           "two-direction split expected");
    return std::string("orthogonal split recovered");
  });
  ck.run("bool-smoke", [] {
    BoolSig eq3;
    eq3.f = {1, 0, 0, 1};
    BoolVerdict v = classify_bool_set({BoolAtom::symmetric(eq3)});
    expect(v.status == BoolVerdict::Status::Tractable,
           "[1,0,0,1] should be tractable");
    return std::string("[1,0,0,1] classifies tractable");
  });
  return ck.results;
}

}  // namespace holant3
