#include "holant3/gadgetlab.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace holant3 {

namespace {

Mat3 inverse3(const Mat3& m) {
  cplx d = det(m);
  double s = m.maxabs();
  if (std::abs(d) <= 1e-12 * s * s * s)
    fail(Err::Singular, "transform is not invertible");
  auto minor = [&](int r, int c) {
    int r0 = (r + 1) % 3, r1 = (r + 2) % 3;
    int c0 = (c + 1) % 3, c1 = (c + 2) % 3;
    if (r0 > r1) std::swap(r0, r1);
    if (c0 > c1) std::swap(c0, c1);
    return m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
  };
  Mat3 inv;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double sgn = ((r + c) % 2 == 0) ? 1.0 : -1.0;
      inv(r, c) = sgn * minor(c, r) / d;
    }
  return inv;
}

SymSig unary_of(const Vec3& u) {
  SymSig s;
  s.arity = 1;
  s.v = {u[0], u[1], u[2]};
  return s;
}

void check_realization(const SymSig& got, const SymSig& want,
                       const char* what) {
  double scale = std::max(want.maxabs(), 1e-300);
  for (std::size_t i = 0; i < want.v.size(); ++i)
    if (std::abs(got.v[i] - want.v[i]) > kResidualTol * scale)
      fail(Err::FormMismatch, what);
}

}  // namespace

GadgetResult gadget_signature(const SignatureGrid& grid,
                              std::size_t cap_internal_assignments) {
  grid.validate();
  auto ports = port_map(grid);
  int k = static_cast<int>(grid.externals.size());
  if (k > 6) fail(Err::TooLarge, "gadget capped at 6 external ports");
  int ne = static_cast<int>(grid.edges.size());
  std::size_t total = 1;
  for (int i = 0; i < ne; ++i) {
    total *= 3;
    if (total > cap_internal_assignments)
      fail(Err::TooLarge, "gadget internal assignment cap exceeded");
  }

  GadgetResult out;
  out.sig.arity = k;
  out.sig.v.assign(SymSig::table_size(k), cplx(0));
  double maxraw = 0.0, maxdev = 0.0;
  std::vector<int> edge_letters(static_cast<std::size_t>(ne), 0);
  std::vector<int> ext_letters(static_cast<std::size_t>(k), 0);

  for_each_pattern(k, [&](const Counts& c, std::size_t idx) {
    std::string perm;
    perm.append(static_cast<std::size_t>(c.i), char(0));
    perm.append(static_cast<std::size_t>(c.j), char(1));
    perm.append(static_cast<std::size_t>(c.k), char(2));
    std::vector<cplx> vals;
    do {
      for (int q = 0; q < k; ++q)
        ext_letters[static_cast<std::size_t>(q)] = perm[static_cast<std::size_t>(q)];
      PairwiseSum acc;
      for (std::size_t a = 0; a < total; ++a) {
        std::size_t r = a;
        for (int i = 0; i < ne; ++i) {
          edge_letters[static_cast<std::size_t>(i)] = static_cast<int>(r % 3);
          r /= 3;
        }
        acc.push(assignment_value(grid, ports, edge_letters, ext_letters));
      }
      vals.push_back(acc.total());
    } while (std::next_permutation(perm.begin(), perm.end()));
    cplx mean = 0.0;
    for (const cplx& v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    out.sig.v[idx] = mean;
    for (const cplx& v : vals) {
      maxraw = std::max(maxraw, std::abs(v));
      maxdev = std::max(maxdev, std::abs(v - mean));
    }
  });
  out.asym_error = maxraw > 0.0 ? maxdev / maxraw : 0.0;
  return out;
}

GeneqRealization realize_coeff_geneq(const SymSig& f,
                                     const std::array<cplx, 3>& target) {
  if (f.arity != 3)
    fail(Err::FormMismatch, "coefficient shaping wants a ternary");
  Rng rng(global_seed());
  Decomposition d;
  try {
    d = decompose(f, &rng);
  } catch (const HolantError&) {
    fail(Err::FormMismatch,
         "signature does not split into an orthogonal direction family");
  }
  if (d.kind == DecompKind::ConjPair)
    fail(Err::FormMismatch,
         "coefficient shaping wants real orthogonal directions");

  Vec3 u{cplx(0), cplx(0), cplx(0)};
  std::vector<Term> want;
  for (int i = 0; i < 3; ++i) {
    if (i >= static_cast<int>(d.terms.size())) {
      if (std::abs(target[static_cast<std::size_t>(i)]) > 0.0)
        fail(Err::FormMismatch,
             "target coefficient outside the direction family");
      continue;
    }
    const DecompTerm& t = d.terms[static_cast<std::size_t>(i)];
    cplx ti = target[static_cast<std::size_t>(i)];
    cplx c2 = t.coeff * t.coeff;
    if (std::abs(c2) <= 1e-300) {
      if (std::abs(ti) > 0.0)
        fail(Err::FormMismatch,
             "target coefficient outside the direction family");
      continue;
    }
    for (int l = 0; l < 3; ++l)
      u[static_cast<std::size_t>(l)] +=
          (ti / c2) * t.vec[static_cast<std::size_t>(l)];
    want.push_back(Term{ti, t.vec});
  }

  GeneqRealization out;
  out.grid.signatures["f"] = GridSignature::symmetric(f);
  out.grid.signatures["u"] = GridSignature::symmetric(unary_of(u));
  int a = out.grid.add_vertex("a", "f");
  int b = out.grid.add_vertex("b", "f");
  int un = out.grid.add_vertex("u", "u");
  out.grid.add_edge(b, 2, un, 0);
  out.grid.add_edge(a, 0, b, 1);
  out.grid.add_external(b, 0);
  out.grid.add_external(a, 1);
  out.grid.add_external(a, 2);

  out.result = gadget_signature(out.grid).sig;
  check_realization(out.result, sig_from_terms(want, 3),
                    "realized gadget does not match the requested coefficients");
  return out;
}

Z4Realization realize_z_arity4(const SymSig& f) {
  if (f.arity != 3)
    fail(Err::FormMismatch, "pair-plus-axis lift wants a ternary");
  Rng rng(global_seed());
  CanonicalResult cr;
  try {
    cr = canonicalize(f, &rng);
  } catch (const HolantError&) {
    fail(Err::FormMismatch, "signature is not a pair-plus-axis form");
  }
  if (cr.kind != DecompKind::ConjPair)
    fail(Err::FormMismatch, "signature is not a pair-plus-axis form");

  const double rt2 = std::sqrt(2.0);
  Mat3 tt = cr.T.transpose();
  Vec3 u = tt * Vec3{rt2, 0.0, 1.0};

  Z4Realization out;
  out.grid.signatures["f"] = GridSignature::symmetric(f);
  out.grid.signatures["u"] = GridSignature::symmetric(unary_of(u));
  int a = out.grid.add_vertex("a", "f");
  int b = out.grid.add_vertex("b", "f");
  int c = out.grid.add_vertex("c", "f");
  int un = out.grid.add_vertex("u", "u");
  out.grid.add_edge(a, 2, b, 0);
  out.grid.add_edge(b, 1, un, 0);
  out.grid.add_edge(b, 2, c, 0);
  out.grid.add_external(a, 0);
  out.grid.add_external(a, 1);
  out.grid.add_external(c, 1);
  out.grid.add_external(c, 2);

  out.result = gadget_signature(out.grid).sig;

  cplx cc = cr.canonical_terms[0].coeff;
  cplx lam = cr.canonical_terms.size() > 2 ? cr.canonical_terms[2].coeff
                                           : cplx(0);
  Vec3 beta = tt * cr.canonical_terms[0].vec;
  Vec3 betab = tt * cr.canonical_terms[1].vec;
  Vec3 axis = tt * Vec3{0.0, 0.0, 1.0};
  std::vector<Term> want{{cc * cc * cc, beta}, {cc * cc * cc, betab}};
  if (std::abs(lam) > 0.0) want.push_back(Term{lam * lam * lam, axis});
  check_realization(out.result, sig_from_terms(want, 4),
                    "pair-plus-axis lift did not reproduce the expected form");
  return out;
}

PlaneEqRealization realize_plane_equality(const SymSig& f) {
  if (f.arity != 3)
    fail(Err::FormMismatch, "plane equality wants a ternary");
  Rng rng(global_seed());
  Decomposition d;
  try {
    d = decompose(f, &rng);
  } catch (const HolantError&) {
    fail(Err::FormMismatch,
         "signature does not split into an orthogonal direction family");
  }
  if (d.kind != DecompKind::RealOrthogonal)
    fail(Err::FormMismatch, "plane equality needs two independent directions");
  std::vector<DecompTerm> terms = d.terms;
  std::stable_sort(terms.begin(), terms.end(),
                   [](const DecompTerm& x, const DecompTerm& y) {
                     return std::abs(x.coeff) > std::abs(y.coeff);
                   });

  Vec3 u{cplx(0), cplx(0), cplx(0)};
  for (int i = 0; i < 2; ++i)
    for (int l = 0; l < 3; ++l)
      u[static_cast<std::size_t>(l)] +=
          terms[static_cast<std::size_t>(i)].vec[static_cast<std::size_t>(l)] /
          terms[static_cast<std::size_t>(i)].coeff;

  PlaneEqRealization out;
  out.grid.signatures["f"] = GridSignature::symmetric(f);
  out.grid.signatures["u"] = GridSignature::symmetric(unary_of(u));
  int a = out.grid.add_vertex("a", "f");
  int un = out.grid.add_vertex("u", "u");
  out.grid.add_edge(a, 2, un, 0);
  out.grid.add_external(a, 0);
  out.grid.add_external(a, 1);

  SymSig got = gadget_signature(out.grid).sig;
  Mat3 expected = Mat3::outer(terms[0].vec, terms[0].vec) +
                  Mat3::outer(terms[1].vec, terms[1].vec);
  SymSig want = mat_to_binary(expected);
  check_realization(got, want,
                    "plane equality gadget did not produce the projector");
  out.result = binary_to_mat(got);
  return out;
}

BoolGrid grid_to_boolean(const SignatureGrid& grid, Plane plane) {
  grid.validate();
  if (!grid.externals.empty())
    fail(Err::Validation, "plane restriction wants a closed grid");
  BoolGrid bg;
  for (const auto& vx : grid.vertices) {
    const GridSignature& gs = grid.signatures.at(vx.sig);
    if (gs.kind == GridSignature::Kind::Symmetric) {
      if (!supported_on_plane(gs.sym, plane, kStructuralTol))
        fail(Err::Validation, "signature leaves the restriction plane");
      bg.vsigs.push_back(BoolAtom::symmetric(restrict_signature(gs.sym, plane)));
    } else {
      double s = gs.mat.maxabs();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          bool rin = r == static_cast<int>(plane_lo(plane)) ||
                     r == static_cast<int>(plane_hi(plane));
          bool cin = c == static_cast<int>(plane_lo(plane)) ||
                     c == static_cast<int>(plane_hi(plane));
          if (!(rin && cin) && std::abs(gs.mat(r, c)) > kStructuralTol * s)
            fail(Err::Validation, "binary leaves the restriction plane");
        }
      bg.vsigs.push_back(
          BoolAtom::matrix(restrict_binary(gs.mat, plane, plane)));
    }
  }
  bg.edges = grid.edges;
  return bg;
}

SignatureGrid local_holographic(const SignatureGrid& grid,
                                const std::string& vertex_id, const Mat3& m) {
  grid.validate();
  int vi = grid.vertex_index(vertex_id);
  if (vi < 0) fail(Err::Validation, "unknown vertex id: " + vertex_id);
  Mat3 k = inverse3(m).transpose();  // row side faces the rewritten vertex

  SignatureGrid out = grid;
  const GridSignature& gs = grid.sig_of(vi);
  GridSignature ngs =
      gs.kind == GridSignature::Kind::Symmetric
          ? GridSignature::symmetric(apply_binary(m, gs.sym))
          : GridSignature::matrix(m * gs.mat * m.transpose());
  std::string tname = vertex_id + "#lh";
  while (out.signatures.count(tname)) tname += "'";
  out.signatures[tname] = ngs;
  out.vertices[static_cast<std::size_t>(vi)].sig = tname;
  std::string kname = "#lhk";
  while (out.signatures.count(kname)) kname += "'";
  out.signatures[kname] = GridSignature::matrix(k);

  int splice = 0;
  auto new_vertex = [&]() {
    std::string id;
    do {
      id = vertex_id + "#k" + std::to_string(splice++);
    } while (out.vertex_index(id) >= 0);
    return out.add_vertex(id, kname);
  };

  std::size_t ne0 = out.edges.size();
  for (std::size_t ei = 0; ei < ne0; ++ei) {
    for (int side = 0; side < 2; ++side) {
      PortRef& end = side == 0 ? out.edges[ei].a : out.edges[ei].b;
      if (end.vertex != vi) continue;
      int nv = new_vertex();
      PortRef at_v = end;
      end = PortRef{nv, 1};
      out.edges.push_back(Edge{at_v, PortRef{nv, 0}});
    }
  }
  for (auto& ext : out.externals) {
    if (ext.vertex != vi) continue;
    int nv = new_vertex();
    PortRef at_v = ext;
    ext = PortRef{nv, 1};
    out.edges.push_back(Edge{at_v, PortRef{nv, 0}});
  }
  return out;
}

}  // namespace holant3
