#include "holant3/evaluator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "holant3/boolhol.hpp"
#include "holant3/tensorlab.hpp"

namespace holant3 {

// ---------------------------------------------------------------------------
// Rank-one extraction.

bool extract_rank_one(const SymSig& f, RankOne& out, double tol) {
  const int n = f.arity;
  if (n < 1) return false;
  double s = f.maxabs();
  if (s <= 0.0) return false;
  static const Vec3 kProbes[3] = {
      {1.0, 0.7548776662466927, 0.5698402909980532},
      {0.5698402909980532, 1.0, 0.7548776662466927},
      {0.7548776662466927, 0.5698402909980532, 1.0}};
  for (const auto& probe : kProbes) {
    SymSig r = f;
    for (int k = 1; k < n; ++k) r = contract_unary(r, probe);
    Vec3 v{r.v[0], r.v[1], r.v[2]};
    double nv = std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    if (nv <= 1e-12 * s) continue;
    for (auto& x : v) x /= nv;
    // Coefficient from the largest entry.
    Counts cmax{n, 0, 0};
    double best = -1.0;
    for_each_pattern(n, [&](const Counts& c, std::size_t idx) {
      if (std::abs(f.v[idx]) > best) {
        best = std::abs(f.v[idx]);
        cmax = c;
      }
    });
    cplx denom = 1.0;
    for (int k = 0; k < cmax.i; ++k) denom *= v[0];
    for (int k = 0; k < cmax.j; ++k) denom *= v[1];
    for (int k = 0; k < cmax.k; ++k) denom *= v[2];
    if (std::abs(denom) <= 1e-12) continue;
    cplx coeff = f.at(cmax) / denom;
    double resid = 0.0;
    for_each_pattern(n, [&](const Counts& c, std::size_t idx) {
      cplx p = coeff;
      for (int k = 0; k < c.i; ++k) p *= v[0];
      for (int k = 0; k < c.j; ++k) p *= v[1];
      for (int k = 0; k < c.k; ++k) p *= v[2];
      resid = std::max(resid, std::abs(f.v[idx] - p));
    });
    if (resid <= tol * s) {
      out.coeff = coeff;
      out.vec = v;
      return true;
    }
  }
  return false;
}

namespace {

// ---------------------------------------------------------------------------
// Working grid for the rewrite engine.

struct WVert {
  bool alive = true;
  bool is_mat = false;
  SymSig sig;
  Mat3 mat;
};

struct WEdge {
  bool alive = true;
  int va = -1, vb = -1;
  int ra = 0, rb = 0;  // matrix port role at each end: 0 = row, 1 = column
};

struct WGrid {
  std::vector<WVert> verts;
  std::vector<WEdge> edges;
  cplx scale = 1.0;
  bool zero = false;
};

SymSig unary_sig(const Vec3& u) {
  SymSig s;
  s.arity = 1;
  s.v = {u[0], u[1], u[2]};
  return s;
}

Vec3 unary_vec(const SymSig& s) { return {s.v[0], s.v[1], s.v[2]}; }

SymSig sym_selfloop(const SymSig& f) {
  if (f.arity < 2) fail(Err::ArityMismatch, "self-loop wants arity >= 2");
  SymSig out;
  out.arity = f.arity - 2;
  out.v.assign(SymSig::table_size(out.arity), cplx(0));
  for_each_pattern(out.arity, [&](const Counts& c, std::size_t idx) {
    out.v[idx] = f.at(c.i + 2, c.j, c.k) + f.at(c.i, c.j + 2, c.k) +
                 f.at(c.i, c.j, c.k + 2);
  });
  return out;
}

cplx trace3(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }

Vec3 embed_plane(Plane p, cplx lo, cplx hi) {
  Vec3 u{cplx(0), cplx(0), cplx(0)};
  u[static_cast<std::size_t>(plane_lo(p))] = lo;
  u[static_cast<std::size_t>(plane_hi(p))] = hi;
  return u;
}

double vert_maxabs(const WVert& v) {
  return v.is_mat ? v.mat.maxabs() : v.sig.maxabs();
}

SymSig abs_table(const SymSig& f) {
  SymSig a = f;
  for (auto& z : a.v) z = std::abs(z);
  return a;
}

Vec3 abs_vec(const Vec3& u) {
  return {std::abs(u[0]), std::abs(u[1]), std::abs(u[2])};
}

// A contraction whose every entry lands below the cancellation floor of its
// own absolute-value bound is an exact zero up to rounding; keeping the noise
// table would poison later structural decisions (plane support, link shape).
bool noise_zero(const SymSig& got, const SymSig& bound) {
  for (std::size_t i = 0; i < got.v.size(); ++i)
    if (std::abs(got.v[i]) > kStructuralTol * bound.v[i].real()) return false;
  return true;
}

// Endpoints (edge, side) of a vertex over alive edges, in index order.
std::vector<std::pair<int, int>> endpoints_of(const WGrid& w, int v) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t ei = 0; ei < w.edges.size(); ++ei) {
    const auto& e = w.edges[ei];
    if (!e.alive) continue;
    if (e.va == v) out.emplace_back(static_cast<int>(ei), 0);
    if (e.vb == v) out.emplace_back(static_cast<int>(ei), 1);
  }
  return out;
}

int other_vertex(const WEdge& e, int side) { return side == 0 ? e.vb : e.va; }
int role_at(const WEdge& e, int side) { return side == 0 ? e.ra : e.rb; }

void set_endpoint(WEdge& e, int side, int vertex, int role) {
  if (side == 0) {
    e.va = vertex;
    e.ra = role;
  } else {
    e.vb = vertex;
    e.rb = role;
  }
}

// `snap` zeroes entries below the structural floor of each transformed table.
// The plane-structured classes decide support and link shape with exactly that
// cutoff, so the arithmetic has to agree with it or rounding residue from the
// frame change leaks into contractions as if it were genuine signal.
WGrid build_wgrid(const SignatureGrid& grid, const Mat3& frame, bool snap) {
  WGrid w;
  for (const auto& vx : grid.vertices) {
    const GridSignature& gs = grid.signatures.at(vx.sig);
    WVert wv;
    if (gs.kind == GridSignature::Kind::Symmetric) {
      wv.sig = apply_binary(frame, gs.sym);
      if (snap) {
        double cut = kStructuralTol * wv.sig.maxabs();
        for (auto& z : wv.sig.v)
          if (std::abs(z) <= cut) z = 0;
      }
    } else {
      wv.is_mat = true;
      wv.mat = frame * gs.mat * frame.transpose();
      if (snap) {
        double cut = kStructuralTol * wv.mat.maxabs();
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            if (std::abs(wv.mat(r, c)) <= cut) wv.mat(r, c) = 0;
      }
    }
    w.verts.push_back(std::move(wv));
  }
  for (const auto& e : grid.edges) {
    WEdge we;
    we.va = e.a.vertex;
    we.ra = e.a.port;
    we.vb = e.b.vertex;
    we.rb = e.b.port;
    w.edges.push_back(we);
  }
  return w;
}

int add_unary_vertex(WGrid& w, const Vec3& u) {
  WVert wv;
  wv.sig = unary_sig(u);
  w.verts.push_back(std::move(wv));
  return static_cast<int>(w.verts.size()) - 1;
}

// Split every rank <= 1 vertex into independent unary pins.
void factor_degenerates3(WGrid& w) {
  int nv = static_cast<int>(w.verts.size());
  for (int v = 0; v < nv; ++v) {
    auto& wv = w.verts[v];
    if (!wv.alive) continue;
    if (vert_maxabs(wv) <= 1e-300) {
      w.zero = true;
      return;
    }
    if (wv.is_mat) {
      if (rank_with_tol(wv.mat, kResidualTol) > 1) continue;
      int rs = 0, cs = 0;
      double best = -1.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          if (std::abs(wv.mat(r, c)) > best) {
            best = std::abs(wv.mat(r, c));
            rs = r;
            cs = c;
          }
      Vec3 colv{wv.mat(0, cs), wv.mat(1, cs), wv.mat(2, cs)};
      Vec3 roww{wv.mat(rs, 0), wv.mat(rs, 1), wv.mat(rs, 2)};
      w.scale *= 1.0 / wv.mat(rs, cs);
      for (auto [ei, side] : endpoints_of(w, v)) {
        int role = role_at(w.edges[ei], side);
        int nvx = add_unary_vertex(w, role == 0 ? colv : roww);
        set_endpoint(w.edges[ei], side, nvx, 0);
      }
      w.verts[v].alive = false;  // add_unary_vertex may have reallocated
    } else if (wv.sig.arity >= 2) {
      RankOne ro;
      if (!extract_rank_one(wv.sig, ro)) continue;
      w.scale *= ro.coeff;
      for (auto [ei, side] : endpoints_of(w, v)) {
        int nvx = add_unary_vertex(w, ro.vec);
        set_endpoint(w.edges[ei], side, nvx, 0);
      }
      w.verts[v].alive = false;
    }
  }
}

// ---------------------------------------------------------------------------
// Rewrite engine. Mode controls how arity-2 structure is treated.

enum class EngineMode { MergeAll, PlaneAware };

std::optional<Plane> plane_of_sym(const SymSig& f) {
  return support_flags(f).ebd_plane;
}

bool engine_step(WGrid& w, EngineMode mode) {
  int nv = static_cast<int>(w.verts.size());
  int ne = static_cast<int>(w.edges.size());

  for (int v = 0; v < nv; ++v) {
    auto& wv = w.verts[v];
    if (!wv.alive) continue;
    if (vert_maxabs(wv) <= 1e-300) {
      w.zero = true;
      return false;
    }
    if (!wv.is_mat && wv.sig.arity == 0) {
      w.scale *= wv.sig.v[0];
      wv.alive = false;
      return true;
    }
  }

  // Self-loops.
  for (int ei = 0; ei < ne; ++ei) {
    auto& e = w.edges[ei];
    if (!e.alive || e.va != e.vb) continue;
    auto& wv = w.verts[e.va];
    if (wv.is_mat) {
      w.scale *= trace3(wv.mat);
      wv.alive = false;
    } else {
      SymSig bound = sym_selfloop(abs_table(wv.sig));
      wv.sig = sym_selfloop(wv.sig);
      if (noise_zero(wv.sig, bound)) {
        w.zero = true;
        return false;
      }
    }
    e.alive = false;
    return true;
  }

  // Unary folds.
  for (int ei = 0; ei < ne; ++ei) {
    auto& e = w.edges[ei];
    if (!e.alive) continue;
    for (int side = 0; side < 2; ++side) {
      int u = side == 0 ? e.va : e.vb;
      int x = other_vertex(e, side);
      auto& wu = w.verts[u];
      if (wu.is_mat || wu.sig.arity != 1) continue;
      auto& wx = w.verts[x];
      Vec3 uv = unary_vec(wu.sig);
      if (wx.is_mat) {
        int role = role_at(e, side == 0 ? 1 : 0);
        Vec3 folded{cplx(0), cplx(0), cplx(0)};
        Vec3 fbound{cplx(0), cplx(0), cplx(0)};
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            cplx m = role == 0 ? wx.mat(a, b) : wx.mat(b, a);
            folded[static_cast<std::size_t>(b)] +=
                uv[static_cast<std::size_t>(a)] * m;
            fbound[static_cast<std::size_t>(b)] +=
                std::abs(uv[static_cast<std::size_t>(a)]) * std::abs(m);
          }
        wx.is_mat = false;
        wx.sig = unary_sig(folded);
        if (noise_zero(wx.sig, unary_sig(fbound))) {
          w.zero = true;
          return false;
        }
      } else {
        SymSig bound = contract_unary(abs_table(wx.sig), abs_vec(uv));
        wx.sig = contract_unary(wx.sig, uv);
        if (noise_zero(wx.sig, bound)) {
          w.zero = true;
          return false;
        }
      }
      wu.alive = false;
      e.alive = false;
      return true;
    }
  }

  // Symmetric binary -> matrix conversion.
  for (int v = 0; v < nv; ++v) {
    auto& wv = w.verts[v];
    if (!wv.alive || wv.is_mat || wv.sig.arity != 2) continue;
    if (mode == EngineMode::PlaneAware && plane_of_sym(wv.sig)) continue;
    auto eps = endpoints_of(w, v);
    if (eps.size() != 2) fail(Err::Validation, "binary arity mismatch");
    wv.mat = binary_to_mat(wv.sig);
    wv.is_mat = true;
    set_endpoint(w.edges[eps[0].first], eps[0].second, v, 0);
    set_endpoint(w.edges[eps[1].first], eps[1].second, v, 1);
    return true;
  }

  // Matrix-matrix merge.
  for (int ei = 0; ei < ne; ++ei) {
    auto& e = w.edges[ei];
    if (!e.alive || e.va == e.vb) continue;
    auto& a = w.verts[e.va];
    auto& b = w.verts[e.vb];
    if (!a.is_mat || !b.is_mat) continue;
    if (mode == EngineMode::PlaneAware) {
      double s = 0;
      if (!oh_match(a.mat, kStructuralTol, &s) ||
          !oh_match(b.mat, kStructuralTol, &s))
        continue;
    }
    int av = e.va, bv = e.vb;
    Mat3 am = e.ra == 1 ? a.mat : a.mat.transpose();  // (free, shared)
    Mat3 bm = e.rb == 0 ? b.mat : b.mat.transpose();  // (shared, free)
    a.mat = am * bm;
    e.alive = false;
    for (auto [fi, side] : endpoints_of(w, av))
      set_endpoint(w.edges[fi], side, av, 0);
    for (auto [fi, side] : endpoints_of(w, bv))
      set_endpoint(w.edges[fi], side, av, 1);
    b.alive = false;
    return true;
  }

  if (mode == EngineMode::PlaneAware) {
    // Cross-plane direct edges factor into axis pins.
    for (int ei = 0; ei < ne; ++ei) {
      auto& e = w.edges[ei];
      if (!e.alive || e.va == e.vb) continue;
      auto& a = w.verts[e.va];
      auto& b = w.verts[e.vb];
      if (a.is_mat || b.is_mat) continue;
      if (a.sig.arity < 2 || b.sig.arity < 2) continue;
      auto pa = plane_of_sym(a.sig);
      auto pb = plane_of_sym(b.sig);
      if (!pa || !pb || *pa == *pb) continue;
      Letter shared = Letter::B;
      for (Letter l : {Letter::B, Letter::G, Letter::R}) {
        bool in_a = l == plane_lo(*pa) || l == plane_hi(*pa);
        bool in_b = l == plane_lo(*pb) || l == plane_hi(*pb);
        if (in_a && in_b) shared = l;
      }
      Vec3 pin{cplx(0), cplx(0), cplx(0)};
      pin[static_cast<std::size_t>(shared)] = 1.0;
      SymSig ba = contract_unary(abs_table(a.sig), pin);
      SymSig bb = contract_unary(abs_table(b.sig), pin);
      a.sig = contract_unary(a.sig, pin);
      b.sig = contract_unary(b.sig, pin);
      if (noise_zero(a.sig, ba) || noise_zero(b.sig, bb)) {
        w.zero = true;
        return false;
      }
      e.alive = false;
      return true;
    }

    // Rank <= 1 links factor into plane pins.
    for (int v = 0; v < nv; ++v) {
      auto& wm = w.verts[v];
      if (!wm.alive || !wm.is_mat) continue;
      auto eps = endpoints_of(w, v);
      if (eps.size() != 2) continue;
      auto [e1, s1] = eps[0];
      auto [e2, s2] = eps[1];
      int u = other_vertex(w.edges[e1], s1);
      int x = other_vertex(w.edges[e2], s2);
      auto& wu = w.verts[u];
      auto& wx = w.verts[x];
      if (wu.is_mat || wx.is_mat) continue;
      auto pu = plane_of_sym(wu.sig);
      auto px = plane_of_sym(wx.sig);
      if (!pu || !px) continue;
      // Orient so rows index u's letters: if u sits on this matrix's row
      // port the matrix is already (u, x)-oriented.
      int role_u = role_at(w.edges[e1], s1);
      Mat3 m = role_u == 0 ? wm.mat : wm.mat.transpose();
      Mat2 link = restrict_binary(m, *pu, *px);
      double ls = link.maxabs();
      if (ls <= 1e-300) {
        w.zero = true;
        return false;
      }
      if (std::abs(det2(link)) > 2 * kStructuralTol * ls * ls) continue;
      int rs = std::abs(link(0, 0)) + std::abs(link(0, 1)) >=
                       std::abs(link(1, 0)) + std::abs(link(1, 1))
                   ? 0
                   : 1;
      int cs = std::abs(link(rs, 0)) >= std::abs(link(rs, 1)) ? 0 : 1;
      w.scale *= 1.0 / link(rs, cs);
      Vec3 upin = embed_plane(*pu, link(0, cs), link(1, cs));
      Vec3 xpin = embed_plane(*px, link(rs, 0), link(rs, 1));
      SymSig bu = contract_unary(abs_table(wu.sig), abs_vec(upin));
      SymSig bx = contract_unary(abs_table(wx.sig), abs_vec(xpin));
      wu.sig = contract_unary(wu.sig, upin);
      wx.sig = contract_unary(wx.sig, xpin);
      if (noise_zero(wu.sig, bu) || noise_zero(wx.sig, bx)) {
        w.zero = true;
        return false;
      }
      wm.alive = false;
      w.edges[e1].alive = false;
      w.edges[e2].alive = false;
      return true;
    }
  }

  return false;
}

void run_engine(WGrid& w, EngineMode mode) {
  while (!w.zero && engine_step(w, mode)) {
  }
}

// ---------------------------------------------------------------------------
// Boolean grid assembly shared by the class C/D/E residual stages.

struct BoolBuild {
  std::vector<BoolAtom> atoms;
  std::vector<Edge> edges;
  std::vector<int> ports;  // next free Boolean port per atom

  int add_atom(const BoolAtom& a) {
    atoms.push_back(a);
    ports.push_back(0);
    return static_cast<int>(atoms.size()) - 1;
  }
  PortRef take_port(int atom) { return PortRef{atom, ports[atom]++}; }
  void connect(PortRef a, PortRef b) { edges.push_back(Edge{a, b}); }

  cplx evaluate() const {
    BoolGrid g;
    g.vsigs = atoms;
    g.edges = edges;
    BoolVerdict bv;
    try {
      bv = classify_bool_set(g.vsigs);
    } catch (const HolantError&) {
      fail(Err::VerdictMismatch, "restricted component is not classifiable");
    }
    if (bv.status != BoolVerdict::Status::Tractable)
      fail(Err::VerdictMismatch, "restricted component is not tractable");
    return eval_bool(g, bv);
  }
};

// Connected components over alive vertices.
std::vector<std::vector<int>> alive_components(const WGrid& w) {
  int nv = static_cast<int>(w.verts.size());
  std::vector<int> parent(nv);
  for (int i = 0; i < nv; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : w.edges)
    if (e.alive) parent[find(e.va)] = find(e.vb);
  std::map<int, std::vector<int>> groups;
  for (int v = 0; v < nv; ++v)
    if (w.verts[v].alive) groups[find(v)].push_back(v);
  std::vector<std::vector<int>> out;
  for (auto& [root, vs] : groups) out.push_back(std::move(vs));
  return out;
}

// ---------------------------------------------------------------------------
// Class A: the engine folds everything into the scalar.

cplx eval_class_a(WGrid& w) {
  run_engine(w, EngineMode::MergeAll);
  if (w.zero) return 0.0;
  for (const auto& v : w.verts)
    if (v.alive)
      fail(Err::VerdictMismatch, "arity >= 3 signature in an all-binary class");
  return w.scale;
}

// ---------------------------------------------------------------------------
// Class B: at most three support tuples per vertex, pairwise distinct at
// every position; propagate a seed letter per component.

struct TupleVert {
  bool unary = false;
  std::vector<std::string> tuples;  // letters as chars 0,1,2
  std::vector<cplx> values;
  Vec3 uvec{cplx(0), cplx(0), cplx(0)};
};

cplx eval_class_b(WGrid& w) {
  if (w.zero) return 0.0;
  int nv = static_cast<int>(w.verts.size());

  std::vector<TupleVert> tv(nv);
  for (int v = 0; v < nv; ++v) {
    const auto& wv = w.verts[v];
    if (!wv.alive) continue;
    auto& t = tv[v];
    if (!wv.is_mat && wv.sig.arity == 1) {
      t.unary = true;
      t.uvec = unary_vec(wv.sig);
      continue;
    }
    double cut = kStructuralTol * vert_maxabs(wv);
    if (wv.is_mat) {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          if (std::abs(wv.mat(r, c)) > cut) {
            t.tuples.push_back({static_cast<char>(r), static_cast<char>(c)});
            t.values.push_back(wv.mat(r, c));
          }
    } else {
      for_each_pattern(wv.sig.arity, [&](const Counts& c, std::size_t idx) {
        if (std::abs(wv.sig.v[idx]) <= cut) return;
        std::string base;
        base.append(static_cast<std::size_t>(c.i), char(0));
        base.append(static_cast<std::size_t>(c.j), char(1));
        base.append(static_cast<std::size_t>(c.k), char(2));
        std::string perm = base;
        do {
          t.tuples.push_back(perm);
          t.values.push_back(wv.sig.v[idx]);
        } while (std::next_permutation(perm.begin(), perm.end()) &&
                 t.tuples.size() <= 4);
      });
    }
    if (t.tuples.size() > 3)
      fail(Err::VerdictMismatch, "more than three support tuples");
    for (std::size_t i = 0; i < t.tuples.size(); ++i)
      for (std::size_t j = i + 1; j < t.tuples.size(); ++j)
        for (std::size_t p = 0; p < t.tuples[i].size(); ++p)
          if (t.tuples[i][p] == t.tuples[j][p])
            fail(Err::VerdictMismatch, "support tuples collide at a position");
  }

  // Ports in incidence order.
  std::vector<std::vector<std::pair<int, int>>> inc(nv);  // (edge, side)
  for (int v = 0; v < nv; ++v)
    if (w.verts[v].alive) inc[v] = endpoints_of(w, v);
  // For each edge side, the tuple position at its vertex: matrix vertices
  // expose (row, column) by role, symmetric ones by incidence order.
  int ne = static_cast<int>(w.edges.size());
  std::vector<std::array<int, 2>> eport(ne, {-1, -1});
  for (int v = 0; v < nv; ++v)
    for (std::size_t p = 0; p < inc[v].size(); ++p) {
      auto [ei, side] = inc[v][p];
      eport[ei][side] = w.verts[v].is_mat ? role_at(w.edges[ei], side)
                                          : static_cast<int>(p);
    }

  auto comps = alive_components(w);
  cplx total = w.scale;
  std::vector<int> letter(ne, -1);
  for (const auto& comp : comps) {
    std::vector<int> comp_edges;
    for (int ei = 0; ei < ne; ++ei)
      if (w.edges[ei].alive &&
          std::find(comp.begin(), comp.end(), w.edges[ei].va) != comp.end())
        comp_edges.push_back(ei);
    if (comp_edges.empty()) {
      const auto& lone = w.verts[comp[0]];
      if (comp.size() == 1 && !lone.is_mat && lone.sig.arity == 0) {
        total *= lone.sig.v[0];
        continue;
      }
      fail(Err::Validation, "vertex without edges in a closed grid");
    }
    cplx compval = 0.0;
    for (int seed = 0; seed < 3; ++seed) {
      for (int ei : comp_edges) letter[ei] = -1;
      std::vector<int> chosen(nv, -1);
      bool dead = false;
      std::vector<int> queue;
      letter[comp_edges[0]] = seed;
      queue.push_back(comp_edges[0]);
      auto assign = [&](int ei, int l) {
        if (letter[ei] < 0) {
          letter[ei] = l;
          queue.push_back(ei);
        } else if (letter[ei] != l) {
          dead = true;
        }
      };
      while (!queue.empty() && !dead) {
        int ei = queue.back();
        queue.pop_back();
        const auto& e = w.edges[ei];
        for (int side = 0; side < 2; ++side) {
          int v = side == 0 ? e.va : e.vb;
          auto& t = tv[v];
          if (t.unary) continue;
          int p = eport[ei][side];
          if (chosen[v] >= 0) {
            if (t.tuples[static_cast<std::size_t>(chosen[v])]
                        [static_cast<std::size_t>(p)] != letter[ei])
              dead = true;
            continue;
          }
          int match = -1;
          for (std::size_t k = 0; k < t.tuples.size(); ++k)
            if (t.tuples[k][static_cast<std::size_t>(p)] == letter[ei])
              match = static_cast<int>(k);
          if (match < 0) {
            dead = true;
            break;
          }
          chosen[v] = match;
          const std::string& tup = t.tuples[static_cast<std::size_t>(match)];
          for (std::size_t q = 0; q < inc[v].size(); ++q) {
            auto [fi, fside] = inc[v][q];
            assign(fi, tup[static_cast<std::size_t>(eport[fi][fside])]);
          }
        }
      }
      if (dead) continue;
      cplx weight = 1.0;
      for (int v : comp) {
        auto& t = tv[v];
        if (t.unary) {
          int l = letter[inc[v][0].first];
          if (l < 0) fail(Err::Validation, "unassigned edge after propagation");
          weight *= t.uvec[static_cast<std::size_t>(l)];
        } else {
          if (chosen[v] < 0)
            fail(Err::Validation, "undecided vertex after propagation");
          weight *= t.values[static_cast<std::size_t>(chosen[v])];
        }
      }
      compval += weight;
    }
    total *= compval;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Class C: everything lives on the BG plane; chains were merged by the
// engine, so restrict each residual vertex and evaluate per component.

cplx eval_class_c(WGrid& w) {
  run_engine(w, EngineMode::MergeAll);
  if (w.zero) return 0.0;

  for (const auto& wv : w.verts) {
    if (!wv.alive || wv.is_mat) continue;
    if (!supported_on_plane(wv.sig, Plane::BG, kStructuralTol))
      fail(Err::VerdictMismatch, "signature leaves the BG plane");
  }

  cplx total = w.scale;
  for (const auto& comp : alive_components(w)) {
    BoolBuild bb;
    std::map<int, int> atom_of;
    for (int v : comp) {
      const auto& wv = w.verts[v];
      if (wv.is_mat) {
        atom_of[v] = bb.add_atom(
            BoolAtom::matrix(restrict_binary(wv.mat, Plane::BG, Plane::BG)));
      } else {
        atom_of[v] = bb.add_atom(
            BoolAtom::symmetric(restrict_signature(wv.sig, Plane::BG)));
      }
    }
    for (std::size_t ei = 0; ei < w.edges.size(); ++ei) {
      const auto& e = w.edges[ei];
      if (!e.alive || !atom_of.count(e.va)) continue;
      PortRef pa = w.verts[e.va].is_mat ? PortRef{atom_of[e.va], e.ra}
                                        : bb.take_port(atom_of[e.va]);
      PortRef pb = w.verts[e.vb].is_mat ? PortRef{atom_of[e.vb], e.rb}
                                        : bb.take_port(atom_of[e.vb]);
      bb.connect(pa, pb);
    }
    total *= bb.evaluate();
  }
  return total;
}

// ---------------------------------------------------------------------------
// Class D: BG|R separation. Clusters joined by block binaries carry one
// shared side; swap binaries connect clusters of opposite sides.

cplx eval_class_d(WGrid& w) {
  run_engine(w, EngineMode::MergeAll);
  if (w.zero) return 0.0;

  int nv = static_cast<int>(w.verts.size());
  enum class MKind { Block, Swap };
  std::map<int, MKind> mkind;
  for (int v = 0; v < nv; ++v) {
    const auto& wv = w.verts[v];
    if (!wv.alive) continue;
    if (wv.is_mat) {
      BinaryShape sh = binary_shape(wv.mat);
      if (sh.block_plane && *sh.block_plane == Plane::BG)
        mkind[v] = MKind::Block;
      else if (sh.swap_plane && *sh.swap_plane == Plane::BG)
        mkind[v] = MKind::Swap;
      else
        fail(Err::VerdictMismatch, "binary is neither block nor swap");
    } else if (!support_flags(wv.sig).separated(Plane::BG)) {
      fail(Err::VerdictMismatch, "signature is not BG|R separated");
    }
  }

  // Clusters: union over direct edges and block binaries.
  std::vector<int> parent(nv);
  for (int i = 0; i < nv; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const auto& e : w.edges) {
    if (!e.alive) continue;
    bool am = w.verts[e.va].is_mat, bm = w.verts[e.vb].is_mat;
    if (!am && !bm) unite(e.va, e.vb);
  }
  for (auto [v, k] : mkind) {
    if (k != MKind::Block) continue;
    auto eps = endpoints_of(w, v);
    int u = other_vertex(w.edges[eps[0].first], eps[0].second);
    int x = other_vertex(w.edges[eps[1].first], eps[1].second);
    unite(v, u);
    unite(v, x);
  }
  // Swap links between clusters: (cluster u, cluster x, swap vertex).
  struct SwapLink {
    int cu, cx;
    int mat_vertex;
    int u, x;        // big endpoints
    int role_u;      // swap matrix role on the u side
  };
  std::vector<SwapLink> swaps;
  for (auto [v, k] : mkind) {
    if (k != MKind::Swap) continue;
    auto eps = endpoints_of(w, v);
    int u = other_vertex(w.edges[eps[0].first], eps[0].second);
    int x = other_vertex(w.edges[eps[1].first], eps[1].second);
    swaps.push_back(SwapLink{find(u), find(x), v, u, x,
                             role_at(w.edges[eps[0].first], eps[0].second)});
  }

  cplx total = w.scale;
  for (const auto& comp : alive_components(w)) {
    // Clusters present in this component.
    std::vector<int> clusters;
    for (int v : comp)
      if (!w.verts[v].is_mat || mkind[v] == MKind::Block) {
        int c = find(v);
        if (std::find(clusters.begin(), clusters.end(), c) == clusters.end())
          clusters.push_back(c);
      }
    // 2-colour the cluster graph across swap links.
    std::map<int, int> colour;
    bool consistent = true;
    std::vector<int> stack;
    colour[clusters[0]] = 0;
    stack.push_back(clusters[0]);
    // Iterate to closure (the cluster graph is connected inside a component).
    bool changed = true;
    while (changed && consistent) {
      changed = false;
      for (const auto& sl : swaps) {
        bool in_comp =
            std::find(comp.begin(), comp.end(), sl.mat_vertex) != comp.end();
        if (!in_comp) continue;
        if (sl.cu == sl.cx) {
          consistent = false;
          break;
        }
        bool hu = colour.count(sl.cu), hx = colour.count(sl.cx);
        if (hu && hx) {
          if (colour[sl.cu] == colour[sl.cx]) consistent = false;
        } else if (hu) {
          colour[sl.cx] = 1 - colour[sl.cu];
          changed = true;
        } else if (hx) {
          colour[sl.cu] = 1 - colour[sl.cx];
          changed = true;
        }
      }
    }
    if (!consistent || colour.size() != clusters.size()) {
      if (!consistent) {
        // Odd cycle or swap self-loop: the component sums to zero.
        total *= 0.0;
        continue;
      }
      fail(Err::Validation, "cluster graph is not connected as expected");
    }

    cplx compval = 0.0;
    for (int type = 0; type < 2; ++type) {
      cplx prod = 1.0;
      for (int c : clusters) {
        int side = colour[c] ^ type;  // 0 = BG, 1 = R
        if (side == 1) {
          for (int v : comp) {
            if (find(v) != c) continue;
            const auto& wv = w.verts[v];
            if (wv.is_mat) {
              if (mkind[v] == MKind::Block) prod *= wv.mat(2, 2);
            } else {
              prod *= wv.sig.at(0, 0, wv.sig.arity);
            }
          }
        } else {
          BoolBuild bb;
          std::map<int, int> atom_of;
          for (int v : comp) {
            if (find(v) != c) continue;
            const auto& wv = w.verts[v];
            if (wv.is_mat) {
              if (mkind[v] == MKind::Block)
                atom_of[v] = bb.add_atom(BoolAtom::matrix(
                    restrict_binary(wv.mat, Plane::BG, Plane::BG)));
            } else {
              atom_of[v] = bb.add_atom(BoolAtom::symmetric(
                  restrict_signature(wv.sig, Plane::BG)));
            }
          }
          for (std::size_t ei = 0; ei < w.edges.size(); ++ei) {
            const auto& e = w.edges[ei];
            if (!e.alive || !atom_of.count(e.va) || !atom_of.count(e.vb))
              continue;
            PortRef pa = w.verts[e.va].is_mat ? PortRef{atom_of[e.va], e.ra}
                                              : bb.take_port(atom_of[e.va]);
            PortRef pb = w.verts[e.vb].is_mat ? PortRef{atom_of[e.vb], e.rb}
                                              : bb.take_port(atom_of[e.vb]);
            bb.connect(pa, pb);
          }
          // Swap stubs: unary (swap column at R) on the BG side.
          for (const auto& sl : swaps) {
            for (int side_idx = 0; side_idx < 2; ++side_idx) {
              int big = side_idx == 0 ? sl.u : sl.x;
              if (find(big) != c || !atom_of.count(big)) continue;
              const Mat3& m = w.verts[sl.mat_vertex].mat;
              int role =
                  side_idx == 0 ? sl.role_u : 1 - sl.role_u;
              cplx w0 = role == 0 ? m(0, 2) : m(2, 0);
              cplx w1 = role == 0 ? m(1, 2) : m(2, 1);
              BoolAtom ua;
              ua.kind = BoolAtom::Kind::Symmetric;
              ua.sym.f = {w0, w1};
              int uatom = bb.add_atom(ua);
              bb.connect(bb.take_port(atom_of[big]), PortRef{uatom, 0});
            }
          }
          prod *= bb.evaluate();
        }
      }
      compval += prod;
    }
    total *= compval;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Class E: plane clusters joined by signed-permutation links; align each
// vertex into the root plane and evaluate the Boolean residue.

cplx eval_class_e(WGrid& w) {
  run_engine(w, EngineMode::PlaneAware);
  if (w.zero) return 0.0;

  int nv = static_cast<int>(w.verts.size());
  std::vector<std::optional<Plane>> vplane(nv);
  std::vector<Mat3> pmat(nv);  // exact signed permutation for matrix links
  for (int v = 0; v < nv; ++v) {
    auto& wv = w.verts[v];
    if (!wv.alive) continue;
    if (wv.is_mat) {
      double s = 0;
      if (!oh_match(wv.mat, kStructuralTol, &s))
        fail(Err::VerdictMismatch,
             "link binary is not a signed permutation multiple");
      w.scale *= s;
      Mat3 p;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          p(i, j) = std::round(wv.mat(i, j).real() / s);
      pmat[v] = p;
    } else {
      if (wv.sig.arity == 1)
        fail(Err::Validation, "unary survived the rewrite engine");
      vplane[v] = plane_of_sym(wv.sig);
      if (!vplane[v])
        fail(Err::VerdictMismatch,
             "signature is not plane-supported in the witness frame");
    }
  }

  // Connections between plane vertices: direct edges and matrix links.
  struct Conn {
    int u, x;
    Mat3 p;          // oriented with rows indexing u's letters
    int eu, ex;      // underlying edges (eu == ex for a direct edge)
  };
  std::vector<Conn> conns;
  for (std::size_t ei = 0; ei < w.edges.size(); ++ei) {
    const auto& e = w.edges[ei];
    if (!e.alive) continue;
    if (!w.verts[e.va].is_mat && !w.verts[e.vb].is_mat)
      conns.push_back(Conn{e.va, e.vb, Mat3::identity(),
                           static_cast<int>(ei), static_cast<int>(ei)});
  }
  for (int v = 0; v < nv; ++v) {
    if (!w.verts[v].alive || !w.verts[v].is_mat) continue;
    auto eps = endpoints_of(w, v);
    if (eps.size() != 2)
      fail(Err::Validation, "matrix link with unexpected degree");
    int u = other_vertex(w.edges[eps[0].first], eps[0].second);
    int x = other_vertex(w.edges[eps[1].first], eps[1].second);
    int role_u = role_at(w.edges[eps[0].first], eps[0].second);
    Mat3 p = role_u == 0 ? pmat[v] : pmat[v].transpose();
    conns.push_back(Conn{u, x, p, eps[0].first, eps[1].first});
  }

  // Components over plane vertices through the connections.
  std::vector<int> comp(nv, -1);
  int ncomp = 0;
  for (int v0 = 0; v0 < nv; ++v0) {
    if (comp[v0] >= 0 || !w.verts[v0].alive || w.verts[v0].is_mat) continue;
    std::vector<int> stack{v0};
    comp[v0] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& cn : conns) {
        int o = -1;
        if (cn.u == v) o = cn.x;
        if (cn.x == v) o = cn.u;
        if (o >= 0 && comp[o] < 0) {
          comp[o] = ncomp;
          stack.push_back(o);
        }
      }
    }
    ++ncomp;
  }

  cplx total = w.scale;
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> members;
    for (int v = 0; v < nv; ++v)
      if (comp[v] == c) members.push_back(v);
    Plane p0 = *vplane[members[0]];

    // Alignment BFS.
    std::vector<std::optional<Mat3>> H(nv);
    H[members[0]] = Mat3::identity();
    std::vector<char> conn_tree(conns.size(), 0);
    std::vector<char> conn_used(conns.size(), 0);
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t k = 0; k < conns.size(); ++k) {
        const auto& cn = conns[k];
        if (conn_used[k] || comp[cn.u] != c) continue;
        if (H[cn.u] && !H[cn.x]) {
          H[cn.x] = (*H[cn.u]) * cn.p;
          conn_tree[k] = 1;
          conn_used[k] = 1;
          grew = true;
        } else if (H[cn.x] && !H[cn.u]) {
          H[cn.u] = (*H[cn.x]) * cn.p.transpose();
          conn_tree[k] = 1;
          conn_used[k] = 1;
          grew = true;
        } else if (H[cn.u] && H[cn.x]) {
          conn_used[k] = 1;  // non-tree connection
        }
      }
    }

    BoolBuild bb;
    std::map<int, int> atom_of;
    for (int v : members) {
      SymSig g = apply_binary(*H[v], w.verts[v].sig);
      if (!supported_on_plane(g, p0, kStructuralTol))
        fail(Err::VerdictMismatch, "aligned signature leaves the root plane");
      atom_of[v] = bb.add_atom(BoolAtom::symmetric(restrict_signature(g, p0)));
    }
    for (std::size_t k = 0; k < conns.size(); ++k) {
      const auto& cn = conns[k];
      if (comp[cn.u] != c) continue;
      PortRef pu = bb.take_port(atom_of[cn.u]);
      PortRef px = bb.take_port(atom_of[cn.x]);
      if (conn_tree[k]) {
        bb.connect(pu, px);
        continue;
      }
      Mat3 twisted = (*H[cn.u]) * cn.p * H[cn.x]->transpose();
      Mat2 link = restrict_binary(twisted, p0, p0);
      int latom = bb.add_atom(BoolAtom::matrix(link));
      bb.connect(pu, PortRef{latom, 0});
      bb.connect(PortRef{latom, 1}, px);
    }
    total *= bb.evaluate();
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Brute force.

cplx eval_brute(const SignatureGrid& grid, const EvalOptions& opt,
                EvalStats* stats) {
  grid.validate();
  if (!grid.externals.empty())
    fail(Err::Validation, "brute evaluation wants a closed grid");
  auto ports = port_map(grid);
  int ne = static_cast<int>(grid.edges.size());
  if (ne > static_cast<int>(opt.brute_cap_edges))
    fail(Err::TooLarge,
         "brute force capped at " + std::to_string(opt.brute_cap_edges) +
             " edges");

  int bdigits = std::min(ne, 6);
  std::size_t nblocks = 1;
  for (int i = 0; i < bdigits; ++i) nblocks *= 3;
  std::size_t inner = 1;
  for (int i = bdigits; i < ne; ++i) inner *= 3;

  std::vector<cplx> partial(nblocks, cplx(0));
  auto run_block = [&](std::size_t blk) {
    std::vector<int> letters(ne, 0);
    std::size_t b = blk;
    for (int i = 0; i < bdigits; ++i) {
      letters[i] = static_cast<int>(b % 3);
      b /= 3;
    }
    PairwiseSum acc;
    for (std::size_t a = 0; a < inner; ++a) {
      std::size_t q = a;
      for (int i = bdigits; i < ne; ++i) {
        letters[i] = static_cast<int>(q % 3);
        q /= 3;
      }
      acc.push(assignment_value(grid, ports, letters, {}));
    }
    partial[blk] = acc.total();
  };

  int workers = std::max(1, opt.workers);
  if (workers == 1) {
    for (std::size_t blk = 0; blk < nblocks; ++blk) run_block(blk);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t blk = next.fetch_add(1);
          if (blk >= nblocks) return;
          run_block(blk);
        }
      });
    for (auto& th : pool) th.join();
  }

  PairwiseSum acc;
  for (std::size_t blk = 0; blk < nblocks; ++blk) acc.push(partial[blk]);
  if (stats) {
    stats->method = "brute";
    stats->components = components(grid).second;
    stats->assignments = nblocks * inner;
  }
  return acc.total();
}

// ---------------------------------------------------------------------------
// Dispatch.

cplx eval_tractable(const SignatureGrid& grid, const Verdict& verdict,
                    EvalStats* stats) {
  grid.validate();
  if (!grid.externals.empty())
    fail(Err::Validation, "tractable evaluation wants a closed grid");
  if (verdict.status != Verdict::Status::Tractable)
    fail(Err::Validation, "eval_tractable needs a tractable verdict");
  Mat3 frame = verdict.witness_T ? *verdict.witness_T : Mat3::identity();

  bool plane_structured = *verdict.cls == TractClass::C ||
                          *verdict.cls == TractClass::D ||
                          *verdict.cls == TractClass::E;
  WGrid w = build_wgrid(grid, frame, plane_structured);
  factor_degenerates3(w);
  cplx value = 0.0;
  if (w.zero) {
    value = 0.0;
  } else {
    switch (*verdict.cls) {
      case TractClass::A: value = eval_class_a(w); break;
      case TractClass::B: value = eval_class_b(w); break;
      case TractClass::C: value = eval_class_c(w); break;
      case TractClass::D: value = eval_class_d(w); break;
      case TractClass::E: value = eval_class_e(w); break;
    }
    if (w.zero) value = 0.0;
  }
  if (stats) {
    stats->method = std::string("class-") + tract_class_name(*verdict.cls);
    stats->components = components(grid).second;
    stats->assignments = 0;
  }
  return value;
}

}  // namespace holant3
