#include "holant3/classifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>

namespace holant3 {

const char* tract_class_name(TractClass c) {
  switch (c) {
    case TractClass::A: return "A";
    case TractClass::B: return "B";
    case TractClass::C: return "C";
    case TractClass::D: return "D";
    case TractClass::E: return "E";
  }
  return "?";
}

bool sig_is_degenerate(const SymSig& f, double tol) {
  const int n = f.arity;
  if (n <= 1) return true;
  // Second-moment matrix of the 3 x 3^(n-1) flattening; for real signatures
  // its rank equals the flattening rank.
  Mat3 a = Mat3::zero();
  for_each_pattern(n - 1, [&](const Counts& c, std::size_t) {
    double w = multinomial(n - 1, c.i, c.j, c.k);
    cplx fv[3] = {f.at(c.i + 1, c.j, c.k), f.at(c.i, c.j + 1, c.k),
                  f.at(c.i, c.j, c.k + 1)};
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) a(p, q) += w * fv[p] * fv[q];
  });
  return rank_with_tol(a, tol) <= 1;
}

namespace {

bool tab_proj_equal(const SymSig& a, const SymSig& b) {
  if (a.arity != b.arity) return false;
  auto na = projective_normal_form(a.v);
  auto nb = projective_normal_form(b.v);
  for (std::size_t i = 0; i < na.size(); ++i)
    if (std::abs(na[i] - nb[i]) > 1e-7) return false;
  return true;
}

}  // namespace

Orbit compute_orbit(const std::vector<SymSig>& ternaries,
                    const std::vector<Mat3>& binaries, std::size_t cap) {
  Orbit out;
  for (const auto& t : ternaries) {
    bool dup = false;
    for (const auto& m : out.members)
      if (tab_proj_equal(m, t)) { dup = true; break; }
    if (!dup) out.members.push_back(t);
  }
  std::size_t head = 0;
  while (head < out.members.size()) {
    if (out.members.size() >= cap) {
      out.truncated = true;
      break;
    }
    SymSig cur = out.members[head++];
    for (const auto& b : binaries) {
      SymSig g = apply_binary(b, cur);
      if (g.maxabs() <= 1e-12) continue;
      bool dup = false;
      for (const auto& m : out.members)
        if (tab_proj_equal(m, g)) { dup = true; break; }
      if (!dup) {
        out.members.push_back(g);
        if (out.members.size() >= cap) {
          out.truncated = true;
          break;
        }
      }
    }
  }
  return out;
}

namespace {

RVec3 runit(const RVec3& v) {
  double n = rnorm(v);
  return {v[0] / n, v[1] / n, v[2] / n};
}

RVec3 orth_completion(const RVec3& a) {
  // Cross with the axis of least overlap.
  int k = 0;
  double best = std::abs(a[0]);
  for (int i = 1; i < 3; ++i)
    if (std::abs(a[i]) < best) { best = std::abs(a[i]); k = i; }
  RVec3 e{0, 0, 0};
  e[static_cast<std::size_t>(k)] = 1.0;
  return runit(rcross(a, e));
}

Mat3 frame_from_rows(const RVec3& r0, const RVec3& r1, const RVec3& r2) {
  Mat3 t;
  for (int j = 0; j < 3; ++j) {
    t(0, j) = r0[static_cast<std::size_t>(j)];
    t(1, j) = r1[static_cast<std::size_t>(j)];
    t(2, j) = r2[static_cast<std::size_t>(j)];
  }
  return t;
}

Mat3 eigenframe_of(const Mat3& m) {
  Eigen::Matrix3d s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      s(i, j) = (m(i, j).real() + m(j, i).real()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(s);
  Eigen::Matrix3d v = es.eigenvectors();
  Mat3 t;
  for (int r = 0; r < 3; ++r) {
    double sign = 1.0;
    for (int j = 0; j < 3; ++j)
      if (std::abs(v(j, r)) > 1e-9) { sign = v(j, r) > 0 ? 1.0 : -1.0; break; }
    for (int j = 0; j < 3; ++j) t(r, j) = sign * v(j, r);
  }
  return t;
}

std::string frame_key(const Mat3& t) {
  char buf[32];
  std::string key;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      long q = std::lround(t(i, j).real() * 1e6);
      if (q == 0) q = 0;  // normalize -0
      std::snprintf(buf, sizeof buf, "%ld,", q);
      key += buf;
    }
  return key;
}

}  // namespace

std::vector<Mat3> candidate_frames(const std::vector<NamedSig>& sigs,
                                   const Orbit& orbit) {
  std::vector<Mat3> base;
  std::vector<RVec3> axes;
  auto add_axis = [&](const RVec3& a) {
    double n = rnorm(a);
    if (n < 1e-9) return;
    RVec3 u = {a[0] / n, a[1] / n, a[2] / n};
    for (const auto& b : axes) {
      double d = std::abs(rdot(u, b));
      if (d > 1.0 - 1e-7) return;
    }
    axes.push_back(u);
  };
  auto add_frame_and_axes = [&](const Mat3& t) {
    base.push_back(t);
    for (int r = 0; r < 3; ++r)
      add_axis({t(r, 0).real(), t(r, 1).real(), t(r, 2).real()});
  };

  base.push_back(Mat3::identity());

  for (const auto& ns : sigs) {
    if (ns.sig.arity >= 3) {
      try {
        CanonicalResult c = canonicalize(ns.sig);
        add_frame_and_axes(c.T);
      } catch (const HolantError&) {
      }
    } else if (ns.sig.arity == 2) {
      add_frame_and_axes(eigenframe_of(binary_to_mat(ns.sig)));
    }
  }

  std::size_t orbit_frames = 0;
  for (const auto& f : orbit.members) {
    if (orbit_frames >= 64) break;
    try {
      CanonicalResult c = canonicalize(f);
      add_frame_and_axes(c.T);
      ++orbit_frames;
    } catch (const HolantError&) {
    }
  }

  // Frames completing single axes and orthogonal axis pairs.
  std::size_t naxes = axes.size();
  for (std::size_t i = 0; i < naxes; ++i) {
    RVec3 a = axes[i];
    RVec3 b = orth_completion(a);
    base.push_back(frame_from_rows(a, b, runit(rcross(a, b))));
    for (std::size_t j = i + 1; j < naxes; ++j) {
      RVec3 c = axes[j];
      if (std::abs(rdot(a, c)) > 1e-7) continue;
      base.push_back(frame_from_rows(a, c, runit(rcross(a, c))));
    }
  }

  std::vector<Mat3> out;
  std::unordered_set<std::string> seen;
  const auto& oh = oh_group();
  for (const auto& t : base) {
    for (const auto& p : oh) {
      Mat3 pt = p * t;
      auto key = frame_key(pt);
      if (seen.insert(key).second) out.push_back(pt);
    }
  }
  return out;
}

std::vector<Mat3> perm_closure(const std::vector<Mat3>& gens) {
  const auto& oh = oh_group();
  auto index_of = [&](const Mat3& m) -> int {
    double s = m.maxabs();
    if (s <= 0.0) fail(Err::Validation, "zero matrix in perm_closure");
    for (std::size_t k = 0; k < oh.size(); ++k) {
      bool ok = true;
      for (int i = 0; i < 3 && ok; ++i)
        for (int j = 0; j < 3 && ok; ++j)
          if (std::abs(m(i, j).real() / s - oh[k](i, j).real()) > 1e-6 ||
              std::abs(m(i, j).imag()) > 1e-9 * s)
            ok = false;
      if (ok) return static_cast<int>(k);
    }
    fail(Err::Validation, "matrix outside the signed permutation group");
  };

  std::set<int> have;
  have.insert(index_of(Mat3::identity()));
  for (const auto& g : gens) have.insert(index_of(g));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<int> cur(have.begin(), have.end());
    for (int a : cur)
      for (int b : cur) {
        int c = index_of(oh[static_cast<std::size_t>(a)] *
                         oh[static_cast<std::size_t>(b)]);
        if (have.insert(c).second) grew = true;
      }
  }
  std::vector<Mat3> out;
  for (int k : have) out.push_back(oh[static_cast<std::size_t>(k)]);
  return out;
}

namespace {

// Shared Boolean-restriction tractability check used by classes C and D.
// Restriction of f to a plane with entries below the parent scale zeroed, so
// that a signature supported elsewhere restricts to an exact zero rather than
// rounding noise. Returns nullopt when the whole restriction is negligible.
std::optional<BoolSig> clean_restriction(const SymSig& f, Plane pl) {
  BoolSig r = restrict_signature(f, pl);
  double cut = kStructuralTol * std::max(f.maxabs(), 1e-300);
  bool any = false;
  for (auto& z : r.f) {
    if (std::abs(z) <= cut)
      z = 0;
    else
      any = true;
  }
  if (!any) return std::nullopt;
  return r;
}

bool bg_restriction_tractable(const std::vector<SymSig>& tf) {
  std::vector<BoolAtom> atoms;
  for (const auto& f : tf) {
    if (f.arity < 2) continue;
    if (auto r = clean_restriction(f, Plane::BG))
      atoms.push_back(BoolAtom::symmetric(*r));
  }
  try {
    return classify_bool_set(atoms).status == BoolVerdict::Status::Tractable;
  } catch (const HolantError&) {
    return false;
  }
}

}  // namespace

bool check_class_b(const std::vector<SymSig>& tf) {
  for (const auto& f : tf)
    if (!support_flags(f).in_eset) return false;
  return true;
}

bool check_class_c(const std::vector<SymSig>& tf) {
  for (const auto& f : tf) {
    if (f.arity >= 3) {
      if (!supported_on_plane(f, Plane::BG, kStructuralTol)) return false;
    } else if (f.arity == 2) {
      BinaryShape sh = binary_shape(binary_to_mat(f));
      if (!(sh.in_D || (sh.block_plane && *sh.block_plane == Plane::BG)))
        return false;
    }
  }
  return bg_restriction_tractable(tf);
}

bool check_class_d(const std::vector<SymSig>& tf) {
  for (const auto& f : tf) {
    if (f.arity >= 3) {
      if (!support_flags(f).separated(Plane::BG)) return false;
    } else if (f.arity == 2) {
      BinaryShape sh = binary_shape(binary_to_mat(f));
      bool block = sh.block_plane && *sh.block_plane == Plane::BG;
      bool swap = sh.swap_plane && *sh.swap_plane == Plane::BG;
      if (!(block || swap)) return false;
    }
  }
  return bg_restriction_tractable(tf);
}

bool check_class_e(const std::vector<SymSig>& tf) {
  std::vector<std::vector<const SymSig*>> by_plane(3);
  std::vector<Mat3> rest;  // exact signed permutation representatives
  for (const auto& f : tf) {
    SupportFlags fl = support_flags(f);
    if (fl.is_zero) continue;
    if (fl.ebd_plane) {
      by_plane[static_cast<std::size_t>(*fl.ebd_plane)].push_back(&f);
      continue;
    }
    if (f.arity != 2) return false;
    Mat3 m = binary_to_mat(f);
    BinaryShape sh = binary_shape(m);
    if (!sh.in_Oh) return false;
    rest.push_back(m);
  }

  std::vector<Mat3> group;
  try {
    group = perm_closure(rest);
  } catch (const HolantError&) {
    return false;
  }

  for (Plane pl : kPlanes) {
    std::vector<BoolAtom> atoms_b;
    for (const auto& p : group)
      atoms_b.push_back(BoolAtom::matrix(restrict_binary(p, pl, pl)));
    for (const SymSig* f : by_plane[static_cast<std::size_t>(pl)])
      if (auto r = clean_restriction(*f, pl))
        atoms_b.push_back(BoolAtom::symmetric(*r));
    try {
      if (classify_bool_set(atoms_b).status != BoolVerdict::Status::Tractable)
        return false;
    } catch (const HolantError&) {
      return false;
    }

    std::vector<BoolAtom> atoms_c;
    for (const auto& p : group)
      for (const auto& f : tf) {
        SymSig g = apply_binary(p, f);
        if (auto r = clean_restriction(g, pl))
          atoms_c.push_back(BoolAtom::symmetric(*r));
      }
    try {
      if (classify_bool_set(atoms_c).status != BoolVerdict::Status::Tractable)
        return false;
    } catch (const HolantError&) {
      return false;
    }
  }
  return true;
}

Verdict classify_set(const std::vector<NamedSig>& sigs) {
  Verdict v;

  for (const auto& ns : sigs)
    if (!ns.sig.is_real(kStructuralTol))
      fail(Err::Validation,
           "classification requires real-valued signatures: " + ns.name);

  std::vector<NamedSig> kept;
  for (const auto& ns : sigs) {
    if (ns.sig.maxabs() <= 1e-300) {
      v.warnings.push_back(ns.name + ": zero signature ignored");
      continue;
    }
    if (ns.sig.arity <= 1) {
      v.warnings.push_back(ns.name + ": unary signature is free; ignored");
      continue;
    }
    if (sig_is_degenerate(ns.sig)) {
      v.warnings.push_back(ns.name + ": degenerate signature ignored");
      continue;
    }
    kept.push_back(ns);
  }

  bool all_binary = true;
  for (const auto& ns : kept)
    if (ns.sig.arity > 2) all_binary = false;
  if (all_binary) {
    v.status = Verdict::Status::Tractable;
    v.cls = TractClass::A;
    v.witness_T = Mat3::identity();
    v.evidence.push_back("all remaining signatures have arity <= 2");
    return v;
  }

  // Every signature of arity >= 3 must individually split into one of the
  // two orthogonal families; otherwise the set is hard outright.
  for (const auto& ns : kept) {
    if (ns.sig.arity < 3) continue;
    auto dec = try_decompose(ns.sig);
    if (!dec) {
      v.status = Verdict::Status::Hard;
      v.hard = HardEvidence{
          "single-signature-obstruction",
          "signature does not split into an orthogonal direction family",
          {ns.name}};
      return v;
    }
  }

  // Orbit of the high-arity members under the binary members.
  Rng rng(global_seed());
  std::vector<SymSig> ternaries;
  for (const auto& ns : kept) {
    if (ns.sig.arity < 3) continue;
    SymSig t = ns.sig;
    int guard = 0;
    while (t.arity > 3 && guard < 8) {
      Vec3 u;
      for (auto& x : u) x = rng.gauss();
      SymSig c = contract_unary(t, u);
      if (c.maxabs() > 1e-9 * t.maxabs()) {
        t = c;
      } else {
        ++guard;
      }
    }
    if (t.arity == 3) ternaries.push_back(t);
  }
  std::vector<Mat3> binaries;
  for (const auto& ns : kept)
    if (ns.sig.arity == 2) binaries.push_back(binary_to_mat(ns.sig));
  Orbit orbit = compute_orbit(ternaries, binaries);

  std::vector<Mat3> frames = candidate_frames(kept, orbit);

  std::vector<std::vector<SymSig>> tf_cache(frames.size());
  std::vector<bool> tf_ready(frames.size(), false);
  auto transformed = [&](std::size_t k) -> const std::vector<SymSig>& {
    if (!tf_ready[k]) {
      tf_cache[k].reserve(kept.size());
      for (const auto& ns : kept)
        tf_cache[k].push_back(apply_binary(frames[k], ns.sig));
      tf_ready[k] = true;
    }
    return tf_cache[k];
  };

  struct ClassCheck {
    TractClass cls;
    bool (*check)(const std::vector<SymSig>&);
  };
  const ClassCheck order[] = {{TractClass::B, check_class_b},
                              {TractClass::C, check_class_c},
                              {TractClass::D, check_class_d},
                              {TractClass::E, check_class_e}};

  for (const auto& cc : order) {
    for (std::size_t k = 0; k < frames.size(); ++k) {
      if (!cc.check(transformed(k))) continue;
      v.status = Verdict::Status::Tractable;
      v.cls = cc.cls;
      v.witness_T = frames[k];
      v.evidence.push_back("witness frame " + std::to_string(k + 1) + " of " +
                           std::to_string(frames.size()));
      v.evidence.push_back("orbit size " +
                           std::to_string(orbit.members.size()) +
                           (orbit.truncated ? " (truncated)" : ""));
      return v;
    }
  }

  v.status = Verdict::Status::Hard;
  HardEvidence he;
  he.rule = "frame-search-exhausted";
  he.cite = "no orthogonal witness frame fits any tractable family";
  for (const auto& ns : kept) he.signatures.push_back(ns.name);
  v.hard = he;
  v.evidence.push_back("frames searched: " + std::to_string(frames.size()));
  v.evidence.push_back("orbit size " + std::to_string(orbit.members.size()) +
                       (orbit.truncated ? " (truncated)" : ""));
  if (orbit.truncated)
    v.warnings.push_back(
        "orbit truncated at cap; hardness verdict rests on the frame search");
  return v;
}

Verdict classify_single(const SymSig& f) {
  return classify_set({NamedSig{"F", f}});
}

}  // namespace holant3
