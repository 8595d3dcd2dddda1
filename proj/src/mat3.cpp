#include "holant3/mat3.hpp"

#include <algorithm>
#include <cmath>

namespace holant3 {

Mat3 Mat3::identity() { return diag(1, 1, 1); }
Mat3 Mat3::zero() { return Mat3{}; }

Mat3 Mat3::diag(cplx a, cplx b, cplx c) {
  Mat3 r;
  r(0, 0) = a;
  r(1, 1) = b;
  r(2, 2) = c;
  return r;
}

Mat3 Mat3::outer(const Vec3& a, const Vec3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

Mat3 Mat3::transpose() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m[j][i];
  return r;
}

double Mat3::maxabs() const {
  double r = 0.0;
  for (auto& row : m)
    for (auto& z : row) r = std::max(r, std::abs(z));
  return r;
}

bool Mat3::is_real(double tol) const {
  double cut = tol * std::max(maxabs(), 1e-300);
  for (auto& row : m)
    for (auto& z : row)
      if (std::abs(z.imag()) > cut) return false;
  return true;
}

bool Mat3::is_symmetric(double tol) const {
  double cut = tol * std::max(maxabs(), 1e-300);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(m[i][j] - m[j][i]) > cut) return false;
  return true;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r(i, j) += a(i, k) * b(k, j);
  return r;
}

Mat3 operator*(cplx s, const Mat3& a) {
  Mat3 r = a;
  for (auto& row : r.m)
    for (auto& z : row) z *= s;
  return r;
}

Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

Vec3 operator*(const Mat3& a, const Vec3& x) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r[i] += a(i, k) * x[k];
  return r;
}

cplx det(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

int rank_with_tol(const Mat3& a, double tol) {
  double cut = tol * std::max(a.maxabs(), 1e-300);
  // Gaussian elimination with partial pivoting on a copy.
  std::array<std::array<cplx, 3>, 3> w = a.m;
  int rank = 0;
  for (int col = 0; col < 3 && rank < 3; ++col) {
    int piv = -1;
    double best = cut;
    for (int r = rank; r < 3; ++r)
      if (std::abs(w[r][col]) > best) {
        best = std::abs(w[r][col]);
        piv = r;
      }
    if (piv < 0) continue;
    std::swap(w[rank], w[piv]);
    for (int r = rank + 1; r < 3; ++r) {
      cplx f = w[r][col] / w[rank][col];
      for (int c = col; c < 3; ++c) w[r][c] -= f * w[rank][c];
    }
    ++rank;
  }
  return rank;
}

bool mats_equal(const Mat3& a, const Mat3& b, double tol) {
  double cut = tol * std::max({a.maxabs(), b.maxabs(), 1e-300});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(a(i, j) - b(i, j)) > cut) return false;
  return true;
}

bool mats_projectively_equal(const Mat3& a, const Mat3& b, double tol) {
  std::vector<cplx> u, v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      u.push_back(a(i, j));
      v.push_back(b(i, j));
    }
  return projectively_equal(u, v, tol);
}

bool is_orthogonal(const Mat3& t, double tol) {
  if (!t.is_real(tol)) return false;
  Mat3 g = t.transpose() * t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) > tol) return false;
  return true;
}

Mat3 binary_to_mat(const SymSig& g) {
  if (g.arity != 2) fail(Err::ArityMismatch, "binary_to_mat wants arity 2");
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Counts c;
      c.i = (i == 0) + (j == 0);
      c.j = (i == 1) + (j == 1);
      c.k = (i == 2) + (j == 2);
      r(i, j) = g.at(c);
    }
  return r;
}

SymSig mat_to_binary(const Mat3& m) {
  if (!m.is_symmetric(kStructuralTol))
    fail(Err::Validation, "mat_to_binary wants a symmetric matrix");
  SymSig g = SymSig::zero(2);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Counts c;
      c.i = (i == 0) + (j == 0);
      c.j = (i == 1) + (j == 1);
      c.k = (i == 2) + (j == 2);
      g.at(c) = m(i, j);
    }
  return g;
}

namespace {

bool zero_pattern(const Mat3& g, double cut,
                  std::initializer_list<std::pair<int, int>> must_zero) {
  for (auto [r, c] : must_zero)
    if (std::abs(g(r, c)) > cut) return false;
  return true;
}

}  // namespace

BinaryShape binary_shape(const Mat3& g, double tol) {
  BinaryShape out;
  double m = g.maxabs();
  double cut = tol * std::max(m, 1e-300);
  out.is_zero = (m <= 1e-300) || zero_pattern(g, cut,
      {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}});

  out.is_degenerate = rank_with_tol(g, tol) <= 1;

  // First two columns dependent and first two rows dependent. The 2x2 minor
  // tests compare against a maxabs^2 scale.
  double cut2 = tol * std::max(m * m, 1e-300);
  auto dep_cols = [&](int c0, int c1) {
    for (int r1 = 0; r1 < 3; ++r1)
      for (int r2 = r1 + 1; r2 < 3; ++r2)
        if (std::abs(g(r1, c0) * g(r2, c1) - g(r1, c1) * g(r2, c0)) > cut2)
          return false;
    return true;
  };
  auto dep_rows = [&](int r0, int r1) {
    for (int c1 = 0; c1 < 3; ++c1)
      for (int c2 = c1 + 1; c2 < 3; ++c2)
        if (std::abs(g(r0, c1) * g(r1, c2) - g(r0, c2) * g(r1, c1)) > cut2)
          return false;
    return true;
  };
  out.in_D = dep_cols(0, 1) && dep_rows(0, 1);

  // Generalized permutation: at most one (real) nonzero per row and column.
  out.is_genperm = g.is_real(tol);
  if (out.is_genperm) {
    for (int i = 0; i < 3; ++i) {
      int row_nz = 0, col_nz = 0;
      for (int j = 0; j < 3; ++j) {
        if (std::abs(g(i, j)) > cut) ++row_nz;
        if (std::abs(g(j, i)) > cut) ++col_nz;
      }
      if (row_nz > 1 || col_nz > 1) out.is_genperm = false;
    }
  }

  double scale = 0.0;
  out.in_Oh = oh_match(g, tol, &scale).has_value();
  out.oh_scale = scale;

  // Block-diagonal plane | axis patterns.
  if (!out.is_zero) {
    if (zero_pattern(g, cut, {{0, 2}, {1, 2}, {2, 0}, {2, 1}}))
      out.block_plane = Plane::BG;
    else if (zero_pattern(g, cut, {{0, 1}, {2, 1}, {1, 0}, {1, 2}}))
      out.block_plane = Plane::BR;
    else if (zero_pattern(g, cut, {{0, 1}, {0, 2}, {1, 0}, {2, 0}}))
      out.block_plane = Plane::GR;

    // Swap patterns: all weight between the plane and its axis.
    if (zero_pattern(g, cut, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}}))
      out.swap_plane = Plane::BG;
    else if (zero_pattern(g, cut, {{0, 0}, {0, 2}, {2, 0}, {2, 2}, {1, 1}}))
      out.swap_plane = Plane::BR;
    else if (zero_pattern(g, cut, {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {0, 0}}))
      out.swap_plane = Plane::GR;
  }
  return out;
}

double Mat2::maxabs() const {
  double r = 0.0;
  for (auto& row : m)
    for (auto& z : row) r = std::max(r, std::abs(z));
  return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) r(i, j) += a(i, k) * b(k, j);
  return r;
}

cplx det2(const Mat2& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

Mat2 restrict_binary(const Mat3& g, Plane rp, Plane cp) {
  int rl[2] = {plane_lo(rp), plane_hi(rp)};
  int cl[2] = {plane_lo(cp), plane_hi(cp)};
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = g(rl[i], cl[j]);
  return r;
}

const std::vector<Mat3>& oh_group() {
  static const std::vector<Mat3> table = [] {
    std::vector<Mat3> v;
    int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& p : perm)
      for (int signs = 0; signs < 8; ++signs) {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
          m(r, p[r]) = (signs >> r) & 1 ? -1.0 : 1.0;
        v.push_back(m);
      }
    return v;
  }();
  return table;
}

std::optional<int> oh_match(const Mat3& m, double tol, double* scale_out) {
  double s = m.maxabs();
  if (scale_out) *scale_out = 0.0;
  if (s <= 1e-300 || !m.is_real(tol)) return std::nullopt;
  // Candidate scale: every nonzero entry must have modulus s and the zero
  // pattern must be a permutation's.
  const auto& tab = oh_group();
  for (int idx = 0; idx < static_cast<int>(tab.size()); ++idx) {
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i)
      for (int j = 0; j < 3 && ok; ++j)
        if (std::abs(m(i, j) - s * tab[idx](i, j)) > tol * s) ok = false;
    if (ok) {
      if (scale_out) *scale_out = s;
      return idx;
    }
  }
  return std::nullopt;
}

}  // namespace holant3
