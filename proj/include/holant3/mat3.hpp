#pragma once
// 3x3 matrices over the complex numbers, shape predicates for binary
// signatures, and the 48-element group of signed permutation matrices.

#include <array>
#include <optional>
#include <vector>

#include "holant3/sig.hpp"

namespace holant3 {

struct Mat3 {
  // m[r][c], rows and columns ordered B, G, R.
  std::array<std::array<cplx, 3>, 3> m{};

  static Mat3 identity();
  static Mat3 zero();
  static Mat3 diag(cplx a, cplx b, cplx c);
  static Mat3 outer(const Vec3& a, const Vec3& b);

  cplx& operator()(int r, int c) { return m[r][c]; }
  const cplx& operator()(int r, int c) const { return m[r][c]; }

  Mat3 transpose() const;
  double maxabs() const;
  bool is_real(double tol) const;
  bool is_symmetric(double tol) const;
};

Mat3 operator*(const Mat3& a, const Mat3& b);
Mat3 operator*(cplx s, const Mat3& a);
Mat3 operator+(const Mat3& a, const Mat3& b);
Mat3 operator-(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& a, const Vec3& x);

cplx det(const Mat3& a);
int rank_with_tol(const Mat3& a, double tol);  // tol relative to maxabs
bool mats_equal(const Mat3& a, const Mat3& b, double tol);
bool mats_projectively_equal(const Mat3& a, const Mat3& b, double tol);
bool is_orthogonal(const Mat3& t, double tol = kOrthoTol);  // real, TtT = I

// Conversions between symmetric binary signatures and symmetric matrices.
Mat3 binary_to_mat(const SymSig& g);
SymSig mat_to_binary(const Mat3& m);  // requires symmetry

struct BinaryShape {
  bool is_degenerate = false;  // rank <= 1
  bool in_D = false;           // first two rows and first two cols dependent
  bool is_genperm = false;     // <= 1 nonzero real entry per row and column
  bool in_Oh = false;          // positive multiple lies in the 48-element group
  double oh_scale = 0.0;       // that multiple's inverse scale (m = oh_scale * P)
  std::optional<Plane> block_plane;  // block-diagonal split plane|axis
  std::optional<Plane> swap_plane;   // swap_{ij;k} zero pattern, plane = {i,j}
  bool is_zero = false;
  bool block(Plane p) const { return block_plane && *block_plane == p; }
};

BinaryShape binary_shape(const Mat3& g, double tol = kStructuralTol);

// 2x2 helpers used when restricting binaries to a plane.
struct Mat2 {
  std::array<std::array<cplx, 2>, 2> m{};
  cplx& operator()(int r, int c) { return m[r][c]; }
  const cplx& operator()(int r, int c) const { return m[r][c]; }
  double maxabs() const;
};
Mat2 operator*(const Mat2& a, const Mat2& b);
cplx det2(const Mat2& a);

// Rows of `g` restricted to plane `rp`, columns to plane `cp`.
Mat2 restrict_binary(const Mat3& g, Plane rp, Plane cp);

// All 48 signed permutation matrices, as real Mat3's, in a fixed order.
const std::vector<Mat3>& oh_group();
// Index into oh_group() of m / scale for some scale > 0, if any.
std::optional<int> oh_match(const Mat3& m, double tol, double* scale_out);

}  // namespace holant3
