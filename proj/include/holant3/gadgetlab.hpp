#pragma once
// Gadget construction: brute-force signature of an open grid, the verified
// realization primitives used by the reductions, and grid rewrites.

#include "holant3/boolhol.hpp"
#include "holant3/grid.hpp"
#include "holant3/mat3.hpp"
#include "holant3/sig.hpp"
#include "holant3/tensorlab.hpp"

namespace holant3 {

// Contract the internal edges of an open grid and symmetrize the resulting
// tensor over its external ports. asym_error is the relative deviation of
// the raw tensor from its symmetrization (0 for genuinely symmetric gadgets).
struct GadgetResult {
  SymSig sig;
  double asym_error = 0.0;
};
GadgetResult gadget_signature(const SignatureGrid& grid,
                              std::size_t cap_internal_assignments = 1u << 21);

// Two-vertex gadget on a decomposable ternary f = sum_i c_i v_i^(3) with
// orthonormal real v_i: connects two copies of f through a shared unary so
// the result is sum_i t_i v_i^(3) for the requested coefficients t.
struct GeneqRealization {
  SignatureGrid grid;
  SymSig result;
};
GeneqRealization realize_coeff_geneq(const SymSig& f,
                                     const std::array<cplx, 3>& target);

// Chain of three copies of a canonical pair+axis ternary
// f = c b0^(3) + c b0~^(3) + lambda e3^(3) joined through the unary
// (sqrt 2, 0, 1); produces the arity-4 analogue with axis weight lambda^3.
struct Z4Realization {
  SignatureGrid grid;
  SymSig result;
};
Z4Realization realize_z_arity4(const SymSig& f);

// Binary gadget <f, u> f-slice realizing the orthogonal projector onto the
// two-direction span of a rank-2 decomposable ternary (plane equality).
struct PlaneEqRealization {
  SignatureGrid grid;
  Mat3 result;
};
PlaneEqRealization realize_plane_equality(const SymSig& f);

// Mechanical domain restriction of a closed grid to a plane.
BoolGrid grid_to_boolean(const SignatureGrid& grid, Plane plane);

// Value-preserving local rewrite: replace the signature at one vertex by its
// m-transform and splice the inverse as oriented binary vertices onto each
// incident edge end.
SignatureGrid local_holographic(const SignatureGrid& grid,
                                const std::string& vertex_id, const Mat3& m);

}  // namespace holant3
