#pragma once

#include <functional>
#include <string>
#include <vector>

#include "slcalib/cgeom.hpp"
#include "slcalib/flow.hpp"

namespace slcalib {

/* ------------------------------------------------------------------ */
/* Group actions                                                        */
/* ------------------------------------------------------------------ */

/** Affine reparametrisation (y1, y2) -> (a y1 + b y2 + e, c y1 + d y2 + f)
 *  with delta = a d - b c != 0, acting on six-vector families. */
struct GL2AffineParams {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;
  double delta() const { return a * d - b * c; }
};

/** Composition as affine maps: compose(g1, g2) applied to y equals
 *  g1(g2(y)).  Acting on families, acting by g1 first and then by g2
 *  equals acting by compose(g1, g2) once. */
GL2AffineParams compose(const GL2AffineParams& g1, const GL2AffineParams& g2);

/** The transformed state at time t, given the source state at delta * t.
 *  gl2_act wraps this into a family accessor. */
ZState gl2_act_state(const GL2AffineParams& g, const ZState& s_at_delta_t);

using ZFamily = std::function<ZState(double)>;
ZFamily gl2_act(const GL2AffineParams& g, ZFamily family);

/** Reparametrisation (x, y) -> (a x + b, c y + d0 + d1 x + ... +
 *  d_{k-1} x^{k-1}) with delta = a c != 0, acting on degree-k families.
 *  d must have size k. */
struct KGroupParams {
  double a = 1, b = 0, c = 1;
  std::vector<double> d;
};

PQState k_act_state(const KGroupParams& g, const PQState& s_at_delta_t);

using PQFamily = std::function<PQState(double)>;
PQFamily k_act(const KGroupParams& g, PQFamily family);

/* ------------------------------------------------------------------ */
/* Classification and normal forms                                      */
/* ------------------------------------------------------------------ */

/** Classification by the real span of (z1, z2, z3):
 *  I: dim 0, II: dim 1, III: dim 2, IV: dim 3.
 *  For case II, form_tag describes the normal form of the associated
 *  quadratic form ("y1^2+y2^2", "-y1^2-y2^2", "y1^2-y2^2" or "y1^2"). */
enum class CaseLabel { I, II, III, IV };

struct Classification {
  CaseLabel label;
  int span_dim;
  std::string form_tag;  // nonempty only for case II
};

Classification classify_case(const Complex3& z1, const Complex3& z2,
                             const Complex3& z3);

std::string to_string(CaseLabel label);

/** A normalising transform: an affine reparametrisation followed by a
 *  special unitary rotation of C^3 applied to every z component. */
struct Normalization {
  GL2AffineParams g;
  Eigen::Matrix3cd unitary = Eigen::Matrix3cd::Identity();
};

/** Applies the unitary part to every component of a state. */
ZState rotate_state(const Eigen::Matrix3cd& U, const ZState& s);

/** Transformed family: t -> U * gl2_act(g, family)(t). */
ZFamily apply_normalization(const Normalization& n, ZFamily family);

/** Normalising transform for case-iii initial data: brings (z1, z2, z3)
 *  at t = 0 to the canonical background z1 = z2 = (e^{it}, -i e^{-it}, 0),
 *  z3 = (0, 0, 1) when applied to the solution family.  Inputs whose span
 *  is not two-dimensional, or whose kernel covector is not null for the
 *  form a1^2 - a2^2 - a3^2, are rejected with invalid_params. */
Normalization normalize_case_iii(const ZState& init);

/** Normalising transform for case-iv initial data: diagonalises the
 *  background against the Lorentzian form, producing z1 = (w1, 0, 0),
 *  z2 = (0, w2, 0), z3 = (0, 0, w3) at t = 0.  Inputs with a degenerate
 *  pencil raise numerical_error; non-case-iv inputs raise
 *  invalid_params. */
Normalization normalize_case_iv(const ZState& init);

}  // namespace slcalib
