#pragma once

#include <Eigen/Dense>

namespace slcalib {

/** Element of Lambda^2 R^n stored as its full antisymmetric coefficient
 *  matrix: coeffs(i,j) is the coefficient of e_i ^ e_j for i < j, and
 *  coeffs(j,i) = -coeffs(i,j) always holds. */
struct Bivector {
  Eigen::MatrixXd coeffs;

  explicit Bivector(int n) : coeffs(Eigen::MatrixXd::Zero(n, n)) {}

  int dim() const { return static_cast<int>(coeffs.rows()); }

  /** Adds c * e_i ^ e_j (and the mirrored -c entry). */
  void add_wedge(int i, int j, double c);

  /** sqrt(sum over i<j of coefficient^2). */
  double norm() const;
};

/** Identifies one of the two built-in evolution-data sets.
 *
 *  Ex41: a quadratically embedded surface in R^5 paired with an affine
 *  bivector field; drives the six-vector flow (factor 1).
 *  Ex42(k): the polynomial graph (x, x^2, ..., x^k, y, xy) in R^{k+2}
 *  paired with an affine bivector field; drives the (p, q) flow of
 *  degree k (factor 2).  Requires k >= 1. */
struct EvolutionDataId {
  enum class Kind { Ex41, Ex42 };
  Kind kind = Kind::Ex41;
  int k = 0;

  static EvolutionDataId ex41();
  static EvolutionDataId ex42(int k);

  /** Ambient dimension: 5 for Ex41, k+2 for Ex42. */
  int ambient_dim() const;

  /** Proportionality factor in chi(psi(y)) = factor * pushforward_wedge(y). */
  double factor() const;
};

/** Embedding map of the data set evaluated at (y1, y2) in R^2. */
Eigen::VectorXd psi(const EvolutionDataId& id, double y1, double y2);

/** Affine bivector field of the data set evaluated at x in R^n. */
Bivector chi(const EvolutionDataId& id, const Eigen::VectorXd& x);

/** Wedge of the two columns of the Jacobian of psi at (y1, y2). */
Bivector pushforward_wedge(const EvolutionDataId& id, double y1, double y2);

/** Maximum over an (n x n)-point grid on [y_min, y_max]^2 of
 *  || chi(psi(y)) - factor * pushforward_wedge(y) ||.
 *  Also checks that the pushforward bivector is nonzero at every sample
 *  (throws numerical_error otherwise). */
double verify_evolution_data(const EvolutionDataId& id, double y_min,
                             double y_max, int n_per_axis);

}  // namespace slcalib
