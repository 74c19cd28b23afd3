#pragma once

#include <array>
#include <functional>

namespace slcalib {

struct JacobiTriple {
  double sn, cn, dn;
};

/** Jacobi elliptic functions sn, cn, dn for modulus k in [0, 1], computed
 *  by the descending Landen (arithmetic-geometric mean) transformation.
 *  k = 0 gives (sin t, cos t, 1); k = 1 gives (tanh t, sech t, sech t).
 *  Invariants: sn^2 + cn^2 = 1 and k^2 sn^2 + dn^2 = 1;
 *  derivatives sn' = cn dn, cn' = -sn dn, dn' = -k^2 sn cn. */
JacobiTriple jacobi(double t, double k);

/** Complete quarter period K(k) of the Jacobi functions, for k in [0, 1).
 *  Throws invalid_params at k = 1 (K diverges). */
double jacobi_K(double k);

/** Adaptive Simpson quadrature of g over [a, b] with absolute tolerance
 *  tol and recursion depth capped at max_depth. */
double adaptive_simpson(const std::function<double(double)>& g, double a,
                        double b, double tol = 1e-12, int max_depth = 40);

/** Odd antiderivative of sqrt(cosh): integral of sqrt(cosh s) ds from 0
 *  to t, with absolute error at most 1e-12. */
double f_cosh(double t);

/** Roots g1 <= 0 <= g2 <= g3 of the cubic
 *    (a1 + u)(a2 - u)(a3 - u) - A^2
 *  for a harmonic alpha triple (a1..a3 > 0, 1/a1 = 1/a2 + 1/a3 within
 *  1e-12) and 0 < A^2 < a1 a2 a3 strictly.  The boundary A^2 = a1 a2 a3
 *  (double root g2 = g3 = 0) and A = 0 are rejected with invalid_params;
 *  failure of the root pattern raises numerical_error. */
struct CubicRoots {
  double g1, g2, g3;
};
CubicRoots cubic_roots_sorted(double a1, double a2, double a3, double A);

/** Angle integrals along u(s) = g1 + (g2 - g1) sn^2(sigma s, tau), where
 *  sigma = sqrt(g3 - g1) and tau = sqrt((g2 - g1)/(g3 - g1)):
 *    theta1(t) = theta1_0 - A * integral ds / (a1 + u(s)),
 *    theta2(t) =            A * integral ds / (a2 - u(s)),
 *    theta3(t) =            A * integral ds / (a3 - u(s)),
 *  each integral from 0 to t, absolute error at most 1e-10.  A vanishing
 *  denominator raises numerical_error. */
struct ThetaTriple {
  double theta1, theta2, theta3;
};
ThetaTriple theta_integrals(double a1, double a2, double a3, double A,
                            const CubicRoots& roots, double t,
                            double theta1_0);

}  // namespace slcalib
