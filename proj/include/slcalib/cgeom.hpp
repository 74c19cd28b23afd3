#pragma once

#include <Eigen/Dense>
#include <complex>

namespace slcalib {

using Complex = std::complex<double>;

/** Ambient vector in C^3. */
using Complex3 = Eigen::Vector3cd;

/** Hermitian pairing sum_j conj(u_j) v_j.
 *  Conjugate-linear in u, linear in v; herm(u,u) = |u|^2 >= 0. */
Complex herm(const Complex3& u, const Complex3& v);

/** Euclidean inner product on C^3 viewed as R^6: Re herm(u,v). */
double metric_g(const Complex3& u, const Complex3& v);

/** Standard symplectic pairing on C^3 viewed as R^6: Im herm(u,v).
 *  omega(u,v) = -omega(v,u) and omega(u,u) = 0. */
double omega(const Complex3& u, const Complex3& v);

/** Antisymmetric cross product on C^3, conjugate-linear in both arguments:
 *    cross(r,s)_1 = (conj(r_2)conj(s_3) - conj(r_3)conj(s_2)) / 2,  etc.
 *  Identities (used as test invariants):
 *    herm(cross(r,s), w) = det3(r,s,w) / 2,
 *    cross(U r, U s)     = U cross(r,s)  for U in SU(3),
 *    cross(u, cross(u,w)) = herm(u,w)/4 * u - herm(u,u)/4 * w. */
Complex3 cross(const Complex3& r, const Complex3& s);

/** Determinant of the 3x3 complex matrix whose columns are u, v, w. */
Complex det3(const Complex3& u, const Complex3& v, const Complex3& w);

/** Real part of det3(u,v,w): the calibration 3-form evaluated on (u,v,w). */
double re_omega3(const Complex3& u, const Complex3& v, const Complex3& w);

/** Imaginary part of det3(u,v,w).  Vanishing of this together with the
 *  symplectic pairings characterises special Lagrangian tangent frames. */
double im_omega3(const Complex3& u, const Complex3& v, const Complex3& w);

}  // namespace slcalib
