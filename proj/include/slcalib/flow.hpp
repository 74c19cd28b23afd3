#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "slcalib/cgeom.hpp"

namespace slcalib {

/** Admissibility threshold on constraint residuals of initial data. */
inline constexpr double admissibility_tol = 1e-9;

/** State of the six-vector system. */
struct ZState {
  Complex3 z1 = Complex3::Zero();
  Complex3 z2 = Complex3::Zero();
  Complex3 z3 = Complex3::Zero();
  Complex3 z4 = Complex3::Zero();
  Complex3 z5 = Complex3::Zero();
  Complex3 z6 = Complex3::Zero();
};

/** State of the degree-k system: p_0..p_k plus q_1, q_2. */
struct PQState {
  int k = 1;
  std::vector<Complex3> p;  // size k+1
  Complex3 q1 = Complex3::Zero();
  Complex3 q2 = Complex3::Zero();

  PQState() : p(2, Complex3::Zero()) {}
  explicit PQState(int k_) : k(k_), p(k_ + 1, Complex3::Zero()) {}
};

/** State of the diagonal-background linear system: the three diagonal
 *  entries w, two linear unknowns p, q, and the quadrature part r. */
struct WPQRState {
  Complex3 w = Complex3::Zero();
  Complex3 p = Complex3::Zero();
  Complex3 q = Complex3::Zero();
  Complex3 r = Complex3::Zero();
};

/** Right-hand sides. */
ZState rhs_z(const ZState& s);
PQState rhs_pq(const PQState& s);

/** Diagonal background: dw1 = conj(w2 w3), dw2 = -conj(w3 w1),
 *  dw3 = -conj(w1 w2). */
Complex3 rhs_w(const Complex3& w);

/** Linearised system over a diagonal background:
 *  dp1 = (conj(w2 p3) + conj(w3 p2)) / 2,
 *  dp2 = -(conj(w3 p1) + conj(w1 p3)) / 2,
 *  dp3 = -(conj(w1 p2) + conj(w2 p1)) / 2.
 *  p = w is always a solution. */
Complex3 rhs_pq_linear(const Complex3& w, const Complex3& p);

/** Quadrature part: dr1 = (conj(p2 p3) + conj(q3 q2)) / 2,
 *  dr2 = (conj(q3 q1) - conj(p1 p3)) / 2,
 *  dr3 = -(conj(p1 q2) + conj(p2 q1)) / 2. */
Complex3 rhs_r(const Complex3& p, const Complex3& q);

WPQRState rhs_wpqr(const WPQRState& s);

/** The six conserved pairings of the six-vector system, in order:
 *  omega(z2,z3), omega(z1,z3), omega(z1,z2),
 *  omega(z1,z5) + omega(z2,z5) - omega(z3,z4),
 *  -omega(z1,z4) + omega(z2,z4) + omega(z3,z5),
 *  omega(z4,z5). */
std::array<double, 6> constraint_residuals_z(const ZState& s);

/** The k+2 conserved pairings of the degree-k system, in order:
 *  omega(q1,q2), omega(p_k,q2), then for j = 1..k
 *  j*omega(p_j,q1) + (j-1)*omega(p_{j-1},q2). */
std::vector<double> constraint_residuals_pq(const PQState& s);

/** The three conserved imaginary pairings of the diagonal-background
 *  linear system: Im(w1 conj(p1) - w2 conj(p2) - w3 conj(p3)), the same
 *  with q, and Im(p1 conj(q1) - p2 conj(q2) - p3 conj(q3)).  Admissible
 *  data makes all three vanish. */
std::array<double, 3> pairing_invariants(const WPQRState& s);

/** The translational solutions of the inhomogeneous layer over a fixed
 *  (z1,z2,z3) background, parametrised by (e, f) in R^2:
 *  z4 = e z1 + e z2 + f z3 and z5 = f z1 - f z2 + e z3. */
std::pair<Complex3, Complex3> translation_z45(const Complex3& z1,
                                              const Complex3& z2,
                                              const Complex3& z3, double e,
                                              double f);

/** Dual fundamental solutions: given U whose rows solve du/dt = A u for
 *  the antisymmetric-with-signature generator A (S A S = A^T with
 *  S = diag(1,-1,-1)), the columns of V = (U S)^{-1} solve dv/dt = -A v,
 *  and U S V = I.  A singular U raises numerical_error. */
Eigen::Matrix3d dual_solutions(const Eigen::Matrix3d& U);

/** Integrator configuration. */
struct IntegratorCfg {
  enum class Method { rk4, rk45 };
  Method method = Method::rk4;
  double step = 1e-3;   // nominal step for rk4 (sign-adjusted internally)
  double tol = 1e-10;   // absolute local-error tolerance for rk45
  long max_steps = 20000000;
};

using OdeRhs = std::function<Eigen::VectorXcd(double, const Eigen::VectorXcd&)>;
using OdeObserver = std::function<void(double, const Eigen::VectorXcd&)>;

/** Integrates dy/dt = rhs(t, y) from t0 to t1 (either direction), calling
 *  the observer at t0 and after every accepted step; the final step lands
 *  exactly on t1.  Deterministic for fixed inputs.  Throws numerical_error
 *  if the state becomes non-finite or max_steps is exceeded, naming the
 *  offending time. */
void integrate(const OdeRhs& rhs, Eigen::VectorXcd& y, double t0, double t1,
               const IntegratorCfg& cfg, const OdeObserver& observer = {});

/** Flattening helpers (zi are stored consecutively, components inner). */
Eigen::VectorXcd pack(const ZState& s);
ZState unpack_z(const Eigen::VectorXcd& v);
Eigen::VectorXcd pack(const PQState& s);
PQState unpack_pq(const Eigen::VectorXcd& v, int k);
Eigen::VectorXcd pack(const WPQRState& s);
WPQRState unpack_wpqr(const Eigen::VectorXcd& v);

struct ZSample {
  double t;
  ZState state;
};
struct PQSample {
  double t;
  PQState state;
};
struct WPQRSample {
  double t;
  WPQRState state;
};

/** Throws invalid_params if any constraint residual exceeds
 *  admissibility_tol (fail-fast, before any integration). */
void require_admissible(const ZState& s);
void require_admissible(const PQState& s);

/** Typed front ends; the z and pq variants check admissibility first. */
std::vector<ZSample> integrate_z(const ZState& init, double t0, double t1,
                                 const IntegratorCfg& cfg = {});
std::vector<PQSample> integrate_pq(const PQState& init, double t0, double t1,
                                   const IntegratorCfg& cfg = {});
std::vector<WPQRSample> integrate_wpqr(const WPQRState& init, double t0,
                                       double t1,
                                       const IntegratorCfg& cfg = {});

}  // namespace slcalib
