#pragma once

#include <map>
#include <vector>

#include "slcalib/cgeom.hpp"
#include "slcalib/flow.hpp"
#include "slcalib/specfun.hpp"

namespace slcalib {

/** Admissibility threshold on closed-form family parameters. */
inline constexpr double family_params_tol = 1e-12;

/* ------------------------------------------------------------------ */
/* Case-iii family (two-dimensional background span)                   */
/* ------------------------------------------------------------------ */

/** Parameters of the case-iii family.  The constructor enforces the
 *  admissibility condition |Im(A conj(D) + B conj(E))| <= 1e-12. */
struct CaseIIIParams {
  Complex A, B, D, E;
  CaseIIIParams(Complex A_, Complex B_, Complex D_, Complex E_);
};

/** Closed-form six-vector state of the case-iii family at time t. */
ZState caseiii_state(double t, const CaseIIIParams& p);

/** Point of the case-iii family at (y1, y2, t). */
Complex3 caseiii_point(double y1, double y2, double t, const CaseIIIParams& p);

/* ------------------------------------------------------------------ */
/* Diagonal backgrounds (three-dimensional span)                        */
/* ------------------------------------------------------------------ */

/** Positive triple with the harmonic relation 1/a1 = 1/a2 + 1/a3
 *  (enforced to 1e-12 by the constructor). */
struct AlphaTriple {
  double a1, a2, a3;
  AlphaTriple(double a1_, double a2_, double a3_);
};

/** Case-a parameters (background alpha = (1/3, 2/3, 2/3), so the diagonal
 *  entries are (tanh t, sech t, sech t)).  All eight are real; the
 *  constructor enforces B*Ep + C*Fp = Bp*E + Cp*F to 1e-12. */
struct CaseAParams {
  double B, C, E, F, Bp, Cp, Ep, Fp;
  CaseAParams(double B_, double C_, double E_, double F_, double Bp_,
              double Cp_, double Ep_, double Fp_);
};

/** Case-a family evaluator.  w, p, q are closed forms built on f_cosh;
 *  the quadrature part r is integrated from r(0) = 0 once per quarter-unit
 *  checkpoint at construction time, then refined per query from the
 *  nearest checkpoint.  Queries are deterministic and independent of
 *  query order. */
class CaseAFamily {
 public:
  explicit CaseAFamily(const CaseAParams& params, double t_max = 14.0,
                       const IntegratorCfg& cfg = {});
  WPQRState state(double t) const;
  const CaseAParams& params() const { return params_; }

  /** Closed-form (w, p, q) part only, r left zero. */
  WPQRState closed_form_part(double t) const;

 private:
  CaseAParams params_;
  IntegratorCfg cfg_;
  double t_max_;
  double spacing_ = 0.25;
  // checkpoint i holds (r, f) at t = (i - origin) * spacing
  std::vector<Eigen::VectorXcd> checkpoints_;
  long origin_ = 0;
};

/** One-off case-a evaluation (builds a fresh evaluator internally). */
WPQRState casea_wpq(double t, const CaseAParams& p);

/** Case-b diagonal background (requires a2 < a3 strictly):
 *  w = (sqrt(a1+a2) sn(sigma t, tau), sqrt(a1+a2) cn(sigma t, tau),
 *       sqrt(a1+a3) dn(sigma t, tau)) with sigma = sqrt(a1+a3),
 *  tau = sqrt(a1+a2)/sqrt(a1+a3).  Real-valued. */
Eigen::Vector3d caseb_w(double t, const AlphaTriple& alphas);

/** Case-c diagonal background for 0 < A^2 < a1 a2 a3: returns the
 *  modulus variable u(t), the angle triple, and the complex diagonal
 *  w_1 = e^{i theta1} sqrt(a1+u), w_2 = e^{i theta2} sqrt(a2-u),
 *  w_3 = e^{i theta3} sqrt(a3-u).  theta1_0 is caller-supplied (pi/2 is
 *  the consistent choice at u(0) = g1 with A > 0). */
struct CaseCPoint {
  double u;
  ThetaTriple theta;
  Complex3 w;
};
CaseCPoint casec_wu(double t, const AlphaTriple& alphas, double A,
                    double theta1_0 = 1.5707963267948966);

/* ------------------------------------------------------------------ */
/* Case-d family (unit-modulus diagonal background)                     */
/* ------------------------------------------------------------------ */

/** Spectral data of the case-d linear system for a given alpha triple:
 *  rotation rates a1 + a2 + a3 = 0, the gap lambda > 0 with
 *  lambda^2 = a1^2 - a2 a3 = a2^2 - a3 a1 = a3^2 - a1 a2, and the five
 *  real mode vectors b, c, d, e, f (normalised so each stacked 6-vector
 *  (c;d), (e;f) has unit norm and a positive first nonzero entry). */
struct Eigensystem {
  double a1, a2, a3;
  double lambda;
  Eigen::Vector3d b, c, d, e, f;
};

Eigensystem cased_eigensystem(const AlphaTriple& alphas);

/** Case-d parameters.  The constructor computes the eigensystem and
 *  enforces the admissibility condition
 *  Im(C conj(Cp)) * (c1^2-c2^2-c3^2-d1^2+d2^2+d3^2)
 *  + Im(D conj(Dp)) * (e1^2-e2^2-e3^2-f1^2+f2^2+f3^2) = 0  to 1e-12. */
struct CaseDParams {
  AlphaTriple alphas;
  Complex C, D, Cp, Dp;
  Complex E1, E2, E3;
  Eigensystem eig;
  CaseDParams(const AlphaTriple& alphas_, Complex C_, Complex D_, Complex Cp_,
              Complex Dp_, Complex E1_ = 0.0, Complex E2_ = 0.0,
              Complex E3_ = 0.0);
};

/** Closed-form state of the case-d family at time t.  Resonant
 *  denominators (lambda or 3 lambda colliding with a rotation rate)
 *  raise numerical_error. */
WPQRState cased_state(double t, const CaseDParams& p);

/* ------------------------------------------------------------------ */
/* Degree-k family                                                      */
/* ------------------------------------------------------------------ */

/** Finite Fourier polynomial with an optional t-linear term:
 *  sum_n coeffs[n] e^{i n t} + linear * t. */
struct FourierPoly {
  std::map<int, Complex> coeffs;
  Complex linear = 0.0;

  Complex eval(double t) const;
  FourierPoly derivative() const;
  /** Complex conjugate as a function of real t: coefficients conjugate
   *  and frequencies flip sign. */
  FourierPoly conjugated() const;
  /** Multiplication by e^{i m t}.  Requires linear == 0. */
  FourierPoly shifted(int m) const;
  /** Antiderivative with zero integration constant; the frequency-zero
   *  coefficient becomes the t-linear slot.  Requires linear == 0. */
  FourierPoly integrated() const;
  void add(const FourierPoly& other, Complex scale);
  void prune(double abs_tol);
  double max_abs_coeff() const;
};

/** Degree-k family parameters: A1 real (enforced to 1e-12), A2..Ak and
 *  B1..Bk complex.  A and B are indexed 1..k (slot 0 unused).  The
 *  2 pi-periodic subfamily is A1 = A2 = 0. */
struct KFamilyParams {
  int k;
  std::vector<Complex> A, B;
  KFamilyParams(int k_, std::vector<Complex> A_, std::vector<Complex> B_);
  bool periodic_mode() const;
};

/** Component solutions of the degree-k system as Fourier polynomials:
 *  p[j] holds (a_j, b_j, c_j), the three components of p_j. */
struct KFourierSolution {
  int k = 1;
  std::vector<std::array<FourierPoly, 3>> p;
};

/** Solves the degree-k recursion top-down from the level-k homogeneous
 *  data.  Divides by j^2 - n^2 only for n != +-j; a resonant right-hand
 *  side (|coefficient at n = +-j| > 1e-12 * max(1, scale)) raises
 *  numerical_error. */
KFourierSolution generic_k_solve(const KFamilyParams& params);

/** Evaluates a solved degree-k family at time t (q1 = (e^{it}, i e^{-it},
 *  0), q2 = (0,0,1)). */
PQState kfamily_state(double t, const KFourierSolution& sol);

/** Closed-form degree-4 state (requires params.k == 4); tabulated
 *  solution used as a cross-check of generic_k_solve. */
PQState k4_state(double t, const KFamilyParams& params);

/* ------------------------------------------------------------------ */
/* Assembly                                                             */
/* ------------------------------------------------------------------ */

/** Immersion point of a six-vector state:
 *  Phi = (y1^2+y2^2)/2 z1 + (y1^2-y2^2)/2 z2 + y1 y2 z3
 *        + y1 z4 + y2 z5 + z6. */
Complex3 assemble_phi(const ZState& s, double y1, double y2);

/** Six-vector state packed from a diagonal-background state:
 *  z1 = (w1,0,0), z2 = (0,w2,0), z3 = (0,0,w3),
 *  z4 = (p1,p2,q3), z5 = (q1,-q2,p3), z6 = r. */
ZState zstate_from_wpqr(const WPQRState& s);

Complex3 assemble_phi(const WPQRState& s, double y1, double y2);

/** Immersion point of a degree-k state:
 *  Phi = p_0 + x p_1 + ... + x^k p_k + y q_1 + x y q_2. */
Complex3 assemble_phi(const PQState& s, double x, double y);

}  // namespace slcalib
