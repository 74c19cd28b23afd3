#include "slcalib/families.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "slcalib/errors.hpp"

namespace slcalib {

namespace {

const Complex kI(0.0, 1.0);

/** e^{i x} on the unit circle. */
Complex eix(double x) { return std::polar(1.0, x); }

}  // namespace

/* ------------------------------------------------------------------ */
/* Case-iii family                                                      */
/* ------------------------------------------------------------------ */

CaseIIIParams::CaseIIIParams(Complex A_, Complex B_, Complex D_, Complex E_)
    : A(A_), B(B_), D(D_), E(E_) {
  double resid = std::imag(A * std::conj(D) + B * std::conj(E));
  double scale =
      std::max(1.0, std::abs(A) * std::abs(D) + std::abs(B) * std::abs(E));
  if (std::abs(resid) > family_params_tol * scale)
    throw invalid_params(
        "case-iii parameters must satisfy Im(A conj(D) + B conj(E)) = 0");
}

ZState caseiii_state(double t, const CaseIIIParams& p) {
  const Complex A = p.A, B = p.B, D = p.D, E = p.E;
  const Complex Ab = std::conj(A), Bb = std::conj(B), Db = std::conj(D),
                Eb = std::conj(E);
  ZState s;
  s.z1 = Complex3(eix(t), -kI * eix(-t), 0.0);
  s.z2 = s.z1;
  s.z3 = Complex3(0.0, 0.0, 1.0);
  s.z4 = Complex3(
      D * eix(0.5 * t) + E * eix(-0.5 * t),
      -kI * Db * eix(-0.5 * t) + kI * Eb * eix(0.5 * t),
      2.0 * A * eix(-0.5 * t) - 2.0 * Ab * eix(0.5 * t) -
          (2.0 / 3.0) * B * eix(-1.5 * t) - (2.0 / 3.0) * Bb * eix(1.5 * t));
  s.z5 = Complex3(A * eix(0.5 * t) + B * eix(-0.5 * t),
                  kI * Ab * eix(-0.5 * t) - kI * Bb * eix(0.5 * t), 0.0);
  const double nA = std::norm(A), nB = std::norm(B);
  Complex r1 = -(1.0 / 6.0) * A * Bb * eix(2.0 * t) +
               (nA + nB / 3.0) * eix(t) - kI * (A * A + Ab * B) * t -
               (2.0 / 3.0) * A * B * eix(-t) - (1.0 / 6.0) * B * B * eix(-2.0 * t);
  Complex r2 = (kI / 6.0) * Bb * Bb * eix(2.0 * t) -
               (2.0 * kI / 3.0) * Ab * Bb * eix(t) + (Ab * Ab - A * Bb) * t -
               kI * (nA + nB / 3.0) * eix(-t) -
               (kI / 6.0) * Ab * B * eix(-2.0 * t);
  Complex r3 = -0.5 * (A * Eb + Bb * D) * eix(t) -
               kI * std::real(A * Db - B * Eb) * t -
               0.5 * (Ab * E + B * Db) * eix(-t);
  s.z6 = Complex3(r1, r2, r3);
  return s;
}

Complex3 caseiii_point(double y1, double y2, double t,
                       const CaseIIIParams& p) {
  return assemble_phi(caseiii_state(t, p), y1, y2);
}

/* ------------------------------------------------------------------ */
/* Diagonal backgrounds                                                 */
/* ------------------------------------------------------------------ */

AlphaTriple::AlphaTriple(double a1_, double a2_, double a3_)
    : a1(a1_), a2(a2_), a3(a3_) {
  if (!(a1 > 0.0 && a2 > 0.0 && a3 > 0.0))
    throw invalid_params("AlphaTriple: entries must be positive");
  double h = 1.0 / a1 - 1.0 / a2 - 1.0 / a3;
  if (std::abs(h) > 1e-12 * (1.0 / a1 + 1.0 / a2 + 1.0 / a3))
    throw invalid_params(
        "AlphaTriple: harmonic relation 1/a1 = 1/a2 + 1/a3 violated");
}

CaseAParams::CaseAParams(double B_, double C_, double E_, double F_,
                         double Bp_, double Cp_, double Ep_, double Fp_)
    : B(B_), C(C_), E(E_), F(F_), Bp(Bp_), Cp(Cp_), Ep(Ep_), Fp(Fp_) {
  double lhs = B * Ep + C * Fp, rhs = Bp * E + Cp * F;
  double scale = std::max({1.0, std::abs(B * Ep), std::abs(C * Fp),
                           std::abs(Bp * E), std::abs(Cp * F)});
  if (std::abs(lhs - rhs) > family_params_tol * scale)
    throw invalid_params(
        "case-a parameters must satisfy B Ep + C Fp = Bp E + Cp F");
}

namespace {

/** Case-a closed-form linear mode with a precomputed antiderivative value
 *  f = integral_0^t sqrt(cosh s) ds. */
Complex3 casea_mode(double t, double f, double B, double C, double E,
                    double F) {
  double ch = std::cosh(t), sh = std::sinh(t), th = std::tanh(t);
  double sc = std::sqrt(ch);
  Complex p1 = B * (f * th - 2.0 * sc) + kI * (E / sc);
  Complex p2 = B * (f / ch) + C * sc + kI * (E * sh / (2.0 * sc)) +
               kI * (F / sc);
  Complex p3 = B * (f / ch) - C * sc + kI * (E * sh / (2.0 * sc)) -
               kI * (F / sc);
  return Complex3(p1, p2, p3);
}

Eigen::Vector3d casea_w(double t) {
  double sech = 1.0 / std::cosh(t);
  return Eigen::Vector3d(std::tanh(t), sech, sech);
}

/** Augmented quadrature system (r1, r2, r3, f): r follows the quadrature
 *  right-hand side of the closed-form modes, f integrates sqrt(cosh). */
Eigen::VectorXcd casea_rf_rhs(double t, const Eigen::VectorXcd& y,
                              const CaseAParams& P) {
  double f = y[3].real();
  Complex3 p = casea_mode(t, f, P.B, P.C, P.E, P.F);
  Complex3 q = casea_mode(t, f, P.Bp, P.Cp, P.Ep, P.Fp);
  Complex3 dr = rhs_r(p, q);
  Eigen::VectorXcd d(4);
  d << dr[0], dr[1], dr[2], Complex(std::sqrt(std::cosh(t)), 0.0);
  return d;
}

}  // namespace

CaseAFamily::CaseAFamily(const CaseAParams& params, double t_max,
                         const IntegratorCfg& cfg)
    : params_(params), cfg_(cfg), t_max_(t_max) {
  if (!(t_max > 0.0)) throw invalid_params("CaseAFamily: t_max must be > 0");
  long n_side = std::lround(std::ceil(t_max / spacing_ - 1e-12));
  origin_ = n_side;
  checkpoints_.assign(2 * n_side + 1, Eigen::VectorXcd::Zero(4));
  IntegratorCfg build;  // fixed construction pass, independent of query cfg
  build.method = IntegratorCfg::Method::rk4;
  build.step = 1e-3;
  auto rhs = [this](double t, const Eigen::VectorXcd& y) {
    return casea_rf_rhs(t, y, params_);
  };
  for (int dir : {+1, -1}) {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(4);
    for (long i = 1; i <= n_side; ++i) {
      double ta = dir * (i - 1) * spacing_, tb = dir * i * spacing_;
      integrate(rhs, y, ta, tb, build);
      y[3] = Complex(f_cosh(tb), 0.0);  // pin f to its exact value
      checkpoints_[origin_ + dir * i] = y;
    }
  }
}

WPQRState CaseAFamily::state(double t) const {
  long i = std::clamp(std::lround(t / spacing_), -origin_, origin_);
  Eigen::VectorXcd y = checkpoints_[origin_ + i];
  double ti = static_cast<double>(i) * spacing_;
  if (t != ti) {
    integrate(
        [this](double tt, const Eigen::VectorXcd& yy) {
          return casea_rf_rhs(tt, yy, params_);
        },
        y, ti, t, cfg_);
  }
  double f = y[3].real();
  WPQRState s;
  s.w = casea_w(t).cast<Complex>();
  s.p = casea_mode(t, f, params_.B, params_.C, params_.E, params_.F);
  s.q = casea_mode(t, f, params_.Bp, params_.Cp, params_.Ep, params_.Fp);
  s.r = Complex3(y[0], y[1], y[2]);
  return s;
}

WPQRState CaseAFamily::closed_form_part(double t) const {
  double f = f_cosh(t);
  WPQRState s;
  s.w = casea_w(t).cast<Complex>();
  s.p = casea_mode(t, f, params_.B, params_.C, params_.E, params_.F);
  s.q = casea_mode(t, f, params_.Bp, params_.Cp, params_.Ep, params_.Fp);
  s.r = Complex3::Zero();
  return s;
}

WPQRState casea_wpq(double t, const CaseAParams& p) {
  CaseAFamily fam(p, std::max(0.25, std::abs(t)));
  return fam.state(t);
}

Eigen::Vector3d caseb_w(double t, const AlphaTriple& al) {
  if (!(al.a2 < al.a3))
    throw invalid_params("caseb_w: requires a2 < a3 strictly");
  double s12 = std::sqrt(al.a1 + al.a2), s13 = std::sqrt(al.a1 + al.a3);
  JacobiTriple j = jacobi(s13 * t, s12 / s13);
  return Eigen::Vector3d(s12 * j.sn, s12 * j.cn, s13 * j.dn);
}

CaseCPoint casec_wu(double t, const AlphaTriple& al, double A,
                    double theta1_0) {
  CubicRoots R = cubic_roots_sorted(al.a1, al.a2, al.a3, A);
  if (!(R.g3 > R.g1))
    throw numerical_error("casec_wu: degenerate modulus interval");
  double sigma = std::sqrt(R.g3 - R.g1);
  double tau = std::sqrt((R.g2 - R.g1) / (R.g3 - R.g1));
  double sn = jacobi(sigma * t, tau).sn;
  double u = R.g1 + (R.g2 - R.g1) * sn * sn;
  ThetaTriple th = theta_integrals(al.a1, al.a2, al.a3, A, R, t, theta1_0);
  CaseCPoint out;
  out.u = u;
  out.theta = th;
  out.w = Complex3(
      std::polar(std::sqrt(std::max(0.0, al.a1 + u)), th.theta1),
      std::polar(std::sqrt(std::max(0.0, al.a2 - u)), th.theta2),
      std::polar(std::sqrt(std::max(0.0, al.a3 - u)), th.theta3));
  return out;
}

/* ------------------------------------------------------------------ */
/* Case-d family                                                        */
/* ------------------------------------------------------------------ */

namespace {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

/** Unit null vector of a matrix expected to have a one-dimensional
 *  kernel; the first entry above 1e-9 in magnitude is made positive. */
Vector6d unit_null_vector(const Matrix6d& N, const char* what) {
  Eigen::JacobiSVD<Matrix6d> svd(N, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = std::max(sv(0), 1.0);
  if (sv(5) > 1e-8 * top || sv(4) <= 1e-8 * top)
    throw numerical_error(std::string(what) +
                          ": mode space is not one-dimensional");
  Vector6d v = svd.matrixV().col(5);
  for (int i = 0; i < 6; ++i) {
    if (std::abs(v(i)) > 1e-9) {
      if (v(i) < 0.0) v = -v;
      break;
    }
  }
  return v;
}

}  // namespace

Eigensystem cased_eigensystem(const AlphaTriple& al) {
  double s1 = std::sqrt(al.a1), s2 = std::sqrt(al.a2), s3 = std::sqrt(al.a3);
  Eigensystem eg;
  eg.a1 = -std::sqrt(al.a2 * al.a3 / al.a1);
  eg.a2 = std::sqrt(al.a3 * al.a1 / al.a2);
  eg.a3 = std::sqrt(al.a1 * al.a2 / al.a3);
  double lam2 = eg.a1 * eg.a1 - eg.a2 * eg.a3;
  if (!(lam2 > 0.0))
    throw numerical_error("cased_eigensystem: nonpositive gap squared");
  eg.lambda = std::sqrt(lam2);

  Eigen::Matrix3d K;
  K << 2.0 * eg.a1, -s3, -s2,
       s3, 2.0 * eg.a2, s1,
       s2, s1, 2.0 * eg.a3;
  Eigen::Vector3d src(s1, s2, s3);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(K);
  if (!lu.isInvertible())
    throw numerical_error("cased_eigensystem: singular mean-mode system");
  eg.b = lu.solve(-src);

  Matrix6d M;
  M << -2.0 * eg.a1, 0, 0, 0, -s3, -s2,
       0, -2.0 * eg.a2, 0, s3, 0, s1,
       0, 0, -2.0 * eg.a3, s2, s1, 0,
       0, s3, s2, 2.0 * eg.a1, 0, 0,
       -s3, 0, -s1, 0, 2.0 * eg.a2, 0,
       -s2, -s1, 0, 0, 0, 2.0 * eg.a3;
  Vector6d cd = unit_null_vector(M - eg.lambda * Matrix6d::Identity(),
                                 "cased_eigensystem (gap mode)");
  Vector6d ef = unit_null_vector(M - 3.0 * eg.lambda * Matrix6d::Identity(),
                                 "cased_eigensystem (triple-gap mode)");
  eg.c = cd.head<3>();
  eg.d = cd.tail<3>();
  eg.e = ef.head<3>();
  eg.f = ef.tail<3>();

  auto mink = [](const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
    return x(0) * y(0) - x(1) * y(1) - x(2) * y(2);
  };
  Eigen::Vector3d s(s1, s2, s3);
  double rels[6] = {
      mink(s, eg.c) - mink(s, eg.d),
      mink(s, eg.e) - mink(s, eg.f),
      mink(eg.b, eg.c) + mink(eg.b, eg.d),
      mink(eg.b, eg.e) + mink(eg.b, eg.f),
      mink(eg.c, eg.e) - mink(eg.d, eg.f),
      mink(eg.c, eg.f) - mink(eg.d, eg.e),
  };
  for (double r : rels)
    if (std::abs(r) > 1e-11)
      throw numerical_error(
          "cased_eigensystem: mode orthogonality relations violated");
  return eg;
}

CaseDParams::CaseDParams(const AlphaTriple& alphas_, Complex C_, Complex D_,
                         Complex Cp_, Complex Dp_, Complex E1_, Complex E2_,
                         Complex E3_)
    : alphas(alphas_),
      C(C_),
      D(D_),
      Cp(Cp_),
      Dp(Dp_),
      E1(E1_),
      E2(E2_),
      E3(E3_),
      eig(cased_eigensystem(alphas_)) {
  auto wsq = [](const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
    return x(0) * x(0) - x(1) * x(1) - x(2) * x(2) -
           (y(0) * y(0) - y(1) * y(1) - y(2) * y(2));
  };
  double resid = std::imag(C * std::conj(Cp)) * wsq(eig.c, eig.d) +
                 std::imag(D * std::conj(Dp)) * wsq(eig.e, eig.f);
  double scale = std::max({1.0, std::abs(C) * std::abs(Cp),
                           std::abs(D) * std::abs(Dp)});
  if (std::abs(resid) > family_params_tol * scale)
    throw invalid_params(
        "case-d parameters violate the pairing admissibility relation");
}

WPQRState cased_state(double t, const CaseDParams& P) {
  const Eigensystem& eg = P.eig;
  const double a1 = eg.a1, a2 = eg.a2, a3 = eg.a3, lam = eg.lambda;
  for (double aj : {a1, a2, a3})
    for (double m : {lam, -lam, 3.0 * lam, -3.0 * lam})
      if (std::abs(aj + m) < 1e-9 * lam)
        throw numerical_error("cased_state: resonant denominator");

  double s1 = std::sqrt(P.alphas.a1), s2 = std::sqrt(P.alphas.a2),
         s3 = std::sqrt(P.alphas.a3);
  const Complex C = P.C, D = P.D, Cp = P.Cp, Dp = P.Dp;
  const Eigen::Vector3d &c = eg.c, &d = eg.d, &e = eg.e, &f = eg.f;

  WPQRState s;
  s.w = Complex3(kI * s1 * eix(a1 * t), s2 * eix(a2 * t), s3 * eix(a3 * t));

  auto mode = [&](Complex M, Complex Mp, int j, double aj) {
    return M * c(j) * eix((aj + 0.5 * lam) * t) +
           std::conj(M) * d(j) * eix((aj - 0.5 * lam) * t) +
           Mp * e(j) * eix((aj + 1.5 * lam) * t) +
           std::conj(Mp) * f(j) * eix((aj - 1.5 * lam) * t);
  };
  s.p = Complex3(kI * mode(C, D, 0, a1), mode(C, D, 1, a2), mode(C, D, 2, a3));
  s.q = Complex3(kI * mode(Cp, Dp, 0, a1), mode(Cp, Dp, 1, a2),
                 mode(Cp, Dp, 2, a3));

  /* The third component integrates the bilinear sources exactly. Each factor
     is a sum of four modes at frequencies a_j + s*lambda/2, s in
     {-3,-1,1,3}, so every product term is a single oscillation at
     a_w - m*lambda with m in {-3,...,3}; admissible rate triples keep all of
     those frequencies away from zero, so the antiderivative is again a
     finite mode sum and E1, E2, E3 are the free constants of integration. */
  struct ModeTerm {
    Complex amp;
    int half_s;
  };
  auto mode_terms = [&](Complex M, Complex Mp, int j) {
    return std::array<ModeTerm, 4>{{{M * c(j), 1},
                                    {std::conj(M) * d(j), -1},
                                    {Mp * e(j), 3},
                                    {std::conj(Mp) * f(j), -3}}};
  };
  auto integral_of_product = [&](Complex pref,
                                 const std::array<ModeTerm, 4>& U, double au,
                                 const std::array<ModeTerm, 4>& V, double av) {
    Complex acc(0.0, 0.0);
    for (const ModeTerm& u : U)
      for (const ModeTerm& v : V) {
        double nu = -(au + av) - 0.5 * lam * (u.half_s + v.half_s);
        if (std::abs(nu) < 1e-9 * lam)
          throw numerical_error("cased_state: resonant denominator");
        acc += pref * std::conj(u.amp * v.amp) / (kI * nu) * eix(nu * t);
      }
    return acc;
  };

  const auto P1 = mode_terms(C, D, 0), P2 = mode_terms(C, D, 1),
             P3 = mode_terms(C, D, 2);
  const auto Q1 = mode_terms(Cp, Dp, 0), Q2 = mode_terms(Cp, Dp, 1),
             Q3 = mode_terms(Cp, Dp, 2);
  const Complex half(0.5, 0.0);
  Complex r1 = integral_of_product(half, P2, a2, P3, a3) +
               integral_of_product(half, Q2, a2, Q3, a3) + P.E1;
  Complex r2 = integral_of_product(-half * kI, Q1, a1, Q3, a3) +
               integral_of_product(half * kI, P1, a1, P3, a3) + P.E2;
  Complex r3 = integral_of_product(half * kI, P1, a1, Q2, a2) +
               integral_of_product(half * kI, P2, a2, Q1, a1) + P.E3;
  s.r = Complex3(r1, r2, r3);
  return s;
}

/* ------------------------------------------------------------------ */
/* Degree-k family                                                      */
/* ------------------------------------------------------------------ */

Complex FourierPoly::eval(double t) const {
  Complex s = linear * t;
  for (const auto& [n, cf] : coeffs) s += cf * eix(n * t);
  return s;
}

FourierPoly FourierPoly::derivative() const {
  FourierPoly d;
  for (const auto& [n, cf] : coeffs)
    if (n != 0) d.coeffs[n] = Complex(0.0, static_cast<double>(n)) * cf;
  if (linear != 0.0) d.coeffs[0] += linear;
  return d;
}

FourierPoly FourierPoly::conjugated() const {
  FourierPoly g;
  g.linear = std::conj(linear);
  for (const auto& [n, cf] : coeffs) g.coeffs[-n] = std::conj(cf);
  return g;
}

FourierPoly FourierPoly::shifted(int m) const {
  if (linear != 0.0)
    throw invalid_params("FourierPoly::shifted: t-linear term present");
  FourierPoly g;
  for (const auto& [n, cf] : coeffs) g.coeffs[n + m] = cf;
  return g;
}

FourierPoly FourierPoly::integrated() const {
  if (linear != 0.0)
    throw invalid_params("FourierPoly::integrated: t-linear term present");
  FourierPoly g;
  for (const auto& [n, cf] : coeffs) {
    if (n == 0)
      g.linear += cf;
    else
      g.coeffs[n] = cf / Complex(0.0, static_cast<double>(n));
  }
  return g;
}

void FourierPoly::add(const FourierPoly& other, Complex scale) {
  linear += scale * other.linear;
  for (const auto& [n, cf] : other.coeffs) coeffs[n] += scale * cf;
}

void FourierPoly::prune(double abs_tol) {
  for (auto it = coeffs.begin(); it != coeffs.end();)
    it = (std::abs(it->second) <= abs_tol) ? coeffs.erase(it) : std::next(it);
  if (std::abs(linear) <= abs_tol) linear = 0.0;
}

double FourierPoly::max_abs_coeff() const {
  double m = std::abs(linear);
  for (const auto& [n, cf] : coeffs) m = std::max(m, std::abs(cf));
  return m;
}

KFamilyParams::KFamilyParams(int k_, std::vector<Complex> A_,
                             std::vector<Complex> B_)
    : k(k_), A(std::move(A_)), B(std::move(B_)) {
  if (k < 1) throw invalid_params("KFamilyParams: k must be >= 1");
  if (A.size() != static_cast<std::size_t>(k + 1) ||
      B.size() != static_cast<std::size_t>(k + 1))
    throw invalid_params(
        "KFamilyParams: A and B need k+1 slots (index 0 unused)");
  if (std::abs(A[1].imag()) > family_params_tol)
    throw invalid_params("KFamilyParams: A1 must be real");
  A[1] = Complex(A[1].real(), 0.0);
  A[0] = 0.0;
  B[0] = 0.0;
}

bool KFamilyParams::periodic_mode() const {
  if (std::abs(A[1]) != 0.0) return false;
  if (k >= 2 && std::abs(A[2]) != 0.0) return false;
  return true;
}

namespace {

FourierPoly scaled(const FourierPoly& f, Complex s) {
  FourierPoly g;
  g.add(f, s);
  return g;
}

}  // namespace

KFourierSolution generic_k_solve(const KFamilyParams& P) {
  const int k = P.k;
  KFourierSolution sol;
  sol.k = k;
  sol.p.resize(k + 1);

  // Top level: free oscillation at frequency +-k, no third component.
  sol.p[k][0].coeffs[k] = P.A[k];
  sol.p[k][0].coeffs[-k] += P.B[k];
  sol.p[k][1].coeffs[k] = kI * std::conj(P.B[k]);
  sol.p[k][1].coeffs[-k] += -kI * std::conj(P.A[k]);

  for (int j = k - 1; j >= 1; --j) {
    const FourierPoly& anext = sol.p[j + 1][0];
    const FourierPoly& bnext = sol.p[j + 1][1];
    const FourierPoly& cnext = sol.p[j + 1][2];
    const double dj = static_cast<double>(j);

    // Second-order form (d^2/dt^2 + j^2) a_j = forcing from level j+1.
    FourierPoly forcing;
    forcing.add(cnext.shifted(1), dj * (dj + 1.0));
    forcing.add(cnext.conjugated().shifted(1).derivative(),
                kI * (dj + 1.0));
    double scale = std::max(1.0, forcing.max_abs_coeff());
    FourierPoly aj;
    for (const auto& [n, cf] : forcing.coeffs) {
      if (n == j || n == -j) {
        if (std::abs(cf) > 1e-12 * scale)
          throw numerical_error("generic_k_solve: resonant forcing at level " +
                                std::to_string(j));
      } else {
        aj.coeffs[n] += cf / (dj * dj - static_cast<double>(n) *
                                            static_cast<double>(n));
      }
    }
    aj.coeffs[j] += P.A[j];
    aj.coeffs[-j] += P.B[j];

    // First component of the first-order system recovers b_j.
    FourierPoly tmp = aj.derivative();
    tmp.add(cnext.conjugated().shifted(1), -kI * (dj + 1.0));
    FourierPoly bj = scaled(tmp, Complex(1.0 / dj, 0.0)).conjugated();

    // Third component by quadrature (no frequency-0 forcing below level 0).
    FourierPoly v;
    v.add(anext.conjugated().shifted(1), -kI * (dj + 1.0));
    v.add(bnext.conjugated().shifted(-1), Complex(-(dj + 1.0), 0.0));
    FourierPoly cj = v.integrated();

    sol.p[j] = {aj, bj, cj};
  }

  // Level 0 by direct quadrature of its three first-order equations.
  const FourierPoly& a1p = sol.p[1][0];
  const FourierPoly& b1p = sol.p[1][1];
  const FourierPoly& c1p = sol.p[1][2];
  FourierPoly a0 = scaled(c1p.conjugated().shifted(1), kI).integrated();
  FourierPoly b0 = c1p.conjugated().shifted(-1).integrated();
  FourierPoly v0;
  v0.add(a1p.conjugated().shifted(1), -kI);
  v0.add(b1p.conjugated().shifted(-1), Complex(-1.0, 0.0));
  FourierPoly c0 = v0.integrated();
  sol.p[0] = {a0, b0, c0};

  for (auto& comps : sol.p)
    for (auto& poly : comps) poly.prune(0.0);
  return sol;
}

PQState kfamily_state(double t, const KFourierSolution& sol) {
  PQState s(sol.k);
  for (int j = 0; j <= sol.k; ++j)
    s.p[j] = Complex3(sol.p[j][0].eval(t), sol.p[j][1].eval(t),
                      sol.p[j][2].eval(t));
  s.q1 = Complex3(eix(t), kI * eix(-t), 0.0);
  s.q2 = Complex3(0.0, 0.0, 1.0);
  return s;
}

PQState k4_state(double t, const KFamilyParams& P) {
  if (P.k != 4) throw invalid_params("k4_state: requires k == 4");
  const Complex A1 = P.A[1], A2 = P.A[2], A3 = P.A[3], A4 = P.A[4];
  const Complex B1 = P.B[1], B2 = P.B[2], B3 = P.B[3], B4 = P.B[4];
  const Complex cA2 = std::conj(A2), cA3 = std::conj(A3), cA4 = std::conj(A4);
  const Complex cB1 = std::conj(B1), cB2 = std::conj(B2), cB3 = std::conj(B3),
                cB4 = std::conj(B4);
  auto e = [t](int n) { return eix(n * t); };

  PQState s(4);
  s.p[0] = Complex3(
      -2.0 * kI * cA2 * t + A2 * e(2) - (1.0 / 6.0) * (cB2 - 4.0 * A4) * e(4) +
          (1.0 / 3.0) * (B2 + 2.0 * cA4) * e(-2) - 0.1 * cB4 * e(6) +
          0.15 * B4 * e(-4),
      2.0 * A2 * t - kI * cA2 * e(-2) + (kI / 3.0) * (cB2 - 4.0 * A4) * e(2) -
          (kI / 6.0) * (B2 + 2.0 * cA4) * e(-4) - 0.1 * kI * B4 * e(-6) +
          0.15 * kI * cB4 * e(4),
      -2.0 * kI * A1 * t - 0.5 * (B1 - 4.5 * cA3) * e(-2) -
          0.5 * (cB1 + 1.5 * A3) * e(2) - 0.25 * B3 * e(-4) -
          0.25 * cB3 * e(4));
  s.p[1] = Complex3(
      A1 * e(1) + B1 * e(-1) + 1.5 * A3 * e(3) + 0.75 * B3 * e(-3) -
          0.25 * cB3 * e(5),
      kI * (cB1 - 3.0 * A3) * e(1) - kI * A1 * e(-1) - 0.25 * kI * B3 * e(-5) +
          0.75 * kI * cB3 * e(3) - 1.5 * kI * cA3 * e(-3),
      -2.0 * A2 * e(1) + 2.0 * cA2 * e(-1) -
          (2.0 / 3.0) * (B2 - 4.0 * cA4) * e(-3) -
          (2.0 / 3.0) * (cB2 + 2.0 * A4) * e(3) - 0.6 * B4 * e(-5) -
          0.6 * cB4 * e(5));
  s.p[2] = Complex3(
      A2 * e(2) + B2 * e(-2) + 2.0 * A4 * e(4) + 1.2 * B4 * e(-4) -
          0.3 * cB4 * e(6),
      kI * (cB2 - 2.0 * A4) * e(2) - kI * cA2 * e(-2) - 0.3 * kI * B4 * e(-6) +
          1.2 * kI * cB4 * e(4) - 2.0 * kI * cA4 * e(-4),
      -1.5 * A3 * e(2) + 1.5 * cA3 * e(-2) - 0.75 * B3 * e(-4) -
          0.75 * cB3 * e(4));
  s.p[3] = Complex3(
      A3 * e(3) + B3 * e(-3),
      kI * cB3 * e(3) - kI * cA3 * e(-3),
      -(4.0 / 3.0) * A4 * e(3) + (4.0 / 3.0) * cA4 * e(-3) - 0.8 * B4 * e(-5) -
          0.8 * cB4 * e(5));
  s.p[4] = Complex3(A4 * e(4) + B4 * e(-4),
                    kI * cB4 * e(4) - kI * cA4 * e(-4), 0.0);
  s.q1 = Complex3(eix(t), kI * eix(-t), 0.0);
  s.q2 = Complex3(0.0, 0.0, 1.0);
  return s;
}

/* ------------------------------------------------------------------ */
/* Assembly                                                             */
/* ------------------------------------------------------------------ */

Complex3 assemble_phi(const ZState& s, double y1, double y2) {
  return 0.5 * (y1 * y1 + y2 * y2) * s.z1 + 0.5 * (y1 * y1 - y2 * y2) * s.z2 +
         (y1 * y2) * s.z3 + y1 * s.z4 + y2 * s.z5 + s.z6;
}

ZState zstate_from_wpqr(const WPQRState& s) {
  ZState z;
  z.z1 = Complex3(s.w[0], 0.0, 0.0);
  z.z2 = Complex3(0.0, s.w[1], 0.0);
  z.z3 = Complex3(0.0, 0.0, s.w[2]);
  z.z4 = Complex3(s.p[0], s.p[1], s.q[2]);
  z.z5 = Complex3(s.q[0], -s.q[1], s.p[2]);
  z.z6 = s.r;
  return z;
}

Complex3 assemble_phi(const WPQRState& s, double y1, double y2) {
  return assemble_phi(zstate_from_wpqr(s), y1, y2);
}

Complex3 assemble_phi(const PQState& s, double x, double y) {
  Complex3 acc = s.p[s.k];
  for (int j = s.k - 1; j >= 0; --j) acc = x * acc + s.p[j];
  return acc + y * s.q1 + (x * y) * s.q2;
}

}  // namespace slcalib
