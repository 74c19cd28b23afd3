// Independent reference implementations used to derive expected test
// values.  Everything here is intentionally written against different
// algorithms (or different library entry points) than the library code
// it checks.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "slcalib/cgeom.hpp"
#include "slcalib/flow.hpp"

namespace oracles {

using slcalib::Complex;
using slcalib::Complex3;

/* ------------------------------------------------------------------ */
/* Algebra                                                              */
/* ------------------------------------------------------------------ */

/** Cross product oracle: Eigen's complex cross product conjugates both
 *  factors, so half of it reproduces the library convention. */
inline Complex3 cross(const Complex3& r, const Complex3& s) {
  return 0.5 * r.cross(s);
}

/** Determinant oracle through Eigen's LU-based determinant. */
inline Complex det3(const Complex3& u, const Complex3& v, const Complex3& w) {
  Eigen::Matrix3cd m;
  m.col(0) = u;
  m.col(1) = v;
  m.col(2) = w;
  return m.determinant();
}

/** Symplectic pairing from the realified block structure
 *  omega(u, v) = sum_j (Re u_j Im v_j - Im u_j Re v_j). */
inline double omega(const Complex3& u, const Complex3& v) {
  double s = 0;
  for (int j = 0; j < 3; ++j)
    s += u[j].real() * v[j].imag() - u[j].imag() * v[j].real();
  return s;
}

/* ------------------------------------------------------------------ */
/* Derivatives and quadrature                                           */
/* ------------------------------------------------------------------ */

/** Richardson-extrapolated central difference (three levels, O(h^6)
 *  truncation); h0 ~ 4e-3 keeps rounding noise near 1e-13. */
inline double fd_derivative(const std::function<double(double)>& f, double t,
                            double h0 = 4e-3) {
  auto central = [&](double h) { return (f(t + h) - f(t - h)) / (2 * h); };
  double d1 = central(h0), d2 = central(h0 / 2), d3 = central(h0 / 4);
  double r1 = (4 * d2 - d1) / 3, r2 = (4 * d3 - d2) / 3;
  return (16 * r2 - r1) / 15;
}

inline Complex3 fd_derivative(const std::function<Complex3(double)>& f,
                              double t, double h0 = 4e-3) {
  Complex3 out;
  for (int j = 0; j < 3; ++j) {
    double re = fd_derivative(
        [&](double s) { return f(s)[j].real(); }, t, h0);
    double im = fd_derivative(
        [&](double s) { return f(s)[j].imag(); }, t, h0);
    out[j] = Complex(re, im);
  }
  return out;
}

/** Integral oracle: composite Simpson at two resolutions, Richardson
 *  extrapolated (O(h^6)); independent of the adaptive scheme. */
inline double integral(const std::function<double(double)>& g, double a,
                       double b, int n = 4096) {
  auto simpson = [&](int m) {
    double h = (b - a) / m, s = g(a) + g(b);
    for (int i = 1; i < m; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  double s1 = simpson(n), s2 = simpson(2 * n);
  return (16 * s2 - s1) / 15;
}

/* ------------------------------------------------------------------ */
/* ODE reference integrator                                             */
/* ------------------------------------------------------------------ */

/** Plain fixed-step RK4 on a real vector, written independently of the
 *  library integrator. */
inline Eigen::VectorXd rk4(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
    Eigen::VectorXd y, double t0, double t1, double h_nominal) {
  long n = std::max<long>(1, (long)std::ceil(std::abs(t1 - t0) / h_nominal - 1e-12));
  double h = (t1 - t0) / (double)n;
  double t = t0;
  for (long i = 0; i < n; ++i) {
    Eigen::VectorXd k1 = f(t, y);
    Eigen::VectorXd k2 = f(t + h / 2, y + (h / 2) * k1);
    Eigen::VectorXd k3 = f(t + h / 2, y + (h / 2) * k2);
    Eigen::VectorXd k4 = f(t + h, y + h * k3);
    y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    t = t0 + (double)(i + 1) * h;
  }
  return y;
}

/** Jacobi elliptic oracle: integrates sn' = cn dn, cn' = -sn dn,
 *  dn' = -k^2 sn cn from (0, 1, 1). */
inline Eigen::Vector3d jacobi_by_ode(double t, double k, double h = 1e-4) {
  Eigen::VectorXd y0(3);
  y0 << 0.0, 1.0, 1.0;
  auto f = [k](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(3);
    d << y[1] * y[2], -y[0] * y[2], -k * k * y[0] * y[1];
    return d;
  };
  Eigen::VectorXd y = rk4(f, y0, 0.0, t, h);
  return Eigen::Vector3d(y[0], y[1], y[2]);
}

/* ------------------------------------------------------------------ */
/* Random admissible data                                               */
/* ------------------------------------------------------------------ */

inline Complex3 random_c3(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Complex3 v;
  for (int j = 0; j < 3; ++j) v[j] = Complex(u(rng), u(rng));
  return v;
}

/** Adjusts b along i*a so that omega(a, b) = 0 (omega(a, i*a) = |a|^2). */
inline void project_omega(const Complex3& a, Complex3& b) {
  double n2 = a.squaredNorm();
  if (n2 > 0) b -= slcalib::omega(a, b) / n2 * (Complex(0, 1) * a);
}

/** Random six-vector state satisfying all six pairing constraints but
 *  generically nothing else (in particular not drawn from a Lagrangian
 *  frame, so the constraints are informative). */
inline slcalib::ZState random_admissible_z(std::mt19937_64& rng) {
  using slcalib::omega;
  slcalib::ZState s;
  s.z1 = random_c3(rng);
  s.z2 = random_c3(rng);
  project_omega(s.z1, s.z2);  // omega(z1,z2) = 0
  // omega(z1,z3) = omega(z2,z3) = 0: correct z3 along i z1, i z2.
  s.z3 = random_c3(rng);
  {
    const Complex3 d1 = Complex(0, 1) * s.z1, d2 = Complex(0, 1) * s.z2;
    Eigen::Matrix2d m;
    m << omega(s.z1, d1), omega(s.z1, d2), omega(s.z2, d1), omega(s.z2, d2);
    Eigen::Vector2d rvec(omega(s.z1, s.z3), omega(s.z2, s.z3));
    Eigen::Vector2d c = m.fullPivLu().solve(rvec);
    s.z3 -= c[0] * d1 + c[1] * d2;
  }
  // Mixed constraints: r4 = omega(z1,z5)+omega(z2,z5)-omega(z3,z4) and
  // r5 = -omega(z1,z4)+omega(z2,z4)+omega(z3,z5).  Both are affine in
  // z4, so a 2x2 solve along i z3 and i(z2-z1) zeroes them; the final
  // omega(z4,z5) correction below moves z5 only along a direction
  // neutral for r4 and r5.
  s.z4 = random_c3(rng);
  s.z5 = random_c3(rng);
  {
    // Solve for coefficients (s4 on d43, s5 on d421) moving z4 so that
    // r4 and r5 vanish.
    const Complex3 d43 = Complex(0, 1) * s.z3;
    const Complex3 d421 = Complex(0, 1) * (s.z2 - s.z1);
    auto r4 = [&](const Complex3& z4) {
      return omega(s.z1, s.z5) + omega(s.z2, s.z5) - omega(s.z3, z4);
    };
    auto r5 = [&](const Complex3& z4) {
      return -omega(s.z1, z4) + omega(s.z2, z4) + omega(s.z3, s.z5);
    };
    Eigen::Matrix2d m;
    m << r4(s.z4 + d43) - r4(s.z4), r4(s.z4 + d421) - r4(s.z4),
        r5(s.z4 + d43) - r5(s.z4), r5(s.z4 + d421) - r5(s.z4);
    Eigen::Vector2d rhs(-r4(s.z4), -r5(s.z4));
    Eigen::Vector2d c = m.fullPivLu().solve(rhs);
    s.z4 += c[0] * d43 + c[1] * d421;
  }
  {
    // omega(z4,z5) = 0 via a direction neutral for r4 and r5.  r4 sees
    // z5 through omega(z1,z5)+omega(z2,z5) and r5 through omega(z3,z5),
    // so v = i z4 + c0 i(z1+z2) + c1 i z3 is chosen with
    // omega(z1,v)+omega(z2,v) = 0 and omega(z3,v) = 0.
    const Complex3 e1 = Complex(0, 1) * s.z4;
    const Complex3 e2 = Complex(0, 1) * (s.z1 + s.z2);
    const Complex3 e3 = Complex(0, 1) * s.z3;
    Eigen::Matrix2d m;
    m << omega(s.z1, e2) + omega(s.z2, e2), omega(s.z1, e3) + omega(s.z2, e3),
        omega(s.z3, e2), omega(s.z3, e3);
    Eigen::Vector2d rhs(-omega(s.z1, e1) - omega(s.z2, e1),
                        -omega(s.z3, e1));
    Eigen::Vector2d c = m.fullPivLu().solve(rhs);
    const Complex3 v = e1 + c[0] * e2 + c[1] * e3;
    double dv = omega(s.z4, v);
    if (std::abs(dv) > 1e-12) s.z5 -= omega(s.z4, s.z5) / dv * v;
  }
  s.z6 = random_c3(rng);
  return s;
}

/** Random degree-k state satisfying the k+2 pairing constraints. */
inline slcalib::PQState random_admissible_pq(std::mt19937_64& rng, int k) {
  using slcalib::omega;
  slcalib::PQState s(k);
  s.q1 = random_c3(rng);
  s.q2 = random_c3(rng);
  project_omega(s.q1, s.q2);  // omega(q1,q2) = 0
  for (int j = 0; j <= k; ++j) s.p[j] = random_c3(rng);
  project_omega(s.q2, s.p[k]);  // omega(p_k, q2) = 0
  // j-th constraint: j omega(p_j, q1) + (j-1) omega(p_{j-1}, q2) = 0,
  // descending j so later corrections never disturb earlier ones:
  // adjust p_j along i q1 (j >= 2 also has the p_{j-1} term, absorbed by
  // adjusting p_{j-1} along a q2-neutral direction? simpler: adjust p_j
  // along i q1 to absorb the full residual).
  for (int j = k; j >= 1; --j) {
    double res = j * omega(s.p[j], s.q1) + (j - 1) * omega(s.p[j - 1], s.q2);
    double n2 = s.q1.squaredNorm();
    // omega(p_j + c i q1, q1) = omega(p_j, q1) - c |q1|^2
    s.p[j] += res / (double(j) * n2) * (Complex(0, 1) * s.q1);
  }
  return s;
}

/** Random diagonal-background state with vanishing pairing invariants. */
inline slcalib::WPQRState random_admissible_wpqr(std::mt19937_64& rng) {
  slcalib::WPQRState s;
  s.w = random_c3(rng);
  s.p = random_c3(rng);
  s.q = random_c3(rng);
  s.r = random_c3(rng);
  // Invariants use the signed pairing Im(a1 conj(b1) - a2 conj(b2)
  // - a3 conj(b3)).  Adjust p along i*Sw (S = diag(1,-1,-1) conjugated
  // into the pairing) etc.
  auto pairing = [](const Complex3& a, const Complex3& b) {
    return std::imag(a[0] * std::conj(b[0]) - a[1] * std::conj(b[1]) -
                     a[2] * std::conj(b[2]));
  };
  auto sflip = [](const Complex3& a) {
    return Complex3(a[0], -a[1], -a[2]);
  };
  // pairing(w, p): correct p along i*sflip(w): pairing(w, i sflip(w)) =
  // Im(w1 conj(i w1) - w2 conj(-i(-w2)) ...) = -|w|^2.
  {
    const Complex3 dir = Complex(0, 1) * sflip(s.w);
    double m = pairing(s.w, dir);
    s.p -= pairing(s.w, s.p) / m * dir;
    s.q -= pairing(s.w, s.q) / m * dir;
  }
  {
    const Complex3 dir = Complex(0, 1) * sflip(s.p);
    double m = pairing(s.p, dir);
    if (std::abs(m) > 1e-12) {
      // moving q along dir changes pairing(w, q) unless dir is adjusted;
      // use a direction neutral for pairing(w, .): mix with i*sflip(w).
      const Complex3 dw = Complex(0, 1) * sflip(s.w);
      double mw = pairing(s.w, dw);
      Complex3 neutral = dir - pairing(s.w, dir) / mw * dw;
      double mn = pairing(s.p, neutral);
      if (std::abs(mn) > 1e-12)
        s.q -= pairing(s.p, s.q) / mn * neutral;
    }
  }
  return s;
}

}  // namespace oracles
