#include "slcalib/specfun.hpp"

#include <algorithm>
#include <cmath>

#include "slcalib/errors.hpp"

namespace slcalib {

namespace {

constexpr int kAgmMax = 32;

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

JacobiTriple jacobi(double t, double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw invalid_params("jacobi: k must be in [0,1]");
  if (k == 1.0) {
    double s = 1.0 / std::cosh(t);
    return {std::tanh(t), s, s};
  }
  // Descending Landen transformation: AGM scale ladder, then the phase is
  // folded back down level by level.
  double a[kAgmMax + 1], c[kAgmMax + 1];
  double an = 1.0, bn = std::sqrt(1.0 - k * k), cn_ = k;
  int N = 0;
  a[0] = an;
  c[0] = cn_;
  while (N < kAgmMax && std::abs(c[N]) > 1e-17 * a[N]) {
    double a1 = 0.5 * (an + bn);
    double c1 = 0.5 * (an - bn);
    bn = std::sqrt(an * bn);
    an = a1;
    ++N;
    a[N] = an;
    c[N] = c1;
  }
  double phi = std::ldexp(1.0, N) * a[N] * t;  // phi_N = 2^N a_N t
  double phi_prev = phi;                        // phi_1 once the loop ends
  for (int n = N; n >= 1; --n) {
    phi_prev = phi;
    phi = 0.5 * (phi + std::asin(clamp1(c[n] / a[n] * std::sin(phi))));
  }
  double sn = std::sin(phi), cn = std::cos(phi);
  double dn = (N >= 1) ? cn / std::cos(phi_prev - phi) : 1.0;
  return {sn, cn, dn};
}

double jacobi_K(double k) {
  if (!(k >= 0.0 && k < 1.0))
    throw invalid_params("jacobi_K: k must be in [0,1)");
  double an = 1.0, bn = std::sqrt(1.0 - k * k);
  for (int n = 0; n < kAgmMax && std::abs(an - bn) > 1e-17 * an; ++n) {
    double a1 = 0.5 * (an + bn);
    bn = std::sqrt(an * bn);
    an = a1;
  }
  return 1.5707963267948966 / an;
}

namespace {

double simpson_rec(const std::function<double(double)>& g, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = g(lm), frm = g(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(g, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) +
         simpson_rec(g, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& g, double a,
                        double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = g(a), fb = g(b), fm = g(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(g, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double f_cosh(double t) {
  if (t == 0.0) return 0.0;
  double a = std::abs(t);
  double v = adaptive_simpson([](double s) { return std::sqrt(std::cosh(s)); },
                              0.0, a, 1e-13, 40);
  return t > 0 ? v : -v;
}

CubicRoots cubic_roots_sorted(double a1, double a2, double a3, double A) {
  if (!(a1 > 0 && a2 > 0 && a3 > 0))
    throw invalid_params("cubic_roots_sorted: alphas must be positive");
  double h = 1.0 / a1 - 1.0 / a2 - 1.0 / a3;
  if (std::abs(h) > 1e-12 * (1.0 / a1 + 1.0 / a2 + 1.0 / a3))
    throw invalid_params("cubic_roots_sorted: harmonic relation violated");
  double A2 = A * A, P = a1 * a2 * a3;
  if (A == 0.0) throw invalid_params("cubic_roots_sorted: A must be nonzero");
  if (std::abs(A2 - P) <= 1e-12 * P)
    throw invalid_params(
        "cubic_roots_sorted: boundary A^2 = a1 a2 a3 (double root at 0)");
  if (A2 > P)
    throw invalid_params("cubic_roots_sorted: A^2 must be below a1 a2 a3");

  // Monic cubic (a1+u)(a2-u)(a3-u) - A^2 = u^3 + c2 u^2 + c1 u + c0.
  double c2 = a1 - a2 - a3;
  double c1 = a2 * a3 - a1 * (a2 + a3);
  double c0 = P - A2;

  // Trigonometric solution of the depressed cubic v^3 + p v + q.
  double p = c1 - c2 * c2 / 3.0;
  double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  if (!(p < 0))
    throw numerical_error("cubic_roots_sorted: unexpected cubic shape");
  double m = 2.0 * std::sqrt(-p / 3.0);
  double arg = clamp1(3.0 * q / (p * m));
  double theta = std::acos(arg) / 3.0;
  double roots[3];
  for (int i = 0; i < 3; ++i) {
    double v = m * std::cos(theta - 2.0943951023931953 * i);
    double u = v - c2 / 3.0;
    for (int it = 0; it < 3; ++it) {  // Newton polish
      double fval = ((u + c2) * u + c1) * u + c0;
      double fder = (3.0 * u + 2.0 * c2) * u + c1;
      if (fder != 0.0) u -= fval / fder;
    }
    roots[i] = u;
  }
  std::sort(roots, roots + 3);
  double scale = std::max({std::abs(roots[0]), std::abs(roots[2]), 1.0});
  if (roots[0] > 1e-9 * scale || roots[1] < -1e-9 * scale)
    throw numerical_error("cubic_roots_sorted: root pattern g1<=0<=g2 failed");
  return {roots[0], roots[1], roots[2]};
}

ThetaTriple theta_integrals(double a1, double a2, double a3, double A,
                            const CubicRoots& roots, double t,
                            double theta1_0) {
  double g1 = roots.g1, g2 = roots.g2, g3 = roots.g3;
  if (!(g3 > g1))
    throw invalid_params("theta_integrals: degenerate root triple");
  double sigma = std::sqrt(g3 - g1);
  double tau = std::sqrt((g2 - g1) / (g3 - g1));
  auto u_of = [&](double s) {
    double sn = jacobi(sigma * s, tau).sn;
    return g1 + (g2 - g1) * sn * sn;
  };
  auto inv = [&](double den) {
    if (std::abs(den) < 1e-13 * std::max(1.0, std::abs(g3)))
      throw numerical_error("theta_integrals: singular parameter");
    return 1.0 / den;
  };
  double i1 = adaptive_simpson([&](double s) { return inv(a1 + u_of(s)); },
                               0.0, t, 1e-11, 40);
  double i2 = adaptive_simpson([&](double s) { return inv(a2 - u_of(s)); },
                               0.0, t, 1e-11, 40);
  double i3 = adaptive_simpson([&](double s) { return inv(a3 - u_of(s)); },
                               0.0, t, 1e-11, 40);
  return {theta1_0 - A * i1, A * i2, A * i3};
}

}  // namespace slcalib
