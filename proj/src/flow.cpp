#include "slcalib/flow.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/LU>

#include "slcalib/errors.hpp"

namespace slcalib {

namespace {

std::string fmt_time(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

bool finite_state(const Eigen::VectorXcd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i].real()) || !std::isfinite(y[i].imag()))
      return false;
  }
  return true;
}

}  // namespace

ZState rhs_z(const ZState& s) {
  ZState d;
  d.z1 = 2.0 * cross(s.z2, s.z3);
  d.z2 = 2.0 * cross(s.z1, s.z3);
  d.z3 = -2.0 * cross(s.z1, s.z2);
  d.z4 = cross(s.z1, s.z5) + cross(s.z2, s.z5) - cross(s.z3, s.z4);
  d.z5 = -cross(s.z1, s.z4) + cross(s.z2, s.z4) + cross(s.z3, s.z5);
  d.z6 = cross(s.z4, s.z5);
  return d;
}

PQState rhs_pq(const PQState& s) {
  PQState d(s.k);
  int k = s.k;
  d.p[0] = 2.0 * cross(s.p[1], s.q1);
  for (int j = 1; j < k; ++j)
    d.p[j] = 2.0 * (j + 1) * cross(s.p[j + 1], s.q1) +
             2.0 * j * cross(s.p[j], s.q2);
  d.p[k] = 2.0 * k * cross(s.p[k], s.q2);
  d.q1 = -2.0 * cross(s.q1, s.q2);
  d.q2 = Complex3::Zero();
  return d;
}

Complex3 rhs_w(const Complex3& w) {
  return Complex3(std::conj(w[1] * w[2]), -std::conj(w[2] * w[0]),
                  -std::conj(w[0] * w[1]));
}

Complex3 rhs_pq_linear(const Complex3& w, const Complex3& p) {
  return Complex3(0.5 * std::conj(w[1] * p[2] + w[2] * p[1]),
                  -0.5 * std::conj(w[2] * p[0] + w[0] * p[2]),
                  -0.5 * std::conj(w[0] * p[1] + w[1] * p[0]));
}

Complex3 rhs_r(const Complex3& p, const Complex3& q) {
  return Complex3(0.5 * std::conj(p[1] * p[2] + q[2] * q[1]),
                  0.5 * std::conj(q[2] * q[0] - p[0] * p[2]),
                  -0.5 * std::conj(p[0] * q[1] + p[1] * q[0]));
}

WPQRState rhs_wpqr(const WPQRState& s) {
  WPQRState d;
  d.w = rhs_w(s.w);
  d.p = rhs_pq_linear(s.w, s.p);
  d.q = rhs_pq_linear(s.w, s.q);
  d.r = rhs_r(s.p, s.q);
  return d;
}

std::array<double, 6> constraint_residuals_z(const ZState& s) {
  return {omega(s.z2, s.z3),
          omega(s.z1, s.z3),
          omega(s.z1, s.z2),
          omega(s.z1, s.z5) + omega(s.z2, s.z5) - omega(s.z3, s.z4),
          -omega(s.z1, s.z4) + omega(s.z2, s.z4) + omega(s.z3, s.z5),
          omega(s.z4, s.z5)};
}

std::vector<double> constraint_residuals_pq(const PQState& s) {
  std::vector<double> r;
  r.reserve(s.k + 2);
  r.push_back(omega(s.q1, s.q2));
  r.push_back(omega(s.p[s.k], s.q2));
  for (int j = 1; j <= s.k; ++j)
    r.push_back(j * omega(s.p[j], s.q1) + (j - 1) * omega(s.p[j - 1], s.q2));
  return r;
}

namespace {

double signed_pairing(const Complex3& a, const Complex3& b) {
  return std::imag(a[0] * std::conj(b[0]) - a[1] * std::conj(b[1]) -
                   a[2] * std::conj(b[2]));
}

}  // namespace

std::array<double, 3> pairing_invariants(const WPQRState& s) {
  return {signed_pairing(s.w, s.p), signed_pairing(s.w, s.q),
          signed_pairing(s.p, s.q)};
}

std::pair<Complex3, Complex3> translation_z45(const Complex3& z1,
                                              const Complex3& z2,
                                              const Complex3& z3, double e,
                                              double f) {
  return {e * z1 + e * z2 + f * z3, f * z1 - f * z2 + e * z3};
}

Eigen::Matrix3d dual_solutions(const Eigen::Matrix3d& U) {
  Eigen::Matrix3d S = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  Eigen::FullPivLU<Eigen::Matrix3d> lu(U * S);
  if (!lu.isInvertible())
    throw numerical_error("dual_solutions: singular fundamental matrix");
  return lu.inverse();
}

namespace {

void rk4_step(const OdeRhs& rhs, Eigen::VectorXcd& y, double t, double h) {
  Eigen::VectorXcd k1 = rhs(t, y);
  Eigen::VectorXcd k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
  Eigen::VectorXcd k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
  Eigen::VectorXcd k4 = rhs(t + h, y + h * k3);
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void integrate_rk4(const OdeRhs& rhs, Eigen::VectorXcd& y, double t0,
                   double t1, const IntegratorCfg& cfg,
                   const OdeObserver& observer) {
  double span = std::abs(t1 - t0);
  long n = std::max(1L, static_cast<long>(std::ceil(span / cfg.step - 1e-12)));
  if (n > cfg.max_steps)
    throw numerical_error("integrate: step budget exceeded at t = " +
                          fmt_time(t0));
  double h = (t1 - t0) / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    double t = t0 + h * static_cast<double>(i);
    rk4_step(rhs, y, t, h);
    if (!finite_state(y))
      throw numerical_error("integrate: state became non-finite at t = " +
                            fmt_time(t + h));
    if (observer) observer(t0 + h * static_cast<double>(i + 1), y);
  }
}

// Dormand-Prince 5(4) embedded pair.
void integrate_rk45(const OdeRhs& rhs, Eigen::VectorXcd& y, double t0,
                    double t1, const IntegratorCfg& cfg,
                    const OdeObserver& observer) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                      e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                      e6 = 187.0 / 2100, e7 = 1.0 / 40;

  double dir = (t1 >= t0) ? 1.0 : -1.0;
  double span = std::abs(t1 - t0);
  if (span == 0.0) return;
  double h = dir * std::min(span, std::max(1e-6, span / 100.0));
  double t = t0;
  for (long steps = 0; steps < cfg.max_steps; ++steps) {
    double remaining = t1 - t;
    if (dir * remaining <= 0.0) return;
    if (std::abs(h) > std::abs(remaining)) h = remaining;
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
      throw numerical_error("integrate: step size underflow at t = " +
                            fmt_time(t));
    Eigen::VectorXcd k1 = rhs(t, y);
    Eigen::VectorXcd k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    Eigen::VectorXcd k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Eigen::VectorXcd k4 =
        rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Eigen::VectorXcd k5 = rhs(
        t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Eigen::VectorXcd k6 =
        rhs(t + h,
            y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::VectorXcd y5 =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::VectorXcd k7 = rhs(t + h, y5);
    Eigen::VectorXcd y4 =
        y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    if (!finite_state(y5))
      throw numerical_error("integrate: state became non-finite at t = " +
                            fmt_time(t + h));
    double err = (y5 - y4).cwiseAbs().maxCoeff();
    double factor =
        (err == 0.0) ? 5.0
                     : std::clamp(0.9 * std::pow(cfg.tol / err, 0.2), 0.2, 5.0);
    if (err <= cfg.tol) {
      t += h;
      y = y5;
      if (observer) observer(t, y);
      if (t == t1) return;
    }
    h *= factor;
  }
  throw numerical_error("integrate: step budget exceeded at t = " +
                        fmt_time(t));
}

}  // namespace

void integrate(const OdeRhs& rhs, Eigen::VectorXcd& y, double t0, double t1,
               const IntegratorCfg& cfg, const OdeObserver& observer) {
  if (!finite_state(y))
    throw numerical_error("integrate: non-finite initial state at t = " +
                          fmt_time(t0));
  if (observer) observer(t0, y);
  if (t0 == t1) return;
  if (cfg.method == IntegratorCfg::Method::rk4) {
    if (!(cfg.step > 0)) throw invalid_params("integrate: step must be > 0");
    integrate_rk4(rhs, y, t0, t1, cfg, observer);
  } else {
    if (!(cfg.tol > 0)) throw invalid_params("integrate: tol must be > 0");
    integrate_rk45(rhs, y, t0, t1, cfg, observer);
  }
}

Eigen::VectorXcd pack(const ZState& s) {
  Eigen::VectorXcd v(18);
  v.segment<3>(0) = s.z1;
  v.segment<3>(3) = s.z2;
  v.segment<3>(6) = s.z3;
  v.segment<3>(9) = s.z4;
  v.segment<3>(12) = s.z5;
  v.segment<3>(15) = s.z6;
  return v;
}

ZState unpack_z(const Eigen::VectorXcd& v) {
  if (v.size() != 18) throw invalid_params("unpack_z: need 18 entries");
  ZState s;
  s.z1 = v.segment<3>(0);
  s.z2 = v.segment<3>(3);
  s.z3 = v.segment<3>(6);
  s.z4 = v.segment<3>(9);
  s.z5 = v.segment<3>(12);
  s.z6 = v.segment<3>(15);
  return s;
}

Eigen::VectorXcd pack(const PQState& s) {
  Eigen::VectorXcd v(3 * (s.k + 1) + 6);
  for (int j = 0; j <= s.k; ++j) v.segment<3>(3 * j) = s.p[j];
  v.segment<3>(3 * (s.k + 1)) = s.q1;
  v.segment<3>(3 * (s.k + 1) + 3) = s.q2;
  return v;
}

PQState unpack_pq(const Eigen::VectorXcd& v, int k) {
  if (k < 1) throw invalid_params("unpack_pq: k must be >= 1");
  if (v.size() != 3 * (k + 1) + 6)
    throw invalid_params("unpack_pq: size does not match k");
  PQState s(k);
  for (int j = 0; j <= k; ++j) s.p[j] = v.segment<3>(3 * j);
  s.q1 = v.segment<3>(3 * (k + 1));
  s.q2 = v.segment<3>(3 * (k + 1) + 3);
  return s;
}

Eigen::VectorXcd pack(const WPQRState& s) {
  Eigen::VectorXcd v(12);
  v.segment<3>(0) = s.w;
  v.segment<3>(3) = s.p;
  v.segment<3>(6) = s.q;
  v.segment<3>(9) = s.r;
  return v;
}

WPQRState unpack_wpqr(const Eigen::VectorXcd& v) {
  if (v.size() != 12) throw invalid_params("unpack_wpqr: need 12 entries");
  WPQRState s;
  s.w = v.segment<3>(0);
  s.p = v.segment<3>(3);
  s.q = v.segment<3>(6);
  s.r = v.segment<3>(9);
  return s;
}

void require_admissible(const ZState& s) {
  for (double r : constraint_residuals_z(s))
    if (std::abs(r) > admissibility_tol)
      throw invalid_params(
          "initial data violates a conserved pairing beyond tolerance");
}

void require_admissible(const PQState& s) {
  for (double r : constraint_residuals_pq(s))
    if (std::abs(r) > admissibility_tol)
      throw invalid_params(
          "initial data violates a conserved pairing beyond tolerance");
}

std::vector<ZSample> integrate_z(const ZState& init, double t0, double t1,
                                 const IntegratorCfg& cfg) {
  require_admissible(init);
  Eigen::VectorXcd y = pack(init);
  std::vector<ZSample> out;
  integrate(
      [](double, const Eigen::VectorXcd& v) { return pack(rhs_z(unpack_z(v))); },
      y, t0, t1, cfg,
      [&](double t, const Eigen::VectorXcd& v) {
        out.push_back({t, unpack_z(v)});
      });
  return out;
}

std::vector<PQSample> integrate_pq(const PQState& init, double t0, double t1,
                                   const IntegratorCfg& cfg) {
  require_admissible(init);
  int k = init.k;
  Eigen::VectorXcd y = pack(init);
  std::vector<PQSample> out;
  integrate(
      [k](double, const Eigen::VectorXcd& v) {
        return pack(rhs_pq(unpack_pq(v, k)));
      },
      y, t0, t1, cfg,
      [&](double t, const Eigen::VectorXcd& v) {
        out.push_back({t, unpack_pq(v, k)});
      });
  return out;
}

std::vector<WPQRSample> integrate_wpqr(const WPQRState& init, double t0,
                                       double t1, const IntegratorCfg& cfg) {
  Eigen::VectorXcd y = pack(init);
  std::vector<WPQRSample> out;
  integrate(
      [](double, const Eigen::VectorXcd& v) {
        return pack(rhs_wpqr(unpack_wpqr(v)));
      },
      y, t0, t1, cfg,
      [&](double t, const Eigen::VectorXcd& v) {
        out.push_back({t, unpack_wpqr(v)});
      });
  return out;
}

}  // namespace slcalib
