#include "slcalib/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "slcalib/errors.hpp"
#include "slcalib/parallel.hpp"

namespace slcalib {

namespace {

/** Least-squares slope of log(d) against log(x); requires two or more
 *  strictly positive samples. */
double loglog_slope(const std::vector<double>& xs,
                    const std::vector<double>& ds) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ds[i] > 0.0)) continue;
    double lx = std::log(xs[i]), ly = std::log(ds[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2)
    throw numerical_error("loglog fit: fewer than two positive deviations");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> geometric_ladder(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

}  // namespace

std::vector<double> linspace(const GridAxis& axis) {
  if (axis.n < 1) throw invalid_params("linspace: n must be >= 1");
  std::vector<double> v(axis.n);
  if (axis.n == 1) {
    v[0] = axis.min;
    return v;
  }
  double step = (axis.max - axis.min) / (axis.n - 1);
  for (int i = 0; i < axis.n; ++i) v[i] = axis.min + step * i;
  return v;
}

FrameFn frame_from_point_fn(PointFn f, double h) {
  if (!(h > 0)) throw invalid_params("frame_from_point_fn: h must be > 0");
  return [f = std::move(f), h](double u1, double u2, double t) {
    PhiFrame fr;
    fr.phi = f(u1, u2, t);
    fr.d1 = (f(u1 + h, u2, t) - f(u1 - h, u2, t)) / (2.0 * h);
    fr.d2 = (f(u1, u2 + h, t) - f(u1, u2 - h, t)) / (2.0 * h);
    fr.dt = (f(u1, u2, t + h) - f(u1, u2, t - h)) / (2.0 * h);
    return fr;
  };
}

FrameFn frame_from_z_family(std::function<ZState(double)> family) {
  return [family = std::move(family)](double y1, double y2, double t) {
    ZState s = family(t);
    PhiFrame fr;
    fr.phi = assemble_phi(s, y1, y2);
    fr.d1 = y1 * s.z1 + y1 * s.z2 + y2 * s.z3 + s.z4;
    fr.d2 = y2 * s.z1 - y2 * s.z2 + y1 * s.z3 + s.z5;
    fr.dt = assemble_phi(rhs_z(s), y1, y2);
    return fr;
  };
}

FrameFn frame_from_wpqr_family(std::function<WPQRState(double)> family) {
  return [family = std::move(family)](double y1, double y2, double t) {
    WPQRState s = family(t);
    ZState z = zstate_from_wpqr(s);
    PhiFrame fr;
    fr.phi = assemble_phi(z, y1, y2);
    fr.d1 = y1 * z.z1 + y1 * z.z2 + y2 * z.z3 + z.z4;
    fr.d2 = y2 * z.z1 - y2 * z.z2 + y1 * z.z3 + z.z5;
    fr.dt = assemble_phi(zstate_from_wpqr(rhs_wpqr(s)), y1, y2);
    return fr;
  };
}

FrameFn frame_from_pq_family(std::function<PQState(double)> family) {
  return [family = std::move(family)](double x, double y, double t) {
    PQState s = family(t);
    PhiFrame fr;
    fr.phi = assemble_phi(s, x, y);
    Complex3 dx = Complex3::Zero();
    for (int j = s.k; j >= 1; --j)
      dx = x * dx + static_cast<double>(j) * s.p[j];
    fr.d1 = dx + y * s.q2;
    fr.d2 = s.q1 + x * s.q2;
    // The degree-k system carries the data-set factor 2: it evolves at
    // twice the geometric rate, so the frame's time derivative is half
    // the assembled right-hand side.
    fr.dt = 0.5 * assemble_phi(rhs_pq(s), x, y);
    return fr;
  };
}

SLResidualReport sl_residual(const FrameFn& frame, const Grid3& grid) {
  std::vector<double> u1s = linspace(grid.u1), u2s = linspace(grid.u2),
                      ts = linspace(grid.t);
  std::size_t n1 = u1s.size(), n2 = u2s.size(), nt = ts.size();
  std::size_t total = n1 * n2 * nt;

  struct Slot {
    double om = 0, iv = 0, cd = 0;
    bool degenerate = false;
  };
  std::vector<Slot> slots(total);
  parallel_for(total, [&](std::size_t idx) {
    std::size_t it = idx / (n1 * n2);
    std::size_t r = idx % (n1 * n2);
    std::size_t i1 = r / n2, i2 = r % n2;
    PhiFrame f = frame(u1s[i1], u2s[i2], ts[it]);
    Slot& s = slots[idx];
    s.om = std::max({std::abs(omega(f.d1, f.d2)), std::abs(omega(f.d1, f.dt)),
                     std::abs(omega(f.d2, f.dt))});
    s.cd = (cross(f.d1, f.d2) - f.dt).norm();
    double m1 = f.d1.norm(), m2 = f.d2.norm(), mt = f.dt.norm();
    if (m1 < 1e-12 || m2 < 1e-12 || mt < 1e-12) {
      s.degenerate = true;
    } else {
      s.iv = std::abs(std::imag(det3(f.d1, f.d2, f.dt))) / (m1 * m2 * mt);
    }
  });

  SLResidualReport rep;
  rep.samples = static_cast<long>(total);
  for (const Slot& s : slots) {
    rep.max_omega = std::max(rep.max_omega, s.om);
    rep.max_cross_defect = std::max(rep.max_cross_defect, s.cd);
    if (s.degenerate)
      ++rep.degenerate;
    else
      rep.max_im_volume = std::max(rep.max_im_volume, s.iv);
  }
  return rep;
}

ImmersionResult immersion_test(const FrameFn& frame, double u1, double u2,
                               double t, double tol) {
  PhiFrame f = frame(u1, u2, t);
  double n = f.dt.norm();
  return {n > tol, n};
}

std::vector<double> singular_scan(
    const std::function<std::pair<Complex3, Complex3>(double)>& frame,
    double t0, double t1, int n) {
  if (n < 2) throw invalid_params("singular_scan: need at least two points");
  auto smin = [&frame](double t) {
    auto [a, b] = frame(t);
    Eigen::Matrix<double, 6, 2> M;
    M << a[0].real(), b[0].real(), a[1].real(), b[1].real(), a[2].real(),
        b[2].real(), a[0].imag(), b[0].imag(), a[1].imag(), b[1].imag(),
        a[2].imag(), b[2].imag();
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>> svd(M);
    return std::make_pair(svd.singularValues()(1), svd.singularValues()(0));
  };
  std::vector<double> ts = linspace({t0, t1, n});
  std::vector<double> s(ts.size());
  double top = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    auto [lo, hi] = smin(ts[i]);
    s[i] = lo;
    top = std::max(top, hi);
  }
  double threshold = 1e-9 * top;
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    double ga = s[i] - threshold, gb = s[i + 1] - threshold;
    if (ga == 0.0) {
      roots.push_back(ts[i]);
      continue;
    }
    if (ga * gb >= 0.0) continue;
    double a = ts[i], b = ts[i + 1];
    while (b - a > 1e-10) {
      double m = 0.5 * (a + b);
      double gm = smin(m).first - threshold;
      if (gm == 0.0) {
        a = b = m;
        break;
      }
      if ((ga < 0) == (gm < 0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  if (!ts.empty() && s.back() - threshold == 0.0) roots.push_back(ts.back());
  return roots;
}

BranchFit branch_model_fit(const Complex3& u, const Complex3& v,
                           const Complex3& w, const Complex3& x,
                           const std::vector<double>& eps_ladder) {
  const struct {
    const Complex3 &a, &b;
  } pairs[5] = {{u, w}, {u, x}, {v, w}, {v, x}, {w, x}};
  for (const auto& pr : pairs) {
    double scale = std::max(1.0, pr.a.norm() * pr.b.norm());
    if (std::abs(omega(pr.a, pr.b)) > 1e-9 * scale)
      throw invalid_params(
          "branch_model_fit: the five defining pairings must vanish");
  }
  if (u.norm() < 1e-12) return {BranchFit::Kind::cone, 0.0};
  Eigen::Matrix<double, 6, 2> M;
  M << u[0].real(), w[0].real(), u[1].real(), w[1].real(), u[2].real(),
      w[2].real(), u[0].imag(), w[0].imag(), u[1].imag(), w[1].imag(),
      u[2].imag(), w[2].imag();
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>> svd(M);
  if (svd.singularValues()(1) <= 1e-9 * svd.singularValues()(0))
    return {BranchFit::Kind::unsupported, 0.0};

  ZState init;
  init.z1 = v + w;
  init.z2 = v - w;
  init.z3 = x;
  init.z4 = u;

  const double guw = metric_g(u, w);
  const double uu = metric_g(u, u);
  const Complex3 uxw = cross(u, w);
  auto local_model = [&](double y1, double y2, double t) {
    return (y1 + 0.25 * guw * t * t) * u + (y2 * y2 - 0.25 * uu * t * t) * w +
           (2.0 * y2 * t) * uxw;
  };
  const double probes[8][3] = {{1, 0, 1},       {0, 1, 1},      {1, 1, 1},
                               {0.6, -1, 1},    {-0.9, 0.5, 1}, {0.5, 1, -1},
                               {-1, -0.7, -1},  {0.3, 0.4, -1}};

  std::vector<double> ladder =
      eps_ladder.empty() ? geometric_ladder(1e-2, 1e-1, 8) : eps_ladder;
  IntegratorCfg cfg;
  cfg.step = 1e-3;
  std::vector<double> devs(ladder.size(), 0.0);
  for (std::size_t ie = 0; ie < ladder.size(); ++ie) {
    double eps = ladder[ie];
    ZState fwd = integrate_z(init, 0.0, eps, cfg).back().state;
    ZState bwd = integrate_z(init, 0.0, -eps, cfg).back().state;
    double dmax = 0.0;
    for (const auto& pr : probes) {
      double y1 = pr[0], y2 = pr[1], tt = pr[2];
      const ZState& st = (tt > 0) ? fwd : bwd;
      Complex3 phi = assemble_phi(st, eps * eps * y1, eps * y2);
      Complex3 model = (eps * eps) * local_model(y1, y2, tt);
      dmax = std::max(dmax, (phi - model).norm());
    }
    devs[ie] = dmax;
  }
  return {BranchFit::Kind::slope, loglog_slope(ladder, devs)};
}

/* ------------------------------------------------------------------ */
/* Periodicity                                                          */
/* ------------------------------------------------------------------ */

std::pair<PeriodicitySpec, AlphaTriple> periodicity_from_pq(long p, long q) {
  if (!(p > 0 && 2 * p < q))
    throw invalid_params("periodicity_from_pq: need 0 < 2p < q");
  if (std::gcd(p, q) != 1)
    throw invalid_params("periodicity_from_pq: p and q must be coprime");
  long a1 = p * p - q * q;
  long a2 = q * q - 2 * p * q;
  long a3 = 2 * p * q - p * p;
  long lam = p * p - p * q + q * q;
  if ((p + q) % 3 == 0) {
    if (a1 % 3 || a2 % 3 || a3 % 3 || lam % 3)
      throw numerical_error("periodicity_from_pq: inconsistent reduction");
    a1 /= 3;
    a2 /= 3;
    a3 /= 3;
    lam /= 3;
  }
  if (a1 + a2 + a3 != 0 || lam % 2 == 0 ||
      std::gcd(std::gcd(std::abs(a1), std::abs(a2)),
               std::gcd(std::abs(a3), lam)) != 1)
    throw numerical_error("periodicity_from_pq: invariants violated");
  PeriodicitySpec spec;
  spec.p = p;
  spec.q = q;
  spec.s = static_cast<double>(p) / static_cast<double>(q);
  spec.sigma = (1.0 - 2.0 * spec.s) / (1.0 - spec.s * spec.s);
  spec.tau = (1.0 - spec.s + spec.s * spec.s) / (1.0 - spec.s * spec.s);
  spec.a1 = a1;
  spec.a2 = a2;
  spec.a3 = a3;
  spec.lambda = lam;
  AlphaTriple alpha(static_cast<double>(a2) * a3, -static_cast<double>(a3) * a1,
                    -static_cast<double>(a1) * a2);
  return {spec, alpha};
}

std::vector<PeriodicitySpec> periodicity_scan(long q_max) {
  std::vector<PeriodicitySpec> out;
  for (long q = 3; q <= q_max; ++q)
    for (long p = 1; 2 * p < q; ++p)
      if (std::gcd(p, q) == 1) out.push_back(periodicity_from_pq(p, q).first);
  return out;
}

double check_periodicity(const PointFn& phi, PeriodRelation relation, double T,
                         const Grid3& grid) {
  std::vector<double> u1s = linspace(grid.u1), u2s = linspace(grid.u2),
                      ts = linspace(grid.t);
  double worst = 0.0;
  for (double t : ts)
    for (double u1 : u1s)
      for (double u2 : u2s) {
        Complex3 lhs = phi(u1, u2, t + T);
        Complex3 rhs = (relation == PeriodRelation::periodic)
                           ? phi(u1, u2, t)
                           : phi(-u1, -u2, t);
        worst = std::max(worst, (lhs - rhs).norm());
      }
  return worst;
}

/* ------------------------------------------------------------------ */
/* Asymptotics                                                          */
/* ------------------------------------------------------------------ */

AsymptoticFit asymptotic_fit_cased(const CaseDParams& params,
                                   const std::vector<double>& r_ladder) {
  std::vector<double> ladder =
      r_ladder.empty() ? geometric_ladder(1e2, 1e6, 8) : r_ladder;
  const double angles[8] = {0.1,  0.9,  1.7,  2.5,
                            3.3,  4.1,  4.9,  5.7};
  const double times[4] = {0.0, 0.7, 1.4, 2.1};
  std::vector<double> devs(ladder.size(), 0.0);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    double rho = std::sqrt(ladder[i]);
    double dmax = 0.0;
    for (double t : times) {
      WPQRState s = cased_state(t, params);
      WPQRState limit;
      limit.w = s.w;  // quadratic limit model keeps only the background
      for (double ang : angles) {
        double y1 = rho * std::cos(ang), y2 = rho * std::sin(ang);
        Complex3 full = assemble_phi(s, y1, y2);
        Complex3 model = assemble_phi(limit, y1, y2);
        dmax = std::max(dmax, (full - model).norm());
      }
    }
    devs[i] = dmax;
  }
  if (*std::max_element(devs.begin(), devs.end()) < 1e-12)
    return {0.0, true};
  return {loglog_slope(ladder, devs), false};
}

AsymptoticFit asymptotic_fit_kfamily(const KFourierSolution& sol,
                                     const std::vector<double>& r_ladder) {
  std::vector<double> ladder =
      r_ladder.empty() ? geometric_ladder(1e2, 1e6, 8) : r_ladder;
  const int k = sol.k;
  const double dirs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {0.7, 1.3}};
  const double times[3] = {0.0, 0.9, 1.7};
  std::vector<double> devs(ladder.size(), 0.0);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    double r = ladder[i];
    double xs = std::pow(r, 1.0 / k);
    double ys = std::pow(r, (k - 1.0) / k);
    double dmax = 0.0;
    for (double t : times) {
      PQState s = kfamily_state(t, sol);
      for (const auto& d : dirs) {
        double x = d[0] * xs, y = d[1] * ys;
        Complex3 full = assemble_phi(s, x, y);
        double xk = 1.0;
        for (int j = 0; j < k; ++j) xk *= x;
        Complex3 model = xk * s.p[k] + (x * y) * s.q2;
        dmax = std::max(dmax, (full - model).norm());
      }
    }
    devs[i] = dmax;
  }
  if (*std::max_element(devs.begin(), devs.end()) < 1e-12)
    return {0.0, true};
  return {loglog_slope(ladder, devs), false};
}

}  // namespace slcalib
