// Unit tests for the ODE right-hand sides, the conserved pairings, the
// translational solutions, the dual-solution construction, and the
// integrator front ends.  Derivative formulas are checked term by term
// against the independent cross-product oracle, and the integrator is
// checked against a closed-form solution and an independently written
// RK4 stepper.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "slcalib/errors.hpp"
#include "slcalib/families.hpp"
#include "slcalib/flow.hpp"
#include "support/oracles.hpp"

using slcalib::Complex;
using slcalib::Complex3;
using slcalib::PQState;
using slcalib::WPQRState;
using slcalib::ZState;

namespace {

/** Canonical two-dimensional-background state: z1 = z2 = (1,-i,0),
 *  z3 = (0,0,1), upper layer zero. */
ZState canonical_state() {
  ZState s;
  s.z1 = Complex3(1.0, Complex(0, -1), 0.0);
  s.z2 = s.z1;
  s.z3 = Complex3(0, 0, 1);
  return s;
}

/** Closed-form background of the canonical state at time t. */
Complex3 canonical_z1(double t) {
  return Complex3(std::polar(1.0, t), Complex(0, -1) * std::polar(1.0, -t),
                  0.0);
}

double state_dist(const ZState& a, const ZState& b) {
  return std::max({(a.z1 - b.z1).norm(), (a.z2 - b.z2).norm(),
                   (a.z3 - b.z3).norm(), (a.z4 - b.z4).norm(),
                   (a.z5 - b.z5).norm(), (a.z6 - b.z6).norm()});
}

ZState random_zstate(std::mt19937_64& rng) {
  ZState s;
  s.z1 = oracles::random_c3(rng);
  s.z2 = oracles::random_c3(rng);
  s.z3 = oracles::random_c3(rng);
  s.z4 = oracles::random_c3(rng);
  s.z5 = oracles::random_c3(rng);
  s.z6 = oracles::random_c3(rng);
  return s;
}

/** Time-dependent generator satisfying S A S = A^T for S=diag(1,-1,-1):
 *  entries (2,1), (3,1) are negated transposes, (3,2) a plain copy. */
Eigen::Matrix3d pairing_generator(double t) {
  Eigen::Matrix3d a;
  const double b = std::sin(t), c = 0.3 * std::cos(t), d = 0.4;
  a << 0.1, b, c, -b, -0.2, d, -c, d, 0.05;
  return a;
}

}  // namespace

TEST_CASE("six-vector right-hand side: pinned values") {
  ZState zero;
  CHECK(state_dist(slcalib::rhs_z(zero), zero) < 1e-16);

  ZState s;
  s.z1 = Complex3(1, 0, 0);
  s.z2 = Complex3(1, 0, 0);
  s.z3 = Complex3(0, 0, 1);
  ZState d = slcalib::rhs_z(s);
  CHECK((d.z1 - Complex3(0, -1, 0)).norm() < 1e-15);
  CHECK((d.z2 - Complex3(0, -1, 0)).norm() < 1e-15);
  CHECK(d.z3.norm() < 1e-15);
  CHECK(d.z4.norm() < 1e-15);
  CHECK(d.z6.norm() < 1e-15);

  // canonical background: dz1/dt at 0 equals the closed-form derivative
  ZState c = canonical_state();
  ZState dc = slcalib::rhs_z(c);
  CHECK((dc.z1 - Complex3(Complex(0, 1), -1.0, 0.0)).norm() < 1e-14);
}

TEST_CASE("six-vector right-hand side matches the cross-product oracle") {
  auto rng = std::mt19937_64(401);
  for (int trial = 0; trial < 200; ++trial) {
    ZState s = random_zstate(rng);
    ZState d = slcalib::rhs_z(s);
    using oracles::cross;
    CHECK((d.z1 - 2.0 * cross(s.z2, s.z3)).norm() < 1e-14);
    CHECK((d.z2 - 2.0 * cross(s.z1, s.z3)).norm() < 1e-14);
    CHECK((d.z3 + 2.0 * cross(s.z1, s.z2)).norm() < 1e-14);
    CHECK((d.z4 - (cross(s.z1, s.z5) + cross(s.z2, s.z5) -
                   cross(s.z3, s.z4)))
              .norm() < 1e-14);
    CHECK((d.z5 - (-cross(s.z1, s.z4) + cross(s.z2, s.z4) +
                   cross(s.z3, s.z5)))
              .norm() < 1e-14);
    CHECK((d.z6 - cross(s.z4, s.z5)).norm() < 1e-14);
  }
}

TEST_CASE("degree-k right-hand side: pinned values and oracle") {
  PQState zero(3);
  PQState dzero = slcalib::rhs_pq(zero);
  CHECK(dzero.q1.norm() < 1e-16);
  for (const auto& p : dzero.p) CHECK(p.norm() < 1e-16);

  // canonical q pair: dq1/dt = -2 q1 x q2 reproduces the closed-form slope
  PQState s(1);
  s.q1 = Complex3(1.0, Complex(0, 1), 0.0);
  s.q2 = Complex3(0, 0, 1);
  PQState d = slcalib::rhs_pq(s);
  CHECK((d.q1 - Complex3(Complex(0, 1), 1.0, 0.0)).norm() < 1e-15);
  CHECK(d.q2.norm() < 1e-16);
  CHECK(d.p[0].norm() < 1e-16);

  auto rng = std::mt19937_64(402);
  for (int k = 1; k <= 6; ++k) {
    PQState r(k);
    r.q1 = oracles::random_c3(rng);
    r.q2 = oracles::random_c3(rng);
    for (int j = 0; j <= k; ++j) r.p[j] = oracles::random_c3(rng);
    PQState dr = slcalib::rhs_pq(r);
    using oracles::cross;
    CHECK((dr.p[0] - 2.0 * cross(r.p[1], r.q1)).norm() < 1e-14);
    for (int j = 1; j < k; ++j) {
      Complex3 want = 2.0 * (j + 1) * cross(r.p[j + 1], r.q1) +
                      2.0 * j * cross(r.p[j], r.q2);
      CHECK((dr.p[j] - want).norm() < 1e-13);
    }
    CHECK((dr.p[k] - 2.0 * k * cross(r.p[k], r.q2)).norm() < 1e-13);
    CHECK((dr.q1 + 2.0 * cross(r.q1, r.q2)).norm() < 1e-14);
    CHECK(dr.q2.norm() < 1e-16);
  }
}

TEST_CASE("diagonal-background right-hand sides: pinned and structural") {
  CHECK(slcalib::rhs_w(Complex3::Zero()).norm() < 1e-16);

  // real starting triple of the tanh/sech background
  Complex3 dreal = slcalib::rhs_w(Complex3(0, 1, 1));
  CHECK((dreal - Complex3(1, 0, 0)).norm() < 1e-15);

  // rotating closed-form background at t=0 for alphas (1/3, 2/3, 2/3)
  const double a1 = -2.0 / std::sqrt(3.0), a2 = 1.0 / std::sqrt(3.0),
               a3 = a2;
  Complex3 w0(Complex(0, 1) * std::sqrt(1.0 / 3), std::sqrt(2.0 / 3),
              std::sqrt(2.0 / 3));
  Complex3 want(Complex(0, 1) * a1 * w0[0], Complex(0, 1) * a2 * w0[1],
                Complex(0, 1) * a3 * w0[2]);
  CHECK((slcalib::rhs_w(w0) - want).norm() < 1e-14);

  auto rng = std::mt19937_64(403);
  for (int trial = 0; trial < 100; ++trial) {
    const Complex3 w = oracles::random_c3(rng);
    Complex3 dw = slcalib::rhs_w(w);
    CHECK(std::abs(dw[0] - std::conj(w[1] * w[2])) < 1e-15);
    CHECK(std::abs(dw[1] + std::conj(w[2] * w[0])) < 1e-15);
    CHECK(std::abs(dw[2] + std::conj(w[0] * w[1])) < 1e-15);

    // p = w reproduces the background derivative
    CHECK((slcalib::rhs_pq_linear(w, w) - dw).norm() < 1e-14);
    CHECK(slcalib::rhs_pq_linear(w, Complex3::Zero()).norm() < 1e-16);

    const Complex3 p = oracles::random_c3(rng), q = oracles::random_c3(rng);
    Complex3 dp = slcalib::rhs_pq_linear(w, p);
    CHECK(std::abs(dp[0] - 0.5 * (std::conj(w[1] * p[2]) +
                                  std::conj(w[2] * p[1]))) < 1e-15);
    CHECK(std::abs(dp[1] + 0.5 * (std::conj(w[2] * p[0]) +
                                  std::conj(w[0] * p[2]))) < 1e-15);
    CHECK(std::abs(dp[2] + 0.5 * (std::conj(w[0] * p[1]) +
                                  std::conj(w[1] * p[0]))) < 1e-15);

    Complex3 dr = slcalib::rhs_r(p, q);
    CHECK(std::abs(dr[0] - 0.5 * (std::conj(p[1] * p[2]) +
                                  std::conj(q[2] * q[1]))) < 1e-15);
    CHECK(std::abs(dr[1] - 0.5 * (std::conj(q[2] * q[0]) -
                                  std::conj(p[0] * p[2]))) < 1e-15);
    CHECK(std::abs(dr[2] + 0.5 * (std::conj(p[0] * q[1]) +
                                  std::conj(p[1] * q[0]))) < 1e-15);
    CHECK(slcalib::rhs_r(Complex3::Zero(), Complex3::Zero()).norm() < 1e-16);
  }
}

TEST_CASE("diagonal packing commutes with the derivatives") {
  // Packing a diagonal-background state into six-vector form and taking
  // the six-vector derivative must agree with packing the
  // diagonal-background derivative (the reduction is exact).
  auto rng = std::mt19937_64(404);
  for (int trial = 0; trial < 100; ++trial) {
    WPQRState s;
    s.w = oracles::random_c3(rng);
    s.p = oracles::random_c3(rng);
    s.q = oracles::random_c3(rng);
    s.r = oracles::random_c3(rng);
    ZState packed = slcalib::zstate_from_wpqr(s);
    ZState dz = slcalib::rhs_z(packed);
    ZState want = slcalib::zstate_from_wpqr(slcalib::rhs_wpqr(s));
    CHECK(state_dist(dz, want) < 1e-14);
  }
}

TEST_CASE("conserved pairings of the six-vector system") {
  ZState zero;
  for (double r : slcalib::constraint_residuals_z(zero))
    CHECK(std::abs(r) < 1e-16);

  ZState c = canonical_state();
  for (double r : slcalib::constraint_residuals_z(c))
    CHECK(std::abs(r) < 1e-14);

  ZState bad;
  bad.z4 = Complex3(1, 0, 0);
  bad.z5 = Complex3(Complex(0, 1), 0, 0);
  auto res = slcalib::constraint_residuals_z(bad);
  CHECK(res[5] == doctest::Approx(1.0).epsilon(1e-14));

  auto rng = std::mt19937_64(405);
  for (int trial = 0; trial < 50; ++trial) {
    ZState s = oracles::random_admissible_z(rng);
    for (double r : slcalib::constraint_residuals_z(s))
      CHECK(std::abs(r) <= 1e-12);
  }
}

TEST_CASE("conserved pairings of the degree-k system") {
  PQState canon(2);
  canon.q1 = Complex3(1.0, Complex(0, 1), 0.0);
  canon.q2 = Complex3(0, 0, 1);
  for (double r : slcalib::constraint_residuals_pq(canon))
    CHECK(std::abs(r) < 1e-14);

  PQState degenerate(1);
  degenerate.q1 = Complex3(0, 0, 1);
  degenerate.q2 = Complex3(0, 0, 1);
  CHECK(std::abs(slcalib::constraint_residuals_pq(degenerate)[0]) < 1e-15);

  auto rng = std::mt19937_64(406);
  for (int k = 1; k <= 5; ++k) {
    PQState s = oracles::random_admissible_pq(rng, k);
    auto res = slcalib::constraint_residuals_pq(s);
    CHECK(res.size() == static_cast<std::size_t>(k + 2));
    for (double r : res) CHECK(std::abs(r) <= 1e-12);
  }
}

TEST_CASE("pairing invariants of the diagonal-background system") {
  auto rng = std::mt19937_64(407);

  // p = q = w: every pairing is an imaginary part of a real number
  WPQRState same;
  same.w = oracles::random_c3(rng);
  same.p = same.w;
  same.q = same.w;
  for (double r : slcalib::pairing_invariants(same))
    CHECK(std::abs(r) < 1e-15);

  WPQRState wonly;
  wonly.w = oracles::random_c3(rng);
  for (double r : slcalib::pairing_invariants(wonly))
    CHECK(std::abs(r) < 1e-16);

  for (int trial = 0; trial < 50; ++trial) {
    WPQRState s = oracles::random_admissible_wpqr(rng);
    for (double r : slcalib::pairing_invariants(s))
      CHECK(std::abs(r) <= 1e-12);
  }
}

TEST_CASE("translational solutions of the inhomogeneous layer") {
  auto zero = slcalib::translation_z45(Complex3(1, 0, 0), Complex3(0, 1, 0),
                                       Complex3(0, 0, 1), 0.0, 0.0);
  CHECK(zero.first.norm() < 1e-16);
  CHECK(zero.second.norm() < 1e-16);

  ZState c = canonical_state();
  auto [z4, z5] = slcalib::translation_z45(c.z1, c.z2, c.z3, 1.0, 0.0);
  CHECK((z4 - Complex3(2.0, Complex(0, -2), 0.0)).norm() < 1e-15);
  CHECK((z5 - Complex3(0, 0, 1)).norm() < 1e-15);

  // Along any background evolution the construction satisfies the upper
  // layer equations identically: substituting z4, z5 into the layer
  // right-hand sides reproduces the chain-rule derivative.
  auto rng = std::mt19937_64(408);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  using oracles::cross;
  for (int trial = 0; trial < 100; ++trial) {
    const Complex3 z1 = oracles::random_c3(rng), z2 = oracles::random_c3(rng),
                   z3 = oracles::random_c3(rng);
    const double e = u(rng), f = u(rng);
    auto [w4, w5] = slcalib::translation_z45(z1, z2, z3, e, f);
    const Complex3 d1 = 2.0 * cross(z2, z3), d2 = 2.0 * cross(z1, z3),
                   d3 = -2.0 * cross(z1, z2);
    const Complex3 dz4_chain = e * (d1 + d2) + f * d3;
    const Complex3 dz4_rhs = cross(z1, w5) + cross(z2, w5) - cross(z3, w4);
    CHECK((dz4_chain - dz4_rhs).norm() < 1e-13);
    const Complex3 dz5_chain = f * (d1 - d2) + e * d3;
    const Complex3 dz5_rhs = -cross(z1, w4) + cross(z2, w4) + cross(z3, w5);
    CHECK((dz5_chain - dz5_rhs).norm() < 1e-13);
  }
}

TEST_CASE("dual solutions: identity, inverse law, and conservation") {
  const Eigen::Matrix3d S = Eigen::Vector3d(1, -1, -1).asDiagonal();

  Eigen::Matrix3d vid = slcalib::dual_solutions(Eigen::Matrix3d::Identity());
  CHECK((vid - S).norm() < 1e-15);

  auto rng = std::mt19937_64(409);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
    if (std::abs(m.determinant()) < 0.05) continue;
    Eigen::Matrix3d v = slcalib::dual_solutions(m);
    CHECK((m * S * v - Eigen::Matrix3d::Identity()).norm() < 1e-11);
  }

  CHECK_THROWS_AS(slcalib::dual_solutions(Eigen::Matrix3d::Zero()),
                  slcalib::numerical_error);

  // Rows of U evolved by the generator and columns of V evolved by its
  // negative keep U S V = I.
  Eigen::Matrix3d u0;
  u0 << 1, 0.2, -0.1, 0, 1.1, 0.3, 0.2, -0.3, 0.9;
  Eigen::Matrix3d v0 = slcalib::dual_solutions(u0);

  auto flatten = [](const Eigen::Matrix3d& m) {
    Eigen::VectorXd v(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v[3 * i + j] = m(i, j);
    return v;
  };
  auto unflatten = [](const Eigen::VectorXd& v) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = v[3 * i + j];
    return m;
  };
  // d(row i of U)/dt = A * row; d(col j of V)/dt = -A * col
  auto frows = [&](double t, const Eigen::VectorXd& y) {
    Eigen::Matrix3d m = unflatten(y);
    Eigen::Matrix3d dm = (pairing_generator(t) * m.transpose()).transpose();
    return flatten(dm);
  };
  auto fcols = [&](double t, const Eigen::VectorXd& y) {
    Eigen::Matrix3d m = unflatten(y);
    Eigen::Matrix3d dm = -pairing_generator(t) * m;
    return flatten(dm);
  };
  Eigen::Matrix3d u1 =
      unflatten(oracles::rk4(frows, flatten(u0), 0.0, 2.0, 1e-3));
  Eigen::Matrix3d v1 =
      unflatten(oracles::rk4(fcols, flatten(v0), 0.0, 2.0, 1e-3));
  CHECK((u1 * S * v1 - Eigen::Matrix3d::Identity()).norm() < 1e-9);
  // and dual_solutions applied at the later time gives the same dual basis
  CHECK((slcalib::dual_solutions(u1) - v1).norm() < 1e-8);
}

TEST_CASE("integrate: constant-layer case lands exactly") {
  ZState s;
  s.z4 = Complex3(1, 0, 0);
  s.z5 = Complex3(0, 1, 0);
  auto traj = slcalib::integrate_z(s, 0.0, 2.0);
  const ZState& fin = traj.back().state;
  CHECK(traj.back().t == 2.0);
  CHECK((fin.z6 - Complex3(0, 0, 1)).norm() < 1e-13);
  CHECK((fin.z4 - s.z4).norm() < 1e-13);
  CHECK((fin.z5 - s.z5).norm() < 1e-13);

  ZState zero;
  auto ztraj = slcalib::integrate_z(zero, 0.0, 1.0);
  CHECK(state_dist(ztraj.back().state, zero) < 1e-16);
}

TEST_CASE("integrate: canonical background matches the closed form") {
  ZState c = canonical_state();
  slcalib::IntegratorCfg cfg;
  cfg.step = 1e-3;
  auto traj = slcalib::integrate_z(c, 0.0, 1.0, cfg);
  CHECK((traj.back().state.z1 - canonical_z1(1.0)).norm() < 1e-10);
  CHECK((traj.back().state.z2 - canonical_z1(1.0)).norm() < 1e-10);
  CHECK((traj.back().state.z3 - Complex3(0, 0, 1)).norm() < 1e-10);

  // backward in time
  auto back = slcalib::integrate_z(c, 0.0, -1.0, cfg);
  CHECK(back.back().t == -1.0);
  CHECK((back.back().state.z1 - canonical_z1(-1.0)).norm() < 1e-10);

  // adaptive stepper reaches the same state
  slcalib::IntegratorCfg acfg;
  acfg.method = slcalib::IntegratorCfg::Method::rk45;
  acfg.tol = 1e-10;
  auto atraj = slcalib::integrate_z(c, 0.0, 1.0, acfg);
  CHECK(atraj.back().t == 1.0);
  CHECK((atraj.back().state.z1 - canonical_z1(1.0)).norm() < 1e-8);
}

TEST_CASE("integrate: fixed-step order check by step halving") {
  ZState c = canonical_state();
  auto err_at = [&](double h) {
    slcalib::IntegratorCfg cfg;
    cfg.step = h;
    auto traj = slcalib::integrate_z(c, 0.0, 1.0, cfg);
    return (traj.back().state.z1 - canonical_z1(1.0)).norm();
  };
  const double e1 = err_at(0.02), e2 = err_at(0.01);
  const double ratio = e1 / e2;
  CHECK(ratio > 16.0 * 0.8);
  CHECK(ratio < 16.0 * 1.2);
}

TEST_CASE("integrate matches an independently written RK4 stepper") {
  auto rng = std::mt19937_64(410);
  ZState s = oracles::random_admissible_z(rng);

  // realify the packed state so the oracle stepper can drive it
  auto torv = [](const Eigen::VectorXcd& z) {
    Eigen::VectorXd v(2 * z.size());
    for (int i = 0; i < z.size(); ++i) {
      v[2 * i] = z[i].real();
      v[2 * i + 1] = z[i].imag();
    }
    return v;
  };
  auto tocv = [](const Eigen::VectorXd& v) {
    Eigen::VectorXcd z(v.size() / 2);
    for (int i = 0; i < z.size(); ++i) z[i] = Complex(v[2 * i], v[2 * i + 1]);
    return z;
  };
  auto f = [&](double, const Eigen::VectorXd& v) {
    ZState st = slcalib::unpack_z(tocv(v));
    return torv(slcalib::pack(slcalib::rhs_z(st)));
  };
  Eigen::VectorXd ref = oracles::rk4(f, torv(slcalib::pack(s)), 0.0, 1.0, 1e-3);

  slcalib::IntegratorCfg cfg;
  cfg.step = 1e-3;
  auto traj = slcalib::integrate_z(s, 0.0, 1.0, cfg);
  CHECK((slcalib::pack(traj.back().state) - tocv(ref)).norm() < 1e-11);
}

TEST_CASE("integrate: invariant drift stays small") {
  auto rng = std::mt19937_64(411);
  ZState s = oracles::random_admissible_z(rng);
  auto r0 = slcalib::constraint_residuals_z(s);
  auto traj = slcalib::integrate_z(s, 0.0, 1.0);
  auto r1 = slcalib::constraint_residuals_z(traj.back().state);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(r1[i] - r0[i]) <= 1e-10);

  WPQRState w = oracles::random_admissible_wpqr(rng);
  auto i0 = slcalib::pairing_invariants(w);
  auto wtraj = slcalib::integrate_wpqr(w, 0.0, 1.0);
  auto i1 = slcalib::pairing_invariants(wtraj.back().state);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(i1[i] - i0[i]) <= 1e-10);
}

TEST_CASE("integrate: observer discipline") {
  ZState c = canonical_state();
  std::vector<double> times;
  slcalib::IntegratorCfg cfg;
  cfg.step = 1e-2;
  slcalib::OdeRhs rhs = [](double, const Eigen::VectorXcd& y) {
    return slcalib::pack(slcalib::rhs_z(slcalib::unpack_z(y)));
  };
  Eigen::VectorXcd y = slcalib::pack(c);
  slcalib::integrate(rhs, y, 0.0, 1.0, cfg,
                     [&](double t, const Eigen::VectorXcd&) {
                       times.push_back(t);
                     });
  REQUIRE(!times.empty());
  CHECK(times.front() == 0.0);
  CHECK(times.back() == 1.0);
  for (std::size_t i = 1; i < times.size(); ++i)
    CHECK(times[i] > times[i - 1]);
  CHECK(times.size() == 101);
}

TEST_CASE("integrate: failure modes") {
  // admissibility gate rejects a broken pairing before integrating
  ZState bad;
  bad.z4 = Complex3(1, 0, 0);
  bad.z5 = Complex3(Complex(0, 1), 0, 0);
  CHECK_THROWS_AS(slcalib::require_admissible(bad), slcalib::invalid_params);
  CHECK_THROWS_AS(slcalib::integrate_z(bad, 0.0, 1.0),
                  slcalib::invalid_params);

  // step budget
  ZState c = canonical_state();
  slcalib::IntegratorCfg tiny;
  tiny.max_steps = 10;
  CHECK_THROWS_AS(slcalib::integrate_z(c, 0.0, 1.0, tiny),
                  slcalib::numerical_error);

  // finite-time blow-up is reported, not returned
  slcalib::OdeRhs blowup = [](double, const Eigen::VectorXcd& y) {
    Eigen::VectorXcd d(1);
    d[0] = y[0] * y[0];
    return d;
  };
  Eigen::VectorXcd y0(1);
  y0[0] = 2.0;
  slcalib::IntegratorCfg cfg;
  cfg.step = 1e-4;
  CHECK_THROWS_AS(slcalib::integrate(blowup, y0, 0.0, 1.0, cfg),
                  slcalib::numerical_error);
}

TEST_CASE("pack and unpack round-trip every state shape") {
  auto rng = std::mt19937_64(412);
  ZState z = random_zstate(rng);
  CHECK(slcalib::pack(z).size() == 18);
  CHECK(state_dist(slcalib::unpack_z(slcalib::pack(z)), z) == 0.0);

  PQState pq(4);
  pq.q1 = oracles::random_c3(rng);
  pq.q2 = oracles::random_c3(rng);
  for (auto& p : pq.p) p = oracles::random_c3(rng);
  Eigen::VectorXcd packed = slcalib::pack(pq);
  CHECK(packed.size() == 3 * (4 + 3));
  PQState back = slcalib::unpack_pq(packed, 4);
  CHECK(back.k == 4);
  CHECK((back.q1 - pq.q1).norm() == 0.0);
  CHECK((back.q2 - pq.q2).norm() == 0.0);
  for (int j = 0; j <= 4; ++j) CHECK((back.p[j] - pq.p[j]).norm() == 0.0);

  WPQRState w;
  w.w = oracles::random_c3(rng);
  w.p = oracles::random_c3(rng);
  w.q = oracles::random_c3(rng);
  w.r = oracles::random_c3(rng);
  Eigen::VectorXcd wp = slcalib::pack(w);
  CHECK(wp.size() == 12);
  WPQRState wback = slcalib::unpack_wpqr(wp);
  CHECK((wback.w - w.w).norm() == 0.0);
  CHECK((wback.p - w.p).norm() == 0.0);
  CHECK((wback.q - w.q).norm() == 0.0);
  CHECK((wback.r - w.r).norm() == 0.0);
}
