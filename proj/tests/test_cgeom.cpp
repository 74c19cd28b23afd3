// Unit tests for the complex-3-vector algebra: Hermitian pairing, the
// symplectic and metric forms, the anti-bilinear cross product, and the
// volume-form determinant.  Reference values come from independent Eigen
// entry points in tests/support/oracles.hpp.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "slcalib/cgeom.hpp"
#include "support/oracles.hpp"

using slcalib::Complex;
using slcalib::Complex3;

namespace {

/** Deterministic RNG; each test case seeds its own stream so cases stay
 *  independent of execution order. */
std::mt19937_64 make_rng(unsigned seed) { return std::mt19937_64(seed); }

/** Random special unitary matrix: QR of a random complex matrix with the
 *  R-diagonal phases absorbed, then the determinant phase divided out so
 *  det(U) = 1. */
Eigen::Matrix3cd random_su3(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix3cd m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = Complex(u(rng), u(rng));
  Eigen::HouseholderQR<Eigen::Matrix3cd> qr(m);
  Eigen::Matrix3cd q = qr.householderQ();
  Complex det = q.determinant();
  return q * std::pow(det, -1.0 / 3.0);
}

}  // namespace

TEST_CASE("herm pairing: pinned values and conjugate symmetry") {
  const Complex3 e1(1, 0, 0), e2(0, 1, 0);
  const Complex3 ie1(Complex(0, 1), 0, 0);

  CHECK(std::abs(slcalib::herm(e1, ie1) - Complex(0, 1)) < 1e-15);
  CHECK(slcalib::omega(e1, ie1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(slcalib::metric_g(e1, ie1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(slcalib::herm(e1, e2)) < 1e-15);

  auto rng = make_rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const Complex3 u = oracles::random_c3(rng);
    const Complex h = slcalib::herm(u, u);
    CHECK(std::abs(h.imag()) < 1e-15);
    CHECK(h.real() >= 0.0);
  }
}

TEST_CASE("omega and metric_g decompose herm and match the oracle") {
  auto rng = make_rng(102);
  for (int trial = 0; trial < 500; ++trial) {
    const Complex3 u = oracles::random_c3(rng), v = oracles::random_c3(rng);
    const Complex h = slcalib::herm(u, v);
    CHECK(slcalib::metric_g(u, v) == doctest::Approx(h.real()).epsilon(1e-14));
    CHECK(slcalib::omega(u, v) == doctest::Approx(h.imag()).epsilon(1e-14));
    CHECK(std::abs(slcalib::omega(u, v) - oracles::omega(u, v)) < 1e-13);
    // antisymmetry and isotropy of the symplectic pairing
    CHECK(std::abs(slcalib::omega(u, v) + slcalib::omega(v, u)) < 1e-13);
    CHECK(std::abs(slcalib::omega(u, u)) < 1e-13);
  }
}

TEST_CASE("cross: pinned coordinate values") {
  const Complex3 e1(1, 0, 0), e2(0, 1, 0);
  const Complex3 ie1(Complex(0, 1), 0, 0);

  Complex3 c = slcalib::cross(e1, e2);
  CHECK(std::abs(c[0]) < 1e-16);
  CHECK(std::abs(c[1]) < 1e-16);
  CHECK(std::abs(c[2] - Complex(0.5, 0)) < 1e-16);

  c = slcalib::cross(ie1, e2);
  CHECK(std::abs(c[2] - Complex(0, -0.5)) < 1e-16);

  auto rng = make_rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const Complex3 r = oracles::random_c3(rng);
    CHECK(slcalib::cross(r, r).norm() < 1e-15);
  }
}

TEST_CASE("cross matches the Eigen oracle on random pairs") {
  auto rng = make_rng(104);
  for (int trial = 0; trial < 1000; ++trial) {
    const Complex3 r = oracles::random_c3(rng), s = oracles::random_c3(rng);
    CHECK((slcalib::cross(r, s) - oracles::cross(r, s)).norm() < 1e-14);
  }
}

TEST_CASE("cross is anti-bilinear in both arguments") {
  auto rng = make_rng(105);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Complex3 r = oracles::random_c3(rng), s = oracles::random_c3(rng);
    const Complex a(u(rng), u(rng));
    const Complex3 lhs1 = slcalib::cross(a * r, s);
    const Complex3 rhs1 = std::conj(a) * slcalib::cross(r, s);
    CHECK((lhs1 - rhs1).norm() < 1e-14);
    const Complex3 lhs2 = slcalib::cross(r, a * s);
    const Complex3 rhs2 = std::conj(a) * slcalib::cross(r, s);
    CHECK((lhs2 - rhs2).norm() < 1e-14);
  }
}

TEST_CASE("pairing identity herm(cross(r,s), w) = det3(r,s,w)/2") {
  auto rng = make_rng(106);
  for (int trial = 0; trial < 10000; ++trial) {
    const Complex3 r = oracles::random_c3(rng), s = oracles::random_c3(rng),
                   w = oracles::random_c3(rng);
    const Complex lhs = slcalib::herm(slcalib::cross(r, s), w);
    const Complex rhs = 0.5 * oracles::det3(r, s, w);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("double-cross identity with the |u|^2 factor") {
  // Pinned value: u = (2,0,0), w = (0,1,0) gives herm(u,w) = 0 and
  // |u|^2 = 4, so cross(u, cross(u,w)) = -w.
  const Complex3 u0(2, 0, 0), w0(0, 1, 0);
  const Complex3 pinned = slcalib::cross(u0, slcalib::cross(u0, w0));
  CHECK((pinned - Complex3(0, -1, 0)).norm() < 1e-15);

  auto rng = make_rng(107);
  for (int trial = 0; trial < 10000; ++trial) {
    const Complex3 u = oracles::random_c3(rng), w = oracles::random_c3(rng);
    const Complex3 lhs = slcalib::cross(u, slcalib::cross(u, w));
    const Complex3 rhs =
        0.25 * slcalib::herm(u, w) * u - 0.25 * slcalib::herm(u, u) * w;
    CHECK((lhs - rhs).norm() < 1e-13);
  }
}

TEST_CASE("cross is equivariant under special unitary rotations") {
  auto rng = make_rng(108);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3cd su = random_su3(rng);
    CHECK(std::abs(su.determinant() - Complex(1, 0)) < 1e-13);
    CHECK((su * su.adjoint() - Eigen::Matrix3cd::Identity()).norm() < 1e-13);
    for (int inner = 0; inner < 20; ++inner) {
      const Complex3 r = oracles::random_c3(rng), s = oracles::random_c3(rng);
      const Complex3 lhs = slcalib::cross(su * r, su * s);
      const Complex3 rhs = su * slcalib::cross(r, s);
      CHECK((lhs - rhs).norm() < 1e-13);
    }
  }
}

TEST_CASE("det3 and its real/imaginary parts: pinned values and oracle") {
  const Complex3 e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
  const Complex3 ie3(0, 0, Complex(0, 1));

  CHECK(slcalib::re_omega3(e1, e2, e3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(slcalib::im_omega3(e1, e2, e3)) < 1e-15);
  CHECK(std::abs(slcalib::re_omega3(e1, e2, ie3)) < 1e-15);
  CHECK(slcalib::im_omega3(e1, e2, ie3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(slcalib::det3(e1, e1, e3)) < 1e-15);

  auto rng = make_rng(109);
  for (int trial = 0; trial < 1000; ++trial) {
    const Complex3 u = oracles::random_c3(rng), v = oracles::random_c3(rng),
                   w = oracles::random_c3(rng);
    const Complex lhs = slcalib::det3(u, v, w);
    const Complex rhs = oracles::det3(u, v, w);
    CHECK(std::abs(lhs - rhs) < 1e-13);
    CHECK(slcalib::re_omega3(u, v, w) ==
          doctest::Approx(lhs.real()).epsilon(1e-13));
    CHECK(slcalib::im_omega3(u, v, w) ==
          doctest::Approx(lhs.imag()).epsilon(1e-13));
  }
}
