#include "slcalib/cgeom.hpp"

namespace slcalib {

Complex herm(const Complex3& u, const Complex3& v) {
  return std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1] +
         std::conj(u[2]) * v[2];
}

double metric_g(const Complex3& u, const Complex3& v) {
  return std::real(herm(u, v));
}

double omega(const Complex3& u, const Complex3& v) {
  return std::imag(herm(u, v));
}

Complex3 cross(const Complex3& r, const Complex3& s) {
  const Complex r1 = std::conj(r[0]), r2 = std::conj(r[1]),
                r3 = std::conj(r[2]);
  const Complex s1 = std::conj(s[0]), s2 = std::conj(s[1]),
                s3 = std::conj(s[2]);
  return 0.5 * Complex3(r2 * s3 - r3 * s2, r3 * s1 - r1 * s3,
                        r1 * s2 - r2 * s1);
}

Complex det3(const Complex3& u, const Complex3& v, const Complex3& w) {
  return u[0] * (v[1] * w[2] - v[2] * w[1]) -
         v[0] * (u[1] * w[2] - u[2] * w[1]) +
         w[0] * (u[1] * v[2] - u[2] * v[1]);
}

double re_omega3(const Complex3& u, const Complex3& v, const Complex3& w) {
  return std::real(det3(u, v, w));
}

double im_omega3(const Complex3& u, const Complex3& v, const Complex3& w) {
  return std::imag(det3(u, v, w));
}

}  // namespace slcalib
