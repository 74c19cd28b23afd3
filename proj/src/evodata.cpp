#include "slcalib/evodata.hpp"

#include <cmath>

#include "slcalib/errors.hpp"

namespace slcalib {

void Bivector::add_wedge(int i, int j, double c) {
  coeffs(i, j) += c;
  coeffs(j, i) -= c;
}

double Bivector::norm() const {
  double s = 0;
  for (int i = 0; i < dim(); ++i)
    for (int j = i + 1; j < dim(); ++j) s += coeffs(i, j) * coeffs(i, j);
  return std::sqrt(s);
}

EvolutionDataId EvolutionDataId::ex41() { return {Kind::Ex41, 0}; }

EvolutionDataId EvolutionDataId::ex42(int k) {
  if (k < 1) throw invalid_params("Ex42 requires k >= 1");
  return {Kind::Ex42, k};
}

int EvolutionDataId::ambient_dim() const {
  return kind == Kind::Ex41 ? 5 : k + 2;
}

double EvolutionDataId::factor() const {
  return kind == Kind::Ex41 ? 1.0 : 2.0;
}

Eigen::VectorXd psi(const EvolutionDataId& id, double y1, double y2) {
  Eigen::VectorXd out(id.ambient_dim());
  if (id.kind == EvolutionDataId::Kind::Ex41) {
    out << 0.5 * (y1 * y1 + y2 * y2), 0.5 * (y1 * y1 - y2 * y2), y1 * y2, y1,
        y2;
  } else {
    // (x, x^2, ..., x^k, y, x y) with (x, y) = (y1, y2)
    double xp = 1;
    for (int j = 0; j < id.k; ++j) {
      xp *= y1;
      out[j] = xp;
    }
    out[id.k] = y2;
    out[id.k + 1] = y1 * y2;
  }
  return out;
}

Bivector chi(const EvolutionDataId& id, const Eigen::VectorXd& x) {
  const int n = id.ambient_dim();
  if (x.size() != n) throw invalid_params("chi: wrong ambient dimension");
  Bivector b(n);
  if (id.kind == EvolutionDataId::Kind::Ex41) {
    b.add_wedge(1, 2, 2 * x[0]);
    b.add_wedge(0, 2, 2 * x[1]);
    b.add_wedge(0, 1, -2 * x[2]);
    b.add_wedge(0, 4, x[3]);
    b.add_wedge(1, 4, x[3]);
    b.add_wedge(2, 3, -x[3]);
    b.add_wedge(0, 3, -x[4]);
    b.add_wedge(1, 3, x[4]);
    b.add_wedge(2, 4, x[4]);
    b.add_wedge(3, 4, 1.0);
  } else {
    // coordinates (x_1..x_k, y_1, y_2) at indices (0..k-1, k, k+1);
    // x_0 is the constant 1
    const int k = id.k, iy1 = k, iy2 = k + 1;
    b.add_wedge(iy1, iy2, -2 * x[iy1]);
    for (int j = 1; j <= k; ++j) {
      double xjm1 = (j == 1) ? 1.0 : x[j - 2];
      b.add_wedge(j - 1, iy1, 2.0 * j * xjm1);
      b.add_wedge(j - 1, iy2, 2.0 * j * x[j - 1]);
    }
  }
  return b;
}

Bivector pushforward_wedge(const EvolutionDataId& id, double y1, double y2) {
  const int n = id.ambient_dim();
  Eigen::VectorXd d1(n), d2(n);
  if (id.kind == EvolutionDataId::Kind::Ex41) {
    d1 << y1, y1, y2, 1, 0;
    d2 << y2, -y2, y1, 0, 1;
  } else {
    const int k = id.k;
    d1.setZero();
    d2.setZero();
    double xp = 1;  // y1^{j-1}
    for (int j = 1; j <= k; ++j) {
      d1[j - 1] = j * xp;
      xp *= y1;
    }
    d1[k + 1] = y2;
    d2[k] = 1;
    d2[k + 1] = y1;
  }
  Bivector b(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      b.add_wedge(i, j, d1[i] * d2[j] - d1[j] * d2[i]);
  return b;
}

double verify_evolution_data(const EvolutionDataId& id, double y_min,
                             double y_max, int n_per_axis) {
  if (n_per_axis < 1) throw invalid_params("verify_evolution_data: n >= 1");
  double worst = 0;
  for (int i = 0; i < n_per_axis; ++i) {
    for (int j = 0; j < n_per_axis; ++j) {
      double y1 = n_per_axis == 1
                      ? y_min
                      : y_min + (y_max - y_min) * i / (n_per_axis - 1);
      double y2 = n_per_axis == 1
                      ? y_min
                      : y_min + (y_max - y_min) * j / (n_per_axis - 1);
      Bivector push = pushforward_wedge(id, y1, y2);
      if (push.norm() == 0)
        throw numerical_error("verify_evolution_data: zero pushforward");
      Bivector field = chi(id, psi(id, y1, y2));
      Eigen::MatrixXd diff =
          field.coeffs - id.factor() * push.coeffs;
      double r = 0;
      for (int a = 0; a < diff.rows(); ++a)
        for (int b = a + 1; b < diff.cols(); ++b)
          r += diff(a, b) * diff(a, b);
      worst = std::max(worst, std::sqrt(r));
    }
  }
  return worst;
}

}  // namespace slcalib
