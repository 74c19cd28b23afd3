#include "slcalib/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "slcalib/errors.hpp"

namespace slcalib {

namespace {

const Complex kI(0.0, 1.0);

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix63 = Eigen::Matrix<double, 6, 3>;

Vector6d realify(const Complex3& z) {
  Vector6d v;
  v << z[0].real(), z[1].real(), z[2].real(), z[0].imag(), z[1].imag(),
      z[2].imag();
  return v;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

/* ------------------------------------------------------------------ */
/* Group actions                                                        */
/* ------------------------------------------------------------------ */

GL2AffineParams compose(const GL2AffineParams& g1, const GL2AffineParams& g2) {
  GL2AffineParams g;
  g.a = g1.a * g2.a + g1.b * g2.c;
  g.b = g1.a * g2.b + g1.b * g2.d;
  g.c = g1.c * g2.a + g1.d * g2.c;
  g.d = g1.c * g2.b + g1.d * g2.d;
  g.e = g1.a * g2.e + g1.b * g2.f + g1.e;
  g.f = g1.c * g2.e + g1.d * g2.f + g1.f;
  return g;
}

ZState gl2_act_state(const GL2AffineParams& g, const ZState& s) {
  if (g.delta() == 0.0)
    throw invalid_params("gl2_act_state: delta = a d - b c must be nonzero");
  const double a = g.a, b = g.b, c = g.c, d = g.d, e = g.e, f = g.f;
  ZState o;
  o.z1 = 0.5 * (a * a + b * b + c * c + d * d) * s.z1 +
         0.5 * (a * a + b * b - c * c - d * d) * s.z2 + (a * c + b * d) * s.z3;
  o.z2 = 0.5 * (a * a - b * b + c * c - d * d) * s.z1 +
         0.5 * (a * a - b * b - c * c + d * d) * s.z2 + (a * c - b * d) * s.z3;
  o.z3 = (a * b + c * d) * s.z1 + (a * b - c * d) * s.z2 + (a * d + b * c) * s.z3;
  o.z4 = (a * e + c * f) * s.z1 + (a * e - c * f) * s.z2 +
         (a * f + c * e) * s.z3 + a * s.z4 + c * s.z5;
  o.z5 = (b * e + d * f) * s.z1 + (b * e - d * f) * s.z2 +
         (b * f + d * e) * s.z3 + b * s.z4 + d * s.z5;
  o.z6 = 0.5 * (e * e + f * f) * s.z1 + 0.5 * (e * e - f * f) * s.z2 +
         (e * f) * s.z3 + e * s.z4 + f * s.z5 + s.z6;
  return o;
}

ZFamily gl2_act(const GL2AffineParams& g, ZFamily family) {
  double delta = g.delta();
  if (delta == 0.0)
    throw invalid_params("gl2_act: delta = a d - b c must be nonzero");
  return [g, delta, family = std::move(family)](double t) {
    return gl2_act_state(g, family(delta * t));
  };
}

PQState k_act_state(const KGroupParams& g, const PQState& s) {
  const int k = s.k;
  if (static_cast<int>(g.d.size()) != k)
    throw invalid_params("k_act_state: d must have exactly k entries");
  if (g.a == 0.0 || g.c == 0.0)
    throw invalid_params("k_act_state: a and c must be nonzero");
  PQState o(k);
  for (int j = 0; j <= k; ++j) {
    Complex3 acc = Complex3::Zero();
    double apow = std::pow(g.a, j);
    for (int i = j; i <= k; ++i)
      acc += binom(i, j) * apow * std::pow(g.b, i - j) * s.p[i];
    double dj = (j < k) ? g.d[j] : 0.0;
    double djm1 = (j >= 1) ? g.d[j - 1] : 0.0;
    acc += dj * s.q1 + (g.a * djm1 + g.b * dj) * s.q2;
    o.p[j] = acc;
  }
  o.q1 = g.c * s.q1 + (g.b * g.c) * s.q2;
  o.q2 = (g.a * g.c) * s.q2;
  return o;
}

PQFamily k_act(const KGroupParams& g, PQFamily family) {
  double delta = g.a * g.c;
  if (delta == 0.0)
    throw invalid_params("k_act: a and c must be nonzero");
  return [g, delta, family = std::move(family)](double t) {
    return k_act_state(g, family(delta * t));
  };
}

/* ------------------------------------------------------------------ */
/* Classification                                                       */
/* ------------------------------------------------------------------ */

std::string to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::I:
      return "I";
    case CaseLabel::II:
      return "II";
    case CaseLabel::III:
      return "III";
    default:
      return "IV";
  }
}

Classification classify_case(const Complex3& z1, const Complex3& z2,
                             const Complex3& z3) {
  Matrix63 M;
  M.col(0) = realify(z1);
  M.col(1) = realify(z2);
  M.col(2) = realify(z3);
  Eigen::JacobiSVD<Matrix63> svd(M, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  double tol = 1e-9 * sv(0);
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (sv(i) > tol && sv(i) > 0.0) ++rank;

  Classification out;
  out.span_dim = rank;
  switch (rank) {
    case 0:
      out.label = CaseLabel::I;
      break;
    case 1:
      out.label = CaseLabel::II;
      break;
    case 2:
      out.label = CaseLabel::III;
      break;
    default:
      out.label = CaseLabel::IV;
      break;
  }
  if (rank != 1) return out;

  // One-dimensional span: classify the associated quadratic form
  // q(y) = (a1+a2)/2 y1^2 + (a1-a2)/2 y2^2 + a3 y1 y2 by its signature,
  // where z_i = lambda_i v along the canonical span direction v.
  Vector6d v = svd.matrixU().col(0);
  for (int i = 0; i < 6; ++i) {
    if (std::abs(v(i)) > 1e-9) {
      if (v(i) < 0.0) v = -v;
      break;
    }
  }
  Eigen::Vector3d lam(realify(z1).dot(v), realify(z2).dot(v),
                      realify(z3).dot(v));
  Eigen::Matrix2d Q;
  Q << 0.5 * (lam(0) + lam(1)), 0.5 * lam(2), 0.5 * lam(2),
      0.5 * (lam(0) - lam(1));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Q);
  double m0 = es.eigenvalues()(0), m1 = es.eigenvalues()(1);
  double etol = 1e-9 * std::max(std::abs(m0), std::abs(m1));
  int pos = (m0 > etol) + (m1 > etol);
  int neg = (m0 < -etol) + (m1 < -etol);
  if (pos == 2)
    out.form_tag = "y1^2+y2^2";
  else if (neg == 2)
    out.form_tag = "-y1^2-y2^2";
  else if (pos == 1 && neg == 1)
    out.form_tag = "y1^2-y2^2";
  else
    out.form_tag = "y1^2";
  return out;
}

/* ------------------------------------------------------------------ */
/* Normal forms                                                         */
/* ------------------------------------------------------------------ */

ZState rotate_state(const Eigen::Matrix3cd& U, const ZState& s) {
  ZState o;
  o.z1 = U * s.z1;
  o.z2 = U * s.z2;
  o.z3 = U * s.z3;
  o.z4 = U * s.z4;
  o.z5 = U * s.z5;
  o.z6 = U * s.z6;
  return o;
}

ZFamily apply_normalization(const Normalization& n, ZFamily family) {
  ZFamily moved = gl2_act(n.g, std::move(family));
  Eigen::Matrix3cd U = n.unitary;
  return [U, moved = std::move(moved)](double t) {
    return rotate_state(U, moved(t));
  };
}

Normalization normalize_case_iii(const ZState& init) {
  Matrix63 M;
  M.col(0) = realify(init.z1);
  M.col(1) = realify(init.z2);
  M.col(2) = realify(init.z3);
  Eigen::JacobiSVD<Matrix63> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(1) > 1e-9 * sv(0)) || sv(2) > 1e-9 * sv(0))
    throw invalid_params(
        "normalize_case_iii: background span is not two-dimensional");
  Eigen::Vector3d a = svd.matrixV().col(2);
  double nullres = a(0) * a(0) - a(1) * a(1) - a(2) * a(2);
  if (std::abs(nullres) > 1e-9)
    throw invalid_params(
        "normalize_case_iii: kernel covector is not null for the form "
        "a1^2 - a2^2 - a3^2");

  // Rotate so the new kernel covector is proportional to (1, -1, 0),
  // which forces z1(0) = z2(0).
  Eigen::Matrix2d Q;
  Q << 0.5 * (a(0) + a(1)), 0.5 * a(2), 0.5 * a(2), 0.5 * (a(0) - a(1));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Q);
  int idx =
      std::abs(es.eigenvalues()(0)) > std::abs(es.eigenvalues()(1)) ? 0 : 1;
  Eigen::Vector2d n = es.eigenvectors().col(idx);
  GL2AffineParams grot;
  grot.a = n(1);
  grot.b = n(0);
  grot.c = -n(0);
  grot.d = n(1);
  ZState s1 = gl2_act_state(grot, init);

  // Dilate so the third background vector has unit norm.
  double norm3 = s1.z3.norm();
  if (norm3 < 1e-12)
    throw invalid_params("normalize_case_iii: third background vector is 0");
  GL2AffineParams gdil;
  gdil.a = 1.0 / std::sqrt(norm3);
  gdil.d = gdil.a;
  ZState s2 = gl2_act_state(gdil, s1);

  // Unitary completing z3 to the third coordinate axis.
  Complex3 z3hat = s2.z3.normalized();
  int order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](int i, int j) {
    return std::abs(z3hat(i)) < std::abs(z3hat(j));
  });
  Complex3 seed1 = Complex3::Unit(order[0]);
  Complex3 b1 = seed1 - z3hat * z3hat.dot(seed1);
  b1.normalize();
  Complex3 seed2 = Complex3::Unit(order[1]);
  Complex3 b2 = seed2 - z3hat * z3hat.dot(seed2) - b1 * b1.dot(seed2);
  if (b2.norm() < 1e-6)
    throw numerical_error("normalize_case_iii: basis completion failed");
  b2.normalize();
  Eigen::Matrix3cd pre;
  pre.col(0) = b1;
  pre.col(1) = b2;
  pre.col(2) = z3hat;
  Eigen::Matrix3cd U1 = pre.adjoint();
  U1.row(0) *= std::conj(U1.determinant());

  // Extract the residual gauge coordinates of z1(0) and shear them away.
  Complex3 cv = U1 * s2.z1;
  Complex X = 0.5 * (cv(0) - kI * std::conj(cv(1)));
  Complex Y = 0.5 * (cv(0) + kI * std::conj(cv(1)));
  double Z = std::real(cv(2));
  if (std::abs(std::imag(cv(2))) > 1e-9 * std::max(1.0, cv.norm()))
    throw invalid_params(
        "normalize_case_iii: initial data violates the conserved pairing "
        "against the third background vector");
  double weight = std::norm(X) + std::norm(Y);
  if (weight < 1e-12)
    throw invalid_params("normalize_case_iii: first background vector "
                         "degenerates along the third axis");
  GL2AffineParams gsh;
  gsh.a = std::pow(weight, -0.25);
  gsh.b = 0.0;
  gsh.c = -gsh.a * Z;
  gsh.d = 1.0 / gsh.a;
  ZState s3 = gl2_act_state(gsh, s2);

  Complex3 cv2 = U1 * s3.z1;
  Complex X2 = 0.5 * (cv2(0) - kI * std::conj(cv2(1)));
  Complex Y2 = 0.5 * (cv2(0) + kI * std::conj(cv2(1)));
  Eigen::Matrix3cd U2 = Eigen::Matrix3cd::Zero();
  U2(0, 0) = std::conj(X2);
  U2(0, 1) = -kI * Y2;
  U2(1, 0) = -kI * std::conj(Y2);
  U2(1, 1) = X2;
  U2(2, 2) = 1.0;

  Normalization out;
  out.g = compose(compose(grot, gdil), gsh);
  out.unitary = U2 * U1;
  return out;
}

namespace {

/** Rebuilds the background-mixing matrix of an affine reparametrisation. */
Eigen::Matrix3d quadratic_rep(double a, double b, double c, double d) {
  Eigen::Matrix3d R;
  R << 0.5 * (a * a + b * b + c * c + d * d),
      0.5 * (a * a + b * b - c * c - d * d), a * c + b * d,
      0.5 * (a * a - b * b + c * c - d * d),
      0.5 * (a * a - b * b - c * c + d * d), a * c - b * d,
      a * b + c * d, a * b - c * d, a * d + b * c;
  return R;
}

/** Inverts the quadratic representation: finds (a,b,c,d) with
 *  quadratic_rep(a,b,c,d) == R, if R lies in the image. */
std::optional<GL2AffineParams> invert_quadratic_rep(const Eigen::Matrix3d& R) {
  double sa = 0.5 * (R(0, 0) + R(0, 1) + R(1, 0) + R(1, 1));
  double sb = 0.5 * (R(0, 0) + R(0, 1) - R(1, 0) - R(1, 1));
  double sc = 0.5 * (R(0, 0) - R(0, 1) + R(1, 0) - R(1, 1));
  double sd = 0.5 * (R(0, 0) - R(0, 1) - R(1, 0) + R(1, 1));
  double scale = std::max({1.0, std::abs(sa), std::abs(sb), std::abs(sc),
                           std::abs(sd)});
  if (sa < -1e-10 * scale || sb < -1e-10 * scale || sc < -1e-10 * scale ||
      sd < -1e-10 * scale)
    return std::nullopt;
  sa = std::max(sa, 0.0);
  sb = std::max(sb, 0.0);
  sc = std::max(sc, 0.0);
  sd = std::max(sd, 0.0);

  double a = 0, b = 0, c = 0, d = 0;
  double ab2 = R(2, 0) + R(2, 1);  // 2ab
  double cd2 = R(2, 0) - R(2, 1);  // 2cd
  double ac2 = R(0, 2) + R(1, 2);  // 2ac
  double bd2 = R(0, 2) - R(1, 2);  // 2bd
  int pivot = 0;
  double best = sa;
  if (sb > best) { best = sb; pivot = 1; }
  if (sc > best) { best = sc; pivot = 2; }
  if (sd > best) { best = sd; pivot = 3; }
  if (best <= 0.0) return std::nullopt;
  switch (pivot) {
    case 0:
      a = std::sqrt(sa);
      b = 0.5 * ab2 / a;
      c = 0.5 * ac2 / a;
      d = (R(2, 2) - b * c) / a;
      break;
    case 1:
      b = std::sqrt(sb);
      a = 0.5 * ab2 / b;
      d = 0.5 * bd2 / b;
      c = (R(2, 2) - a * d) / b;
      break;
    case 2:
      c = std::sqrt(sc);
      a = 0.5 * ac2 / c;
      d = 0.5 * cd2 / c;
      b = (R(2, 2) - a * d) / c;
      break;
    default:
      d = std::sqrt(sd);
      b = 0.5 * bd2 / d;
      c = 0.5 * cd2 / d;
      a = (R(2, 2) - b * c) / d;
      break;
  }
  double resid = (quadratic_rep(a, b, c, d) - R).cwiseAbs().maxCoeff();
  if (resid > 1e-10 * std::max(1.0, R.cwiseAbs().maxCoeff()))
    return std::nullopt;
  GL2AffineParams g;
  g.a = a;
  g.b = b;
  g.c = c;
  g.d = d;
  if (g.delta() == 0.0) return std::nullopt;
  return g;
}

}  // namespace

Normalization normalize_case_iv(const ZState& init) {
  const Complex3* zs[3] = {&init.z1, &init.z2, &init.z3};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      double scale = std::max(1.0, zs[i]->norm() * zs[j]->norm());
      if (std::abs(omega(*zs[i], *zs[j])) > 1e-9 * scale)
        throw invalid_params(
            "normalize_case_iv: background pairings must vanish");
    }

  Eigen::Matrix3d G;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) G(i, j) = std::real(herm(*zs[i], *zs[j]));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ges0(G);
  if (!(ges0.eigenvalues()(0) > 1e-9 * std::max(1.0, ges0.eigenvalues()(2))))
    throw invalid_params(
        "normalize_case_iv: background span is not three-dimensional");

  Eigen::Matrix3d L = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> ges(L, G);
  Eigen::Vector3d mu = ges.eigenvalues();
  double mumax = mu.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(mu(i) - mu(j)) < 1e-9 * mumax)
        throw numerical_error("normalize_case_iv: degenerate pencil");
  if (!(mu(0) < 0.0 && mu(1) < 0.0 && mu(2) > 0.0))
    throw numerical_error(
        "normalize_case_iv: unexpected pencil signature");

  // Scale the generalized eigenvectors to Lorentz-orthonormal rows,
  // ordered (+, -, -).
  Eigen::Matrix3d W;
  int order[3] = {2, 0, 1};
  for (int i = 0; i < 3; ++i)
    W.col(i) =
        ges.eigenvectors().col(order[i]) / std::sqrt(std::abs(mu(order[i])));
  Eigen::Matrix3d R0 = W.transpose();

  // The Lorentz-orthogonal candidate set reachable from R0: row sign
  // flips, optionally swapping the second and third rows.
  std::optional<GL2AffineParams> found;
  for (int swap = 0; swap < 2 && !found; ++swap) {
    Eigen::Matrix3d Rs = R0;
    if (swap) Rs.row(1).swap(Rs.row(2));
    for (int signs = 0; signs < 8 && !found; ++signs) {
      Eigen::Matrix3d R = Rs;
      for (int i = 0; i < 3; ++i)
        if (signs >> i & 1) R.row(i) = -R.row(i);
      found = invert_quadratic_rep(R);
    }
  }
  if (!found)
    throw numerical_error(
        "normalize_case_iv: no affine map realizes the normal form "
        "(degenerate data)");

  ZState s1 = gl2_act_state(*found, init);
  const Complex3* ws[3] = {&s1.z1, &s1.z2, &s1.z3};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      double scale = std::max(1.0, ws[i]->norm() * ws[j]->norm());
      if (std::abs(herm(*ws[i], *ws[j])) > 1e-8 * scale)
        throw numerical_error(
            "normalize_case_iv: transformed background is not orthogonal");
    }
  Eigen::Matrix3cd pre;
  for (int i = 0; i < 3; ++i) {
    double n = ws[i]->norm();
    if (n < 1e-12)
      throw numerical_error(
          "normalize_case_iv: transformed background vector vanishes");
    pre.col(i) = *ws[i] / n;
  }
  Eigen::Matrix3cd U0 = pre.adjoint();
  U0.row(2) *= std::conj(U0.determinant());

  Normalization out;
  out.g = *found;
  out.unitary = U0;
  return out;
}

}  // namespace slcalib
