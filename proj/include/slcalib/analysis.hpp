#pragma once

#include <functional>
#include <vector>

#include "slcalib/cgeom.hpp"
#include "slcalib/families.hpp"
#include "slcalib/flow.hpp"

namespace slcalib {

/* ------------------------------------------------------------------ */
/* Sampling grids and immersion frames                                  */
/* ------------------------------------------------------------------ */

struct GridAxis {
  double min = 0, max = 0;
  int n = 1;
};

std::vector<double> linspace(const GridAxis& axis);

struct Grid3 {
  GridAxis u1, u2, t;  // u1, u2 are the surface parameters
};

/** Immersion point with its three partial derivatives. */
struct PhiFrame {
  Complex3 phi, d1, d2, dt;
};

using PointFn = std::function<Complex3(double, double, double)>;
using FrameFn = std::function<PhiFrame(double, double, double)>;

/** Frame with central-difference partials of step h (fallback for
 *  families without analytic derivative access). */
FrameFn frame_from_point_fn(PointFn f, double h = 1e-5);

/** Frames with analytic partials: the parameter derivatives are linear
 *  in the state and the time derivative is the assembly of the flow
 *  right-hand side.  The degree-k system carries its data set's factor 2
 *  (it evolves at twice the geometric rate), so its frame reports half
 *  the assembled right-hand side as the time derivative. */
FrameFn frame_from_z_family(std::function<ZState(double)> family);
FrameFn frame_from_wpqr_family(std::function<WPQRState(double)> family);
FrameFn frame_from_pq_family(std::function<PQState(double)> family);

/* ------------------------------------------------------------------ */
/* Special Lagrangian residuals                                         */
/* ------------------------------------------------------------------ */

/** Maxima over a sampling grid of the defining residuals:
 *  max_omega        = max |omega(ta, tb)| over the three tangent pairs,
 *  max_im_volume    = max |Im det3(d1, d2, dt)| / (|d1| |d2| |dt|),
 *  max_cross_defect = max |cross(d1, d2) - dt|  (raw).
 *  Samples whose frame is degenerate (some tangent below 1e-12 in norm)
 *  are excluded from the normalised residual and counted. */
struct SLResidualReport {
  double max_omega = 0;
  double max_im_volume = 0;
  double max_cross_defect = 0;
  long samples = 0;
  long degenerate = 0;
};

SLResidualReport sl_residual(const FrameFn& frame, const Grid3& grid);

/* ------------------------------------------------------------------ */
/* Immersion and singularity diagnostics                                */
/* ------------------------------------------------------------------ */

struct ImmersionResult {
  bool immersed;
  double dt_norm;
};

/** The family is immersed at a point exactly where the time derivative
 *  of the immersion is nonzero. */
ImmersionResult immersion_test(const FrameFn& frame, double u1, double u2,
                               double t, double tol = 1e-8);

/** Scans the smallest singular value s(t) of the realified 6x2 frame
 *  (pair of C^3 vectors whose real-linear dependence signals a
 *  singularity) on an n-point grid over [t0, t1], then bisects every
 *  sign change of s(t) - threshold to width 1e-10.  The threshold is
 *  1e-9 times the largest singular value seen on the grid. */
std::vector<double> singular_scan(
    const std::function<std::pair<Complex3, Complex3>(double)>& frame,
    double t0, double t1, int n);

/* ------------------------------------------------------------------ */
/* Local model near a singular point                                    */
/* ------------------------------------------------------------------ */

/** Fit of the scaling law near a singular six-vector datum
 *  z1(0) = v + w, z2(0) = v - w, z3(0) = x, z4(0) = u, z5(0) = z6(0) = 0
 *  (the five pairings omega(u,w), omega(u,x), omega(v,w), omega(v,x),
 *  omega(w,x) must vanish to 1e-9).  Compares the flow against the
 *  quadratic local model
 *    L = (y1 + g(u,w) t^2 / 4) u + (y2^2 - |u|^2 t^2 / 4) w
 *        + 2 y2 t cross(u, w)
 *  under the scaling (y1, y2, t) -> (eps^2 y1, eps y2, eps t) and
 *  returns the log-log slope of the deviation (expected >= 2.9).
 *  u = 0 reports kind = cone; u, w linearly dependent and nonzero is
 *  unsupported. */
struct BranchFit {
  enum class Kind { slope, cone, unsupported } kind;
  double slope = 0;
};

BranchFit branch_model_fit(const Complex3& u, const Complex3& v,
                           const Complex3& w, const Complex3& x,
                           const std::vector<double>& eps_ladder = {});

/* ------------------------------------------------------------------ */
/* Periodicity                                                          */
/* ------------------------------------------------------------------ */

/** Rational rotation-rate data for the case-d family derived from a
 *  coprime pair 0 < 2p < q:
 *    s = p/q, sigma = (1-2s)/(1-s^2), tau = (1-s+s^2)/(1-s^2),
 *    (a1, a2, a3) = (p^2-q^2, q^2-2pq, 2pq-p^2), lambda = p^2-pq+q^2,
 *  all four divided by 3 when p + q is divisible by 3.  Invariants:
 *  a1+a2+a3 = 0, gcd = 1, lambda odd.  The matching positive alpha
 *  triple is (a2 a3, -a3 a1, -a1 a2). */
struct PeriodicitySpec {
  long p, q;
  double s, sigma, tau;
  long a1, a2, a3, lambda;
};

std::pair<PeriodicitySpec, AlphaTriple> periodicity_from_pq(long p, long q);

/** All admissible coprime pairs with q <= q_max, sorted by q then p. */
std::vector<PeriodicitySpec> periodicity_scan(long q_max);

enum class PeriodRelation {
  periodic,           // Phi(u1, u2, t + T) = Phi(u1, u2, t)
  antiperiodic_flip,  // Phi(u1, u2, t + T) = Phi(-u1, -u2, t)
};

/** Maximum over the grid of the violation of the stated relation. */
double check_periodicity(const PointFn& phi, PeriodRelation relation, double T,
                         const Grid3& grid);

/* ------------------------------------------------------------------ */
/* Asymptotic convergence to the limit model                            */
/* ------------------------------------------------------------------ */

struct AsymptoticFit {
  double slope = 0;
  bool skipped = false;  // set when the deviation is identically ~0
};

/** Log-log slope of max |Phi - Phi0| against r, where Phi0 is the
 *  quadratic limit model of the case-d family and samples at scale r
 *  have |y| = sqrt(r).  Expected slope 1/2. */
AsymptoticFit asymptotic_fit_cased(const CaseDParams& params,
                                   const std::vector<double>& r_ladder = {});

/** Log-log slope of max |Phi - Phi0| against r for a degree-k family in
 *  the regime x ~ r^{1/k}, y ~ r^{(k-1)/k}, against the limit model
 *  Phi0 = x^k p_k + x y q_2.  Expected slope (k-1)/k. */
AsymptoticFit asymptotic_fit_kfamily(const KFourierSolution& sol,
                                     const std::vector<double>& r_ladder = {});

}  // namespace slcalib
