// Copyright 2026 The skc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "skc/errors.hpp"
#include "skc/unitary.hpp"

namespace skc {

/// The constants governing the recursion's contraction, with engineering
/// slack factors over their approximate derivations.  c_approx and
/// eps0_bound are derived from c_gc; call refresh() after overriding c_gc.
struct SkConstants {
  double c_gc = 1.0 / std::numbers::sqrt2;  ///< SU(2) commutator balance
  double c_approx = 8.0 * c_gc;  ///< level error: ε_n = c·ε_{n-1}^{3/2}
  double c1 = 4.0;  ///< commutator-exponential (BCH) constant
  double eps0_bound = 1.0 / (c_approx * c_approx);  ///< strict-mode bound
  double slack_norm = 1.05;   ///< margin on norm bounds
  double slack_resid = 1.1;   ///< margin on residual bounds
  double eps0_accept = 0.14;  ///< calibrated-mode acceptance for measured ε₀
  int depth_cap = 25;

  void refresh() {
    c_approx = 8.0 * c_gc;
    eps0_bound = 1.0 / (c_approx * c_approx);
  }

  /// Residual prefactor of the approximate decomposition in SU(d).
  static double c_gc_dprime(int d) {
    return 4.0 * std::pow(d, 0.75) * std::pow(0.5 * (d - 1), 1.5);
  }

  /// Norm prefactor of the approximate decomposition in SU(d).
  static double c_gc_ddprime(int d) {
    return std::pow(d, 0.25) * std::sqrt(0.5 * (d - 1));
  }
};

/// A balanced group-commutator decomposition: the target is (close to)
/// v·w·v†·w†, with v and w near the identity.
struct GcPair {
  Unitary v;
  Unitary w;
  double residual;  ///< operator-norm distance between v·w·v†·w† and the target
};

namespace detail {

/// Right-hand side of the commutator angle equation:
/// sin(θ/2) = 2 sin²(φ/2) √(1 - sin⁴(φ/2)).
inline double gc_angle_rhs(double phi) {
  const double s2 = std::sin(0.5 * phi) * std::sin(0.5 * phi);
  return 2.0 * s2 * std::sqrt(std::max(0.0, 1.0 - s2 * s2));
}

struct PhiRange {
  double phi_peak;    // argmax of the RHS on [0, π]
  double theta_max;   // largest attainable rotation angle
};

/// Locates the peak of the initial monotone branch numerically once.
inline const PhiRange& phi_range() {
  static const PhiRange range = [] {
    const int grid = 1 << 12;
    double best_phi = 0.0, best = -1.0;
    for (int i = 0; i <= grid; ++i) {
      const double phi = std::numbers::pi * i / grid;
      const double v = gc_angle_rhs(phi);
      if (v > best) {
        best = v;
        best_phi = phi;
      }
    }
    // Golden-section refinement around the grid optimum.
    double lo = std::max(0.0, best_phi - std::numbers::pi / grid);
    double hi = std::min(std::numbers::pi, best_phi + std::numbers::pi / grid);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    for (int it = 0; it < 200; ++it) {
      if (gc_angle_rhs(a) < gc_angle_rhs(b)) {
        lo = a;
        a = b;
        b = lo + gr * (hi - lo);
      } else {
        hi = b;
        b = a;
        a = hi - gr * (hi - lo);
      }
    }
    const double peak = 0.5 * (lo + hi);
    const double rhs_max = std::min(1.0, gc_angle_rhs(peak));
    return PhiRange{peak, 2.0 * std::asin(rhs_max)};
  }();
  return range;
}

}  // namespace detail

/// Largest rotation angle θ attainable by the equal-angle commutator
/// construction; computed numerically at first use.
inline double solve_phi_theta_max() { return detail::phi_range().theta_max; }

/// Solves sin(θ/2) = 2 sin²(φ/2) √(1 - sin⁴(φ/2)) for the smallest φ ≥ 0,
/// by bisection on the initial monotone-increasing branch.
inline double solve_phi(double theta) {
  const auto& range = detail::phi_range();
  if (theta < 0.0 || theta > range.theta_max) {
    std::ostringstream os;
    os << "solve_phi: rotation angle " << theta
       << " outside the attainable range [0, " << range.theta_max << "]";
    throw PreconditionError(os.str());
  }
  const double target = std::sin(0.5 * theta);
  if (target == 0.0) return 0.0;
  double lo = 0.0, hi = range.phi_peak;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::gc_angle_rhs(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-17) break;
  }
  return 0.5 * (lo + hi);
}

/// Exact balanced group commutator on SU(2): finds v, w (rotations by the
/// same angle about conjugated x̂/ŷ axes) with v·w·v†·w† = U up to roundoff
/// and d(I,v) = d(I,w) = 2 sin(φ/4) ≈ √(d(I,U)/2).
inline GcPair gc_decompose_su2(const Unitary& u) {
  if (u.dim() != 2) throw UsageError("gc_decompose_su2: dimension must be 2");
  u.assert_special(1e-8);
  // Re-pin the determinant phase so axis extraction stays well-defined for
  // inputs assembled from long products.
  const AxisAngle target =
      to_axis_angle(project_su(u, Tolerances{.unitarity = 1e-7}));
  double phi = 0.0;
  try {
    phi = solve_phi(target.angle);
  } catch (const PreconditionError& e) {
    std::ostringstream os;
    os << "gc_decompose_su2: " << e.what()
       << " (the target is too far from the identity)";
    throw PreconditionError(os.str());
  }
  const Unitary vx = from_axis_angle({Eigen::Vector3d::UnitX(), phi});
  const Unitary wy = from_axis_angle({Eigen::Vector3d::UnitY(), phi});
  const Matrix comm = vx.matrix() * wy.matrix() * vx.matrix().adjoint() *
                      wy.matrix().adjoint();
  const AxisAngle comm_aa = to_axis_angle(Unitary(comm));

  // Conjugation carrying the commutator's axis onto the target's axis.
  // Degeneracy is judged by the cross-product norm, which resolves small
  // axis deviations linearly where the dot product saturates.
  const Eigen::Vector3d n = comm_aa.axis;
  const Eigen::Vector3d p = target.axis;
  const double c = n.dot(p);
  const Eigen::Vector3d cross = n.cross(p);
  Unitary s = Unitary::identity(2);
  if (cross.norm() > 1e-12) {
    const double beta = std::atan2(cross.norm(), c);
    s = from_axis_angle({cross.normalized(), beta});
  } else if (c < 0.0) {
    // Antipodal axes: rotate by π about any direction orthogonal to n.
    Eigen::Vector3d perp = n.cross(Eigen::Vector3d::UnitZ());
    if (perp.norm() < 1e-6) perp = Eigen::Vector3d::UnitX();
    s = from_axis_angle({perp.normalized(), std::numbers::pi});
  }
  const Matrix sm = s.matrix();
  Unitary v(sm * vx.matrix() * sm.adjoint());
  Unitary w(sm * wy.matrix() * sm.adjoint());
  const Matrix recon = v.matrix() * w.matrix() * v.matrix().adjoint() *
                       w.matrix().adjoint();
  const double residual = op_norm(recon - u.matrix());
  return GcPair{std::move(v), std::move(w), residual};
}

/// Solves [F, G] = iH for Hermitian F, G given traceless Hermitian H, with
/// ‖F‖ = ‖G‖ ≤ d^{1/4}((d-1)/2)^{1/2} √‖H‖.  Works in the basis Fourier
/// conjugate to H's eigenbasis, where H's diagonal vanishes; G is the
/// integer ladder diag(-(d-1)/2, ..., (d-1)/2) there, F is read off
/// entrywise, and both are rescaled to balance their norms.
inline std::pair<Hermitian, Hermitian> lie_solution(const Hermitian& h) {
  const int d = h.dim();
  const double norm = h.op_norm();
  if (std::abs(h.trace_real()) > 1e-9 * std::max(norm, 1e-300)) {
    std::ostringstream os;
    os << "lie_solution: H must be traceless (trace " << h.trace_real()
       << ", norm " << norm << ")";
    throw PreconditionError(os.str());
  }
  if (norm == 0.0) {
    return {Hermitian::zero(d), Hermitian::zero(d)};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  // Descending eigenvalue order for determinism.
  Eigen::VectorXd evals(d);
  Matrix p(d, d);
  for (int j = 0; j < d; ++j) {
    evals(j) = es.eigenvalues()(d - 1 - j);
    p.col(j) = es.eigenvectors().col(d - 1 - j);
  }
  Matrix fourier(d, d);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const double arg = 2.0 * std::numbers::pi * j * k / d;
      fourier(j, k) = inv_sqrt_d * Complex(std::cos(arg), std::sin(arg));
    }
  }
  const Eigen::VectorXcd evals_c = evals.cast<Complex>();
  const Matrix h_tilde = fourier * evals_c.asDiagonal() * fourier.adjoint();
  Eigen::VectorXd ladder(d);
  for (int j = 0; j < d; ++j) ladder(j) = -0.5 * (d - 1) + j;
  Matrix f_tilde = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      if (j == k) continue;
      f_tilde(j, k) = Complex(0.0, 1.0) * h_tilde(j, k) / (ladder(k) - ladder(j));
    }
  }
  const double f_norm = Hermitian(f_tilde).op_norm();
  const double g_norm = 0.5 * (d - 1);
  const double scale = std::sqrt(g_norm / f_norm);
  f_tilde *= scale;
  const Eigen::VectorXcd g_diag = (ladder / scale).cast<Complex>();
  const Matrix g_tilde = g_diag.asDiagonal();

  const Matrix q = p * fourier.adjoint();
  Matrix f = q * f_tilde * q.adjoint();
  Matrix g = q * g_tilde * q.adjoint();
  f = 0.5 * (f + f.adjoint().eval());
  g = 0.5 * (g + g.adjoint().eval());
  return {Hermitian(std::move(f)), Hermitian(std::move(g))};
}

/// Approximate balanced group commutator on SU(d): v·w·v†·w† approximates
/// the target with residual O(ε^{3/2}), where ε = d(I, target), and
/// d(I,v), d(I,w) = O(√ε).
inline GcPair gc_approx_decompose(const Unitary& u) {
  const int d = u.dim();
  const double eps = op_norm_distance(Unitary::identity(d), u);
  if (eps >= 0.5) {
    std::ostringstream os;
    os << "gc_approx_decompose: d(I, U) = " << eps
       << " is too large for a well-conditioned decomposition (need < 0.5)";
    throw PreconditionError(os.str());
  }
  const Unitary target = project_su(u, Tolerances{.unitarity = 1e-8});
  Hermitian h = herm_log(target);
  // Remove the roundoff remainder of the trace; the eigenphases of a
  // near-identity special unitary sum to zero exactly.
  Matrix hm = h.matrix();
  hm -= (hm.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
  // Solve [F,G] = -iH so that e^{iF} e^{iG} e^{-iF} e^{-iG} ≈ e^{+iH}.
  const auto [f, g] = lie_solution(Hermitian(-hm));
  Unitary v = matrix_exp(f);
  Unitary w = matrix_exp(g);
  const Matrix recon = v.matrix() * w.matrix() * v.matrix().adjoint() *
                       w.matrix().adjoint();
  const double residual = op_norm(recon - u.matrix());
  return GcPair{std::move(v), std::move(w), residual};
}

/// Evaluates the perturbed-commutator bound: given d(V,Ṽ), d(W,W̃) < Δ and
/// d(I,V), d(I,W) < δ, checks
///   d(VWV†W†, ṼW̃Ṽ†W̃†) < 8Δδ + 4Δδ² + 8Δ² + 4Δ³ + Δ⁴.
inline bool check_approx_comm_bound(const Unitary& v, const Unitary& w,
                                    const Unitary& v_tilde,
                                    const Unitary& w_tilde, double delta_cap,
                                    double delta_small) {
  const Matrix lhs_a = v.matrix() * w.matrix() * v.matrix().adjoint() *
                       w.matrix().adjoint();
  const Matrix lhs_b = v_tilde.matrix() * w_tilde.matrix() *
                       v_tilde.matrix().adjoint() * w_tilde.matrix().adjoint();
  const double lhs = op_norm(lhs_a - lhs_b);
  const double D = delta_cap, s = delta_small;
  const double rhs = 8.0 * D * s + 4.0 * D * s * s + 8.0 * D * D +
                     4.0 * D * D * D + D * D * D * D;
  return lhs < rhs;
}

}  // namespace skc
