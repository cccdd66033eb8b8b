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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include "skc/errors.hpp"

namespace skc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Numerical tolerances used when validating matrix invariants.  The
/// defaults work well with standard double arithmetic; they can be relaxed
/// for values assembled from long products, where roundoff accumulates.
struct Tolerances {
  double unitarity = 1e-12;    ///< max-entry deviation of U†U from I
  double determinant = 1e-10;  ///< |det(U) - 1| for special unitaries
  double hermiticity = 1e-12;  ///< max-entry deviation of H from H†
};

namespace detail {

inline double max_abs_entry(const Matrix& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace detail

/// A dense d-by-d unitary matrix.  Unitarity is checked at construction;
/// the special-unitary (det = 1) property is checked on demand because
/// inputs may arrive with an arbitrary global phase before projection.
class Unitary {
 public:
  explicit Unitary(Matrix m, const Tolerances& tol = {}) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
      throw UsageError("Unitary: matrix must be square and non-empty");
    }
    const Matrix gram = m_.adjoint() * m_;
    const double dev = detail::max_abs_entry(
        gram - Matrix::Identity(m_.rows(), m_.cols()));
    if (dev > tol.unitarity) {
      std::ostringstream os;
      os << "Unitary: U†U deviates from identity by " << dev
         << " (tolerance " << tol.unitarity << ")";
      throw PreconditionError(os.str());
    }
  }

  static Unitary identity(int dim) { return Unitary(Matrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  Unitary adjoint() const { return Unitary(m_.adjoint()); }

  Unitary operator*(const Unitary& rhs) const {
    return Unitary(m_ * rhs.m_, Tolerances{.unitarity = 1e-11});
  }

  bool is_special(double det_tol = Tolerances{}.determinant) const {
    return std::abs(m_.determinant() - Complex(1.0, 0.0)) <= det_tol;
  }

  /// Throws unless det(U) = 1 within tolerance.
  void assert_special(double det_tol = Tolerances{}.determinant) const {
    if (!is_special(det_tol)) {
      std::ostringstream os;
      os << "expected a special unitary: |det - 1| = "
         << std::abs(m_.determinant() - Complex(1.0, 0.0)) << " exceeds "
         << det_tol;
      throw PreconditionError(os.str());
    }
  }

 private:
  Matrix m_;
};

/// A dense d-by-d Hermitian matrix, validated at construction.
class Hermitian {
 public:
  explicit Hermitian(Matrix m, const Tolerances& tol = {}) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
      throw UsageError("Hermitian: matrix must be square and non-empty");
    }
    const double dev = detail::max_abs_entry(m_ - m_.adjoint().eval());
    if (dev > tol.hermiticity) {
      std::ostringstream os;
      os << "Hermitian: H deviates from H† by " << dev << " (tolerance "
         << tol.hermiticity << ")";
      throw PreconditionError(os.str());
    }
    // Symmetrize so downstream eigensolvers see an exactly Hermitian matrix.
    m_ = 0.5 * (m_ + m_.adjoint().eval());
  }

  static Hermitian zero(int dim) { return Hermitian(Matrix::Zero(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  /// Operator norm: the largest |eigenvalue|.
  double op_norm() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

  double trace_real() const { return m_.trace().real(); }

 private:
  Matrix m_;
};

/// Axis-angle form of an SU(2) element: U = cos(a/2) I - i sin(a/2) (n·σ).
/// The angle lives in [0, 2π] so that the antipode -I (angle 2π) is
/// representable; the axis is a unit 3-vector, defaulted to ẑ when the
/// rotation is trivial.
struct AxisAngle {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0.0;
};

/// Operator-norm distance d(A,B) = largest singular value of A - B.
/// Computed by SVD of the difference, uniformly across dimensions.
inline double op_norm_distance(const Unitary& a, const Unitary& b) {
  if (a.dim() != b.dim()) {
    throw UsageError("op_norm_distance: dimension mismatch");
  }
  const Matrix diff = a.matrix() - b.matrix();
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues()(0);
}

/// Operator norm of an arbitrary matrix (largest singular value).
inline double op_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// Removes the global phase of a unitary: returns e^{-i·arg(det U)/d} · U,
/// which has determinant 1.  The branch is canonical: arg takes values in
/// (-π, π], so the result is deterministic, with a discontinuity surface
/// where arg(det) crosses ±π.
inline Unitary project_su(const Unitary& u, const Tolerances& tol = {}) {
  const Complex det = u.matrix().determinant();
  if (std::abs(det) < 0.5) {
    throw PreconditionError("project_su: determinant unexpectedly small");
  }
  const double phase = std::arg(det);
  const int d = u.dim();
  const Complex factor = std::exp(Complex(0.0, -phase / d));
  return Unitary(factor * u.matrix(), tol);
}

/// Principal Hermitian logarithm: returns H with exp(iH) = U and all
/// eigenvalues of H in (-π, π].  An eigenphase within 1e-9 of π is a
/// branch ambiguity; it is still resolved deterministically, and reported
/// through `branch_cut_hit` when the caller provides it.
inline Hermitian herm_log(const Unitary& u, bool* branch_cut_hit = nullptr) {
  u.assert_special();
  const int d = u.dim();
  // A unitary is normal, so its Schur form is diagonal (to roundoff) and
  // the Schur basis is orthonormal by construction.
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  const Matrix& q = schur.matrixU();
  Eigen::VectorXd phases(d);
  bool hit = false;
  for (int j = 0; j < d; ++j) {
    const Complex lambda = schur.matrixT()(j, j);
    double phase = std::arg(lambda);
    // Pin the cut: a phase at -π (signed zeros, roundoff on eigenvalues
    // near -1) belongs to the +π side.  exp(iH) is unaffected.
    if (phase <= -std::numbers::pi + 1e-12) phase += 2.0 * std::numbers::pi;
    phases(j) = phase;
    if (std::numbers::pi - std::abs(phase) <= 1e-9) hit = true;
  }
  if (branch_cut_hit != nullptr) *branch_cut_hit = hit;
  const Eigen::VectorXcd phases_c = phases.cast<Complex>();
  Matrix h = q * phases_c.asDiagonal() * q.adjoint();
  h = 0.5 * (h + h.adjoint().eval());
  return Hermitian(std::move(h));
}

/// exp(iH) via eigendecomposition of the Hermitian argument.
inline Unitary matrix_exp(const Hermitian& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  const Eigen::VectorXd& evals = es.eigenvalues();
  Eigen::VectorXcd diag(h.dim());
  for (int j = 0; j < h.dim(); ++j) {
    diag(j) = std::exp(Complex(0.0, evals(j)));
  }
  return Unitary(es.eigenvectors() * diag.asDiagonal() *
                 es.eigenvectors().adjoint());
}

/// Real 4-vector q with U = q0 I + i (q1 X + q2 Y + q3 Z).  This is a
/// bijection between SU(2) and the unit 3-sphere under which the
/// operator-norm distance equals the Euclidean distance of the embeddings.
inline Eigen::Vector4d quaternion_embed(const Unitary& u) {
  if (u.dim() != 2) throw UsageError("quaternion_embed: dimension must be 2");
  const Matrix& m = u.matrix();
  Eigen::Vector4d q;
  q(0) = 0.5 * (m(0, 0).real() + m(1, 1).real());
  q(1) = 0.5 * (m(0, 1).imag() + m(1, 0).imag());
  q(2) = 0.5 * (m(0, 1).real() - m(1, 0).real());
  q(3) = 0.5 * (m(0, 0).imag() - m(1, 1).imag());
  return q;
}

/// Inverse of quaternion_embed.  Exact: the entries of the matrix are
/// sums/differences of the components, with no rounding.
inline Unitary quaternion_unembed(const Eigen::Vector4d& q) {
  Matrix m(2, 2);
  m(0, 0) = Complex(q(0), q(3));
  m(0, 1) = Complex(q(2), q(1));
  m(1, 0) = Complex(-q(2), q(1));
  m(1, 1) = Complex(q(0), -q(3));
  return Unitary(std::move(m), Tolerances{.unitarity = 1e-9});
}

/// Extracts the rotation axis and angle of an SU(2) element,
/// U = cos(a/2) I - i sin(a/2) (n·σ).  U = ±I maps to angle 0 (resp. 2π)
/// with the axis defaulted to ẑ.
inline AxisAngle to_axis_angle(const Unitary& u) {
  if (u.dim() != 2) throw UsageError("to_axis_angle: dimension must be 2");
  u.assert_special();
  const Eigen::Vector4d q = quaternion_embed(u);
  const Eigen::Vector3d v(q(1), q(2), q(3));
  const double s = v.norm();  // sin(angle/2) >= 0 on [0, 2π]
  AxisAngle aa;
  if (s < 1e-14) {
    aa.axis = Eigen::Vector3d::UnitZ();
    aa.angle = q(0) >= 0.0 ? 0.0 : 2.0 * std::numbers::pi;
    return aa;
  }
  aa.angle = 2.0 * std::atan2(s, q(0));
  aa.axis = -v / s;
  return aa;
}

/// Builds the SU(2) rotation U = cos(a/2) I - i sin(a/2) (n·σ).
inline Unitary from_axis_angle(const AxisAngle& aa) {
  if (std::abs(aa.axis.norm() - 1.0) > 1e-12) {
    throw PreconditionError("from_axis_angle: axis must be a unit vector");
  }
  const double c = std::cos(0.5 * aa.angle);
  const double s = std::sin(0.5 * aa.angle);
  const double nx = aa.axis(0), ny = aa.axis(1), nz = aa.axis(2);
  Matrix m(2, 2);
  m(0, 0) = Complex(c, -s * nz);
  m(0, 1) = Complex(-s * ny, -s * nx);
  m(1, 0) = Complex(s * ny, -s * nx);
  m(1, 1) = Complex(c, s * nz);
  return Unitary(std::move(m));
}

}  // namespace skc
