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
#include <cstdint>
#include <numbers>
#include <random>

#include "skc/unitary.hpp"

namespace skc {

/// Seeded random source.  The uniform and Gaussian mappings are spelled
/// out (rather than using std::*_distribution) so that a seed produces
/// identical streams on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Haar-random element of SU(d): QR of a complex Ginibre matrix with the
/// usual phase correction of the R diagonal, then global-phase projection.
inline Unitary haar_su(Rng& rng, int dim) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Complex(rng.gauss(), rng.gauss());
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex rj = r(j, j);
    if (std::abs(rj) < 1e-300) rj = Complex(1.0, 0.0);
    q.col(j) *= rj / std::abs(rj);
  }
  return project_su(Unitary(std::move(q), Tolerances{.unitarity = 1e-11}),
                    Tolerances{.unitarity = 1e-11});
}

/// Random Hermitian with GUE-distributed direction, zero trace, and the
/// requested operator norm (0 simply returns the zero matrix).
inline Hermitian random_traceless_hermitian(Rng& rng, int dim,
                                            double target_op_norm) {
  Matrix h(dim, dim);
  for (int i = 0; i < dim; ++i) {
    h(i, i) = Complex(rng.gauss(), 0.0);
    for (int j = i + 1; j < dim; ++j) {
      const Complex z(rng.gauss(), rng.gauss());
      h(i, j) = z / std::sqrt(2.0);
      h(j, i) = std::conj(h(i, j));
    }
  }
  const Complex tr = h.trace();
  h -= (tr / static_cast<double>(dim)) * Matrix::Identity(dim, dim);
  Hermitian direction(std::move(h));
  const double norm = direction.op_norm();
  if (norm < 1e-300 || target_op_norm == 0.0) {
    return Hermitian::zero(dim);
  }
  return Hermitian(direction.matrix() * (target_op_norm / norm));
}

/// Haar-random SU(2) element at a prescribed operator-norm distance from
/// the identity: a rotation by 4·asin(dist/2) about a uniform axis.
inline Unitary random_su2_at_distance(Rng& rng, double dist) {
  const double theta = 4.0 * std::asin(0.5 * dist);
  Eigen::Vector3d axis;
  double n = 0.0;
  do {
    axis = Eigen::Vector3d(rng.gauss(), rng.gauss(), rng.gauss());
    n = axis.norm();
  } while (n < 1e-12);
  axis /= n;
  return from_axis_angle(AxisAngle{axis, theta});
}

}  // namespace skc
