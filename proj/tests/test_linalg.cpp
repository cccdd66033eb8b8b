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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "skc/rng.hpp"
#include "skc/unitary.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace skc;

namespace {

Unitary rz(double angle) {
  return from_axis_angle({Eigen::Vector3d::UnitZ(), angle});
}

}  // namespace

TEST_CASE("op_norm_distance on identical and diagonal cases", "[linalg]") {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Unitary u = haar_su(rng, 2 + i % 3);
    CHECK(op_norm_distance(u, u) == 0.0);
  }
  // exp(i(π/2)Z) has eigenphases ±π/2, so d(I, ·) = 2 sin(π/4) = √2.
  const Unitary u = matrix_exp(
      Hermitian(0.5 * std::numbers::pi * testing::pauli_z()));
  CHECK_THAT(op_norm_distance(Unitary::identity(2), u),
             Catch::Matchers::WithinAbs(std::numbers::sqrt2, 1e-12));
}

TEST_CASE("op_norm_distance matches the eigenphase formula", "[linalg]") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const int d = 2 + i % 3;
    const Hermitian h = random_traceless_hermitian(rng, d, 0.05 + 0.2 * rng.uniform());
    const double via_svd = op_norm_distance(Unitary::identity(d), matrix_exp(h));
    const double via_phases = oracle::distance_from_identity_by_phases(h);
    CHECK_THAT(via_svd, Catch::Matchers::WithinAbs(via_phases, 1e-12));
  }
}

TEST_CASE("op_norm_distance is a bi-invariant metric", "[linalg]") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    const Unitary a = haar_su(rng, d), b = haar_su(rng, d), c = haar_su(rng, d);
    const double ab = op_norm_distance(a, b);
    CHECK_THAT(op_norm_distance(b, a), Catch::Matchers::WithinAbs(ab, 1e-12));
    CHECK(ab <= op_norm_distance(a, c) + op_norm_distance(c, b) + 1e-12);
    CHECK_THAT(op_norm_distance(c * a, c * b), Catch::Matchers::WithinAbs(ab, 1e-12));
    CHECK_THAT(op_norm_distance(a * c, b * c), Catch::Matchers::WithinAbs(ab, 1e-12));
  }
  CHECK_THROWS_AS(
      op_norm_distance(Unitary::identity(2), Unitary::identity(3)), UsageError);
}

TEST_CASE("project_su fixes the determinant on a canonical branch", "[linalg]") {
  const Unitary id = Unitary::identity(3);
  CHECK(detail::max_abs_entry(project_su(id).matrix() - id.matrix()) == 0.0);

  // det(H) = -1, arg = π, so the projection multiplies by e^{-iπ/2} = -i.
  const Unitary h(testing::hadamard());
  const Unitary h_su = project_su(h);
  CHECK(std::abs(h_su.matrix().determinant() - Complex(1.0)) <= 1e-12);
  CHECK(detail::max_abs_entry(h_su.matrix() - Complex(0, -1) * h.matrix()) <=
        1e-12);

  Rng rng(4);
  const Unitary base = haar_su(rng, 3);
  for (double alpha = -0.2; alpha <= 0.2; alpha += 0.04) {
    const Unitary shifted(std::exp(Complex(0, alpha)) * base.matrix());
    CHECK(detail::max_abs_entry(project_su(shifted).matrix() -
                                project_su(base).matrix()) <= 1e-12);
  }
  CHECK_THROWS_AS(Unitary(2.0 * Matrix::Identity(2, 2)), PreconditionError);
}

TEST_CASE("herm_log principal branch", "[linalg]") {
  CHECK(Hermitian(herm_log(Unitary::identity(4)).matrix()).op_norm() <= 1e-12);

  const Hermitian gen(0.5 * std::numbers::pi * testing::pauli_z());
  const Hermitian back = herm_log(matrix_exp(gen));
  CHECK(detail::max_abs_entry(back.matrix() - gen.matrix()) <= 1e-12);

  // ‖log‖ approximates the distance with relative error O(d(I,U)²).
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    const Unitary u = matrix_exp(random_traceless_hermitian(
        rng, d, 0.02 + 0.27 * rng.uniform()));
    const double dist = op_norm_distance(Unitary::identity(d), u);
    const double log_norm = herm_log(u).op_norm();
    CHECK(std::abs(log_norm - dist) <= dist * dist * dist);  // dist·O(dist²)
  }
}

TEST_CASE("herm_log flags the branch cut and keeps trace in 2πZ", "[linalg]") {
  bool flagged = false;
  const Unitary minus_i(-Matrix::Identity(2, 2));
  const Hermitian log_minus = herm_log(minus_i, &flagged);
  CHECK(flagged);
  CHECK_THAT(log_minus.trace_real(),
             Catch::Matchers::WithinAbs(2.0 * std::numbers::pi, 1e-10));
  CHECK(detail::max_abs_entry(matrix_exp(log_minus).matrix() -
                              minus_i.matrix()) <= 1e-10);

  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const Unitary u = haar_su(rng, 3);
    bool hit = false;
    const Hermitian h = herm_log(u, &hit);
    const double tr = h.trace_real();
    const double nearest = std::round(tr / (2.0 * std::numbers::pi));
    CHECK(std::abs(tr - 2.0 * std::numbers::pi * nearest) <= 1e-9);
    if (!hit) CHECK(std::abs(tr) <= 1e-9);
    CHECK(detail::max_abs_entry(matrix_exp(h).matrix() - u.matrix()) <= 1e-10);
  }
}

TEST_CASE("matrix_exp produces unitaries; log/exp round trips", "[linalg]") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    const Hermitian h = random_traceless_hermitian(rng, d, 3.0 * rng.uniform());
    const Unitary u = matrix_exp(h);
    CHECK(detail::max_abs_entry(u.matrix().adjoint() * u.matrix() -
                                Matrix::Identity(d, d)) <= 1e-12);
    // d(I, exp(iH)) ≤ ‖H‖ for norms up to 10.
    const Hermitian big = random_traceless_hermitian(rng, d, 10.0 * rng.uniform());
    CHECK(op_norm_distance(Unitary::identity(d), matrix_exp(big)) <=
          big.op_norm() + 1e-12);
    // herm_log ∘ matrix_exp is the identity for spectrum inside (-π, π).
    const Hermitian mid = random_traceless_hermitian(
        rng, d, (0.95 * std::numbers::pi) * rng.uniform());
    CHECK(detail::max_abs_entry(herm_log(matrix_exp(mid)).matrix() -
                                mid.matrix()) <= 1e-10);
  }
}

TEST_CASE("axis-angle extraction and construction", "[linalg]") {
  const AxisAngle id_aa = to_axis_angle(Unitary::identity(2));
  CHECK(id_aa.angle == 0.0);
  CHECK(id_aa.axis == Eigen::Vector3d::UnitZ());

  // Rotation by π about x̂ is -iX.
  const Unitary rx_pi =
      from_axis_angle({Eigen::Vector3d::UnitX(), std::numbers::pi});
  CHECK(detail::max_abs_entry(rx_pi.matrix() -
                              Complex(0, -1) * testing::pauli_x()) <= 1e-15);

  const AxisAngle anti = to_axis_angle(Unitary(-Matrix::Identity(2, 2)));
  CHECK_THAT(anti.angle, Catch::Matchers::WithinAbs(2.0 * std::numbers::pi, 0.0));
  CHECK(anti.axis == Eigen::Vector3d::UnitZ());

  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    const Unitary u = haar_su(rng, 2);
    const AxisAngle aa = to_axis_angle(u);
    CHECK(std::abs(aa.axis.norm() - 1.0) <= 1e-12);
    CHECK((aa.angle >= 0.0 && aa.angle <= 2.0 * std::numbers::pi));
    CHECK(op_norm_distance(from_axis_angle(aa), u) <= 1e-12);
  }
}

TEST_CASE("composing rotations matches the quaternion product", "[linalg]") {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const Unitary a = haar_su(rng, 2), b = haar_su(rng, 2);
    const oracle::Quat expected = oracle::quat_mul(oracle::quat_of(a),
                                                   oracle::quat_of(b));
    const oracle::Quat actual = oracle::quat_of(a * b);
    CHECK(oracle::quat_dist(expected, actual) <= 1e-12);
    // Re-extracted angle agrees with the oracle product's scalar part.
    const AxisAngle aa = to_axis_angle(a * b);
    CHECK_THAT(std::cos(0.5 * aa.angle),
               Catch::Matchers::WithinAbs(expected.w, 1e-12));
  }
}

TEST_CASE("quaternion embedding is an isometry", "[linalg]") {
  CHECK((quaternion_embed(Unitary::identity(2)) -
         Eigen::Vector4d(1, 0, 0, 0)).norm() == 0.0);
  CHECK((quaternion_embed(Unitary(-Matrix::Identity(2, 2))) -
         Eigen::Vector4d(-1, 0, 0, 0)).norm() == 0.0);

  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const Unitary a = haar_su(rng, 2), b = haar_su(rng, 2);
    const double embed_dist = (quaternion_embed(a) - quaternion_embed(b)).norm();
    CHECK_THAT(op_norm_distance(a, b),
               Catch::Matchers::WithinAbs(embed_dist, 1e-12));
    CHECK(op_norm_distance(quaternion_unembed(quaternion_embed(a)), a) <= 1e-14);
  }
}
