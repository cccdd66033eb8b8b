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

#include "skc/gates.hpp"
#include "skc/rng.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace skc;

namespace {

GateSequence random_sequence(Rng& rng, const InstructionSet& set, int len) {
  GateSequence seq;
  for (int i = 0; i < len; ++i) {
    seq.gates.push_back(static_cast<std::int32_t>(rng.raw() % set.size()));
  }
  return seq;
}

}  // namespace

TEST_CASE("instruction set: H, T, T_dag closes with a synthesized H_dag",
          "[gates]") {
  std::vector<std::string> warnings;
  const InstructionSet set = InstructionSet::create(
      2,
      {{"H", testing::hadamard()},
       {"T", testing::t_gate()},
       {"T_dag", testing::t_gate().adjoint()}},
      {}, &warnings);

  // All three inputs carry a global phase (det != 1), so each gets
  // projected; in SU(2) the projected Hadamard squares to -I, so its true
  // inverse -H is synthesized as a fourth gate.
  REQUIRE(set.size() == 4);
  CHECK(set.gate(3).name == "H_dag");
  CHECK(set.inverse_of(0) == 3);
  CHECK(set.inverse_of(3) == 0);
  CHECK(set.inverse_of(1) == 2);
  CHECK(set.inverse_of(2) == 1);
  for (const Gate& g : set.gates()) {
    CHECK(g.unitary.is_special(1e-12));
    CHECK(op_norm_distance(set.gate(g.inverse_index).unitary,
                           g.unitary.adjoint()) <= 1e-10);
  }
  CHECK(warnings.size() == 4);  // three projections + universality note
}

TEST_CASE("instruction set error paths", "[gates]") {
  CHECK_THROWS_AS(InstructionSet::create(2, {}), UsageError);
  CHECK_THROWS_AS(
      InstructionSet::create(
          2, {{"A", testing::hadamard()}, {"A", testing::t_gate()}}),
      UsageError);
  CHECK_THROWS_AS(
      InstructionSet::create(3, {{"A", testing::hadamard()}}), UsageError);
  Matrix bad(2, 2);
  bad << Complex(1, 0), Complex(0.5, 0), Complex(0, 0), Complex(1, 0);
  CHECK_THROWS_AS(InstructionSet::create(2, {{"A", bad}}), UsageError);
}

TEST_CASE("single-gate file auto-completes to an inverse pair", "[gates]") {
  const InstructionSet set = InstructionSet::create(2, {{"T", testing::t_gate()}});
  REQUIRE(set.size() == 2);
  CHECK(set.gate(1).name == "T_dag");
  const Matrix prod = set.gate(0).unitary.matrix() * set.gate(1).unitary.matrix();
  CHECK(detail::max_abs_entry(prod - Matrix::Identity(2, 2)) <= 1e-12);
}

TEST_CASE("evaluate and invert", "[gates]") {
  const InstructionSet& set = testing::ht_set();
  CHECK(invert(GateSequence{}, set).gates.empty());

  // invert([H, T]) reverses and maps each gate to its strict inverse.
  GateSequence ht;
  ht.gates = {0, 1};
  const GateSequence inv = invert(ht, set);
  REQUIRE(inv.gates.size() == 2);
  CHECK(set.gate(inv.gates[0]).name == "T_dag");
  CHECK(set.gate(inv.gates[1]).name == "H_dag");

  Rng rng(20);
  for (int trial = 0; trial < 50; ++trial) {
    const GateSequence seq = random_sequence(rng, set, 20);
    const GateSequence rev = invert(seq, set);
    CHECK(invert(rev, set) == seq);  // involution
    const Matrix prod = evaluate(rev, set).matrix() * evaluate(seq, set).matrix();
    CHECK(detail::max_abs_entry(prod - Matrix::Identity(2, 2)) <= 1e-9);
    CHECK(op_norm_distance(evaluate(rev, set),
                           evaluate(seq, set).adjoint()) <= 1e-10 * 20);
  }
}

TEST_CASE("evaluate distributes over concatenation", "[gates]") {
  const InstructionSet& set = testing::ht_set();
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const GateSequence a = random_sequence(rng, set, 7);
    const GateSequence b = random_sequence(rng, set, 9);
    const Unitary lhs = evaluate(concat(a, b), set);
    const Unitary rhs = evaluate(a, set) * evaluate(b, set);
    CHECK(op_norm_distance(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("cached unitary equals the evaluated product", "[gates]") {
  const InstructionSet& set = testing::ht_set();
  Rng rng(22);
  GateSequence seq = random_sequence(rng, set, 40);
  const Matrix& cached = evaluate_cached(seq, set);
  CHECK(detail::max_abs_entry(cached - evaluate(seq, set).matrix()) <=
        1e-10 * 40);
}

TEST_CASE("simplify cancels adjacent inverse pairs to a fixed point",
          "[gates]") {
  const InstructionSet& set = testing::ht_set();
  const int h = 0, t = 1, t_dag = 2, h_dag = 3;

  GateSequence s1;
  s1.gates = {t, t_dag};
  CHECK(simplify(s1, set).gates.empty());

  GateSequence s2;
  s2.gates = {h, t, t_dag, h_dag};
  CHECK(simplify(s2, set).gates.empty());

  // In strict SU(2), H·H = -I, so adjacent H H does not cancel.
  GateSequence s3;
  s3.gates = {h, t, t_dag, h};
  const GateSequence r3 = simplify(s3, set);
  REQUIRE(r3.gates.size() == 2);
  CHECK(detail::max_abs_entry(evaluate(r3, set).matrix() +
                              Matrix::Identity(2, 2)) <= 1e-12);

  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const GateSequence seq = random_sequence(rng, set, 30);
    const GateSequence reduced = simplify(seq, set);
    CHECK(reduced.gates.size() <= seq.gates.size());
    CHECK(simplify(reduced, set) == reduced);  // idempotent
    CHECK(op_norm_distance(evaluate(reduced, set), evaluate(seq, set)) <= 1e-9);
  }
}

TEST_CASE("sequence text round trips in both orders", "[gates]") {
  const InstructionSet& set = testing::ht_set();
  GateSequence seq;
  seq.gates = {0, 1, 1, 2};
  CHECK(format_sequence(seq, set) == "H T T T_dag");
  CHECK(format_sequence(seq, set, SequenceOrder::circuit) == "T_dag T T H");
  CHECK(parse_sequence("H T T T_dag", set) == seq);
  CHECK(parse_sequence("T_dag T T H", set, SequenceOrder::circuit) == seq);
  CHECK_THROWS_AS(parse_sequence("H X", set), UsageError);
}

TEST_CASE("matrix literal text round trips bit-exactly", "[gates]") {
  Rng rng(24);
  for (const int d : {2, 3}) {
    const Unitary u = haar_su(rng, d);
    const Matrix parsed = parse_matrix_literal(format_matrix_literal(u.matrix()));
    CHECK(parsed == u.matrix());
  }
  CHECK_THROWS_AS(parse_matrix_literal("1,0 0,1 0,0"), UsageError);
  CHECK_THROWS_AS(parse_matrix_literal("1,x 0,1 0,0 1,0"), UsageError);
}

TEST_CASE("gate-set JSON round trips through the parser", "[gates]") {
  const InstructionSet& set = testing::ht_set();
  const std::string text = gateset_to_json(set).dump();
  const InstructionSet back = parse_instruction_set(text);
  REQUIRE(back.size() == set.size());
  CHECK(back.fingerprint() == set.fingerprint());
  CHECK_THROWS_AS(parse_instruction_set("{"), UsageError);
  CHECK_THROWS_AS(parse_instruction_set("{\"dim\": 2, \"gates\": []}"),
                  UsageError);
}
