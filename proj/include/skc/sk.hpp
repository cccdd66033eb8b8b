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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "skc/basic_net.hpp"
#include "skc/commutator.hpp"
#include "skc/errors.hpp"
#include "skc/gates.hpp"
#include "skc/rng.hpp"
#include "skc/unitary.hpp"

namespace skc {

/// How the required base accuracy of a net is judged before compiling.
enum class Eps0Mode {
  strict,      ///< enforce the provable bound ε₀ < 1/c_approx²
  calibrated,  ///< accept the empirically sufficient measured ε₀
};

/// A node of the shared compilation DAG: either a reference into the basic
/// net (level 0) or a commutator assembly V·W·V†·W†·U_prev whose children
/// are shared, never copied.  The adjoint halves are materialized only at
/// flatten time, via inversion flags.
struct CompileNode {
  int level = 0;
  std::int32_t entry_index = -1;  // >= 0 marks a basic node
  std::shared_ptr<const CompileNode> v, w, u_prev;
  Matrix unitary;  // achieved product, evaluated from the children

  bool is_basic() const { return entry_index >= 0; }
};

using CompileNodePtr = std::shared_ptr<const CompileNode>;

/// Counters and per-level self time of one compile call.
struct SkStats {
  std::size_t basic_evaluations = 0;
  std::size_t gc_decompositions = 0;
  std::vector<double> level_seconds;
};

inline double eps0_threshold(const SkConstants& consts, Eps0Mode mode) {
  return mode == Eps0Mode::strict ? consts.eps0_bound : consts.eps0_accept;
}

/// Checks that the net has been audited and is fine enough for the mode.
inline void validate_net_for_compile(const BasicNet& net,
                                     const SkConstants& consts, Eps0Mode mode) {
  if (!net.measured_eps0().has_value()) {
    throw PreconditionError(
        "compile: the net has no measured eps0; audit it first");
  }
  const double threshold = eps0_threshold(consts, mode);
  if (*net.measured_eps0() > threshold) {
    std::ostringstream os;
    os << "compile: measured eps0 = " << *net.measured_eps0() << " exceeds the "
       << (mode == Eps0Mode::strict ? "strict bound 1/c_approx^2 = "
                                    : "calibrated acceptance ")
       << threshold << "; build a finer net (larger l0) or relax the mode";
    throw PreconditionError(os.str());
  }
}

namespace detail {

class LevelTimer {
 public:
  LevelTimer(SkStats* stats, int level) : stats_(stats), level_(level) {
    if (stats_ != nullptr) start_ = std::chrono::steady_clock::now();
  }
  ~LevelTimer() {
    if (stats_ == nullptr) return;
    const auto end = std::chrono::steady_clock::now();
    if (static_cast<int>(stats_->level_seconds.size()) <= level_) {
      stats_->level_seconds.resize(level_ + 1, 0.0);
    }
    stats_->level_seconds[level_] +=
        std::chrono::duration<double>(end - start_).count();
  }

 private:
  SkStats* stats_;
  int level_;
  std::chrono::steady_clock::time_point start_;
};

inline CompileNodePtr sk_recurse(const Matrix& u, int n, const BasicNet& net,
                                 SkStats* stats) {
  auto node = std::make_shared<CompileNode>();
  node->level = n;
  if (n == 0) {
    const LevelTimer timer(stats, 0);
    const auto res =
        net.lookup(Unitary(u, Tolerances{.unitarity = 1e-7}));
    node->entry_index = static_cast<std::int32_t>(res.index);
    node->unitary = net.entry_unitary(res.index).matrix();
    if (stats != nullptr) ++stats->basic_evaluations;
    return node;
  }
  node->u_prev = sk_recurse(u, n - 1, net, stats);
  GcPair gc = [&] {
    const LevelTimer timer(stats, n);
    const Matrix delta = u * node->u_prev->unitary.adjoint();
    const Unitary delta_u(delta, Tolerances{.unitarity = 1e-7});
    try {
      if (stats != nullptr) ++stats->gc_decompositions;
      return net.dim() == 2 ? gc_decompose_su2(delta_u)
                            : gc_approx_decompose(delta_u);
    } catch (const PreconditionError& e) {
      std::ostringstream os;
      os << "level " << n << ": residual step is outside the decomposition "
         << "precondition (the base net is too coarse): " << e.what();
      throw PreconditionError(os.str());
    }
  }();
  node->v = sk_recurse(gc.v.matrix(), n - 1, net, stats);
  node->w = sk_recurse(gc.w.matrix(), n - 1, net, stats);
  {
    const LevelTimer timer(stats, n);
    node->unitary = node->v->unitary * node->w->unitary *
                    node->v->unitary.adjoint() * node->w->unitary.adjoint() *
                    node->u_prev->unitary;
  }
  return node;
}

inline void flatten_into(const CompileNode& node, const BasicNet& net,
                         bool inverted, std::vector<std::int32_t>* out) {
  if (node.is_basic()) {
    const GateSequence seq = net.entry_sequence(node.entry_index);
    if (!inverted) {
      out->insert(out->end(), seq.gates.begin(), seq.gates.end());
    } else {
      for (auto it = seq.gates.rbegin(); it != seq.gates.rend(); ++it) {
        out->push_back(net.set().inverse_of(*it));
      }
    }
    return;
  }
  // Product-order listing of V·W·V†·W†·U, or of its adjoint U†·W·V·W†·V†.
  if (!inverted) {
    flatten_into(*node.v, net, false, out);
    flatten_into(*node.w, net, false, out);
    flatten_into(*node.v, net, true, out);
    flatten_into(*node.w, net, true, out);
    flatten_into(*node.u_prev, net, false, out);
  } else {
    flatten_into(*node.u_prev, net, true, out);
    flatten_into(*node.w, net, false, out);
    flatten_into(*node.v, net, false, out);
    flatten_into(*node.w, net, true, out);
    flatten_into(*node.v, net, true, out);
  }
}

inline std::uint64_t raw_length_memo(
    const CompileNode& node, const BasicNet& net,
    std::map<const CompileNode*, std::uint64_t>* memo) {
  const auto it = memo->find(&node);
  if (it != memo->end()) return it->second;
  std::uint64_t len = 0;
  if (node.is_basic()) {
    len = net.entry_sequence(node.entry_index).length();
  } else {
    len = 2 * raw_length_memo(*node.v, net, memo) +
          2 * raw_length_memo(*node.w, net, memo) +
          raw_length_memo(*node.u_prev, net, memo);
  }
  memo->emplace(&node, len);
  return len;
}

}  // namespace detail

/// The recursion: at depth 0 return the basic approximation; above that,
/// improve the previous level's result by approximating the residual
/// rotation Δ = U·U_prev† with a balanced group commutator compiled one
/// level down.  Children are shared, so a depth-n call costs O(3^n)
/// level-0 evaluations while the flattened sequence grows as O(5^n).
inline CompileNodePtr solovay_kitaev(const Unitary& u, int n,
                                     const BasicNet& net,
                                     const SkConstants& consts,
                                     Eps0Mode mode = Eps0Mode::calibrated,
                                     SkStats* stats = nullptr) {
  if (n < 0) throw UsageError("solovay_kitaev: depth must be non-negative");
  if (u.dim() != net.dim()) {
    throw UsageError("solovay_kitaev: target dimension does not match the net");
  }
  u.assert_special(1e-8);
  validate_net_for_compile(net, consts, mode);
  return detail::sk_recurse(u.matrix(), n, net, stats);
}

/// Depth-first emission of the node's sequence, honoring inversion flags,
/// followed by inverse-pair cancellation.
inline GateSequence flatten(const CompileNode& node, const BasicNet& net,
                            bool simplify_output = true) {
  GateSequence seq;
  detail::flatten_into(node, net, false, &seq.gates);
  if (simplify_output) return simplify(seq, net.set());
  return seq;
}

/// Unsimplified flattened gate count, without materializing the sequence.
inline std::uint64_t raw_length(const CompileNode& node, const BasicNet& net) {
  std::map<const CompileNode*, std::uint64_t> memo;
  return detail::raw_length_memo(node, net, &memo);
}

/// Closed-form predictions of the recursion's behaviour at depth n.
struct Prediction {
  double eps;         ///< ε_n = (1/c²)(ε₀ c²)^{(3/2)^n}
  double length;      ///< l_n = 5^n l₀
  double time_class;  ///< t_n-class: 3^n level-0 evaluations
};

inline constexpr double kLengthExponent = 3.9693622959161177;  // ln5/ln(3/2)
inline constexpr double kTimeExponent = 2.709511291351455;     // ln3/ln(3/2)

inline Prediction predict_with_c(double c, double eps0, double l0, int n) {
  const double c2 = c * c;
  const double eps = (1.0 / c2) * std::pow(eps0 * c2, std::pow(1.5, n));
  return Prediction{eps, std::pow(5.0, n) * l0, std::pow(3.0, n)};
}

inline Prediction predict(const SkConstants& consts, double eps0, double l0,
                          int n) {
  return predict_with_c(consts.c_approx, eps0, l0, n);
}

/// Smallest depth whose predicted accuracy beats eps_target, by the
/// ceiling formula in the theoretical regime ε₀ c² < 1.
inline int choose_depth(double eps_target, double eps0,
                        const SkConstants& consts) {
  if (!(eps_target > 0.0)) throw UsageError("choose_depth: eps must be positive");
  const double c2 = consts.c_approx * consts.c_approx;
  if (eps0 * c2 >= 1.0) {
    std::ostringstream os;
    os << "choose_depth: eps0 = " << eps0
       << " is outside the theoretical regime (needs eps0 < 1/c_approx^2 = "
       << 1.0 / c2 << "); use calibrated mode";
    throw PreconditionError(os.str());
  }
  const double ratio =
      std::log(1.0 / (eps_target * c2)) / std::log(1.0 / (eps0 * c2));
  if (ratio <= 1.0) return 0;
  const int n = static_cast<int>(std::ceil(std::log(ratio) / std::log(1.5)));
  if (n > consts.depth_cap) {
    std::ostringstream os;
    os << "choose_depth: depth " << n << " exceeds the cap of "
       << consts.depth_cap << " for eps = " << eps_target;
    throw PreconditionError(os.str());
  }
  return n < 0 ? 0 : n;
}

struct CompileReport {
  int depth = 0;
  double predicted_eps = 0.0;
  double measured_eps = 0.0;
  std::uint64_t raw_length = 0;
  std::uint64_t simplified_length = 0;
  GateSequence sequence;  // simplified
  std::size_t basic_evaluations = 0;
  std::vector<double> level_seconds;
  double fitted_c = 0.0;  // 0 when no probe fit was made
};

/// Fits the level-to-level contraction c from probe compiles on the given
/// net: the median of ε_n / ε_{n-1}^{3/2} over seeded Haar probes.
inline double fit_contraction(const BasicNet& net, const SkConstants& consts,
                              Eps0Mode mode, std::uint64_t seed,
                              int probes = 3, int max_level = 3) {
  Rng rng(seed);
  std::vector<double> ratios;
  for (int p = 0; p < probes; ++p) {
    const Unitary target = haar_su(rng, net.dim());
    double prev = -1.0;
    for (int n = 0; n <= max_level; ++n) {
      const auto node = solovay_kitaev(target, n, net, consts, mode);
      const double eps =
          op_norm(node->unitary - target.matrix());
      if (n > 0 && prev > 1e-8 && prev < 0.9) {
        ratios.push_back(eps / std::pow(prev, 1.5));
      }
      prev = eps;
      if (eps < 1e-8) break;
    }
  }
  if (ratios.empty()) return consts.c_approx;
  std::sort(ratios.begin(), ratios.end());
  return ratios[ratios.size() / 2];
}

/// Smallest depth reaching eps_target according to the recurrence seeded
/// with the net's measured ε₀ and a probe-fitted contraction constant.
inline int choose_depth_calibrated(double eps_target, const BasicNet& net,
                                   const SkConstants& consts,
                                   std::uint64_t probe_seed,
                                   double* fitted_c_out = nullptr) {
  if (!(eps_target > 0.0)) throw UsageError("choose_depth: eps must be positive");
  validate_net_for_compile(net, consts, Eps0Mode::calibrated);
  const double c =
      fit_contraction(net, consts, Eps0Mode::calibrated, probe_seed);
  if (fitted_c_out != nullptr) *fitted_c_out = c;
  double eps = *net.measured_eps0();
  int n = 0;
  while (eps >= eps_target) {
    const double next = c * std::pow(eps, 1.5);
    if (next >= eps || n >= consts.depth_cap) {
      std::ostringstream os;
      os << "choose_depth: eps = " << eps_target
         << " is unreachable within the depth cap of " << consts.depth_cap
         << " (fitted c = " << c << ", measured eps0 = "
         << *net.measured_eps0() << ")";
      throw PreconditionError(os.str());
    }
    eps = next;
    ++n;
  }
  return n;
}

/// End-to-end compilation of one target at a fixed depth: recursion,
/// flatten, simplify, and an independent re-evaluation of the emitted
/// sequence for the measured accuracy.
inline CompileReport compile_target(const Unitary& target, int depth,
                                    const BasicNet& net,
                                    const SkConstants& consts,
                                    Eps0Mode mode = Eps0Mode::calibrated) {
  SkStats stats;
  const CompileNodePtr node =
      solovay_kitaev(target, depth, net, consts, mode, &stats);
  CompileReport report;
  report.depth = depth;
  report.raw_length = raw_length(*node, net);
  report.sequence = flatten(*node, net, /*simplify_output=*/true);
  report.simplified_length = report.sequence.length();
  const Unitary achieved = evaluate(report.sequence, net.set());
  report.measured_eps = op_norm_distance(target, achieved);
  report.predicted_eps =
      predict(consts, *net.measured_eps0(), static_cast<double>(net.l0()), depth)
          .eps;
  report.basic_evaluations = stats.basic_evaluations;
  report.level_seconds = std::move(stats.level_seconds);
  return report;
}

}  // namespace skc
